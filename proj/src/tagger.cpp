#include "embtk/tagger.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "embtk/utf8.hpp"
#include "train_internal.hpp"

namespace embtk {

std::vector<TaggedSentence> load_tagged_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tagged file: " + path);
    std::vector<TaggedSentence> out;
    TaggedSentence current;
    std::string line;
    std::size_t lineno = 0;
    auto flush = [&] {
        if (!current.tokens.empty()) {
            out.push_back(std::move(current));
            current = {};
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected token<TAB>TAG");
        current.tokens.push_back(line.substr(0, tab));
        current.tags.push_back(line.substr(tab + 1));
    }
    flush();
    return out;
}

int capitalization_class(std::string_view token) {
    bool any_alpha = false, all_lower = true, all_upper = true, rest_lower = true;
    bool first_upper = false;
    bool first = true;
    std::size_t pos = 0;
    while (pos < token.size()) {
        char32_t cp = utf8::decode(token, pos);
        bool alpha = utf8::is_alpha(cp);
        bool upper = alpha && utf8::is_upper(cp);
        if (alpha) {
            any_alpha = true;
            if (upper)
                all_lower = false;
            else
                all_upper = false;
            if (!first && upper) rest_lower = false;
        }
        if (first) {
            first_upper = upper;
            first = false;
        }
    }
    if (!any_alpha) return 3;
    if (all_lower) return 0;
    if (all_upper) return 2;
    if (first_upper && rest_lower) return 1;
    return 3;
}

namespace {

// Last / first `len` codepoints, or empty when the token is shorter.
std::string cp_affix(std::string_view token, int len, bool suffix) {
    std::vector<std::size_t> starts;
    std::size_t pos = 0;
    while (pos < token.size()) {
        starts.push_back(pos);
        utf8::decode(token, pos);
    }
    starts.push_back(token.size());
    int n = static_cast<int>(starts.size()) - 1;
    if (n < len) return {};
    std::size_t lo = suffix ? starts[n - len] : starts[0];
    std::size_t hi = suffix ? starts[n] : starts[len];
    return std::string(token.substr(lo, hi - lo));
}

int affix_row(const std::unordered_map<std::string, int>& index, const std::string& affix) {
    if (affix.empty()) return 0;
    auto it = index.find(affix);
    return it == index.end() ? 0 : it->second;
}

}  // namespace

void TaggerModel::feature_ids(std::span<const std::string> tokens, int i,
                              std::vector<std::int32_t>& out) const {
    out.clear();
    const int h = half_window();
    const int n = static_cast<int>(tokens.size());
    for (int off = -h; off <= h; ++off) {
        int p = i + off;
        if (p < 0 || p >= n) {
            out.push_back(boundary_word());
            out.push_back(4);  // boundary capitalization row
            for (int l = 0; l < 2 * cfg.affix_len; ++l) out.push_back(0);
            continue;
        }
        const std::string& token = tokens[p];
        std::int32_t wid = vocab.id(token);
        if (wid < 0) wid = vocab.unknown_id >= 0 ? vocab.unknown_id : boundary_word();
        out.push_back(wid);
        out.push_back(capitalization_class(token));
        for (int l = 1; l <= cfg.affix_len; ++l)
            out.push_back(affix_row(suffix_index[l - 1], cp_affix(token, l, true)));
        for (int l = 1; l <= cfg.affix_len; ++l)
            out.push_back(affix_row(prefix_index[l - 1], cp_affix(token, l, false)));
    }
}

namespace {

// Appends the table rows selected by one slot of ids into x.
void gather_slot(const TaggerModel& m, const std::int32_t* ids, std::vector<real>& x) {
    auto append = [&x](std::span<const real> row) {
        x.insert(x.end(), row.begin(), row.end());
    };
    append(m.words.row(ids[0]));
    append(m.caps.row(ids[1]));
    for (int l = 0; l < m.cfg.affix_len; ++l) append(m.suffixes[l].row(ids[2 + l]));
    for (int l = 0; l < m.cfg.affix_len; ++l)
        append(m.prefixes[l].row(ids[2 + m.cfg.affix_len + l]));
}

constexpr int kIdsPerSlot = 2;  // word + cap, plus 2*affix_len affix ids

int ids_per_slot(const TaggerConfig& cfg) { return kIdsPerSlot + 2 * cfg.affix_len; }

void forward_from_ids(const TaggerModel& m, const std::vector<std::int32_t>& ids,
                      std::vector<real>& x, std::vector<real>& hidden,
                      std::vector<real>& scores) {
    x.clear();
    const int per = ids_per_slot(m.cfg);
    for (int slot = 0; slot < m.cfg.window; ++slot)
        gather_slot(m, ids.data() + static_cast<std::size_t>(slot) * per, x);

    const int nh = m.cfg.hidden;
    hidden.resize(nh);
    for (int j = 0; j < nh; ++j) hidden[j] = std::tanh(m.b1[j] + dot(m.w1.row(j), x));

    const int nt = static_cast<int>(m.tagset.size());
    scores.resize(nt);
    for (int t = 0; t < nt; ++t) scores[t] = m.b2[t] + dot(m.w2.row(t), hidden);
}

real log_sum_exp(std::span<const real> scores) {
    real mx = *std::max_element(scores.begin(), scores.end());
    real acc = 0;
    for (real s : scores) acc += std::exp(s - mx);
    return mx + std::log(acc);
}

}  // namespace

std::vector<real> TaggerModel::featurize(std::span<const std::string> tokens, int i) const {
    std::vector<std::int32_t> ids;
    feature_ids(tokens, i, ids);
    std::vector<real> x;
    x.reserve(feature_dim());
    const int per = ids_per_slot(cfg);
    for (int slot = 0; slot < cfg.window; ++slot)
        gather_slot(*this, ids.data() + static_cast<std::size_t>(slot) * per, x);
    return x;
}

std::vector<real> TaggerModel::forward(std::span<const std::string> tokens, int i) const {
    std::vector<std::int32_t> ids;
    feature_ids(tokens, i, ids);
    std::vector<real> x, hidden, scores;
    forward_from_ids(*this, ids, x, hidden, scores);
    real lse = log_sum_exp(scores);
    std::vector<real> probs(scores.size());
    for (std::size_t t = 0; t < scores.size(); ++t) probs[t] = std::exp(scores[t] - lse);
    return probs;
}

real tagger_loss(const TaggerModel& model, std::span<const std::string> tokens, int i,
                 int gold_tag) {
    std::vector<std::int32_t> ids;
    model.feature_ids(tokens, i, ids);
    std::vector<real> x, hidden, scores;
    forward_from_ids(model, ids, x, hidden, scores);
    return log_sum_exp(scores) - scores[gold_tag];
}

real tagger_step(TaggerModel& model, std::span<const std::string> tokens, int i,
                 int gold_tag, real lr) {
    std::vector<std::int32_t> ids;
    model.feature_ids(tokens, i, ids);
    std::vector<real> x, hidden, scores;
    forward_from_ids(model, ids, x, hidden, scores);

    const int nt = static_cast<int>(model.tagset.size());
    const int nh = model.cfg.hidden;
    const int nf = model.feature_dim();

    real lse = log_sum_exp(scores);
    real loss = lse - scores[gold_tag];

    std::vector<real> dscores(nt);
    for (int t = 0; t < nt; ++t) dscores[t] = std::exp(scores[t] - lse);
    dscores[gold_tag] -= 1.0;

    std::vector<real> dhidden(nh, 0.0);
    for (int t = 0; t < nt; ++t) axpy(dscores[t], model.w2.row(t), dhidden);
    for (int j = 0; j < nh; ++j) dhidden[j] *= 1.0 - hidden[j] * hidden[j];

    std::vector<real> dx(nf, 0.0);
    for (int j = 0; j < nh; ++j) axpy(dhidden[j], model.w1.row(j), dx);

    // All gradients are taken at the pre-step parameters; apply updates last.
    for (int t = 0; t < nt; ++t) {
        axpy(-lr * dscores[t], hidden, model.w2.row(t));
        model.b2[t] -= lr * dscores[t];
    }
    for (int j = 0; j < nh; ++j) {
        axpy(-lr * dhidden[j], x, model.w1.row(j));
        model.b1[j] -= lr * dhidden[j];
    }

    const int per = ids_per_slot(model.cfg);
    const int word_dim = model.word_dim;
    const int cap_dim = model.cfg.cap_dim;
    const int affix_dim = model.cfg.affix_dim;
    std::size_t off = 0;
    for (int slot = 0; slot < model.cfg.window; ++slot) {
        const std::int32_t* sid = ids.data() + static_cast<std::size_t>(slot) * per;
        std::span<const real> g(dx);
        if (model.cfg.finetune_embeddings)
            axpy(-lr, g.subspan(off, word_dim), model.words.row(sid[0]));
        off += word_dim;
        axpy(-lr, g.subspan(off, cap_dim), model.caps.row(sid[1]));
        off += cap_dim;
        for (int l = 0; l < model.cfg.affix_len; ++l) {
            axpy(-lr, g.subspan(off, affix_dim), model.suffixes[l].row(sid[2 + l]));
            off += affix_dim;
        }
        for (int l = 0; l < model.cfg.affix_len; ++l) {
            axpy(-lr, g.subspan(off, affix_dim),
                 model.prefixes[l].row(sid[2 + model.cfg.affix_len + l]));
            off += affix_dim;
        }
    }
    return loss;
}

TaggerModel train_tagger(const std::vector<TaggedSentence>& train,
                         const EmbeddingModel& embeddings, const TaggerConfig& cfg,
                         TrainReport* report) {
    if (train.empty()) throw std::invalid_argument("empty training set");
    if (cfg.window < 1 || cfg.window % 2 == 0)
        throw std::invalid_argument("window must be odd and >= 1");
    if (cfg.hidden < 1) throw std::invalid_argument("hidden must be >= 1");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cfg.initial_lr <= 0) throw std::invalid_argument("initial_lr must be positive");
    if (cfg.affix_len < 0 || cfg.cap_dim < 1 || cfg.affix_dim < 1)
        throw std::invalid_argument("invalid feature dimensions");
    if (!embeddings.valid_finite())
        throw std::invalid_argument("embedding model is empty or non-finite");
    std::int64_t total_tokens = 0;
    for (const auto& s : train) {
        if (s.tokens.empty() || s.tokens.size() != s.tags.size())
            throw std::invalid_argument("tagged sentences must align tokens and tags");
        total_tokens += static_cast<std::int64_t>(s.tokens.size());
    }

    auto t0 = std::chrono::steady_clock::now();
    TaggerModel model;
    model.cfg = cfg;
    model.vocab = embeddings.vocab;
    model.word_dim = embeddings.dim;

    std::set<std::string> tags;
    for (const auto& s : train) tags.insert(s.tags.begin(), s.tags.end());
    model.tagset.assign(tags.begin(), tags.end());
    for (std::size_t t = 0; t < model.tagset.size(); ++t)
        model.tag_index[model.tagset[t]] = static_cast<int>(t);

    Rng rng(cfg.seed);
    const std::int32_t v = model.vocab.size();
    model.words = Matrix(v + 1, model.word_dim);
    {
        Matrix composed = composed_input(embeddings);
        for (std::int32_t id = 0; id < v; ++id) {
            auto src = composed.row(id);
            std::copy(src.begin(), src.end(), model.words.row(id).begin());
        }
        auto boundary = model.words.row(v);
        for (auto& x : boundary) x = rng.uniform(-0.5 / model.word_dim, 0.5 / model.word_dim);
    }
    model.caps = Matrix(5, cfg.cap_dim);
    detail::init_uniform(model.caps, -0.5 / cfg.cap_dim, 0.5 / cfg.cap_dim, rng);

    model.suffix_index.resize(cfg.affix_len);
    model.prefix_index.resize(cfg.affix_len);
    for (int l = 1; l <= cfg.affix_len; ++l) {
        std::set<std::string> suf, pre;
        for (const auto& s : train) {
            for (const auto& token : s.tokens) {
                std::string a = cp_affix(token, l, true);
                if (!a.empty()) suf.insert(std::move(a));
                a = cp_affix(token, l, false);
                if (!a.empty()) pre.insert(std::move(a));
            }
        }
        int next = 1;
        for (const auto& a : suf) model.suffix_index[l - 1][a] = next++;
        next = 1;
        for (const auto& a : pre) model.prefix_index[l - 1][a] = next++;
        Matrix ms(static_cast<std::int32_t>(suf.size()) + 1, cfg.affix_dim);
        Matrix mp(static_cast<std::int32_t>(pre.size()) + 1, cfg.affix_dim);
        detail::init_uniform(ms, -0.5 / cfg.affix_dim, 0.5 / cfg.affix_dim, rng);
        detail::init_uniform(mp, -0.5 / cfg.affix_dim, 0.5 / cfg.affix_dim, rng);
        model.suffixes.push_back(std::move(ms));
        model.prefixes.push_back(std::move(mp));
    }

    const int nf = model.feature_dim();
    model.w1 = Matrix(cfg.hidden, nf);
    detail::init_uniform(model.w1, -1.0 / std::sqrt(nf), 1.0 / std::sqrt(nf), rng);
    model.b1.assign(cfg.hidden, 0.0);
    model.w2 = Matrix(static_cast<std::int32_t>(model.tagset.size()), cfg.hidden);
    detail::init_uniform(model.w2, -1.0 / std::sqrt(cfg.hidden), 1.0 / std::sqrt(cfg.hidden),
                         rng);
    model.b2.assign(model.tagset.size(), 0.0);

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    const std::int64_t total_steps = std::max<std::int64_t>(1, total_tokens * cfg.epochs);
    std::int64_t step = 0;
    std::vector<real> epoch_losses;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        detail::fisher_yates(order, rng);
        double loss = 0;
        for (std::size_t idx : order) {
            const auto& s = train[idx];
            for (std::size_t i = 0; i < s.tokens.size(); ++i) {
                real lr = cfg.initial_lr *
                          (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
                loss += tagger_step(model, s.tokens, static_cast<int>(i),
                                    model.tag_index.at(s.tags[i]), lr);
                ++step;
            }
        }
        epoch_losses.push_back(loss / static_cast<double>(total_tokens));
        if (cfg.verbose)
            std::fprintf(stderr, "epoch %d/%d loss=%.4f\n", epoch + 1, cfg.epochs,
                         epoch_losses.back());
    }

    detail::check_finite(model.w1, "tagger hidden layer");
    detail::check_finite(model.w2, "tagger output layer");
    detail::check_finite(model.words, "tagger word table");

    if (report) {
        report->epoch_losses = std::move(epoch_losses);
        report->total_tokens = total_tokens;
        report->seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return model;
}

std::vector<std::string> tag(const TaggerModel& model,
                             std::span<const std::string> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::vector<std::int32_t> ids;
    std::vector<real> x, hidden, scores;
    for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
        model.feature_ids(tokens, i, ids);
        forward_from_ids(model, ids, x, hidden, scores);
        int best = 0;
        for (int t = 1; t < static_cast<int>(scores.size()); ++t)
            if (scores[t] > scores[best]) best = t;
        out.push_back(model.tagset[best]);
    }
    return out;
}

TagEvalResult evaluate_tagger(const TaggerModel& model,
                              const std::vector<TaggedSentence>& test) {
    if (test.empty()) throw std::invalid_argument("empty test set");
    TagEvalResult result;
    for (const auto& s : test) {
        if (s.tokens.empty() || s.tokens.size() != s.tags.size())
            throw std::invalid_argument("tagged sentences must align tokens and tags");
        std::vector<std::string> predicted = tag(model, s.tokens);
        for (std::size_t i = 0; i < s.tags.size(); ++i) {
            ++result.total;
            if (predicted[i] == s.tags[i]) ++result.correct;
            ++result.confusion[s.tags[i]][predicted[i]];
        }
    }
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.total);
    return result;
}

void print_tag_report(std::ostream& out, const TagEvalResult& result) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "accuracy=%.6f\n", result.accuracy);
    out << buf << "correct=" << result.correct << "\ntotal=" << result.total << '\n';
    for (const auto& [gold, preds] : result.confusion) {
        std::int64_t gold_total = 0, gold_correct = 0;
        std::string top_confused;
        std::int64_t top_count = 0;
        for (const auto& [pred, count] : preds) {
            gold_total += count;
            if (pred == gold)
                gold_correct = count;
            else if (count > top_count) {
                top_count = count;
                top_confused = pred;
            }
        }
        std::snprintf(buf, sizeof(buf), "tag %-10s gold=%lld correct=%lld acc=%.4f",
                      gold.c_str(), static_cast<long long>(gold_total),
                      static_cast<long long>(gold_correct),
                      gold_total ? static_cast<double>(gold_correct) / gold_total : 0.0);
        out << buf;
        if (top_count > 0) out << " top_confusion=" << top_confused << ":" << top_count;
        out << '\n';
    }
}

}  // namespace embtk
