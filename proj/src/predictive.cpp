#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "embtk/trainers.hpp"
#include "train_internal.hpp"

namespace embtk {

namespace {

enum class PredKind { cbow, sg, cwindow, ssg };

struct Setup {
    PredKind kind;
    bool subword;
    Algorithm tag;
};

void validate(const IdSentences& sentences, const Vocabulary& vocab,
              const TrainingConfig& cfg, bool subword) {
    if (vocab.size() == 0) throw std::invalid_argument("empty vocabulary");
    if (cfg.dim <= 0) throw std::invalid_argument("dim must be positive");
    if (cfg.window < 1) throw std::invalid_argument("window must be >= 1");
    if (cfg.negatives < 1 || cfg.negatives > 64)
        throw std::invalid_argument("negatives must be in [1, 64]");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cfg.initial_lr <= 0) throw std::invalid_argument("initial_lr must be positive");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (subword) {
        if (cfg.minn < 1 || cfg.maxn < cfg.minn)
            throw std::invalid_argument("require 1 <= minn <= maxn");
        if (cfg.n_buckets < 1) throw std::invalid_argument("n_buckets must be >= 1");
    }
    if (detail::count_tokens(sentences) == 0)
        throw std::invalid_argument("empty sentence stream");
    detail::check_ids(sentences, vocab.size());
}

// Shared worker state: one per thread, persistent across epochs.
struct WorkerState {
    Rng rng;
    std::vector<std::int32_t> sent;      // subsampled working sentence
    std::vector<real> rep;               // composed center/mean representation
    std::vector<real> grad;              // dLoss/dRep from the step
    std::vector<ContextSlot> slots;      // cwindow context
    std::vector<std::int32_t> ctx;       // cbow context ids
    double loss = 0;
    std::int64_t steps = 0;
};

class PredictiveTrainer {
  public:
    PredictiveTrainer(const IdSentences& sentences, const Vocabulary& vocab,
                      const TrainingConfig& cfg, Setup setup)
        : sentences_(sentences), vocab_(vocab), cfg_(cfg), setup_(setup),
          table_(vocab) {
        Rng init_rng(cfg.seed);
        input_ = Matrix(vocab.size(), cfg.dim);
        detail::init_uniform(input_, -0.5 / cfg.dim, 0.5 / cfg.dim, init_rng);
        int slots = (setup.kind == PredKind::cwindow || setup.kind == PredKind::ssg)
                        ? 2 * cfg.window
                        : 1;
        outputs_ = make_output_parameters(slots, vocab.size(), cfg.dim);
        if (setup.subword) {
            subword_.index = SubwordIndex{cfg.minn, cfg.maxn, cfg.n_buckets};
            subword_.buckets = Matrix(cfg.n_buckets, cfg.dim);
            detail::init_uniform(subword_.buckets, -0.5 / cfg.dim, 0.5 / cfg.dim,
                                 init_rng);
            ngrams_.resize(vocab.size());
            for (std::int32_t id = 0; id < vocab.size(); ++id)
                ngrams_[id] = extract_ngrams(vocab.token(id), subword_.index);
        }
        if (cfg.subsample) keep_ = detail::subsample_keep_probs(vocab, *cfg.subsample);
        total_tokens_ = detail::count_tokens(sentences);
        total_updates_ = total_tokens_ * std::max(cfg.epochs, 1);
    }

    EmbeddingModel run(TrainReport* report) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<WorkerState> states;
        for (int w = 0; w < cfg_.workers; ++w)
            states.push_back(WorkerState{Rng(detail::mix_seed(cfg_.seed, w)),
                                         {},
                                         std::vector<real>(cfg_.dim),
                                         std::vector<real>(cfg_.dim),
                                         {},
                                         {},
                                         0,
                                         0});
        auto ranges = detail::split_ranges(sentences_.size(), cfg_.workers);

        std::vector<real> epoch_losses;
        for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
            auto e0 = std::chrono::steady_clock::now();
            for (auto& s : states) {
                s.loss = 0;
                s.steps = 0;
            }
            if (cfg_.workers == 1) {
                run_range(states[0], ranges[0].first, ranges[0].second);
            } else {
                std::vector<std::thread> threads;
                for (int w = 0; w < cfg_.workers; ++w)
                    threads.emplace_back([this, &states, &ranges, w] {
                        run_range(states[w], ranges[w].first, ranges[w].second);
                    });
                for (auto& t : threads) t.join();
            }
            double loss = 0;
            std::int64_t steps = 0;
            for (const auto& s : states) {
                loss += s.loss;
                steps += s.steps;
            }
            epoch_losses.push_back(steps > 0 ? loss / static_cast<double>(steps) : 0.0);
            if (cfg_.verbose) {
                double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - e0)
                        .count();
                std::fprintf(stderr,
                             "epoch %d/%d loss=%.4f lr=%.5f tokens/sec=%.0f\n",
                             epoch + 1, cfg_.epochs, epoch_losses.back(),
                             detail::decayed_lr(cfg_.initial_lr, progress_.load(),
                                                total_updates_),
                             total_tokens_ / std::max(secs, 1e-9));
            }
        }

        detail::check_finite(input_, "input vectors");
        for (const auto& m : outputs_.position) detail::check_finite(m, "output vectors");
        if (setup_.subword) detail::check_finite(subword_.buckets, "subword buckets");

        if (report) {
            report->epoch_losses = std::move(epoch_losses);
            report->total_tokens = total_tokens_;
            report->seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
        }

        EmbeddingModel model;
        model.vocab = vocab_;
        model.dim = cfg_.dim;
        model.algorithm = setup_.tag;
        model.input = std::move(input_);
        if (setup_.subword) model.subword = std::move(subword_);
        return model;
    }

  private:
    void compose(std::int32_t id, std::vector<real>& rep) const {
        auto row = input_.row(id);
        std::copy(row.begin(), row.end(), rep.begin());
        for (std::int32_t b : ngrams_[id]) axpy(1.0, subword_.buckets.row(b), rep);
    }

    // Applies -lr * grad to the word row and, for subword models, to every
    // n-gram bucket row of the word, scaled by `scale`.
    void distribute(std::int32_t id, std::span<const real> grad, real lr, real scale) {
        axpy(-lr * scale, grad, input_.row(id));
        if (setup_.subword)
            for (std::int32_t b : ngrams_[id])
                axpy(-lr * scale, grad, subword_.buckets.row(b));
    }

    void run_range(WorkerState& ws, std::size_t begin, std::size_t end) {
        const int k = cfg_.negatives;
        const int window = cfg_.window;
        for (std::size_t si = begin; si < end; ++si) {
            const auto& raw = sentences_[si];
            real lr = detail::decayed_lr(cfg_.initial_lr,
                                         progress_.load(std::memory_order_relaxed),
                                         total_updates_);
            const std::vector<std::int32_t>* sent = &raw;
            if (!keep_.empty()) {
                ws.sent.clear();
                for (std::int32_t id : raw)
                    if (keep_[id] >= 1.0 || ws.rng.uniform() < keep_[id])
                        ws.sent.push_back(id);
                sent = &ws.sent;
            }
            const auto& s = *sent;
            const int n = static_cast<int>(s.size());
            for (int t = 0; t < n; ++t) {
                int b = cfg_.dynamic_window ? 1 + ws.rng.uniform_int(window) : window;
                switch (setup_.kind) {
                    case PredKind::sg:
                    case PredKind::ssg: {
                        for (int d = -b; d <= b; ++d) {
                            if (d == 0) continue;
                            int p = t + d;
                            if (p < 0 || p >= n) continue;
                            Matrix& out =
                                setup_.kind == PredKind::ssg
                                    ? outputs_.position[position_slot(d, window)]
                                    : outputs_.position[0];
                            if (setup_.subword) {
                                compose(s[t], ws.rep);
                                ws.loss += sgns_step(ws.rep, out, s[p], table_, k, lr,
                                                     ws.rng, ws.grad);
                                distribute(s[t], ws.grad, lr, 1.0);
                            } else {
                                ws.loss += sgns_step(input_.row(s[t]), out, s[p], table_,
                                                     k, lr, ws.rng, ws.grad);
                            }
                            ++ws.steps;
                        }
                        break;
                    }
                    case PredKind::cbow: {
                        ws.ctx.clear();
                        for (int d = -b; d <= b; ++d) {
                            if (d == 0) continue;
                            int p = t + d;
                            if (p >= 0 && p < n) ws.ctx.push_back(s[p]);
                        }
                        if (ws.ctx.empty()) break;
                        std::fill(ws.rep.begin(), ws.rep.end(), 0.0);
                        if (setup_.subword) {
                            std::vector<real>& tmp = ws.grad;  // reuse as scratch
                            for (std::int32_t c : ws.ctx) {
                                compose(c, tmp);
                                axpy(1.0, tmp, ws.rep);
                            }
                        } else {
                            for (std::int32_t c : ws.ctx) axpy(1.0, input_.row(c), ws.rep);
                        }
                        real inv = 1.0 / static_cast<real>(ws.ctx.size());
                        for (auto& v : ws.rep) v *= inv;
                        ws.loss += sgns_step(ws.rep, outputs_.position[0], s[t], table_, k,
                                             lr, ws.rng, ws.grad);
                        for (std::int32_t c : ws.ctx) distribute(c, ws.grad, lr, inv);
                        ++ws.steps;
                        break;
                    }
                    case PredKind::cwindow: {
                        ws.slots.clear();
                        for (int d = -b; d <= b; ++d) {
                            if (d == 0) continue;
                            int p = t + d;
                            if (p >= 0 && p < n)
                                ws.slots.push_back({position_slot(d, window), s[p]});
                        }
                        if (ws.slots.empty()) break;
                        std::int32_t negs[64];
                        int nn = 0;
                        for (int i = 0; i < k; ++i) {
                            for (int attempt = 0; attempt < 10; ++attempt) {
                                std::int32_t cand = table_.sample(ws.rng);
                                if (cand != s[t]) {
                                    negs[nn++] = cand;
                                    break;
                                }
                            }
                        }
                        ws.loss += cwindow_step_fixed(
                            input_, outputs_, ws.slots, s[t],
                            {negs, static_cast<std::size_t>(nn)}, lr);
                        ++ws.steps;
                        break;
                    }
                }
            }
            progress_.fetch_add(static_cast<std::int64_t>(raw.size()),
                                std::memory_order_relaxed);
        }
    }

    const IdSentences& sentences_;
    const Vocabulary& vocab_;
    const TrainingConfig& cfg_;
    Setup setup_;
    SamplingTable table_;
    Matrix input_;
    OutputParameters outputs_;
    SubwordStore subword_;
    std::vector<std::vector<std::int32_t>> ngrams_;
    std::vector<double> keep_;
    std::int64_t total_tokens_ = 0;
    std::int64_t total_updates_ = 0;
    std::atomic<std::int64_t> progress_{0};
};

EmbeddingModel run_predictive(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, Setup setup,
                              TrainReport* report) {
    validate(sentences, vocab, cfg, setup.subword);
    PredictiveTrainer trainer(sentences, vocab, cfg, setup);
    return trainer.run(report);
}

}  // namespace

EmbeddingModel train_word2vec(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, PredictiveMode mode,
                              TrainReport* report) {
    Setup setup{mode == PredictiveMode::cbow ? PredKind::cbow : PredKind::sg, false,
                mode == PredictiveMode::cbow ? Algorithm::word2vec_cbow
                                             : Algorithm::word2vec_sg};
    return run_predictive(sentences, vocab, cfg, setup, report);
}

EmbeddingModel train_wang2vec(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, WangMode mode,
                              TrainReport* report) {
    Setup setup{mode == WangMode::cwindow ? PredKind::cwindow : PredKind::ssg, false,
                mode == WangMode::cwindow ? Algorithm::wang2vec_cwindow
                                          : Algorithm::wang2vec_ssg};
    return run_predictive(sentences, vocab, cfg, setup, report);
}

EmbeddingModel train_fasttext(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, PredictiveMode mode,
                              TrainReport* report) {
    Setup setup{mode == PredictiveMode::cbow ? PredKind::cbow : PredKind::sg, true,
                mode == PredictiveMode::cbow ? Algorithm::fasttext_cbow
                                             : Algorithm::fasttext_sg};
    return run_predictive(sentences, vocab, cfg, setup, report);
}

}  // namespace embtk
