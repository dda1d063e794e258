#include "embtk/model.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace embtk {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::word2vec_cbow: return "word2vec-cbow";
        case Algorithm::word2vec_sg: return "word2vec-sg";
        case Algorithm::wang2vec_cwindow: return "wang2vec-cwindow";
        case Algorithm::wang2vec_ssg: return "wang2vec-ssg";
        case Algorithm::glove: return "glove";
        case Algorithm::fasttext_cbow: return "fasttext-cbow";
        case Algorithm::fasttext_sg: return "fasttext-sg";
    }
    return "word2vec-sg";
}

std::optional<Algorithm> algorithm_from_string(std::string_view s) {
    for (Algorithm a :
         {Algorithm::word2vec_cbow, Algorithm::word2vec_sg, Algorithm::wang2vec_cwindow,
          Algorithm::wang2vec_ssg, Algorithm::glove, Algorithm::fasttext_cbow,
          Algorithm::fasttext_sg}) {
        if (to_string(a) == s) return a;
    }
    return std::nullopt;
}

void EmbeddingModel::compose_row(std::int32_t id, std::span<real> out) const {
    auto word = input.row(id);
    std::copy(word.begin(), word.end(), out.begin());
    if (subword) {
        for (std::int32_t b : extract_ngrams(vocab.token(id), subword->index))
            axpy(1.0, subword->buckets.row(b), out);
    }
}

std::vector<real> EmbeddingModel::lookup(std::string_view token) const {
    std::vector<real> out(static_cast<std::size_t>(dim), 0.0);
    std::int32_t id = vocab.id(token);
    if (id >= 0) {
        compose_row(id, out);
        return out;
    }
    if (subword) {
        for (std::int32_t b : extract_ngrams(token, subword->index))
            axpy(1.0, subword->buckets.row(b), out);
        return out;
    }
    if (vocab.unknown_id >= 0) {
        auto row = input.row(vocab.unknown_id);
        std::copy(row.begin(), row.end(), out.begin());
    }
    return out;
}

bool EmbeddingModel::valid_finite() const {
    if (dim <= 0 || input.rows() != vocab.size() || input.cols() != dim) return false;
    if (!input.all_finite()) return false;
    if (subword && !subword->buckets.all_finite()) return false;
    return true;
}

real cosine(std::span<const real> u, std::span<const real> v) {
    real nu = norm(u);
    real nv = norm(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot(u, v) / (nu * nv);
}

std::vector<Neighbor> rank_rows(const Matrix& rows, std::span<const real> query, int k,
                                const std::unordered_set<std::int32_t>& exclude) {
    std::vector<Neighbor> scored;
    scored.reserve(rows.rows());
    for (std::int32_t id = 0; id < rows.rows(); ++id) {
        if (exclude.contains(id)) continue;
        scored.push_back({id, cosine(rows.row(id), query)});
    }
    auto better = [](const Neighbor& a, const Neighbor& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    };
    std::size_t keep = std::min<std::size_t>(scored.size(), k > 0 ? k : 0);
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), better);
    scored.resize(keep);
    return scored;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model,
                                        std::span<const real> query, int k,
                                        const std::unordered_set<std::int32_t>& exclude) {
    if (!model.has_subword()) return rank_rows(model.input, query, k, exclude);
    Matrix composed = composed_input(model);
    return rank_rows(composed, query, k, exclude);
}

Matrix composed_input(const EmbeddingModel& model) {
    Matrix out(model.vocab.size(), model.dim);
    for (std::int32_t id = 0; id < model.vocab.size(); ++id)
        model.compose_row(id, out.row(id));
    return out;
}

namespace {

void write_matrix_rows(std::ofstream& out, const Matrix& m,
                       const std::vector<std::string>* tokens) {
    char buf[64];
    std::string line;
    for (std::int32_t i = 0; i < m.rows(); ++i) {
        line.clear();
        if (tokens) line += (*tokens)[i];
        auto row = m.row(i);
        for (std::int32_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.9g", row[j]);
            if (tokens || j > 0) line += ' ';
            line += buf;
        }
        line += '\n';
        out << line;
    }
}

struct LineParser {
    const std::string& path;
    std::size_t lineno = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
    }

    // Splits on single spaces; first field optionally kept as token.
    void parse_values(const std::string& line, std::string* token, std::vector<real>& values,
                      std::size_t expected) const {
        values.clear();
        const char* p = line.c_str();
        if (token) {
            const char* sp = p;
            while (*sp && *sp != ' ') ++sp;
            if (sp == p) fail("empty token");
            token->assign(p, sp);
            p = sp;
        }
        while (*p) {
            while (*p == ' ') ++p;
            if (!*p) break;
            char* end = nullptr;
            double v = std::strtod(p, &end);
            if (end == p || (*end && *end != ' ')) fail("malformed number");
            values.push_back(v);
            p = end;
        }
        if (values.size() != expected)
            fail("expected " + std::to_string(expected) + " values, found " +
                 std::to_string(values.size()));
    }
};

void save_ngrams(const SubwordStore& store, std::int32_t dim, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << store.index.n_buckets << ' ' << dim << ' ' << store.index.minn << ' '
        << store.index.maxn << '\n';
    write_matrix_rows(out, store.buckets, nullptr);
    if (!out) throw std::runtime_error("failed writing: " + path);
}

SubwordStore load_ngrams(const std::string& path, std::int32_t expect_dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open n-gram file: " + path);
    LineParser lp{path};
    std::string line;
    if (!std::getline(in, line)) lp.fail("empty n-gram file");
    ++lp.lineno;
    std::vector<real> header;
    lp.parse_values(line, nullptr, header, 4);
    SubwordStore store;
    store.index.n_buckets = static_cast<std::int32_t>(header[0]);
    std::int32_t dim = static_cast<std::int32_t>(header[1]);
    store.index.minn = static_cast<int>(header[2]);
    store.index.maxn = static_cast<int>(header[3]);
    if (dim != expect_dim) lp.fail("n-gram dimension does not match the model");
    if (store.index.n_buckets <= 0 || store.index.minn < 1 ||
        store.index.maxn < store.index.minn)
        lp.fail("invalid n-gram header");
    store.buckets = Matrix(store.index.n_buckets, dim);
    std::vector<real> values;
    for (std::int32_t i = 0; i < store.index.n_buckets; ++i) {
        if (!std::getline(in, line)) lp.fail("unexpected end of n-gram file");
        ++lp.lineno;
        lp.parse_values(line, nullptr, values, static_cast<std::size_t>(dim));
        std::copy(values.begin(), values.end(), store.buckets.row(i).begin());
    }
    return store;
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
    out << model.vocab.size() << ' ' << model.dim << '\n';
    write_matrix_rows(out, model.input, &model.vocab.id_to_token);
    if (!out) throw std::runtime_error("failed writing model file: " + path);

    std::ofstream meta(path + ".meta");
    if (!meta) throw std::runtime_error("cannot open for writing: " + path + ".meta");
    meta << "algorithm=" << to_string(model.algorithm) << '\n';
    meta << "dim=" << model.dim << '\n';
    meta << "subword=" << (model.has_subword() ? 1 : 0) << '\n';

    if (model.has_subword()) save_ngrams(*model.subword, model.dim, path + ".ngrams");
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    LineParser lp{path};
    std::string line;
    if (!std::getline(in, line)) lp.fail("empty model file");
    ++lp.lineno;
    std::vector<real> header;
    lp.parse_values(line, nullptr, header, 2);
    auto n_words = static_cast<std::int64_t>(header[0]);
    auto dim = static_cast<std::int32_t>(header[1]);
    if (n_words < 0 || dim <= 0) lp.fail("invalid header");

    EmbeddingModel model;
    model.dim = dim;
    model.input = Matrix(static_cast<std::int32_t>(n_words), dim);
    std::string token;
    std::vector<real> values;
    for (std::int64_t i = 0; i < n_words; ++i) {
        if (!std::getline(in, line)) lp.fail("unexpected end of file");
        ++lp.lineno;
        lp.parse_values(line, &token, values, static_cast<std::size_t>(dim));
        if (!model.vocab.token_to_id
                 .emplace(token, static_cast<std::int32_t>(model.vocab.id_to_token.size()))
                 .second)
            lp.fail("duplicate token " + token);
        model.vocab.id_to_token.push_back(token);
        model.vocab.counts.push_back(0);
        std::copy(values.begin(), values.end(),
                  model.input.row(static_cast<std::int32_t>(i)).begin());
    }
    model.vocab.unknown_id = model.vocab.id(Vocabulary::kUnknown);
    model.vocab.url_id = model.vocab.id(Vocabulary::kUrl);
    model.vocab.email_id = model.vocab.id(Vocabulary::kEmail);

    std::ifstream meta(path + ".meta");
    bool want_subword = false;
    if (meta) {
        std::string m;
        while (std::getline(meta, m)) {
            if (m.rfind("algorithm=", 0) == 0) {
                if (auto a = algorithm_from_string(m.substr(10))) model.algorithm = *a;
            } else if (m == "subword=1") {
                want_subword = true;
            }
        }
    }
    if (want_subword) model.subword = load_ngrams(path + ".ngrams", dim);
    return model;
}

}  // namespace embtk
