#include "embtk/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "embtk/utf8.hpp"

namespace embtk {

std::vector<SentencePair> load_pairs_tsv(const std::string& path, bool lowercase) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sentence-pair file: " + path);
    std::vector<SentencePair> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fail = [&](const std::string& what) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
        };
        std::array<std::string, 4> cols;
        std::size_t start = 0;
        for (int c = 0; c < 4; ++c) {
            std::size_t tab = line.find('\t', start);
            if (c < 3 && tab == std::string::npos) fail("expected 4 tab-separated columns");
            std::size_t end = c < 3 ? tab : line.size();
            cols[c] = line.substr(start, end - start);
            start = end + 1;
        }
        SentencePair pair;
        pair.id = cols[0];
        pair.s1 = lowercase ? tokenize(utf8::lowercase(cols[1])) : tokenize(cols[1]);
        pair.s2 = lowercase ? tokenize(utf8::lowercase(cols[2])) : tokenize(cols[2]);
        char* endp = nullptr;
        pair.gold = std::strtod(cols[3].c_str(), &endp);
        if (endp == cols[3].c_str() || (endp && *endp)) fail("malformed gold score");
        if (pair.gold < 1.0 || pair.gold > 5.0) fail("gold score outside [1, 5]");
        if (pair.s1.empty() || pair.s2.empty()) fail("empty sentence");
        out.push_back(std::move(pair));
    }
    return out;
}

std::vector<real> sentence_vector(std::span<const std::string> tokens,
                                  const EmbeddingModel& model) {
    if (tokens.empty()) throw std::invalid_argument("empty token sequence");
    std::vector<real> sum(static_cast<std::size_t>(model.dim), 0.0);
    for (const auto& t : tokens) {
        std::vector<real> v = model.lookup(t);
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
    }
    return sum;
}

TfidfModel TfidfModel::fit(std::span<const SentencePair> train_pairs) {
    TfidfModel model;
    std::unordered_map<std::string, std::int64_t> df;
    std::int64_t n_docs = 0;
    auto add_doc = [&](const Sentence& s) {
        ++n_docs;
        std::unordered_map<std::string, bool> seen;
        for (const auto& t : s)
            if (seen.emplace(t, true).second) ++df[t];
    };
    for (const auto& pair : train_pairs) {
        add_doc(pair.s1);
        add_doc(pair.s2);
    }
    for (const auto& [term, count] : df)
        model.idf_[term] =
            std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0;
    return model;
}

double TfidfModel::cosine_feature(const Sentence& a, const Sentence& b) const {
    auto vectorize = [this](const Sentence& s) {
        std::unordered_map<std::string, double> tf;
        for (const auto& t : s)
            if (idf_.contains(t)) tf[t] += 1.0;
        for (auto& [term, count] : tf) count *= idf_.at(term);
        return tf;
    };
    auto va = vectorize(a);
    auto vb = vectorize(b);
    double na = 0, nb = 0, d = 0;
    for (const auto& [term, w] : va) na += w * w;
    for (const auto& [term, w] : vb) nb += w * w;
    for (const auto& [term, w] : va) {
        auto it = vb.find(term);
        if (it != vb.end()) d += w * it->second;
    }
    if (na == 0 || nb == 0) return 0.0;
    return d / (std::sqrt(na) * std::sqrt(nb));
}

RegressionModel fit_regressor(const std::vector<std::vector<real>>& features,
                              std::span<const real> gold) {
    const std::size_t n = features.size();
    if (n == 0 || n != gold.size())
        throw std::invalid_argument("feature rows and gold scores must align");
    const std::size_t p = features[0].size();
    for (const auto& row : features)
        if (row.size() != p) throw std::invalid_argument("ragged feature matrix");
    if (n <= p) throw std::invalid_argument("need more samples than features");

    // Normal equations over [1 X].
    const std::size_t m = p + 1;
    std::vector<std::vector<real>> a(m, std::vector<real>(m + 1, 0.0));
    auto design = [&](std::size_t row, std::size_t col) -> real {
        return col == 0 ? 1.0 : features[row][col - 1];
    };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) a[i][j] += design(r, i) * design(r, j);
            a[i][m] += design(r, i) * gold[r];
        }
    }

    real scale = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(a[i][j]));

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12 * std::max<real>(scale, 1.0))
            throw std::runtime_error(
                "rank-deficient feature matrix; consider removing a collinear feature");
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            real factor = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= m; ++j) a[r][j] -= factor * a[col][j];
        }
    }

    RegressionModel model;
    model.intercept = a[0][m] / a[0][0];
    model.weights.resize(p);
    for (std::size_t i = 0; i < p; ++i) model.weights[i] = a[i + 1][m] / a[i + 1][i + 1];
    return model;
}

real predict(const RegressionModel& model, std::span<const real> features) {
    if (features.size() != model.weights.size())
        throw std::invalid_argument("feature count does not match the regressor");
    real y = model.intercept;
    for (std::size_t i = 0; i < features.size(); ++i) y += model.weights[i] * features[i];
    return std::clamp(y, 1.0, 5.0);
}

real pearson(std::span<const real> y, std::span<const real> yhat) {
    if (y.size() != yhat.size() || y.size() < 2)
        throw std::invalid_argument("pearson requires two equal-length series, n >= 2");
    const double n = static_cast<double>(y.size());
    double my = 0, mh = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mh += yhat[i];
    }
    my /= n;
    mh /= n;
    double cov = 0, vy = 0, vh = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double dy = y[i] - my, dh = yhat[i] - mh;
        cov += dy * dh;
        vy += dy * dy;
        vh += dh * dh;
    }
    if (vy == 0 || vh == 0)
        throw std::invalid_argument("pearson undefined for zero-variance input");
    return cov / std::sqrt(vy * vh);
}

real mse(std::span<const real> y, std::span<const real> yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("mse requires two equal-length nonempty series");
    double acc = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = y[i] - yhat[i];
        acc += d * d;
    }
    return acc / static_cast<double>(y.size());
}

SimilarityReport evaluate_similarity(std::span<const SentencePair> train,
                                     std::span<const SentencePair> test,
                                     const EmbeddingModel& model, bool use_tfidf) {
    if (train.empty() || test.empty())
        throw std::invalid_argument("similarity evaluation needs train and test pairs");

    TfidfModel tfidf;
    if (use_tfidf) tfidf = TfidfModel::fit(train);

    auto featurize = [&](const SentencePair& pair) {
        std::vector<real> f;
        f.push_back(cosine(sentence_vector(pair.s1, model), sentence_vector(pair.s2, model)));
        if (use_tfidf) f.push_back(tfidf.cosine_feature(pair.s1, pair.s2));
        return f;
    };

    std::vector<std::vector<real>> x_train;
    std::vector<real> y_train;
    for (const auto& pair : train) {
        x_train.push_back(featurize(pair));
        y_train.push_back(pair.gold);
    }
    RegressionModel reg = fit_regressor(x_train, y_train);

    std::vector<real> y_test, y_pred;
    for (const auto& pair : test) {
        y_test.push_back(pair.gold);
        y_pred.push_back(predict(reg, featurize(pair)));
    }

    SimilarityReport report;
    report.pearson = pearson(y_test, y_pred);
    report.mse = mse(y_test, y_pred);
    report.n_train = static_cast<std::int64_t>(train.size());
    report.n_test = static_cast<std::int64_t>(test.size());
    return report;
}

}  // namespace embtk
