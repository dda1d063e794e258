#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "embtk/trainers.hpp"

namespace embtk {

IdSentences sentences_to_ids(const std::vector<Sentence>& sentences, const Vocabulary& vocab) {
    IdSentences out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        std::vector<std::int32_t> ids;
        ids.reserve(s.size());
        for (const auto& t : s) ids.push_back(vocab.id_or_unknown(t));
        out.push_back(std::move(ids));
    }
    return out;
}

IdSentences load_corpus_ids(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    IdSentences out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::int32_t> ids;
        std::size_t start = 0;
        while (start < line.size()) {
            std::size_t end = line.find(' ', start);
            if (end == std::string::npos) end = line.size();
            if (end > start)
                ids.push_back(vocab.id_or_unknown(
                    std::string_view(line).substr(start, end - start)));
            start = end + 1;
        }
        if (!ids.empty()) out.push_back(std::move(ids));
    }
    return out;
}

SamplingTable::SamplingTable(const Vocabulary& vocab) {
    if (vocab.size() == 0) throw std::invalid_argument("empty vocabulary");
    cdf_.resize(vocab.size());
    double acc = 0;
    for (std::int32_t id = 0; id < vocab.size(); ++id) {
        double c = static_cast<double>(std::max<std::int64_t>(vocab.counts[id], 1));
        acc += std::pow(c, 0.75);
        cdf_[id] = acc;
    }
}

std::int32_t SamplingTable::sample(Rng& rng) const {
    double u = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::int32_t>(it - cdf_.begin());
}

double SamplingTable::prob(std::int32_t id) const {
    double lo = id > 0 ? cdf_[id - 1] : 0.0;
    return (cdf_[id] - lo) / cdf_.back();
}

OutputParameters make_output_parameters(int slots, std::int32_t rows, std::int32_t dim) {
    OutputParameters out;
    out.position.reserve(slots);
    for (int s = 0; s < slots; ++s) out.position.emplace_back(rows, dim);
    return out;
}

real sigmoid(real x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    real e = std::exp(x);
    return e / (1.0 + e);
}

real softplus(real x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

real sgns_loss(std::span<const real> center, const Matrix& outputs, std::int32_t target,
               std::span<const std::int32_t> negatives) {
    real loss = softplus(-dot(center, outputs.row(target)));
    for (std::int32_t neg : negatives) loss += softplus(dot(center, outputs.row(neg)));
    return loss;
}

real sgns_step_fixed(std::span<real> center, Matrix& outputs, std::int32_t target,
                     std::span<const std::int32_t> negatives, real lr,
                     std::span<real> center_grad) {
    std::fill(center_grad.begin(), center_grad.end(), 0.0);
    real loss = 0;
    auto pair_update = [&](std::int32_t word, real label) {
        auto out = outputs.row(word);
        real s = dot(center, out);
        loss += label > 0.5 ? softplus(-s) : softplus(s);
        real g = sigmoid(s) - label;
        // Accumulate dLoss/dCenter from the pre-update output row, then step it.
        for (std::size_t d = 0; d < center.size(); ++d) {
            center_grad[d] += g * out[d];
            out[d] -= lr * g * center[d];
        }
    };
    pair_update(target, 1.0);
    for (std::int32_t neg : negatives) pair_update(neg, 0.0);
    for (std::size_t d = 0; d < center.size(); ++d) center[d] -= lr * center_grad[d];
    return loss;
}

real sgns_step(std::span<real> center, Matrix& outputs, std::int32_t target,
               const SamplingTable& table, int k, real lr, Rng& rng,
               std::span<real> center_grad) {
    std::int32_t negs[64];
    int n = 0;
    for (int i = 0; i < k; ++i) {
        std::int32_t neg = -1;
        for (int attempt = 0; attempt < 10; ++attempt) {
            std::int32_t cand = table.sample(rng);
            if (cand != target) {
                neg = cand;
                break;
            }
        }
        if (neg >= 0 && n < 64) negs[n++] = neg;
    }
    return sgns_step_fixed(center, outputs, target, {negs, static_cast<std::size_t>(n)},
                           lr, center_grad);
}

real cwindow_score(const Matrix& inputs, const OutputParameters& outputs,
                   std::span<const ContextSlot> context, std::int32_t candidate) {
    real s = 0;
    for (const auto& cs : context)
        s += dot(inputs.row(cs.word), outputs.position[cs.slot].row(candidate));
    return s;
}

real cwindow_loss(const Matrix& inputs, const OutputParameters& outputs,
                  std::span<const ContextSlot> context, std::int32_t positive,
                  std::span<const std::int32_t> negatives) {
    real loss = softplus(-cwindow_score(inputs, outputs, context, positive));
    for (std::int32_t neg : negatives)
        loss += softplus(cwindow_score(inputs, outputs, context, neg));
    return loss;
}

real cwindow_step_fixed(Matrix& inputs, OutputParameters& outputs,
                        std::span<const ContextSlot> context, std::int32_t positive,
                        std::span<const std::int32_t> negatives, real lr) {
    const std::int32_t dim = inputs.cols();
    std::vector<real> input_grads(context.size() * static_cast<std::size_t>(dim), 0.0);
    real loss = 0;
    auto candidate_update = [&](std::int32_t word, real label) {
        real s = cwindow_score(inputs, outputs, context, word);
        loss += label > 0.5 ? softplus(-s) : softplus(s);
        real g = sigmoid(s) - label;
        for (std::size_t c = 0; c < context.size(); ++c) {
            auto in_row = inputs.row(context[c].word);
            auto out_row = outputs.position[context[c].slot].row(word);
            real* igrad = input_grads.data() + c * dim;
            for (std::int32_t d = 0; d < dim; ++d) {
                igrad[d] += g * out_row[d];
                out_row[d] -= lr * g * in_row[d];
            }
        }
    };
    candidate_update(positive, 1.0);
    for (std::int32_t neg : negatives) candidate_update(neg, 0.0);
    for (std::size_t c = 0; c < context.size(); ++c) {
        auto in_row = inputs.row(context[c].word);
        const real* igrad = input_grads.data() + c * dim;
        for (std::int32_t d = 0; d < dim; ++d) in_row[d] -= lr * igrad[d];
    }
    return loss;
}

}  // namespace embtk
