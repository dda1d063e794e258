#pragma once

#include <cstdint>
#include <vector>

#include "embtk/cooccurrence.hpp"
#include "embtk/matrix.hpp"
#include "embtk/model.hpp"
#include "embtk/rng.hpp"
#include "embtk/trainers.hpp"

namespace embtk {

struct GloveParameters {
    Matrix w, wc;              // word and context vectors, |vocab| x dim
    std::vector<real> b, bc;   // word and context biases
    Matrix gw, gwc;            // AdaGrad accumulators
    std::vector<real> gb, gbc;
};

GloveParameters init_glove_parameters(std::int32_t vocab_size, std::int32_t dim, Rng& rng);

// (x / x_max)^alpha below x_max, 1 otherwise.
real glove_weight(real x, real x_max, real alpha);

real glove_record_residual(const GloveParameters& p, const CoocRecord& r);

// f(x) * (w_i . wc_j + b_i + bc_j - log x)^2
real glove_record_loss(const GloveParameters& p, const CoocRecord& r, real x_max,
                       real alpha);

// One AdaGrad step on glove_record_loss; divides by the accumulator before
// adding the squared gradient to it. Returns the pre-step loss.
real glove_record_step(GloveParameters& p, const CoocRecord& r, real lr, real x_max,
                       real alpha);

EmbeddingModel train_glove(const std::vector<CoocRecord>& records, const Vocabulary& vocab,
                           const TrainingConfig& cfg, TrainReport* report = nullptr);

}  // namespace embtk
