#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embtk/matrix.hpp"
#include "embtk/model.hpp"
#include "embtk/rng.hpp"
#include "embtk/vocab.hpp"

namespace embtk {

struct TrainingConfig {
    std::int32_t dim = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    real initial_lr = 0.025;
    int min_count = 5;
    std::optional<real> subsample;  // frequency threshold, e.g. 1e-5; off by default
    std::uint64_t seed = 1;
    int workers = 1;
    bool dynamic_window = true;  // per-center window size uniform in [1, window]
    // FastText.
    int minn = 3;
    int maxn = 6;
    std::int32_t n_buckets = 2000000;
    // GloVe.
    real x_max = 100.0;
    real alpha = 0.75;
    bool glove_sum_context = true;  // emit w + w~ rather than w alone
    bool verbose = false;
};

enum class PredictiveMode { cbow, sg };
enum class WangMode { cwindow, ssg };

struct TrainReport {
    std::vector<real> epoch_losses;  // mean loss per update
    std::int64_t total_tokens = 0;
    double seconds = 0;
};

using IdSentences = std::vector<std::vector<std::int32_t>>;

IdSentences sentences_to_ids(const std::vector<Sentence>& sentences, const Vocabulary& vocab);
IdSentences load_corpus_ids(const std::string& path, const Vocabulary& vocab);

// Noise distribution for negative sampling: P(id) proportional to
// max(count, 1)^0.75, so every id keeps nonzero mass.
class SamplingTable {
  public:
    explicit SamplingTable(const Vocabulary& vocab);
    std::int32_t sample(Rng& rng) const;
    double prob(std::int32_t id) const;
    std::int32_t size() const { return static_cast<std::int32_t>(cdf_.size()); }

  private:
    std::vector<double> cdf_;
};

inline SamplingTable build_sampling_table(const Vocabulary& vocab) {
    return SamplingTable(vocab);
}

// Output-side parameters: one matrix for Word2Vec/FastText, one per relative
// window position (2*window of them) for the Wang2Vec variants.
struct OutputParameters {
    std::vector<Matrix> position;

    int slots() const { return static_cast<int>(position.size()); }
    std::int64_t parameter_count() const {
        std::int64_t n = 0;
        for (const auto& m : position) n += m.size();
        return n;
    }
};

OutputParameters make_output_parameters(int slots, std::int32_t rows, std::int32_t dim);

real sigmoid(real x);
real softplus(real x);  // log(1 + e^x), stable

// Negative-sampling logistic loss of one (center, target) pair plus fixed
// negatives: -log s(center.out[target]) - sum -log s(-center.out[neg]).
real sgns_loss(std::span<const real> center, const Matrix& outputs, std::int32_t target,
               std::span<const std::int32_t> negatives);

// One SGD step on sgns_loss. Output rows and the center representation are
// updated in place; `center_grad` receives dLoss/dCenter so composite callers
// (CBOW mean, FastText n-gram sums) can distribute it. Returns the loss at
// the pre-step parameters.
real sgns_step_fixed(std::span<real> center, Matrix& outputs, std::int32_t target,
                     std::span<const std::int32_t> negatives, real lr,
                     std::span<real> center_grad);

// Draws k negatives from `table`, resampling collisions with `target` a few
// times and dropping the sample when collisions persist.
real sgns_step(std::span<real> center, Matrix& outputs, std::int32_t target,
               const SamplingTable& table, int k, real lr, Rng& rng,
               std::span<real> center_grad);

// A context word at a window slot, for the position-structured scorers.
struct ContextSlot {
    int slot;
    std::int32_t word;
};

real cwindow_score(const Matrix& inputs, const OutputParameters& outputs,
                   std::span<const ContextSlot> context, std::int32_t candidate);
real cwindow_loss(const Matrix& inputs, const OutputParameters& outputs,
                  std::span<const ContextSlot> context, std::int32_t positive,
                  std::span<const std::int32_t> negatives);
real cwindow_step_fixed(Matrix& inputs, OutputParameters& outputs,
                        std::span<const ContextSlot> context, std::int32_t positive,
                        std::span<const std::int32_t> negatives, real lr);

// Window slot of a context at signed offset d != 0, in [0, 2*window).
inline int position_slot(int d, int window) { return d < 0 ? d + window : d + window - 1; }

EmbeddingModel train_word2vec(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, PredictiveMode mode,
                              TrainReport* report = nullptr);
EmbeddingModel train_wang2vec(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, WangMode mode,
                              TrainReport* report = nullptr);
EmbeddingModel train_fasttext(const IdSentences& sentences, const Vocabulary& vocab,
                              const TrainingConfig& cfg, PredictiveMode mode,
                              TrainReport* report = nullptr);

}  // namespace embtk
