#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embtk/model.hpp"
#include "embtk/text.hpp"

namespace embtk {

struct SentencePair {
    std::string id;
    Sentence s1, s2;
    double gold = 0;  // in [1, 5]
};

// TSV: id<TAB>sentence1<TAB>sentence2<TAB>gold; sentences are tokenized with
// the corpus rules.
std::vector<SentencePair> load_pairs_tsv(const std::string& path, bool lowercase = false);

// Component-wise sum of the model lookups.
std::vector<real> sentence_vector(std::span<const std::string> tokens,
                                  const EmbeddingModel& model);

// TF = raw count, IDF = ln((1+N)/(1+df)) + 1, fitted on training sentences
// only (each sentence is one document). Terms unseen at fit time are dropped.
class TfidfModel {
  public:
    static TfidfModel fit(std::span<const SentencePair> train_pairs);

    double cosine_feature(const Sentence& a, const Sentence& b) const;

  private:
    std::unordered_map<std::string, double> idf_;
};

struct RegressionModel {
    std::vector<real> weights;
    real intercept = 0;
};

// Ordinary least squares with intercept. Requires more rows than features and
// full column rank.
RegressionModel fit_regressor(const std::vector<std::vector<real>>& features,
                              std::span<const real> gold);

// Linear prediction clipped to [1, 5].
real predict(const RegressionModel& model, std::span<const real> features);

real pearson(std::span<const real> y, std::span<const real> yhat);
real mse(std::span<const real> y, std::span<const real> yhat);

struct SimilarityReport {
    double pearson = 0;
    double mse = 0;
    std::int64_t n_train = 0;
    std::int64_t n_test = 0;
};

// Fits on the embedding-cosine feature (plus optionally the TF-IDF cosine),
// predicts the test pairs, and scores with Pearson rho and MSE.
SimilarityReport evaluate_similarity(std::span<const SentencePair> train,
                                     std::span<const SentencePair> test,
                                     const EmbeddingModel& model, bool use_tfidf);

}  // namespace embtk
