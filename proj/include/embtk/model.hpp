#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "embtk/matrix.hpp"
#include "embtk/subword.hpp"
#include "embtk/vocab.hpp"

namespace embtk {

enum class Algorithm {
    word2vec_cbow,
    word2vec_sg,
    wang2vec_cwindow,
    wang2vec_ssg,
    glove,
    fasttext_cbow,
    fasttext_sg,
};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(std::string_view s);

struct EmbeddingModel {
    Vocabulary vocab;
    std::int32_t dim = 0;
    Algorithm algorithm = Algorithm::word2vec_sg;
    Matrix input;  // |vocab| x dim
    std::optional<SubwordStore> subword;

    bool has_subword() const { return subword.has_value(); }

    // Composed representation of an in-vocabulary id: the word row, plus the
    // sum of its n-gram bucket rows for subword models.
    void compose_row(std::int32_t id, std::span<real> out) const;

    // In-vocabulary: composed row. Out of vocabulary: n-gram sum for subword
    // models, the UNKNOWN row otherwise (zeros when no UNKNOWN exists).
    std::vector<real> lookup(std::string_view token) const;

    bool valid_finite() const;
};

// Cosine similarity; zero vectors compare as 0 rather than throwing.
real cosine(std::span<const real> u, std::span<const real> v);

struct Neighbor {
    std::int32_t id;
    real score;
};

// Exhaustive ranking over the rows of `rows` by cosine to `query`,
// descending, ties broken by ascending id. Ids in `exclude` are skipped.
std::vector<Neighbor> rank_rows(const Matrix& rows, std::span<const real> query, int k,
                                const std::unordered_set<std::int32_t>& exclude);

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model,
                                        std::span<const real> query, int k,
                                        const std::unordered_set<std::int32_t>& exclude = {});

// All vocabulary rows with subword composition applied (a plain copy for
// non-subword models).
Matrix composed_input(const EmbeddingModel& model);

// word2vec text format: header "<vocab> <dim>", then "<token> <v1> ... <vdim>"
// per word, 9 significant digits. Subword models additionally write
// "<path>.ngrams" with the bucket matrix; every save writes "<path>.meta".
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

}  // namespace embtk
