#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embtk/matrix.hpp"
#include "embtk/model.hpp"
#include "embtk/trainers.hpp"

namespace embtk {

struct TaggedSentence {
    std::vector<std::string> tokens;
    std::vector<std::string> tags;
};

// One `token<TAB>TAG` line per token, blank line between sentences.
std::vector<TaggedSentence> load_tagged_file(const std::string& path);

struct TaggerConfig {
    int window = 5;  // full width, odd
    int hidden = 100;
    int epochs = 20;
    real initial_lr = 0.01;
    int affix_len = 3;  // suffix/prefix lengths 1..affix_len
    int cap_dim = 5;
    int affix_dim = 5;
    std::uint64_t seed = 1;
    bool finetune_embeddings = true;
    bool verbose = false;
};

// Capitalization classes: 0 all-lower, 1 initial-upper, 2 all-upper, 3 other.
int capitalization_class(std::string_view token);

// Window-based feed-forward tagger: concatenated word/capitalization/affix
// embeddings -> tanh hidden layer -> softmax over tags.
struct TaggerModel {
    TaggerConfig cfg;
    std::vector<std::string> tagset;  // sorted; argmax ties resolve to the first
    std::unordered_map<std::string, int> tag_index;

    Vocabulary vocab;
    std::int32_t word_dim = 0;
    Matrix words;  // |vocab|+1 rows; the extra row is the boundary symbol
    Matrix caps;   // 5 rows: the 4 classes plus the boundary
    std::vector<std::unordered_map<std::string, int>> suffix_index;  // per length
    std::vector<std::unordered_map<std::string, int>> prefix_index;
    std::vector<Matrix> suffixes;  // row 0 of each table = absent/unknown padding
    std::vector<Matrix> prefixes;

    Matrix w1;  // hidden x feature_dim
    std::vector<real> b1;
    Matrix w2;  // tags x hidden
    std::vector<real> b2;

    int half_window() const { return cfg.window / 2; }
    int slot_dim() const {
        return static_cast<int>(word_dim) + cfg.cap_dim + 2 * cfg.affix_len * cfg.affix_dim;
    }
    int feature_dim() const { return cfg.window * slot_dim(); }
    std::int32_t boundary_word() const { return vocab.size(); }

    // Per-slot feature row ids, window-major:
    // [word, cap, suffix_1..suffix_L, prefix_1..prefix_L] per slot.
    void feature_ids(std::span<const std::string> tokens, int i,
                     std::vector<std::int32_t>& out) const;

    std::vector<real> featurize(std::span<const std::string> tokens, int i) const;

    // Softmax tag distribution for position i.
    std::vector<real> forward(std::span<const std::string> tokens, int i) const;
};

TaggerModel train_tagger(const std::vector<TaggedSentence>& train,
                         const EmbeddingModel& embeddings, const TaggerConfig& cfg,
                         TrainReport* report = nullptr);

// Cross-entropy of the gold tag at position i, and one SGD step on it.
real tagger_loss(const TaggerModel& model, std::span<const std::string> tokens, int i,
                 int gold_tag);
real tagger_step(TaggerModel& model, std::span<const std::string> tokens, int i,
                 int gold_tag, real lr);

std::vector<std::string> tag(const TaggerModel& model,
                             std::span<const std::string> tokens);

struct TagEvalResult {
    double accuracy = 0;
    std::int64_t correct = 0;
    std::int64_t total = 0;
    std::map<std::string, std::map<std::string, std::int64_t>> confusion;  // gold -> pred
};

TagEvalResult evaluate_tagger(const TaggerModel& model,
                              const std::vector<TaggedSentence>& test);

void print_tag_report(std::ostream& out, const TagEvalResult& result);

}  // namespace embtk
