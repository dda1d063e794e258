#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "embtk/model.hpp"

namespace embtk {

struct AnalogyQuery {
    std::string a, b, c, expected;
    std::string section;
    bool semantic = false;
};

// The five semantic sections of the analogy benchmark; everything else is
// syntactic.
bool is_semantic_section(std::string_view section);

// Mikolov format: `: section-name` headers followed by 4-token lines.
std::vector<AnalogyQuery> parse_analogy_file(std::istream& in,
                                             const std::string& name = "<analogy>");
std::vector<AnalogyQuery> load_analogy_file(const std::string& path);

// 3CosAdd: argmax over the vocabulary, excluding {a, b, c}, of
// cosine(row, vec(b) - vec(a) + vec(c)). Preconditions: a, b, c in vocabulary.
std::string solve_analogy(const EmbeddingModel& model, const std::string& a,
                          const std::string& b, const std::string& c);

struct SectionStats {
    std::int64_t correct = 0;
    std::int64_t attempted = 0;
    std::int64_t skipped_oov = 0;
};

std::optional<double> accuracy(const SectionStats& s);

struct AnalogyReport {
    std::vector<std::pair<std::string, SectionStats>> sections;  // in input order
    SectionStats syntactic;
    SectionStats semantic;
    SectionStats overall;
};

// Queries with any out-of-vocabulary word (after the optional case-folding
// fallback) count as skipped rather than wrong.
AnalogyReport evaluate_analogies(const EmbeddingModel& model,
                                 const std::vector<AnalogyQuery>& queries,
                                 bool case_fold = false, int workers = 1);

void print_analogy_report(std::ostream& out, const AnalogyReport& report);

}  // namespace embtk
