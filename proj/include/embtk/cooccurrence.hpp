#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embtk/trainers.hpp"

namespace embtk {

struct CoocRecord {
    std::int32_t i;
    std::int32_t j;
    double x;

    bool operator==(const CoocRecord&) const = default;
};

struct CoocOptions {
    // Distinct (i, j) pairs held in memory before spilling a sorted shard.
    std::size_t max_records_in_memory = 1u << 24;
    std::string temp_dir;  // empty: the system temp directory
};

// Weighted co-occurrence counting with merge-on-overflow spilling, so corpora
// whose pair set exceeds memory still accumulate exactly.
class CoocAccumulator {
  public:
    explicit CoocAccumulator(CoocOptions opts = {});
    ~CoocAccumulator();
    CoocAccumulator(const CoocAccumulator&) = delete;
    CoocAccumulator& operator=(const CoocAccumulator&) = delete;

    void add(std::int32_t i, std::int32_t j, double w);

    // Merges memory and shards into unique records sorted by (i, j).
    std::vector<CoocRecord> finish();

  private:
    void spill();

    CoocOptions opts_;
    std::unordered_map<std::uint64_t, double> map_;
    std::vector<std::string> shards_;
};

// Symmetric window scan: every pair at distance d <= window within a sentence
// contributes weight 1/d in both directions.
std::vector<CoocRecord> accumulate_cooccurrences(const IdSentences& sentences, int window,
                                                 const CoocOptions& opts = {});

// Binary triples (i: int32, j: int32, x: float64), little-endian, (i, j)-sorted.
void write_cooc_file(const std::string& path, std::span<const CoocRecord> records);
std::vector<CoocRecord> read_cooc_file(const std::string& path);

}  // namespace embtk
