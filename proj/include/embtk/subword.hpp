#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "embtk/matrix.hpp"

namespace embtk {

// Hashed character n-gram index. N-grams are taken over codepoints of the
// boundary-padded word "<word>"; the padded whole word itself is not hashed
// (it lives in the word row).
struct SubwordIndex {
    int minn = 3;
    int maxn = 6;
    std::int32_t n_buckets = 2000000;

    std::uint32_t hash(std::string_view ngram) const;
    std::int32_t bucket(std::string_view ngram) const {
        return static_cast<std::int32_t>(hash(ngram) %
                                         static_cast<std::uint32_t>(n_buckets));
    }
};

std::vector<std::int32_t> extract_ngrams(std::string_view word, const SubwordIndex& idx);

struct SubwordStore {
    SubwordIndex index;
    Matrix buckets;  // n_buckets x dim
};

}  // namespace embtk
