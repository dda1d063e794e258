#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "embtk/matrix.hpp"
#include "embtk/rng.hpp"
#include "embtk/trainers.hpp"
#include "embtk/vocab.hpp"

namespace embtk::detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline void init_uniform(Matrix& m, real lo, real hi, Rng& rng) {
    real* p = m.data();
    for (std::int64_t i = 0; i < m.size(); ++i) p[i] = rng.uniform(lo, hi);
}

// Linear decay from lr0 down to lr0/100 across `total` update units.
inline real decayed_lr(real lr0, std::int64_t progress, std::int64_t total) {
    if (total <= 0) return lr0;
    double frac = std::min(1.0, static_cast<double>(progress) / static_cast<double>(total));
    return lr0 * (1.0 - 0.99 * frac);
}

inline std::vector<std::pair<std::size_t, std::size_t>> split_ranges(std::size_t n,
                                                                     int workers) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t per = n / workers, rem = n % workers, begin = 0;
    for (int w = 0; w < workers; ++w) {
        std::size_t len = per + (static_cast<std::size_t>(w) < rem ? 1 : 0);
        out.emplace_back(begin, begin + len);
        begin += len;
    }
    return out;
}

template <class T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.uniform_int(static_cast<int>(i))]);
}

inline std::int64_t count_tokens(const IdSentences& sentences) {
    std::int64_t n = 0;
    for (const auto& s : sentences) n += static_cast<std::int64_t>(s.size());
    return n;
}

inline void check_ids(const IdSentences& sentences, std::int32_t vocab_size) {
    for (const auto& s : sentences)
        for (std::int32_t id : s)
            if (id < 0 || id >= vocab_size)
                throw std::invalid_argument("token id out of vocabulary range");
}

inline void check_finite(const Matrix& m, const char* what) {
    if (!m.all_finite())
        throw std::runtime_error(std::string("training diverged: non-finite values in ") +
                                 what);
}

inline std::vector<double> subsample_keep_probs(const Vocabulary& vocab, real threshold) {
    std::vector<double> keep(vocab.size(), 1.0);
    double total = static_cast<double>(vocab.total_count());
    if (total <= 0) return keep;
    for (std::int32_t id = 0; id < vocab.size(); ++id) {
        if (vocab.counts[id] <= 0) continue;
        double f = static_cast<double>(vocab.counts[id]) / total;
        keep[id] = std::min(1.0, std::sqrt(threshold / f) + threshold / f);
    }
    return keep;
}

}  // namespace embtk::detail
