#include "embtk/subword.hpp"

#include <string>

#include "embtk/utf8.hpp"

namespace embtk {

std::uint32_t SubwordIndex::hash(std::string_view ngram) const {
    // FNV-1a, 32 bit.
    std::uint32_t h = 2166136261u;
    for (char c : ngram) {
        h ^= static_cast<std::uint32_t>(static_cast<unsigned char>(c));
        h *= 16777619u;
    }
    return h;
}

std::vector<std::int32_t> extract_ngrams(std::string_view word, const SubwordIndex& idx) {
    std::string padded = "<";
    padded += word;
    padded += ">";

    // Codepoint boundaries of the padded word.
    std::vector<std::size_t> starts;
    std::size_t pos = 0;
    while (pos < padded.size()) {
        starts.push_back(pos);
        utf8::decode(padded, pos);
    }
    starts.push_back(padded.size());
    const int n_cps = static_cast<int>(starts.size()) - 1;

    std::vector<std::int32_t> out;
    for (int len = idx.minn; len <= idx.maxn; ++len) {
        if (len == n_cps) continue;  // whole padded word is the word unit itself
        for (int start = 0; start + len <= n_cps; ++start) {
            std::string_view gram(padded.data() + starts[start],
                                  starts[start + len] - starts[start]);
            out.push_back(idx.bucket(gram));
        }
    }
    return out;
}

}  // namespace embtk
