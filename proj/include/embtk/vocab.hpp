#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embtk/text.hpp"

namespace embtk {

// Bijective token <-> id mapping with occurrence counts. The special tokens
// UNKNOWN, URL and EMAIL are always present; build_vocabulary places them at
// ids 0..2 and the remaining types follow in (count desc, token asc) order.
struct Vocabulary {
    static constexpr std::string_view kUnknown = "UNKNOWN";
    static constexpr std::string_view kUrl = "URL";
    static constexpr std::string_view kEmail = "EMAIL";

    std::vector<std::string> id_to_token;
    std::unordered_map<std::string, std::int32_t> token_to_id;
    std::vector<std::int64_t> counts;
    std::int32_t unknown_id = -1;
    std::int32_t url_id = -1;
    std::int32_t email_id = -1;

    std::int32_t size() const { return static_cast<std::int32_t>(id_to_token.size()); }

    std::int32_t id(std::string_view token) const {
        auto it = token_to_id.find(std::string(token));
        return it == token_to_id.end() ? -1 : it->second;
    }

    std::int32_t id_or_unknown(std::string_view token) const {
        std::int32_t i = id(token);
        return i >= 0 ? i : unknown_id;
    }

    const std::string& token(std::int32_t id) const { return id_to_token[id]; }

    std::int64_t total_count() const;

    bool is_special(std::int32_t id) const {
        return id == unknown_id || id == url_id || id == email_id;
    }
};

// Incremental token counting with a deterministic final id assignment;
// mergeable so sharded counting stays reproducible.
class VocabCounter {
  public:
    void add(const Sentence& sentence);
    void add_token(std::string_view token);
    void merge(const VocabCounter& other);
    Vocabulary build(int min_count) const;

  private:
    std::unordered_map<std::string, std::int64_t> counts_;
};

Vocabulary build_vocabulary(const std::vector<Sentence>& sentences,
                            const PreprocessConfig& cfg);

// File format: one `token<TAB>count` line per type, frequency-descending with
// lexicographic tie-breaks.
void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

}  // namespace embtk
