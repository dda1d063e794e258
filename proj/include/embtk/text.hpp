#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace embtk {

// A preprocessed sentence: normalized tokens, none empty, none containing
// whitespace.
using Sentence = std::vector<std::string>;

struct PreprocessConfig {
    int min_count = 5;
    int min_sentence_tokens = 5;
    bool lowercase = false;
};

// Maps URLs to the token "URL", emails to "EMAIL", and otherwise replaces
// every decimal digit with '0'. Total and idempotent.
std::string normalize_token(std::string_view raw);

// Splits a line on whitespace, detaches punctuation marks into standalone
// tokens, keeps hyphenated words intact when every hyphen-separated segment
// is alphabetic, and normalizes every emitted token.
std::vector<std::string> tokenize(std::string_view line);

bool looks_like_url(std::string_view s);
bool looks_like_email(std::string_view s);

struct PreprocessStats {
    std::int64_t lines_in = 0;
    std::int64_t kept = 0;
    std::int64_t dropped = 0;
    std::int64_t tokens = 0;
};

// Streams `in` line by line, tokenizing and dropping sentences shorter than
// cfg.min_sentence_tokens. Kept sentences are handed to `sink`.
PreprocessStats preprocess_stream(std::istream& in, const PreprocessConfig& cfg,
                                  const std::function<void(Sentence&&)>& sink);

std::vector<Sentence> preprocess_lines(const std::vector<std::string>& lines,
                                       const PreprocessConfig& cfg);

}  // namespace embtk
