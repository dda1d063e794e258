#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace embtk::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the codepoint starting at `pos` and advances `pos` past it.
// Malformed sequences decode to U+FFFD and advance by one byte.
char32_t decode(std::string_view s, std::size_t& pos);

void append(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_digit(char32_t cp);

// Letter test covering ASCII plus the Latin-1 Supplement and Latin
// Extended-A blocks, which is what the target corpora need.
bool is_alpha(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
char32_t to_lower(char32_t cp);

std::string lowercase(std::string_view s);

// Punctuation detached by the tokenizer: . , ; : ! ? ( ) " « » — …
bool is_token_punct(char32_t cp);

}  // namespace embtk::utf8
