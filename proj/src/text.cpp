#include "embtk/text.hpp"

#include <istream>

#include "embtk/utf8.hpp"

namespace embtk {

namespace {

bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool ascii_alnum(char c) { return ascii_alpha(c) || (c >= '0' && c <= '9'); }

bool has_prefix_nocase(std::string_view s, std::string_view prefix) {
    if (s.size() <= prefix.size()) return false;  // require content after the prefix
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char a = s[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a + 32);
        if (a != prefix[i]) return false;
    }
    return true;
}

// label(.label)+ where labels are [A-Za-z0-9-] and the last label is an
// alphabetic TLD of length >= 2.
bool is_dotted_host(std::string_view host) {
    if (host.empty()) return false;
    std::size_t label_start = 0;
    int labels = 0;
    std::string_view last;
    for (std::size_t i = 0; i <= host.size(); ++i) {
        if (i == host.size() || host[i] == '.') {
            if (i == label_start) return false;  // empty label
            last = host.substr(label_start, i - label_start);
            ++labels;
            label_start = i + 1;
        } else if (!(ascii_alnum(host[i]) || host[i] == '-')) {
            return false;
        }
    }
    if (labels < 2 || last.size() < 2) return false;
    for (char c : last)
        if (!ascii_alpha(c)) return false;
    return true;
}

}  // namespace

bool looks_like_url(std::string_view s) {
    if (has_prefix_nocase(s, "http://") || has_prefix_nocase(s, "https://")) return true;
    if (has_prefix_nocase(s, "www.")) return true;
    // domain-with-path: host must be dotted, then a '/'.
    std::size_t slash = s.find('/');
    if (slash == std::string_view::npos || slash == 0) return false;
    return is_dotted_host(s.substr(0, slash));
}

bool looks_like_email(std::string_view s) {
    std::size_t at = s.find('@');
    if (at == std::string_view::npos || at == 0) return false;
    if (s.find('@', at + 1) != std::string_view::npos) return false;
    std::string_view local = s.substr(0, at);
    for (char c : local) {
        if (!(ascii_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-'))
            return false;
    }
    return is_dotted_host(s.substr(at + 1));
}

std::string normalize_token(std::string_view raw) {
    if (looks_like_url(raw)) return "URL";
    if (looks_like_email(raw)) return "EMAIL";
    std::string out(raw);
    for (char& c : out)
        if (c >= '0' && c <= '9') c = '0';
    return out;
}

namespace {

std::string to_utf8(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) utf8::append(out, cps[i]);
    return out;
}

// True when the range contains at least one hyphen and every hyphen-separated
// segment is nonempty and alphabetic (the clitic case).
bool alphabetic_hyphenation(const std::vector<char32_t>& cps, std::size_t begin,
                            std::size_t end) {
    bool any_hyphen = false;
    std::size_t seg_len = 0;
    for (std::size_t i = begin; i < end; ++i) {
        if (cps[i] == U'-') {
            if (seg_len == 0) return false;
            any_hyphen = true;
            seg_len = 0;
        } else if (utf8::is_alpha(cps[i])) {
            ++seg_len;
        } else {
            return false;
        }
    }
    return any_hyphen && seg_len > 0;
}

void emit_chunk(const std::vector<char32_t>& cps, std::vector<std::string>& out) {
    std::size_t lo = 0, hi = cps.size();
    while (lo < hi && utf8::is_token_punct(cps[lo])) ++lo;
    while (hi > lo && utf8::is_token_punct(cps[hi - 1])) --hi;
    for (std::size_t i = 0; i < lo; ++i) out.push_back(to_utf8(cps, i, i + 1));

    if (lo < hi) {
        std::string core = to_utf8(cps, lo, hi);
        if (looks_like_url(core)) {
            out.emplace_back("URL");
        } else if (looks_like_email(core)) {
            out.emplace_back("EMAIL");
        } else if (alphabetic_hyphenation(cps, lo, hi)) {
            out.push_back(std::move(core));  // no digits present, already normalized
        } else {
            std::size_t run_start = lo;
            auto flush = [&](std::size_t end_idx) {
                if (end_idx > run_start)
                    out.push_back(normalize_token(to_utf8(cps, run_start, end_idx)));
            };
            for (std::size_t i = lo; i < hi; ++i) {
                if (utf8::is_token_punct(cps[i]) || cps[i] == U'-') {
                    flush(i);
                    out.push_back(to_utf8(cps, i, i + 1));
                    run_start = i + 1;
                }
            }
            flush(hi);
        }
    }
    for (std::size_t i = hi; i < cps.size(); ++i) out.push_back(to_utf8(cps, i, i + 1));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::vector<char32_t> chunk;
    std::size_t pos = 0;
    while (pos < line.size()) {
        char32_t cp = utf8::decode(line, pos);
        if (utf8::is_space(cp)) {
            if (!chunk.empty()) {
                emit_chunk(chunk, out);
                chunk.clear();
            }
        } else {
            chunk.push_back(cp);
        }
    }
    if (!chunk.empty()) emit_chunk(chunk, out);
    return out;
}

PreprocessStats preprocess_stream(std::istream& in, const PreprocessConfig& cfg,
                                  const std::function<void(Sentence&&)>& sink) {
    PreprocessStats stats;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++stats.lines_in;
        Sentence tokens =
            cfg.lowercase ? tokenize(utf8::lowercase(line)) : tokenize(line);
        if (static_cast<int>(tokens.size()) < cfg.min_sentence_tokens) {
            ++stats.dropped;
            continue;
        }
        ++stats.kept;
        stats.tokens += static_cast<std::int64_t>(tokens.size());
        sink(std::move(tokens));
    }
    return stats;
}

std::vector<Sentence> preprocess_lines(const std::vector<std::string>& lines,
                                       const PreprocessConfig& cfg) {
    std::vector<Sentence> out;
    for (const auto& line : lines) {
        Sentence tokens =
            cfg.lowercase ? tokenize(utf8::lowercase(line)) : tokenize(line);
        if (static_cast<int>(tokens.size()) < cfg.min_sentence_tokens) continue;
        out.push_back(std::move(tokens));
    }
    return out;
}

}  // namespace embtk
