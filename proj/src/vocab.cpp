#include "embtk/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace embtk {

std::int64_t Vocabulary::total_count() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

void VocabCounter::add(const Sentence& sentence) {
    for (const auto& t : sentence) add_token(t);
}

void VocabCounter::add_token(std::string_view token) {
    ++counts_[std::string(token)];
}

void VocabCounter::merge(const VocabCounter& other) {
    for (const auto& [token, n] : other.counts_) counts_[token] += n;
}

namespace {

Vocabulary assemble(std::vector<std::pair<std::string, std::int64_t>> kept,
                    std::int64_t unknown_extra) {
    // Specials first, then (count desc, token asc).
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    auto push = [&](std::string token, std::int64_t count) {
        vocab.token_to_id.emplace(token, vocab.size());
        vocab.id_to_token.push_back(std::move(token));
        vocab.counts.push_back(count);
    };
    push(std::string(Vocabulary::kUnknown), unknown_extra);
    push(std::string(Vocabulary::kUrl), 0);
    push(std::string(Vocabulary::kEmail), 0);
    vocab.unknown_id = 0;
    vocab.url_id = 1;
    vocab.email_id = 2;

    for (auto& [token, count] : kept) {
        auto it = vocab.token_to_id.find(token);
        if (it != vocab.token_to_id.end()) {
            vocab.counts[it->second] += count;  // literal special occurrences
        } else {
            push(std::move(token), count);
        }
    }
    return vocab;
}

}  // namespace

Vocabulary VocabCounter::build(int min_count) const {
    std::vector<std::pair<std::string, std::int64_t>> kept;
    kept.reserve(counts_.size());
    std::int64_t unknown_occurrences = 0;
    for (const auto& [token, count] : counts_) {
        bool special = token == Vocabulary::kUnknown || token == Vocabulary::kUrl ||
                       token == Vocabulary::kEmail;
        if (count < min_count && !special) {
            unknown_occurrences += count;
        } else {
            kept.emplace_back(token, count);
        }
    }
    return assemble(std::move(kept), unknown_occurrences);
}

Vocabulary build_vocabulary(const std::vector<Sentence>& sentences,
                            const PreprocessConfig& cfg) {
    VocabCounter counter;
    for (const auto& s : sentences) counter.add(s);
    return counter.build(cfg.min_count);
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open vocabulary file for writing: " + path);
    std::vector<std::int32_t> order(vocab.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        if (vocab.counts[a] != vocab.counts[b]) return vocab.counts[a] > vocab.counts[b];
        return vocab.id_to_token[a] < vocab.id_to_token[b];
    });
    for (std::int32_t id : order)
        out << vocab.id_to_token[id] << '\t' << vocab.counts[id] << '\n';
    if (!out) throw std::runtime_error("failed writing vocabulary file: " + path);
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
    std::vector<std::pair<std::string, std::int64_t>> entries;
    std::unordered_map<std::string, bool> seen;
    std::int64_t unknown_count = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected token<TAB>count");
        std::string token = line.substr(0, tab);
        std::int64_t count;
        try {
            count = std::stoll(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed count");
        }
        if (!seen.emplace(token, true).second)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": duplicate token " + token);
        if (token == Vocabulary::kUnknown) {
            unknown_count = count;
            continue;
        }
        entries.emplace_back(std::move(token), count);
    }
    return assemble(std::move(entries), unknown_count);
}

}  // namespace embtk
