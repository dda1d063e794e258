#include "embtk/cooccurrence.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <queue>
#include <stdexcept>

namespace embtk {

namespace {

std::uint64_t pack(std::int32_t i, std::int32_t j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
}

CoocRecord unpack(std::uint64_t key, double x) {
    return {static_cast<std::int32_t>(key >> 32),
            static_cast<std::int32_t>(key & 0xFFFFFFFFu), x};
}

std::string unique_temp_path(const std::string& dir_hint) {
    static std::atomic<std::uint64_t> seq{0};
    std::filesystem::path dir =
        dir_hint.empty() ? std::filesystem::temp_directory_path()
                         : std::filesystem::path(dir_hint);
    auto ticks = std::chrono::steady_clock::now().time_since_epoch().count();
    return (dir / ("embtk-cooc-" + std::to_string(ticks) + "-" +
                   std::to_string(seq.fetch_add(1)) + ".bin"))
        .string();
}

void write_records(std::ofstream& out, std::span<const CoocRecord> records,
                   const std::string& path) {
    char buf[16];
    for (const auto& r : records) {
        std::memcpy(buf, &r.i, 4);
        std::memcpy(buf + 4, &r.j, 4);
        std::memcpy(buf + 8, &r.x, 8);
        out.write(buf, 16);
    }
    if (!out) throw std::runtime_error("failed writing co-occurrence file: " + path);
}

bool read_record(std::ifstream& in, CoocRecord& r) {
    char buf[16];
    if (!in.read(buf, 16)) return false;
    std::memcpy(&r.i, buf, 4);
    std::memcpy(&r.j, buf + 4, 4);
    std::memcpy(&r.x, buf + 8, 8);
    return true;
}

bool key_less(const CoocRecord& a, const CoocRecord& b) {
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
}

}  // namespace

CoocAccumulator::CoocAccumulator(CoocOptions opts) : opts_(std::move(opts)) {
    if (opts_.max_records_in_memory == 0) opts_.max_records_in_memory = 1;
}

CoocAccumulator::~CoocAccumulator() {
    std::error_code ec;
    for (const auto& path : shards_) std::filesystem::remove(path, ec);
}

void CoocAccumulator::add(std::int32_t i, std::int32_t j, double w) {
    map_[pack(i, j)] += w;
    if (map_.size() >= opts_.max_records_in_memory) spill();
}

void CoocAccumulator::spill() {
    if (map_.empty()) return;
    std::vector<CoocRecord> records;
    records.reserve(map_.size());
    for (const auto& [key, x] : map_) records.push_back(unpack(key, x));
    std::sort(records.begin(), records.end(), key_less);
    std::string path = unique_temp_path(opts_.temp_dir);
    write_cooc_file(path, records);
    shards_.push_back(path);
    map_.clear();
}

std::vector<CoocRecord> CoocAccumulator::finish() {
    std::vector<CoocRecord> memory;
    memory.reserve(map_.size());
    for (const auto& [key, x] : map_) memory.push_back(unpack(key, x));
    std::sort(memory.begin(), memory.end(), key_less);
    map_.clear();

    if (shards_.empty()) return memory;

    // K-way merge of the sorted shards plus the in-memory batch.
    struct Source {
        std::ifstream file;
        std::vector<CoocRecord>::const_iterator it, end;
        bool from_memory;
        CoocRecord head;
        bool valid = false;

        bool advance() {
            if (from_memory) {
                if (it == end) return valid = false;
                head = *it++;
                return valid = true;
            }
            return valid = read_record(file, head);
        }
    };

    std::vector<Source> sources;
    sources.reserve(shards_.size() + 1);
    for (const auto& path : shards_) {
        Source s;
        s.file.open(path, std::ios::binary);
        if (!s.file) throw std::runtime_error("cannot reopen shard: " + path);
        s.from_memory = false;
        sources.push_back(std::move(s));
    }
    Source mem;
    mem.from_memory = true;
    mem.it = memory.begin();
    mem.end = memory.end();
    sources.push_back(std::move(mem));
    for (auto& s : sources) s.advance();

    auto heap_greater = [&sources](std::size_t a, std::size_t b) {
        return key_less(sources[b].head, sources[a].head);
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(heap_greater)>
        heap(heap_greater);
    for (std::size_t s = 0; s < sources.size(); ++s)
        if (sources[s].valid) heap.push(s);

    std::vector<CoocRecord> out;
    while (!heap.empty()) {
        std::size_t s = heap.top();
        heap.pop();
        CoocRecord r = sources[s].head;
        if (!out.empty() && out.back().i == r.i && out.back().j == r.j)
            out.back().x += r.x;
        else
            out.push_back(r);
        if (sources[s].advance()) heap.push(s);
    }

    std::error_code ec;
    for (const auto& path : shards_) std::filesystem::remove(path, ec);
    shards_.clear();
    return out;
}

std::vector<CoocRecord> accumulate_cooccurrences(const IdSentences& sentences, int window,
                                                 const CoocOptions& opts) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    CoocAccumulator acc(opts);
    for (const auto& s : sentences) {
        const int n = static_cast<int>(s.size());
        for (int t = 0; t < n; ++t) {
            for (int d = 1; d <= window && t + d < n; ++d) {
                double w = 1.0 / d;
                acc.add(s[t], s[t + d], w);
                acc.add(s[t + d], s[t], w);
            }
        }
    }
    return acc.finish();
}

void write_cooc_file(const std::string& path, std::span<const CoocRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_records(out, records, path);
}

std::vector<CoocRecord> read_cooc_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open co-occurrence file: " + path);
    std::vector<CoocRecord> out;
    CoocRecord r;
    while (read_record(in, r)) out.push_back(r);
    return out;
}

}  // namespace embtk
