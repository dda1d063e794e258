#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace embtk {

// Flat key=value run record; one is written next to every command output so
// single-worker runs can be replayed exactly.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(std::string key, std::string value) {
        entries.emplace_back(std::move(key), std::move(value));
    }
    void set(std::string key, std::int64_t value) {
        set(std::move(key), std::to_string(value));
    }
    void set(std::string key, double value);

    std::string to_text() const;
};

void write_manifest(const Manifest& manifest, const std::string& path);
std::unordered_map<std::string, std::string> read_manifest(const std::string& path);

}  // namespace embtk
