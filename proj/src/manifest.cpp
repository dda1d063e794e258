#include "embtk/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace embtk {

void Manifest::set(std::string key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    set(std::move(key), std::string(buf));
}

std::string Manifest::to_text() const {
    std::string out;
    for (const auto& [key, value] : entries) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open manifest for writing: " + path);
    out << manifest.to_text();
    if (!out) throw std::runtime_error("failed writing manifest: " + path);
}

std::unordered_map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::unordered_map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

}  // namespace embtk
