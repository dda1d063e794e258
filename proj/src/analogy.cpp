#include "embtk/analogy.hpp"

#include <array>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "embtk/utf8.hpp"
#include "train_internal.hpp"

namespace embtk {

bool is_semantic_section(std::string_view section) {
    return section == "capital-common-countries" || section == "capital-world" ||
           section == "currency" || section == "city-in-state" || section == "family";
}

std::vector<AnalogyQuery> parse_analogy_file(std::istream& in, const std::string& name) {
    std::vector<AnalogyQuery> out;
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == ':') {
            std::size_t start = line.find_first_not_of(" \t", 1);
            section = start == std::string::npos ? "" : line.substr(start);
            if (section.empty())
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": empty section name");
            continue;
        }
        std::istringstream ss(line);
        std::array<std::string, 4> words;
        std::string extra;
        if (!(ss >> words[0] >> words[1] >> words[2] >> words[3]) || (ss >> extra))
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": expected 4 tokens");
        if (section.empty())
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": query before any `: section` header");
        out.push_back({words[0], words[1], words[2], words[3], section,
                       is_semantic_section(section)});
    }
    return out;
}

std::vector<AnalogyQuery> load_analogy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open analogy file: " + path);
    return parse_analogy_file(in, path);
}

namespace {

std::int32_t resolve(const Vocabulary& vocab, const std::string& token, bool case_fold) {
    std::int32_t id = vocab.id(token);
    if (id < 0 && case_fold) id = vocab.id(utf8::lowercase(token));
    return id;
}

std::int32_t solve_ids(const Matrix& rows, std::int32_t ia, std::int32_t ib,
                       std::int32_t ic, std::vector<real>& target) {
    auto va = rows.row(ia);
    auto vb = rows.row(ib);
    auto vc = rows.row(ic);
    target.resize(va.size());
    for (std::size_t d = 0; d < va.size(); ++d) target[d] = vb[d] - va[d] + vc[d];
    auto top = rank_rows(rows, target, 1, {ia, ib, ic});
    return top.empty() ? -1 : top[0].id;
}

}  // namespace

std::string solve_analogy(const EmbeddingModel& model, const std::string& a,
                          const std::string& b, const std::string& c) {
    std::int32_t ia = model.vocab.id(a);
    std::int32_t ib = model.vocab.id(b);
    std::int32_t ic = model.vocab.id(c);
    if (ia < 0 || ib < 0 || ic < 0)
        throw std::invalid_argument("solve_analogy requires in-vocabulary words");
    Matrix composed;
    const Matrix& rows =
        model.has_subword() ? (composed = composed_input(model)) : model.input;
    std::vector<real> target;
    std::int32_t best = solve_ids(rows, ia, ib, ic, target);
    return best < 0 ? std::string() : model.vocab.token(best);
}

std::optional<double> accuracy(const SectionStats& s) {
    if (s.attempted == 0) return std::nullopt;
    return static_cast<double>(s.correct) / static_cast<double>(s.attempted);
}

AnalogyReport evaluate_analogies(const EmbeddingModel& model,
                                 const std::vector<AnalogyQuery>& queries, bool case_fold,
                                 int workers) {
    if (queries.empty()) throw std::invalid_argument("empty analogy query set");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");

    Matrix composed;
    const Matrix& rows =
        model.has_subword() ? (composed = composed_input(model)) : model.input;

    enum class Outcome : unsigned char { skipped, correct, wrong };
    std::vector<Outcome> outcomes(queries.size());

    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<real> target;
        for (std::size_t q = begin; q < end; ++q) {
            const auto& query = queries[q];
            std::int32_t ia = resolve(model.vocab, query.a, case_fold);
            std::int32_t ib = resolve(model.vocab, query.b, case_fold);
            std::int32_t ic = resolve(model.vocab, query.c, case_fold);
            std::int32_t id = resolve(model.vocab, query.expected, case_fold);
            if (ia < 0 || ib < 0 || ic < 0 || id < 0) {
                outcomes[q] = Outcome::skipped;
                continue;
            }
            std::int32_t best = solve_ids(rows, ia, ib, ic, target);
            outcomes[q] = best == id ? Outcome::correct : Outcome::wrong;
        }
    };

    if (workers == 1) {
        run(0, queries.size());
    } else {
        auto ranges = detail::split_ranges(queries.size(), workers);
        std::vector<std::thread> threads;
        for (const auto& [begin, end] : ranges) threads.emplace_back(run, begin, end);
        for (auto& t : threads) t.join();
    }

    AnalogyReport report;
    std::map<std::string, std::size_t> section_index;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto& query = queries[q];
        auto [it, inserted] = section_index.try_emplace(query.section, report.sections.size());
        if (inserted) report.sections.push_back({query.section, {}});
        SectionStats& sec = report.sections[it->second].second;
        SectionStats& kind = query.semantic ? report.semantic : report.syntactic;
        if (outcomes[q] == Outcome::skipped) {
            ++sec.skipped_oov;
            ++kind.skipped_oov;
            ++report.overall.skipped_oov;
        } else {
            ++sec.attempted;
            ++kind.attempted;
            ++report.overall.attempted;
            if (outcomes[q] == Outcome::correct) {
                ++sec.correct;
                ++kind.correct;
                ++report.overall.correct;
            }
        }
    }
    return report;
}

namespace {

std::string format_accuracy(const SectionStats& s) {
    auto acc = accuracy(s);
    if (!acc) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *acc);
    return buf;
}

}  // namespace

void print_analogy_report(std::ostream& out, const AnalogyReport& report) {
    out << "section                              kind       attempted  skipped  correct  accuracy\n";
    for (const auto& [name, stats] : report.sections) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-36s %-10s %9lld %8lld %8lld  %s\n", name.c_str(),
                      is_semantic_section(name) ? "semantic" : "syntactic",
                      static_cast<long long>(stats.attempted),
                      static_cast<long long>(stats.skipped_oov),
                      static_cast<long long>(stats.correct),
                      format_accuracy(stats).c_str());
        out << buf;
    }
    for (const auto& [name, stats] : report.sections) {
        out << "section." << name << ".attempted=" << stats.attempted << '\n';
        out << "section." << name << ".skipped=" << stats.skipped_oov << '\n';
        out << "section." << name << ".correct=" << stats.correct << '\n';
        out << "section." << name << ".accuracy=" << format_accuracy(stats) << '\n';
    }
    out << "syntactic_attempted=" << report.syntactic.attempted << '\n';
    out << "syntactic_skipped=" << report.syntactic.skipped_oov << '\n';
    out << "syntactic_accuracy=" << format_accuracy(report.syntactic) << '\n';
    out << "semantic_attempted=" << report.semantic.attempted << '\n';
    out << "semantic_skipped=" << report.semantic.skipped_oov << '\n';
    out << "semantic_accuracy=" << format_accuracy(report.semantic) << '\n';
    out << "all_attempted=" << report.overall.attempted << '\n';
    out << "all_skipped=" << report.overall.skipped_oov << '\n';
    out << "all_accuracy=" << format_accuracy(report.overall) << '\n';
}

}  // namespace embtk
