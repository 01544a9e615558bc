#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flowshop/pfsp.hpp"

namespace flowshop {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool parse_int(std::string_view tok, std::int64_t& value) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc{} && ptr == last;
}

struct NumericLine {
    int line_no;
    std::vector<std::int64_t> values;
};

// Lines whose first token is not an integer are banners and are skipped.
// A line that starts numeric but contains a non-integer token is corrupt.
inline std::vector<NumericLine> numeric_lines(const std::string& text) {
    std::vector<NumericLine> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        std::int64_t first_val = 0;
        if (!parse_int(toks.front(), first_val)) continue; // banner
        NumericLine nl{line_no, {}};
        nl.values.reserve(toks.size());
        for (const auto& tok : toks) {
            std::int64_t v = 0;
            if (!parse_int(tok, v))
                throw ParseError(line_no, "non-integer token '" + std::string(tok) + "'");
            nl.values.push_back(v);
        }
        out.push_back(std::move(nl));
    }
    return out;
}

} // namespace detail

// Standard Taillard flow-shop layout, possibly several blocks per file. Each
// block: a header line "n_jobs n_machines [seed [upper_bound [lower_bound]]]"
// followed by n_machines rows of n_jobs processing times. Banner lines are
// ignored. Instance ids are "<stem>_<k>" with k the 1-based block index.
struct TaillardInstance {
    Instance instance;
    std::optional<std::int64_t> time_seed; // header field, kept for re-serialization
};

inline std::vector<TaillardInstance> parse_taillard_file(const std::string& text,
                                                         const std::string& stem) {
    const auto lines = detail::numeric_lines(text);
    std::vector<TaillardInstance> result;
    std::size_t pos = 0;
    while (pos < lines.size()) {
        const auto& header = lines[pos];
        if (header.values.size() < 2 || header.values.size() > 5)
            throw ParseError(header.line_no, "malformed header: expected 2..5 integers, got " +
                                                 std::to_string(header.values.size()));
        TaillardInstance entry;
        Instance& inst = entry.instance;
        inst.n_jobs = static_cast<int>(header.values[0]);
        inst.n_machines = static_cast<int>(header.values[1]);
        if (inst.n_jobs < 1 || inst.n_machines < 1)
            throw ParseError(header.line_no, "malformed header: non-positive job/machine count");
        if (header.values.size() >= 3) entry.time_seed = header.values[2];
        if (header.values.size() >= 4) inst.upper_bound = header.values[3];
        if (header.values.size() >= 5) inst.lower_bound = header.values[4];
        ++pos;

        inst.proc_times.assign(inst.n_machines, {});
        for (int machine = 0; machine < inst.n_machines; ++machine) {
            if (pos >= lines.size())
                throw ParseError(lines.back().line_no,
                                 "unexpected end of file: expected " +
                                     std::to_string(inst.n_machines) + " machine rows");
            const auto& row = lines[pos];
            if (static_cast<int>(row.values.size()) != inst.n_jobs)
                throw ParseError(row.line_no, "row length mismatch: expected " +
                                                  std::to_string(inst.n_jobs) + " times, got " +
                                                  std::to_string(row.values.size()));
            auto& times = inst.proc_times[machine];
            times.reserve(inst.n_jobs);
            for (std::int64_t v : row.values) {
                if (v < 0) throw ParseError(row.line_no, "negative processing time");
                times.push_back(v);
            }
            ++pos;
        }
        inst.id = stem + "_" + std::to_string(result.size() + 1);
        if (inst.lower_bound && inst.upper_bound && *inst.lower_bound > *inst.upper_bound)
            throw ParseError(header.line_no, "lower bound exceeds upper bound");
        result.push_back(std::move(entry));
    }
    return result;
}

inline std::vector<Instance> parse_taillard(const std::string& text, const std::string& stem) {
    std::vector<Instance> out;
    for (auto& entry : parse_taillard_file(text, stem)) out.push_back(std::move(entry.instance));
    return out;
}

inline std::string write_taillard(const std::vector<TaillardInstance>& entries) {
    std::ostringstream out;
    for (const auto& entry : entries) {
        const Instance& inst = entry.instance;
        out << "number of jobs, number of machines, initial seed, upper bound and lower bound :\n";
        out << inst.n_jobs << " " << inst.n_machines;
        const bool has_bounds = inst.upper_bound.has_value() || inst.lower_bound.has_value();
        if (entry.time_seed || has_bounds) out << " " << entry.time_seed.value_or(0);
        if (has_bounds) out << " " << inst.upper_bound.value_or(0);
        if (inst.lower_bound) out << " " << *inst.lower_bound;
        out << "\n";
        out << "processing times :\n";
        for (const auto& row : inst.proc_times) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Benchmark generation. Taillard's instances are defined by a portable linear
// congruential generator and published per-instance time seeds, so the
// canonical files can be materialized offline.

inline int taillard_unif(std::int64_t& seed, int low, int high) {
    constexpr std::int64_t a = 16807, b = 127773, c = 2836, m = 2147483647;
    const std::int64_t k = seed / b;
    seed = a * (seed % b) - c * k;
    if (seed < 0) seed += m;
    const double u01 = static_cast<double>(seed) / static_cast<double>(m);
    return low + static_cast<int>(u01 * (high - low + 1));
}

inline Instance generate_taillard_instance(int n_jobs, int n_machines, std::int64_t time_seed,
                                           std::string id) {
    Instance inst;
    inst.id = std::move(id);
    inst.n_jobs = n_jobs;
    inst.n_machines = n_machines;
    inst.proc_times.assign(n_machines, std::vector<Duration>(n_jobs, 0));
    std::int64_t seed = time_seed;
    for (int i = 0; i < n_machines; ++i)
        for (int j = 0; j < n_jobs; ++j)
            inst.proc_times[i][j] = taillard_unif(seed, 1, 99);
    return inst;
}

struct BenchmarkClass {
    std::string name;
    int n_jobs;
    int n_machines;
    std::array<std::int64_t, 10> time_seeds;
};

// Published time seeds for the three size classes used here.
inline const std::vector<BenchmarkClass>& benchmark_classes() {
    static const std::vector<BenchmarkClass> classes = {
        {"20_5",
         20,
         5,
         {873654221, 379008056, 1866992158, 216771124, 495070989, 402959317, 1369363414,
          2021925980, 573109518, 88325120}},
        {"50_10",
         50,
         10,
         {1958948863, 575633267, 655816003, 1977864101, 93805469, 1803345551, 49612559,
          1899802599, 2013025619, 578962478}},
        {"100_10",
         100,
         10,
         {1539989115, 734334156, 361182630, 2049974760, 1525979144, 1294951957, 1988119059,
          1345754756, 1109958794, 802368084}},
    };
    return classes;
}

inline const BenchmarkClass& benchmark_class(const std::string& name) {
    for (const auto& c : benchmark_classes())
        if (c.name == name) return c;
    throw ContractError("unknown benchmark class '" + name + "'");
}

// The ten canonical instances of a class, ids "tai<class>_<k>". Published
// optimality bounds are attached where known.
inline std::vector<TaillardInstance> generate_benchmark_class(const BenchmarkClass& cls) {
    std::vector<TaillardInstance> out;
    for (int k = 0; k < 10; ++k) {
        TaillardInstance entry;
        entry.time_seed = cls.time_seeds[k];
        entry.instance = generate_taillard_instance(
            cls.n_jobs, cls.n_machines, cls.time_seeds[k],
            "tai" + cls.name + "_" + std::to_string(k + 1));
        if (cls.name == "20_5" && k == 0) {
            entry.instance.upper_bound = 1278;
            entry.instance.lower_bound = 1232;
        }
        if (cls.name == "20_5" && k == 6) {
            entry.instance.upper_bound = 1234;
            entry.instance.lower_bound = 1226;
        }
        out.push_back(std::move(entry));
    }
    return out;
}

} // namespace flowshop
