#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowshop/baselines.hpp"
#include "flowshop/rl.hpp"
#include "flowshop/taillard.hpp"

namespace flowshop {

struct BenchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> methods = {"offline_train", "offline_frozen", "online",
                                                     "standard_ga",   "neh",            "cds"};
    return methods;
}

inline bool method_is_deterministic(const std::string& method) {
    return method == "neh" || method == "cds";
}

// Per-class defaults: training budgets and test budgets with the standard GA
// settings used for comparison runs.
inline GaBudget default_train_budget(const std::string& cls) {
    if (cls == "20_5") return {50, 100, 50};
    if (cls == "50_10") return {100, 200, 100};
    if (cls == "100_10") return {200, 300, 200};
    throw BenchError("no training defaults for class '" + cls + "'");
}

inline GaBudget default_test_budget(const std::string& cls) {
    if (cls == "20_5") return {3, 50, 30};
    if (cls == "50_10") return {5, 75, 100};
    if (cls == "100_10") return {8, 100, 120};
    throw BenchError("no test defaults for class '" + cls + "'");
}

inline GaBudget default_standard_ga_budget(const std::string& cls) {
    if (cls == "20_5") return {1, 50, 30};
    if (cls == "50_10") return {1, 100, 100};
    if (cls == "100_10") return {1, 200, 200};
    throw BenchError("no standard GA defaults for class '" + cls + "'");
}

struct ExperimentConfig {
    std::vector<std::string> instance_paths;
    std::vector<int> instance_indices; // 1-based blocks within each file; empty = all
    std::vector<std::string> methods;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, GaBudget> budgets;
    RlParams rl;
    std::string output_dir = "results";
    std::string model_path; // read by offline_frozen; written by offline_train cells
};

inline GaBudget budget_for(const ExperimentConfig& cfg, const std::string& method) {
    if (const auto it = cfg.budgets.find(method); it != cfg.budgets.end()) return it->second;
    if (method == "standard_ga") return default_standard_ga_budget("20_5");
    if (method == "offline_train") return default_train_budget("20_5");
    return default_test_budget("20_5");
}

inline void check_config(const ExperimentConfig& cfg) {
    if (cfg.instance_paths.empty()) throw BenchError("config needs at least one instance path");
    if (cfg.methods.empty()) throw BenchError("config needs a non-empty method list");
    bool any_stochastic = false;
    for (const auto& method : cfg.methods) {
        bool known = false;
        for (const auto& name : known_methods()) known |= name == method;
        if (!known) throw BenchError("unknown method '" + method + "'");
        any_stochastic |= !method_is_deterministic(method);
        if (!method_is_deterministic(method)) {
            const auto budget = budget_for(cfg, method);
            if (budget.episodes < 1 || budget.iterations < 1 || budget.population < 2)
                throw BenchError("invalid budget for method '" + method + "'");
        }
    }
    if (any_stochastic && cfg.seeds.empty())
        throw BenchError("stochastic methods require a non-empty seed list");
    for (const auto& method : cfg.methods)
        if (method == "offline_frozen" && cfg.model_path.empty())
            throw BenchError("offline_frozen requires a model path");
    check_rl_params(cfg.rl);
}

// Instance paths that do not resolve as given are retried under the directory
// named by the FLOWSHOP_DATA_DIR environment variable.
inline std::string resolve_data_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* data_dir = std::getenv("FLOWSHOP_DATA_DIR")) {
        const fs::path candidate = fs::path(data_dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

inline std::vector<Instance> load_instances(const std::vector<std::string>& paths,
                                            const std::vector<int>& indices) {
    namespace fs = std::filesystem;
    std::vector<Instance> instances;
    for (const auto& raw_path : paths) {
        const std::string path = resolve_data_path(raw_path);
        std::ifstream in(path);
        if (!in) throw BenchError("cannot read instance file: " + raw_path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string stem = fs::path(path).stem().string();
        auto parsed = parse_taillard(buffer.str(), stem);
        if (indices.empty()) {
            for (auto& inst : parsed) instances.push_back(std::move(inst));
        } else {
            for (int index : indices) {
                if (index < 1 || index > static_cast<int>(parsed.size()))
                    throw BenchError("instance index " + std::to_string(index) +
                                     " out of range for file " + raw_path);
                instances.push_back(parsed[index - 1]);
            }
        }
    }
    return instances;
}

struct RunRecord {
    std::string instance_id;
    std::string method;
    std::uint64_t seed = 0;
    Duration best_makespan = 0;
    Permutation best_perm;
    double time_s = 0.0;
    long generations = 0;
    std::vector<Duration> trace; // per-generation best, when the method has one
};

namespace detail {

struct CellResult {
    Individual best;
    long generations = 0;
    std::vector<Duration> trace;
};

inline CellResult run_cell(const ExperimentConfig& cfg, const Instance& inst,
                           const std::string& method, std::uint64_t seed,
                           const QNetwork* frozen_net) {
    CellResult cell;
    if (method == "neh") {
        const auto perm = neh(inst);
        cell.best = {perm, makespan(inst, perm)};
    } else if (method == "cds") {
        const auto perm = cds(inst);
        cell.best = {perm, makespan(inst, perm)};
    } else if (method == "standard_ga") {
        const auto budget = budget_for(cfg, method);
        Rng rng(seed);
        auto result = standard_ga(inst, budget.population, budget.iterations, rng);
        cell.best = std::move(result.best);
        cell.generations = budget.iterations;
        cell.trace = std::move(result.trace);
    } else if (method == "online") {
        const auto budget = budget_for(cfg, method);
        Rng rng(seed);
        auto result = run_online(inst, budget, cfg.rl, rng);
        cell.best = std::move(result.best);
        cell.generations = static_cast<long>(budget.episodes) * budget.iterations;
        for (const auto& rec : result.history) cell.trace.push_back(rec.best_fitness);
    } else if (method == "offline_frozen") {
        const auto budget = budget_for(cfg, method);
        Rng rng(seed);
        auto result = run_frozen(*frozen_net, inst, budget, rng);
        cell.best = std::move(result.best);
        cell.generations = static_cast<long>(budget.episodes) * budget.iterations;
        for (const auto& rec : result.history) cell.trace.push_back(rec.best_fitness);
    } else if (method == "offline_train") {
        const auto budget = budget_for(cfg, method);
        Rng rng(seed);
        auto result = train_offline({inst}, budget, cfg.rl, rng);
        cell.best = std::move(result.best);
        cell.generations = static_cast<long>(budget.episodes) * budget.iterations;
        if (!cfg.output_dir.empty()) {
            std::filesystem::create_directories(cfg.output_dir);
            save_model(result.net, cfg.output_dir + "/model_" + inst.id + "_seed" +
                                       std::to_string(seed) + ".qnet");
        }
    } else {
        throw BenchError("unknown method '" + method + "'");
    }
    return cell;
}

} // namespace detail

// Executes every (instance x method x seed) cell, fail-fast, each record
// re-verified against the emitted permutation before it is returned.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    check_config(cfg);
    const auto instances = load_instances(cfg.instance_paths, cfg.instance_indices);
    if (instances.empty()) throw BenchError("no instances selected");

    QNetwork frozen_net;
    bool have_frozen = false;
    for (const auto& method : cfg.methods) {
        if (method == "offline_frozen" && !have_frozen) {
            frozen_net = load_model(resolve_data_path(cfg.model_path));
            have_frozen = true;
        }
    }

    std::vector<RunRecord> records;
    for (const auto& inst : instances) {
        for (const auto& method : cfg.methods) {
            const std::vector<std::uint64_t> seeds =
                method_is_deterministic(method) ? std::vector<std::uint64_t>{0} : cfg.seeds;
            for (const auto seed : seeds) {
                const auto started = std::chrono::steady_clock::now();
                auto cell = detail::run_cell(cfg, inst, method, seed,
                                             have_frozen ? &frozen_net : nullptr);
                const std::chrono::duration<double> elapsed =
                    std::chrono::steady_clock::now() - started;

                RunRecord record;
                record.instance_id = inst.id;
                record.method = method;
                record.seed = seed;
                record.best_makespan = cell.best.fitness;
                record.best_perm = std::move(cell.best.perm);
                record.time_s = elapsed.count();
                record.generations = cell.generations;
                record.trace = std::move(cell.trace);
                if (makespan(inst, record.best_perm) != record.best_makespan)
                    throw BenchError("internal verification failed for " + inst.id + "/" + method);
                records.push_back(std::move(record));
            }
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Results emission: a raw per-run CSV, an aggregate summary per
// (instance, method), and a sidecar with the best permutations so every
// reported number can be independently re-evaluated.

namespace detail {

inline std::string format_time(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", seconds);
    return buf;
}

} // namespace detail

struct ResultPaths {
    std::string runs_csv;
    std::string summary_csv;
    std::string permutations_csv;
};

inline ResultPaths emit_results(const std::vector<RunRecord>& records, const std::string& dir) {
    if (records.empty()) throw BenchError("emit_results needs at least one record");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);

    ResultPaths paths{dir + "/runs.csv", dir + "/summary.csv", dir + "/permutations.csv"};

    std::ofstream runs(paths.runs_csv);
    if (!runs) throw BenchError("cannot write " + paths.runs_csv);
    runs << "instance,method,seed,best_makespan,time_s,generations\n";
    for (const auto& r : records)
        runs << r.instance_id << "," << r.method << "," << r.seed << "," << r.best_makespan << ","
             << detail::format_time(r.time_s) << "," << r.generations << "\n";

    // aggregate per (instance, method) in first-appearance order
    std::vector<std::pair<std::string, std::string>> cells;
    std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> grouped;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.instance_id, r.method);
        if (!grouped.count(key)) cells.push_back(key);
        grouped[key].push_back(&r);
    }
    std::ofstream summary(paths.summary_csv);
    if (!summary) throw BenchError("cannot write " + paths.summary_csv);
    summary << "instance,method,runs,min_makespan,mean_makespan,max_makespan,mean_time_s\n";
    for (const auto& key : cells) {
        const auto& group = grouped[key];
        Duration min_ms = group.front()->best_makespan;
        Duration max_ms = min_ms;
        double sum_ms = 0.0, sum_time = 0.0;
        for (const auto* r : group) {
            min_ms = std::min(min_ms, r->best_makespan);
            max_ms = std::max(max_ms, r->best_makespan);
            sum_ms += static_cast<double>(r->best_makespan);
            sum_time += r->time_s;
        }
        char mean_buf[32];
        std::snprintf(mean_buf, sizeof(mean_buf), "%.2f", sum_ms / group.size());
        summary << key.first << "," << key.second << "," << group.size() << "," << min_ms << ","
                << mean_buf << "," << max_ms << "," << detail::format_time(sum_time / group.size())
                << "\n";
    }

    std::ofstream perms(paths.permutations_csv);
    if (!perms) throw BenchError("cannot write " + paths.permutations_csv);
    perms << "instance,method,seed,best_makespan,permutation\n";
    for (const auto& r : records) {
        perms << r.instance_id << "," << r.method << "," << r.seed << "," << r.best_makespan
              << ",";
        for (std::size_t i = 0; i < r.best_perm.size(); ++i)
            perms << (i ? " " : "") << r.best_perm[i];
        perms << "\n";
    }
    if (!runs || !summary || !perms) throw BenchError("failed writing results to " + dir);
    return paths;
}

// Reads back the raw runs CSV (permutations and traces live in sidecars).
inline std::vector<RunRecord> read_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BenchError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "instance,method,seed,best_makespan,time_s,generations")
        throw BenchError("unexpected runs CSV header in " + path);
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6) throw BenchError("malformed runs CSV row: " + line);
        RunRecord r;
        r.instance_id = fields[0];
        r.method = fields[1];
        r.seed = std::stoull(fields[2]);
        r.best_makespan = std::stoll(fields[3]);
        r.time_s = std::stod(fields[4]);
        r.generations = std::stol(fields[5]);
        records.push_back(std::move(r));
    }
    return records;
}

// Config file: a single JSON document; budgets keyed by method name.
inline ExperimentConfig parse_experiment_config(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw BenchError(std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.instance_paths = doc.at("instances").get<std::vector<std::string>>();
        if (doc.contains("instance_indices"))
            cfg.instance_indices = doc["instance_indices"].get<std::vector<int>>();
        cfg.methods = doc.at("methods").get<std::vector<std::string>>();
        if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
        if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("model")) cfg.model_path = doc["model"].get<std::string>();
        if (doc.contains("budgets")) {
            for (const auto& [method, val] : doc["budgets"].items()) {
                GaBudget budget;
                budget.episodes = val.value("episodes", 1);
                budget.iterations = val.value("iterations", 50);
                budget.population = val.value("population", 30);
                cfg.budgets[method] = budget;
            }
        }
        if (doc.contains("rl")) {
            const auto& rl = doc["rl"];
            cfg.rl.alpha = rl.value("alpha", cfg.rl.alpha);
            cfg.rl.gamma = rl.value("gamma", cfg.rl.gamma);
            cfg.rl.epsilon = rl.value("epsilon", cfg.rl.epsilon);
            cfg.rl.beta = rl.value("beta", cfg.rl.beta);
            cfg.rl.replay_capacity = rl.value("replay_capacity", cfg.rl.replay_capacity);
            cfg.rl.batch_size = rl.value("batch_size", cfg.rl.batch_size);
            cfg.rl.target_sync_interval =
                rl.value("target_sync_interval", cfg.rl.target_sync_interval);
            const std::string policy = rl.value("policy", std::string("epsilon_greedy"));
            if (policy == "epsilon_greedy") {
                cfg.rl.policy_mode = RlParams::Policy::EpsilonGreedy;
            } else if (policy == "softmax") {
                cfg.rl.policy_mode = RlParams::Policy::Softmax;
            } else {
                throw BenchError("unknown policy '" + policy + "'");
            }
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw BenchError(std::string("config field error: ") + e.what());
    }
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BenchError("cannot read config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str());
}

} // namespace flowshop
