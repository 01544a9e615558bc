// Command-line driver: benchmark generation, offline training, single solves,
// full experiment grids, and the deterministic baselines.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "flowshop/bench.hpp"

namespace fs = std::filesystem;
using namespace flowshop;

namespace {

std::string infer_class(const Instance& inst) {
    for (const auto& cls : benchmark_classes())
        if (cls.n_jobs == inst.n_jobs && cls.n_machines == inst.n_machines) return cls.name;
    return "";
}

void print_record(const RunRecord& r) {
    std::cout << "instance=" << r.instance_id << " method=" << r.method << " seed=" << r.seed
              << " best=" << r.best_makespan << " time_s=" << detail::format_time(r.time_s)
              << " generations=" << r.generations << "\n";
}

void write_training_log(const std::string& path, const std::vector<EpisodeStats>& episodes) {
    std::ofstream out(path);
    if (!out) throw BenchError("cannot write training log: " + path);
    out << "episode,cumulative_reward,mean_loss,best_fitness\n";
    for (const auto& e : episodes)
        out << e.episode << "," << e.cumulative_reward << "," << e.mean_loss << ","
            << e.best_fitness << "\n";
}

void add_rl_flags(CLI::App* cmd, RlParams& rl) {
    cmd->add_option("--alpha", rl.alpha, "learning rate");
    cmd->add_option("--gamma", rl.gamma, "discount factor");
    cmd->add_option("--epsilon", rl.epsilon, "exploration rate");
    cmd->add_option("--beta", rl.beta, "softmax temperature");
    cmd->add_option("--replay-capacity", rl.replay_capacity, "replay buffer capacity");
    cmd->add_option("--batch-size", rl.batch_size, "replay batch size");
    cmd->add_option("--target-sync", rl.target_sync_interval, "target network sync interval");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permutation flow shop optimizer: GA with a learned operator controller, "
                 "plus NEH/CDS baselines and a benchmark harness"};
    app.require_subcommand(1);

    // ---- gen ----------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "write a canonical benchmark file for a size class");
    std::string gen_class = "20_5";
    std::string gen_out = "tai20_5.txt";
    gen->add_option("--class", gen_class, "size class (20_5, 50_10, 100_10)")->required();
    gen->add_option("--out", gen_out, "output file")->required();
    gen->callback([&] {
        const auto entries = generate_benchmark_class(benchmark_class(gen_class));
        std::ofstream out(gen_out);
        if (!out) throw BenchError("cannot write " + gen_out);
        out << write_taillard(entries);
        std::cout << "wrote " << entries.size() << " instances to " << gen_out << "\n";
    });

    // ---- train --------------------------------------------------------------
    auto* train = app.add_subcommand("train", "train an offline model for a size class");
    std::vector<std::string> train_paths;
    std::vector<int> train_indices;
    std::string train_class = "20_5";
    std::string train_out = "model.qnet";
    std::uint64_t train_seed = 1;
    RlParams train_rl;
    GaBudget train_budget{0, 0, 0};
    train->add_option("--instances", train_paths, "instance files")->required();
    train->add_option("--class", train_class, "size class (sets the training budget)")->required();
    train->add_option("--out", train_out, "model output path")->required();
    train->add_option("--indices", train_indices, "1-based instance blocks to train on");
    train->add_option("--seed", train_seed, "random seed");
    train->add_option("--episodes", train_budget.episodes, "override training episodes");
    train->add_option("--iterations", train_budget.iterations, "override iterations per episode");
    train->add_option("--population", train_budget.population, "override population size");
    add_rl_flags(train, train_rl);
    train->callback([&] {
        GaBudget budget = default_train_budget(train_class);
        if (train_budget.episodes > 0) budget.episodes = train_budget.episodes;
        if (train_budget.iterations > 0) budget.iterations = train_budget.iterations;
        if (train_budget.population > 0) budget.population = train_budget.population;
        const auto instances = load_instances(train_paths, train_indices);
        Rng rng(train_seed);
        const auto result = train_offline(instances, budget, train_rl, rng);
        save_model(result.net, train_out);
        write_training_log(train_out + ".train.csv", result.episodes);
        std::cout << "trained on " << instances.size() << " instance(s), " << budget.episodes
                  << " episodes x " << budget.iterations << " iterations, population "
                  << budget.population << "\n";
        std::cout << "model: " << train_out << "\n";
        std::cout << "log:   " << train_out << ".train.csv\n";
        std::cout << "best fitness seen in training: " << result.best.fitness << "\n";
    });

    // ---- solve --------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "run one method on one instance");
    std::string solve_path, solve_method, solve_model;
    int solve_index = 1;
    std::uint64_t solve_seed = 1;
    GaBudget solve_budget{0, 0, 0};
    RlParams solve_rl;
    solve->add_option("--instance", solve_path, "instance file")->required();
    solve->add_option("--method", solve_method,
                      "one of offline_train, offline_frozen, online, standard_ga, neh, cds")
        ->required();
    solve->add_option("--model", solve_model, "model file (offline_frozen)");
    solve->add_option("--seed", solve_seed, "random seed");
    solve->add_option("--index", solve_index, "1-based instance block within the file");
    solve->add_option("--episodes", solve_budget.episodes, "override episodes");
    solve->add_option("--iterations", solve_budget.iterations, "override iterations");
    solve->add_option("--population", solve_budget.population, "override population size");
    add_rl_flags(solve, solve_rl);
    solve->callback([&] {
        ExperimentConfig cfg;
        cfg.instance_paths = {solve_path};
        cfg.instance_indices = {solve_index};
        cfg.methods = {solve_method};
        cfg.seeds = {solve_seed};
        cfg.model_path = solve_model;
        cfg.rl = solve_rl;
        cfg.output_dir = "";

        const auto instances = load_instances(cfg.instance_paths, cfg.instance_indices);
        const std::string cls = infer_class(instances.front());
        GaBudget budget = solve_method == "offline_train"
                              ? default_train_budget(cls.empty() ? "20_5" : cls)
                              : (solve_method == "standard_ga"
                                     ? default_standard_ga_budget(cls.empty() ? "20_5" : cls)
                                     : default_test_budget(cls.empty() ? "20_5" : cls));
        if (solve_budget.episodes > 0) budget.episodes = solve_budget.episodes;
        if (solve_budget.iterations > 0) budget.iterations = solve_budget.iterations;
        if (solve_budget.population > 0) budget.population = solve_budget.population;
        cfg.budgets[solve_method] = budget;
        if (solve_method == "offline_train") cfg.output_dir = ".";

        const auto records = run_experiment(cfg);
        for (const auto& r : records) {
            print_record(r);
            std::cout << "permutation:";
            for (int job : r.best_perm) std::cout << " " << job;
            std::cout << "\n";
        }
    });

    // ---- bench --------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run a full experiment grid from a config file");
    std::string bench_config;
    bench->add_option("--config", bench_config, "experiment config (JSON)")->required();
    bench->callback([&] {
        const auto cfg = load_experiment_config(bench_config);
        const auto records = run_experiment(cfg);
        const auto paths = emit_results(records, cfg.output_dir);
        for (const auto& r : records) print_record(r);
        std::cout << "runs:         " << paths.runs_csv << "\n";
        std::cout << "summary:      " << paths.summary_csv << "\n";
        std::cout << "permutations: " << paths.permutations_csv << "\n";
    });

    // ---- baselines ----------------------------------------------------------
    auto* baselines = app.add_subcommand("baselines", "NEH and CDS on every instance");
    std::vector<std::string> baseline_paths;
    std::vector<int> baseline_indices;
    std::string baseline_out;
    baselines->add_option("--instances", baseline_paths, "instance files")->required();
    baselines->add_option("--indices", baseline_indices, "1-based instance blocks");
    baselines->add_option("--out", baseline_out, "also emit CSV results to this directory");
    baselines->callback([&] {
        ExperimentConfig cfg;
        cfg.instance_paths = baseline_paths;
        cfg.instance_indices = baseline_indices;
        cfg.methods = {"neh", "cds"};
        cfg.output_dir = baseline_out;
        const auto records = run_experiment(cfg);
        for (const auto& r : records) print_record(r);
        if (!baseline_out.empty()) {
            const auto paths = emit_results(records, baseline_out);
            std::cout << "results in " << baseline_out << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
