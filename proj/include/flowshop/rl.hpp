#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flowshop/ga.hpp"
#include "flowshop/qnet.hpp"

namespace flowshop {

// ---------------------------------------------------------------------------
// State: two normalized population features. avg_fitness_norm is the mean
// fitness over the best fitness of the episode's initial population;
// entropy_norm is the fitness-distribution entropy over its log2(M) maximum.

struct AgentState {
    double avg_fitness_norm = 0.0;
    double entropy_norm = 0.0;

    std::array<double, 2> features() const { return {avg_fitness_norm, entropy_norm}; }
};

inline AgentState encode_state(const Population& pop, Duration initial_best) {
    if (initial_best <= 0) throw ContractError("encode_state requires a positive baseline");
    AgentState s;
    s.avg_fitness_norm = average_fitness(pop) / static_cast<double>(initial_best);
    s.entropy_norm =
        pop.size() > 1 ? population_entropy(pop) / std::log2(static_cast<double>(pop.size())) : 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// Action space: 3 selection methods x 3 selection rates x 3 mutation rates.
// Rates are the midpoints of the three equal subintervals of [0,1].

inline constexpr int kActionCount = 27;
inline constexpr std::array<double, 3> kActionRates = {1.0 / 6.0, 0.5, 5.0 / 6.0};
inline constexpr std::array<SelectionMethod, 3> kActionMethods = {
    SelectionMethod::Elitism, SelectionMethod::Roulette, SelectionMethod::Rank};

struct Action {
    int index = 0;
    SelectionMethod method = SelectionMethod::Elitism;
    double selection_rate = kActionRates[0];
    double mutation_rate = kActionRates[0];

    GenerationParams params() const { return {method, selection_rate, mutation_rate}; }
};

inline int encode_action(int method_idx, int ps_idx, int pm_idx) {
    if (method_idx < 0 || method_idx > 2 || ps_idx < 0 || ps_idx > 2 || pm_idx < 0 || pm_idx > 2)
        throw ContractError("action component index out of range");
    return method_idx * 9 + ps_idx * 3 + pm_idx;
}

inline Action decode_action(int index) {
    if (index < 0 || index >= kActionCount) throw ContractError("action index out of range");
    Action a;
    a.index = index;
    a.method = kActionMethods[index / 9];
    a.selection_rate = kActionRates[(index / 3) % 3];
    a.mutation_rate = kActionRates[index % 3];
    return a;
}

// ---------------------------------------------------------------------------
// Policies over a vector of action values.

inline int argmax_action(std::span<const double> q) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i)
        if (q[i] > q[best]) best = i; // ties keep the lowest index
    return best;
}

// Boltzmann distribution with temperature beta, max-subtracted for stability.
inline std::vector<double> softmax_policy(std::span<const double> q, double beta) {
    if (!(beta > 0.0)) throw ContractError("softmax temperature must be positive");
    if (q.empty()) throw ContractError("softmax over empty value vector");
    double max_q = q[0];
    for (double v : q) max_q = std::max(max_q, v);
    std::vector<double> probs(q.size());
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        probs[i] = std::exp(beta * (q[i] - max_q));
        total += probs[i];
    }
    for (auto& p : probs) p /= total;
    return probs;
}

inline int epsilon_greedy(std::span<const double> q, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ContractError("epsilon must be in [0,1]");
    if (q.empty()) throw ContractError("epsilon_greedy over empty value vector");
    if (rng.bernoulli(epsilon)) return static_cast<int>(rng.index(q.size()));
    return argmax_action(q);
}

inline int sample_from(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

// ---------------------------------------------------------------------------
// Rewards, improvement-positive: positive when offspring beat their parents
// and when the incumbent best improves.

inline double children_reward(Duration parent1, Duration parent2, Duration child1,
                              Duration child2) {
    return static_cast<double>((parent1 + parent2) - (child1 + child2));
}

inline double children_reward(const PairOutcome& pair) {
    return children_reward(pair.parent1_fitness, pair.parent2_fitness, pair.child1_fitness,
                           pair.child2_fitness);
}

inline double selection_reward(Duration old_best, Duration new_best) {
    return static_cast<double>(old_best - new_best);
}

inline double total_reward(const StepOutcome& outcome) {
    double reward = selection_reward(outcome.old_best, outcome.new_best);
    for (const auto& pair : outcome.pairs) reward += children_reward(pair);
    return reward;
}

// ---------------------------------------------------------------------------
// Learning.

struct Transition {
    AgentState s;
    int a = 0;
    double r = 0.0;
    AgentState s_next;
    std::optional<int> a_next; // on-policy path only
    bool terminal = false;
};

struct RlParams {
    enum class Policy { EpsilonGreedy, Softmax };

    double alpha = 0.1;   // learning rate
    double gamma = 0.9;   // discount
    double epsilon = 0.5; // exploration rate
    double beta = 1.0;    // softmax temperature
    int replay_capacity = 10000;
    int batch_size = 32;
    int target_sync_interval = 100;
    Policy policy_mode = Policy::EpsilonGreedy;
};

inline void check_rl_params(const RlParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ContractError("alpha must be in (0,1]");
    if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw ContractError("gamma must be in [0,1]");
    if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) throw ContractError("epsilon must be in [0,1]");
    if (!(p.beta > 0.0)) throw ContractError("beta must be positive");
    if (p.replay_capacity < 1 || p.batch_size < 1 || p.target_sync_interval < 1)
        throw ContractError("replay/batch/sync settings must be positive");
}

inline std::vector<double> q_values(const QNetwork& net, const AgentState& s) {
    const auto f = s.features();
    return forward(net, std::span<const double>(f.data(), f.size()));
}

inline int choose_action(const QNetwork& net, const AgentState& s, const RlParams& rl, Rng& rng) {
    const auto q = q_values(net, s);
    if (rl.policy_mode == RlParams::Policy::Softmax)
        return sample_from(softmax_policy(q, rl.beta), rng);
    return epsilon_greedy(q, rl.epsilon, rng);
}

// Bellman target bootstrapped from a frozen copy of the network. The tabular
// (1-alpha) blend of the classic update is realized by the gradient step of
// size alpha in train_step.
inline double q_target(const Transition& tr, double gamma, const QNetwork& target_net) {
    if (tr.terminal) return tr.r;
    const auto q_next = q_values(target_net, tr.s_next);
    return tr.r + gamma * q_next[argmax_action(q_next)];
}

// Semi-gradient Sarsa(0): bootstrap from the action actually taken next.
// Returns the pre-update loss.
inline double sarsa_update(QNetwork& net, const Transition& tr, double alpha, double gamma) {
    double target = tr.r;
    if (!tr.terminal) {
        if (!tr.a_next) throw ContractError("sarsa_update requires a_next on non-terminal steps");
        target += gamma * q_values(net, tr.s_next)[*tr.a_next];
    }
    const TrainSample sample{{tr.s.avg_fitness_norm, tr.s.entropy_norm}, tr.a, target};
    return train_step(net, std::span<const TrainSample>(&sample, 1), alpha);
}

// Bounded FIFO experience store with uniform sampling (without replacement).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw ContractError("replay capacity must be positive");
    }

    void push(Transition tr) {
        if (static_cast<int>(items_.size()) < capacity_) {
            items_.push_back(std::move(tr));
        } else {
            items_[next_] = std::move(tr);
            next_ = (next_ + 1) % capacity_;
        }
    }

    int size() const { return static_cast<int>(items_.size()); }

    std::vector<Transition> sample(int count, Rng& rng) const {
        if (count > size()) throw ContractError("replay sample larger than buffer");
        std::vector<int> idx(items_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<Transition> out;
        out.reserve(count);
        for (int k = 0; k < count; ++k) {
            const auto pick = k + static_cast<int>(rng.index(idx.size() - k));
            std::swap(idx[k], idx[pick]);
            out.push_back(items_[idx[k]]);
        }
        return out;
    }

  private:
    int capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> items_;
};

// ---------------------------------------------------------------------------
// Run loops. One generation of the GA is one agent step; an episode restarts
// the population. Rewards fed to learning are normalized by the episode's
// initial best fitness so that gradients stay well-scaled across instance
// sizes; logs keep the raw values.

struct GaBudget {
    int episodes = 1;
    int iterations = 50;
    int population = 30;
};

inline void check_budget(const GaBudget& b) {
    if (b.episodes < 1 || b.iterations < 1 || b.population < 2)
        throw ContractError("budget requires episodes, iterations >= 1 and population >= 2");
}

struct EpisodeStats {
    int episode = 0;
    double cumulative_reward = 0.0; // raw reward sum over the episode
    double mean_loss = 0.0;         // mean training loss (0 when no updates ran)
    Duration best_fitness = 0;
};

struct GenerationRecord {
    int episode = 0;
    int generation = 0;
    Duration best_fitness = 0;
    int action = 0;
    double entropy = 0.0;
};

struct TrainResult {
    QNetwork net;
    Individual best; // best individual observed across all training episodes
    std::vector<EpisodeStats> episodes;
};

// Offline DQN training over an instance set; episodes cycle through the
// instances round-robin.
inline TrainResult train_offline(const std::vector<Instance>& instances, const GaBudget& budget,
                                 const RlParams& rl, Rng& rng,
                                 std::vector<int> dims = default_qnetwork_dims()) {
    if (instances.empty()) throw ContractError("train_offline requires at least one instance");
    check_budget(budget);
    check_rl_params(rl);

    TrainResult result;
    result.net = make_qnetwork(std::move(dims), rng);
    QNetwork target_net = result.net;
    ReplayBuffer replay(rl.replay_capacity);
    long gradient_steps = 0;

    bool have_best = false;
    for (int episode = 0; episode < budget.episodes; ++episode) {
        const Instance& inst = instances[episode % instances.size()];
        Population pop = init_population(inst, budget.population, rng);
        const Duration initial_best = pop.best_fitness();
        if (!have_best || pop.best_fitness() < result.best.fitness) {
            result.best = pop.best();
            have_best = true;
        }
        AgentState state = encode_state(pop, initial_best);

        EpisodeStats stats;
        stats.episode = episode;
        double loss_sum = 0.0;
        int loss_count = 0;

        for (int gen = 0; gen < budget.iterations; ++gen) {
            const int action = choose_action(result.net, state, rl, rng);
            const auto outcome = ga_step(inst, pop, decode_action(action).params(), rng);
            const double raw_reward = total_reward(outcome);
            const AgentState next_state = encode_state(pop, initial_best);
            const bool terminal = gen + 1 == budget.iterations;
            replay.push({state, action, raw_reward / static_cast<double>(initial_best), next_state,
                         std::nullopt, terminal});

            if (replay.size() >= rl.batch_size) {
                const auto batch = replay.sample(rl.batch_size, rng);
                std::vector<TrainSample> samples;
                samples.reserve(batch.size());
                for (const auto& tr : batch)
                    samples.push_back({{tr.s.avg_fitness_norm, tr.s.entropy_norm}, tr.a,
                                       q_target(tr, rl.gamma, target_net)});
                loss_sum += train_step(result.net, samples, rl.alpha);
                ++loss_count;
                if (++gradient_steps % rl.target_sync_interval == 0) target_net = result.net;
            }

            stats.cumulative_reward += raw_reward;
            state = next_state;
            if (pop.best_fitness() < result.best.fitness) result.best = pop.best();
        }
        stats.best_fitness = pop.best_fitness();
        stats.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
        result.episodes.push_back(stats);
    }
    return result;
}

struct SolveResult {
    Individual best;
    std::vector<GenerationRecord> history;
};

// Inference with frozen weights: greedy action every generation, no learning,
// no reward computation. The best individual over all episodes is returned.
inline SolveResult run_frozen(const QNetwork& net, const Instance& instance,
                              const GaBudget& budget, Rng& rng) {
    check_budget(budget);
    SolveResult result;
    bool have_best = false;
    for (int episode = 0; episode < budget.episodes; ++episode) {
        Population pop = init_population(instance, budget.population, rng);
        const Duration initial_best = pop.best_fitness();
        if (!have_best || pop.best_fitness() < result.best.fitness) {
            result.best = pop.best();
            have_best = true;
        }
        for (int gen = 0; gen < budget.iterations; ++gen) {
            const auto q = q_values(net, encode_state(pop, initial_best));
            const int action = argmax_action(q);
            ga_step(instance, pop, decode_action(action).params(), rng);
            result.history.push_back(
                {episode, gen, pop.best_fitness(), action, population_entropy(pop)});
            if (pop.best_fitness() < result.best.fitness) result.best = pop.best();
        }
    }
    return result;
}

struct OnlineResult {
    Individual best;
    QNetwork net;
    std::vector<GenerationRecord> history;
    std::vector<EpisodeStats> episodes;
};

// On-policy Sarsa(0) control without pre-training. Weights persist across
// episodes; the population restarts each episode.
inline OnlineResult run_online(const Instance& instance, const GaBudget& budget,
                               const RlParams& rl, Rng& rng,
                               std::vector<int> dims = default_qnetwork_dims()) {
    check_budget(budget);
    check_rl_params(rl);
    OnlineResult result;
    result.net = make_qnetwork(std::move(dims), rng);
    bool have_best = false;

    for (int episode = 0; episode < budget.episodes; ++episode) {
        Population pop = init_population(instance, budget.population, rng);
        const Duration initial_best = pop.best_fitness();
        if (!have_best || pop.best_fitness() < result.best.fitness) {
            result.best = pop.best();
            have_best = true;
        }
        AgentState state = encode_state(pop, initial_best);
        int action = choose_action(result.net, state, rl, rng);

        EpisodeStats stats;
        stats.episode = episode;
        double loss_sum = 0.0;

        for (int gen = 0; gen < budget.iterations; ++gen) {
            const auto outcome = ga_step(instance, pop, decode_action(action).params(), rng);
            const double raw_reward = total_reward(outcome);
            const AgentState next_state = encode_state(pop, initial_best);
            const bool terminal = gen + 1 == budget.iterations;

            Transition tr{state, action, raw_reward / static_cast<double>(initial_best),
                          next_state, std::nullopt, terminal};
            int next_action = 0;
            if (!terminal) {
                next_action = choose_action(result.net, next_state, rl, rng);
                tr.a_next = next_action;
            }
            loss_sum += sarsa_update(result.net, tr, rl.alpha, rl.gamma);

            result.history.push_back(
                {episode, gen, pop.best_fitness(), action, population_entropy(pop)});
            stats.cumulative_reward += raw_reward;
            if (pop.best_fitness() < result.best.fitness) result.best = pop.best();
            state = next_state;
            action = next_action;
        }
        stats.best_fitness = pop.best_fitness();
        stats.mean_loss = budget.iterations > 0 ? loss_sum / budget.iterations : 0.0;
        result.episodes.push_back(stats);
    }
    return result;
}

} // namespace flowshop
