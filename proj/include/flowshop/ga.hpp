#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "flowshop/pfsp.hpp"
#include "flowshop/rng.hpp"

namespace flowshop {

enum class SelectionMethod { Elitism, Roulette, Rank };

inline std::string to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::Elitism: return "elitism";
        case SelectionMethod::Roulette: return "roulette";
        case SelectionMethod::Rank: return "rank";
    }
    return "?";
}

// Per-generation operator settings; the three quantities the agent controls.
struct GenerationParams {
    SelectionMethod method = SelectionMethod::Roulette;
    double selection_rate = 0.5; // fraction of the population entering reproduction, (0,1]
    double mutation_rate = 0.5;  // per-child shift-mutation probability, [0,1]
};

inline void check_generation_params(const GenerationParams& p) {
    if (!(p.selection_rate > 0.0 && p.selection_rate <= 1.0))
        throw ContractError("selection_rate must be in (0,1]");
    if (!(p.mutation_rate >= 0.0 && p.mutation_rate <= 1.0))
        throw ContractError("mutation_rate must be in [0,1]");
}

struct Individual {
    Permutation perm;
    Duration fitness = 0;
};

// Members are kept sorted ascending by fitness; index 0 is the incumbent best.
struct Population {
    std::vector<Individual> members;
    long generation = 0;

    int size() const { return static_cast<int>(members.size()); }
    const Individual& best() const { return members.front(); }
    Duration best_fitness() const { return members.front().fitness; }
    Duration worst_fitness() const { return members.back().fitness; }
};

inline Individual evaluate(const Instance& inst, Permutation perm) {
    const Duration fitness = sequence_makespan(inst, perm);
    return Individual{std::move(perm), fitness};
}

inline void sort_members(std::vector<Individual>& members) {
    std::stable_sort(members.begin(), members.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });
}

inline Population init_population(const Instance& inst, int size, Rng& rng) {
    if (size < 2) throw ContractError("population size must be >= 2");
    Population pop;
    pop.members.reserve(size);
    for (int k = 0; k < size; ++k)
        pop.members.push_back(evaluate(inst, random_permutation(inst.n_jobs, rng)));
    sort_members(pop.members);
    return pop;
}

// ---------------------------------------------------------------------------
// Parent selection. Returns ceil(p_s*M/2) pairs of member indices. The two
// parents of a pair are distinct whenever the method can provide it; weighted
// methods resample up to M times before accepting a duplicate.

using ParentPairs = std::vector<std::pair<int, int>>;

namespace detail {

inline int weighted_draw(const std::vector<double>& cumulative, Rng& rng) {
    const double target = rng.uniform01() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const auto idx = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
    return static_cast<int>(idx);
}

inline ParentPairs weighted_pairs(const std::vector<double>& weights, int pair_count, Rng& rng) {
    const int m = static_cast<int>(weights.size());
    std::vector<double> cumulative(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        cumulative[i] = total;
    }
    ParentPairs pairs;
    pairs.reserve(pair_count);
    for (int k = 0; k < pair_count; ++k) {
        const int first = weighted_draw(cumulative, rng);
        int second = weighted_draw(cumulative, rng);
        for (int attempt = 1; second == first && attempt < m; ++attempt)
            second = weighted_draw(cumulative, rng);
        pairs.emplace_back(first, second);
    }
    return pairs;
}

} // namespace detail

inline ParentPairs select_parents(const Population& pop, SelectionMethod method,
                                  double selection_rate, Rng& rng) {
    const int m = pop.size();
    if (m < 2) throw ContractError("select_parents requires a population of at least 2");
    if (!(selection_rate > 0.0 && selection_rate <= 1.0))
        throw ContractError("selection_rate must be in (0,1]");
    const int pair_count = static_cast<int>(std::ceil(selection_rate * m / 2.0));

    switch (method) {
        case SelectionMethod::Elitism: {
            const int pool = static_cast<int>(std::ceil(selection_rate * m));
            ParentPairs pairs;
            pairs.reserve(pair_count);
            if (pool < 2) { // a single-member pool cannot give distinct parents
                pairs.assign(pair_count, {0, 0});
                return pairs;
            }
            // consume a shuffled pool two indices per pair; reshuffle when spent
            std::vector<int> order(pool);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            std::size_t next = 0;
            for (int k = 0; k < pair_count; ++k) {
                if (next + 1 >= order.size()) {
                    rng.shuffle(order);
                    next = 0;
                }
                pairs.emplace_back(order[next], order[next + 1]);
                next += 2;
            }
            return pairs;
        }
        case SelectionMethod::Roulette: {
            // minimization-adapted weights; +1 keeps the worst member selectable
            std::vector<double> weights(m);
            const Duration worst = pop.worst_fitness();
            for (int i = 0; i < m; ++i)
                weights[i] = static_cast<double>(worst - pop.members[i].fitness) + 1.0;
            return detail::weighted_pairs(weights, pair_count, rng);
        }
        case SelectionMethod::Rank: {
            // linear ranking: best has rank 1, weight M - rank + 1
            std::vector<double> weights(m);
            for (int i = 0; i < m; ++i) weights[i] = static_cast<double>(m - i);
            return detail::weighted_pairs(weights, pair_count, rng);
        }
    }
    throw ContractError("unknown selection method");
}

// ---------------------------------------------------------------------------
// Two-point crossover version I. Positions outside [c1,c2) keep the base
// parent's jobs; the interior is refilled with the missing jobs in the order
// they appear in the other parent.

namespace detail {

inline Permutation crossover_child(const Permutation& base, const Permutation& donor, int c1,
                                   int c2) {
    const int n = static_cast<int>(base.size());
    Permutation child(n, -1);
    std::vector<char> used(n, 0);
    for (int pos = 0; pos < n; ++pos) {
        if (pos < c1 || pos >= c2) {
            child[pos] = base[pos];
            used[base[pos]] = 1;
        }
    }
    int fill = c1;
    for (int job : donor) {
        if (fill >= c2) break;
        if (!used[job]) {
            child[fill++] = job;
            used[job] = 1;
        }
    }
    return child;
}

} // namespace detail

inline std::pair<Permutation, Permutation> crossover_two_point_v1_at(const Permutation& p1,
                                                                     const Permutation& p2, int c1,
                                                                     int c2) {
    const int n = static_cast<int>(p1.size());
    if (p2.size() != p1.size()) throw ContractError("crossover parents must have equal length");
    if (n < 2) throw ContractError("crossover requires n >= 2");
    if (!(0 <= c1 && c1 < c2 && c2 <= n)) throw ContractError("cut points must satisfy 0 <= c1 < c2 <= n");
    return {detail::crossover_child(p1, p2, c1, c2), detail::crossover_child(p2, p1, c1, c2)};
}

inline std::pair<Permutation, Permutation> crossover_two_point_v1(const Permutation& p1,
                                                                  const Permutation& p2, Rng& rng) {
    const int n = static_cast<int>(p1.size());
    if (p2.size() != p1.size()) throw ContractError("crossover parents must have equal length");
    if (n < 2) throw ContractError("crossover requires n >= 2");
    // uniform over all cut pairs 0 <= c1 < c2 <= n
    int a = static_cast<int>(rng.index(n + 1));
    int b = static_cast<int>(rng.index(n + 1));
    while (a == b) b = static_cast<int>(rng.index(n + 1));
    return crossover_two_point_v1_at(p1, p2, std::min(a, b), std::max(a, b));
}

// ---------------------------------------------------------------------------
// Shift mutation: remove one job, reinsert it at a different position.

inline Permutation shift_mutation_at(const Permutation& perm, int remove_index, int insert_index) {
    const int n = static_cast<int>(perm.size());
    if (!(0 <= remove_index && remove_index < n && 0 <= insert_index && insert_index < n))
        throw ContractError("shift indices out of range");
    if (remove_index == insert_index) throw ContractError("shift requires remove != insert");
    Permutation result = perm;
    const int job = result[remove_index];
    result.erase(result.begin() + remove_index);
    result.insert(result.begin() + insert_index, job);
    return result;
}

inline Permutation shift_mutation(const Permutation& perm, Rng& rng) {
    const int n = static_cast<int>(perm.size());
    if (n < 2) return perm; // no move possible
    const int remove_index = static_cast<int>(rng.index(n));
    int insert_index = static_cast<int>(rng.index(n));
    while (insert_index == remove_index) insert_index = static_cast<int>(rng.index(n));
    return shift_mutation_at(perm, remove_index, insert_index);
}

// ---------------------------------------------------------------------------
// Elitist replacement: merge, stable-sort, truncate. Incumbents precede
// offspring at equal fitness, so the sort's stability fixes all ties.

inline void update_population(Population& pop, std::vector<Individual> offspring) {
    auto merged = pop.members;
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                  std::make_move_iterator(offspring.end()));
    sort_members(merged);
    merged.resize(pop.members.size());
    pop.members = std::move(merged);
    ++pop.generation;
}

inline double average_fitness(const Population& pop) {
    if (pop.members.empty()) throw ContractError("average_fitness of empty population");
    double sum = 0.0;
    for (const auto& ind : pop.members) sum += static_cast<double>(ind.fitness);
    return sum / static_cast<double>(pop.size());
}

// Shannon entropy of the fitness-proportion distribution p_i = f_i / sum(f).
inline double population_entropy(const Population& pop) {
    if (pop.members.empty()) throw ContractError("population_entropy of empty population");
    double total = 0.0;
    for (const auto& ind : pop.members) {
        if (ind.fitness <= 0) throw ContractError("population_entropy requires positive fitness");
        total += static_cast<double>(ind.fitness);
    }
    double entropy = 0.0;
    for (const auto& ind : pop.members) {
        const double p = static_cast<double>(ind.fitness) / total;
        entropy -= p * std::log2(p);
    }
    return entropy;
}

// ---------------------------------------------------------------------------
// One generation: select -> crossover every pair -> mutate children with
// probability p_mut -> evaluate -> elitist replacement. Records everything the
// reward computation needs.

struct PairOutcome {
    Duration parent1_fitness = 0;
    Duration parent2_fitness = 0;
    Duration child1_fitness = 0;
    Duration child2_fitness = 0;
};

struct StepOutcome {
    Duration old_best = 0;
    Duration new_best = 0;
    std::vector<PairOutcome> pairs;
};

inline StepOutcome ga_step(const Instance& inst, Population& pop, const GenerationParams& params,
                           Rng& rng) {
    check_generation_params(params);
    StepOutcome outcome;
    outcome.old_best = pop.best_fitness();

    const auto pairs = select_parents(pop, params.method, params.selection_rate, rng);
    std::vector<Individual> offspring;
    offspring.reserve(2 * pairs.size());
    outcome.pairs.reserve(pairs.size());
    for (const auto& [i1, i2] : pairs) {
        const Individual& parent1 = pop.members[i1];
        const Individual& parent2 = pop.members[i2];
        // single-job instances admit no recombination; children are copies
        auto [child1, child2] = inst.n_jobs >= 2
                                    ? crossover_two_point_v1(parent1.perm, parent2.perm, rng)
                                    : std::make_pair(parent1.perm, parent2.perm);
        if (rng.bernoulli(params.mutation_rate)) child1 = shift_mutation(child1, rng);
        if (rng.bernoulli(params.mutation_rate)) child2 = shift_mutation(child2, rng);
        Individual ind1 = evaluate(inst, std::move(child1));
        Individual ind2 = evaluate(inst, std::move(child2));
        outcome.pairs.push_back({parent1.fitness, parent2.fitness, ind1.fitness, ind2.fitness});
        offspring.push_back(std::move(ind1));
        offspring.push_back(std::move(ind2));
    }
    update_population(pop, std::move(offspring));
    outcome.new_best = pop.best_fitness();
    return outcome;
}

} // namespace flowshop
