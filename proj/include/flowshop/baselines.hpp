#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "flowshop/ga.hpp"
#include "flowshop/pfsp.hpp"

namespace flowshop {

struct GaRunResult {
    Individual best;
    std::vector<Duration> trace; // best fitness after each generation
};

// GA with the fixed operator settings the agent would otherwise control:
// roulette selection, selection rate 0.5, mutation rate 0.5.
inline GaRunResult standard_ga(const Instance& inst, int population, int iterations, Rng& rng) {
    const GenerationParams fixed{SelectionMethod::Roulette, 0.5, 0.5};
    Population pop = init_population(inst, population, rng);
    GaRunResult result;
    result.trace.reserve(iterations);
    for (int gen = 0; gen < iterations; ++gen) {
        ga_step(inst, pop, fixed, rng);
        result.trace.push_back(pop.best_fitness());
    }
    result.best = pop.best();
    return result;
}

// Nawaz-Enscore-Ham: jobs by descending total processing time (ties: lower
// index first), each inserted at the position minimizing the partial
// makespan (ties: earliest position).
inline Permutation neh(const Instance& inst) {
    check_instance(inst);
    std::vector<int> order(inst.n_jobs);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Duration> totals(inst.n_jobs, 0);
    for (int j = 0; j < inst.n_jobs; ++j)
        for (int i = 0; i < inst.n_machines; ++i) totals[j] += inst.proc_times[i][j];
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return totals[a] > totals[b]; });

    Permutation seq;
    seq.reserve(inst.n_jobs);
    for (int job : order) {
        int best_pos = 0;
        Duration best_ms = 0;
        Permutation candidate;
        for (std::size_t pos = 0; pos <= seq.size(); ++pos) {
            candidate = seq;
            candidate.insert(candidate.begin() + pos, job);
            const Duration ms = sequence_makespan(inst, candidate);
            if (pos == 0 || ms < best_ms) {
                best_ms = ms;
                best_pos = static_cast<int>(pos);
            }
        }
        seq.insert(seq.begin() + best_pos, job);
    }
    return seq;
}

// Johnson's rule for the two-machine flow shop: jobs with a < b first in
// ascending a, the rest last in descending b; ties broken by lower index.
inline Permutation johnson_rule(const std::vector<std::pair<Duration, Duration>>& times) {
    if (times.empty()) throw ContractError("johnson_rule requires at least one job");
    for (const auto& [a, b] : times)
        if (a < 0 || b < 0) throw ContractError("johnson_rule requires non-negative times");
    std::vector<int> front, back;
    for (int j = 0; j < static_cast<int>(times.size()); ++j)
        (times[j].first < times[j].second ? front : back).push_back(j);
    std::stable_sort(front.begin(), front.end(),
                     [&](int a, int b) { return times[a].first < times[b].first; });
    std::stable_sort(back.begin(), back.end(),
                     [&](int a, int b) { return times[a].second > times[b].second; });
    front.insert(front.end(), back.begin(), back.end());
    return front;
}

// Campbell-Dudek-Smith: m-1 two-machine surrogates (first k machines summed
// vs last k machines summed), each solved by Johnson's rule and evaluated on
// the true instance; the best candidate wins, ties to the smallest k.
inline Permutation cds(const Instance& inst) {
    check_instance(inst);
    if (inst.n_machines < 2) throw ContractError("cds requires at least two machines");
    Permutation best_perm;
    Duration best_ms = 0;
    for (int k = 1; k < inst.n_machines; ++k) {
        std::vector<std::pair<Duration, Duration>> surrogate(inst.n_jobs, {0, 0});
        for (int j = 0; j < inst.n_jobs; ++j) {
            for (int i = 0; i < k; ++i) surrogate[j].first += inst.proc_times[i][j];
            for (int i = inst.n_machines - k; i < inst.n_machines; ++i)
                surrogate[j].second += inst.proc_times[i][j];
        }
        const Permutation candidate = johnson_rule(surrogate);
        const Duration ms = makespan(inst, candidate);
        if (k == 1 || ms < best_ms) {
            best_ms = ms;
            best_perm = candidate;
        }
    }
    return best_perm;
}

} // namespace flowshop
