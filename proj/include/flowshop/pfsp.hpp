#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowshop/rng.hpp"

namespace flowshop {

// Processing times and makespans are exact integers; no floating point in the
// schedule arithmetic.
using Duration = std::int64_t;

// Job sequence. A full solution is a bijection on {0..n_jobs-1}.
using Permutation = std::vector<int>;

struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A permutation flow shop instance: n_jobs jobs cross n_machines machines in
// the same machine order. proc_times is machine-major: proc_times[machine][job].
struct Instance {
    std::string id;
    int n_jobs = 0;
    int n_machines = 0;
    std::vector<std::vector<Duration>> proc_times;
    std::optional<Duration> upper_bound;
    std::optional<Duration> lower_bound;
};

inline void check_instance(const Instance& inst) {
    if (inst.n_jobs < 1 || inst.n_machines < 1)
        throw ContractError("instance must have at least one job and one machine");
    if (static_cast<int>(inst.proc_times.size()) != inst.n_machines)
        throw ContractError("proc_times must have n_machines rows");
    for (const auto& row : inst.proc_times) {
        if (static_cast<int>(row.size()) != inst.n_jobs)
            throw ContractError("proc_times row length must equal n_jobs");
        for (Duration t : row)
            if (t < 0) throw ContractError("processing times must be non-negative");
    }
    if (inst.lower_bound && inst.upper_bound && *inst.lower_bound > *inst.upper_bound)
        throw ContractError("lower_bound must not exceed upper_bound");
}

struct PermutationCheck {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

inline PermutationCheck validate_permutation(const Instance& inst, const Permutation& perm) {
    PermutationCheck result;
    if (static_cast<int>(perm.size()) != inst.n_jobs)
        result.violations.push_back("length " + std::to_string(perm.size()) +
                                    " does not match n_jobs " + std::to_string(inst.n_jobs));
    std::vector<char> seen(inst.n_jobs, 0);
    for (int job : perm) {
        if (job < 0 || job >= inst.n_jobs) {
            result.violations.push_back("job " + std::to_string(job) + " out of range");
        } else if (seen[job]) {
            result.violations.push_back("job " + std::to_string(job) + " duplicated");
        } else {
            seen[job] = 1;
        }
    }
    return result;
}

// Completion time of the last listed job on the last machine. The sequence may
// be a prefix of a solution (used by insertion heuristics); jobs must be in
// range but need not cover all of {0..n_jobs-1}.
inline Duration sequence_makespan(const Instance& inst, const Permutation& seq) {
    const int m = inst.n_machines;
    std::vector<Duration> completion(m, 0); // completion[i]: last job's completion on machine i
    for (int job : seq) {
        if (job < 0 || job >= inst.n_jobs)
            throw ContractError("job index out of range in sequence");
        completion[0] += inst.proc_times[0][job];
        for (int i = 1; i < m; ++i)
            completion[i] = std::max(completion[i], completion[i - 1]) + inst.proc_times[i][job];
    }
    return completion[m - 1];
}

// Makespan of a complete solution; rejects invalid permutations.
inline Duration makespan(const Instance& inst, const Permutation& perm) {
    const auto check = validate_permutation(inst, perm);
    if (!check.ok())
        throw ContractError("invalid permutation: " + check.violations.front());
    return sequence_makespan(inst, perm);
}

inline Permutation random_permutation(int n_jobs, Rng& rng) {
    if (n_jobs < 1) throw ContractError("random_permutation requires n_jobs >= 1");
    Permutation perm(n_jobs);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    return perm;
}

} // namespace flowshop
