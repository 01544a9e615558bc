#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "flowshop/ga.hpp"
#include "flowshop/taillard.hpp"
#include "oracle.hpp"

using namespace flowshop;

namespace {

Instance toy_20_5() {
    const auto& cls = benchmark_class("20_5");
    return generate_taillard_instance(cls.n_jobs, cls.n_machines, cls.time_seeds[0], "tai20_5_1");
}

Population population_with_fitness(std::vector<Duration> fitness) {
    Population pop;
    int job = 0;
    for (Duration f : fitness) pop.members.push_back({{job++}, f});
    sort_members(pop.members);
    return pop;
}

} // namespace

TEST_CASE("init_population: single-job instance degenerates to copies") {
    Instance inst;
    inst.id = "one";
    inst.n_jobs = 1;
    inst.n_machines = 3;
    inst.proc_times = {{2}, {3}, {4}};
    Rng rng(1);
    const auto pop = init_population(inst, 2, rng);
    CHECK(pop.members[0].perm == Permutation{0});
    CHECK(pop.members[1].perm == Permutation{0});
    CHECK(pop.members[0].fitness == 9);
    CHECK(pop.members[1].fitness == 9);
}

TEST_CASE("init_population: valid, sorted, deterministic") {
    const auto inst = toy_20_5();
    Rng a(7), b(7);
    const auto pop1 = init_population(inst, 50, a);
    const auto pop2 = init_population(inst, 50, b);
    CHECK(pop1.size() == 50);
    for (const auto& ind : pop1.members) {
        CHECK(validate_permutation(inst, ind.perm).ok());
        CHECK(ind.fitness == makespan(inst, ind.perm));
    }
    for (int i = 1; i < pop1.size(); ++i)
        CHECK(pop1.members[i - 1].fitness <= pop1.members[i].fitness);
    for (int i = 0; i < pop1.size(); ++i) CHECK(pop1.members[i].perm == pop2.members[i].perm);

    Rng rng(9);
    CHECK_THROWS_AS(init_population(inst, 1, rng), ContractError);
}

TEST_CASE("select_parents: pair count is ceil(p_s*M/2)") {
    auto pop = population_with_fitness(std::vector<Duration>(30, 100));
    Rng rng(5);
    CHECK(select_parents(pop, SelectionMethod::Elitism, 0.5, rng).size() == 8);
    CHECK(select_parents(pop, SelectionMethod::Roulette, 1.0, rng).size() == 15);
    CHECK(select_parents(pop, SelectionMethod::Rank, 0.034, rng).size() == 1);
}

TEST_CASE("select_parents: elitism with a pool of two always pairs the top two") {
    auto pop = population_with_fitness({10, 20, 30, 40, 50, 60});
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pairs = select_parents(pop, SelectionMethod::Elitism, 1.0 / 3.0, rng);
        for (const auto& [a, b] : pairs) {
            CHECK(std::set<int>{a, b} == std::set<int>{0, 1});
        }
    }
}

TEST_CASE("select_parents: elitism keeps pairs inside the elite pool") {
    auto pop = population_with_fitness({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pairs = select_parents(pop, SelectionMethod::Elitism, 0.5, rng);
        for (const auto& [a, b] : pairs) {
            CHECK(a < 5);
            CHECK(b < 5);
            CHECK(a != b);
        }
    }
}

TEST_CASE("select_parents: roulette over equal fitness is uniform") {
    const int m = 10;
    auto pop = population_with_fitness(std::vector<Duration>(m, 500));
    Rng rng(41);
    std::vector<int> counts(m, 0);
    int draws = 0;
    while (draws < 20000) {
        for (const auto& [a, b] : select_parents(pop, SelectionMethod::Roulette, 1.0, rng)) {
            ++counts[a];
            ++counts[b];
            draws += 2;
        }
    }
    for (int i = 0; i < m; ++i) {
        const double freq = static_cast<double>(counts[i]) / draws;
        CHECK(freq > 1.0 / m - 0.02);
        CHECK(freq < 1.0 / m + 0.02);
    }
}

TEST_CASE("select_parents: rank favors good ranks monotonically") {
    auto pop = population_with_fitness({10, 20, 30, 40, 50, 60, 70, 80});
    Rng rng(59);
    std::vector<int> counts(8, 0);
    for (int trial = 0; trial < 4000; ++trial) {
        for (const auto& [a, b] : select_parents(pop, SelectionMethod::Rank, 1.0, rng)) {
            ++counts[a];
            ++counts[b];
        }
    }
    CHECK(counts[0] > counts[3]);
    CHECK(counts[3] > counts[7]);
    // best:worst weight ratio is 8:1; allow sampling slack
    CHECK(counts[0] > 4 * counts[7]);
}

TEST_CASE("crossover: worked example with fixed cuts") {
    const Permutation p1 = {0, 1, 2, 3, 4};
    const Permutation p2 = {4, 3, 2, 1, 0};
    const auto [c1, c2] = crossover_two_point_v1_at(p1, p2, 1, 3);
    CHECK(c1 == Permutation{0, 2, 1, 3, 4});
    CHECK(c2 == Permutation{4, 2, 3, 1, 0});
}

TEST_CASE("crossover: full-span cuts swap the parents") {
    const Permutation p1 = {2, 0, 3, 1};
    const Permutation p2 = {1, 3, 0, 2};
    const auto [c1, c2] = crossover_two_point_v1_at(p1, p2, 0, 4);
    CHECK(c1 == p2);
    CHECK(c2 == p1);
}

TEST_CASE("crossover: contract violations") {
    Rng rng(3);
    CHECK_THROWS_AS(crossover_two_point_v1({0, 1, 2}, {0, 1}, rng), ContractError);
    CHECK_THROWS_AS(crossover_two_point_v1_at({0, 1}, {1, 0}, 1, 1), ContractError);
}

TEST_CASE("crossover closure: random children are always valid permutations") {
    Instance inst;
    inst.n_jobs = 20;
    inst.n_machines = 1;
    inst.proc_times.assign(1, std::vector<Duration>(20, 1));
    Rng rng(77);
    for (int trial = 0; trial < 20000; ++trial) {
        const auto p1 = random_permutation(20, rng);
        const auto p2 = random_permutation(20, rng);
        const auto [c1, c2] = crossover_two_point_v1(p1, p2, rng);
        CHECK(validate_permutation(inst, c1).ok());
        CHECK(validate_permutation(inst, c2).ok());
    }
}

TEST_CASE("shift mutation: worked example and forced two-job move") {
    CHECK(shift_mutation_at({0, 1, 2, 3, 4}, 1, 3) == Permutation{0, 2, 3, 1, 4});
    Rng rng(13);
    CHECK(shift_mutation({0, 1}, rng) == Permutation{1, 0});
    CHECK(shift_mutation({5}, rng) == Permutation{5});
    CHECK(shift_mutation({}, rng) == Permutation{});
}

TEST_CASE("shift mutation closure: valid and changes at least two positions") {
    Instance inst;
    inst.n_jobs = 20;
    inst.n_machines = 1;
    inst.proc_times.assign(1, std::vector<Duration>(20, 1));
    Rng rng(101);
    for (int trial = 0; trial < 20000; ++trial) {
        const auto perm = random_permutation(20, rng);
        const auto mutated = shift_mutation(perm, rng);
        CHECK(validate_permutation(inst, mutated).ok());
        int changed = 0;
        for (int i = 0; i < 20; ++i) changed += perm[i] != mutated[i];
        CHECK(changed >= 2);
    }
}

TEST_CASE("update_population: elitist truncation cases") {
    SUBCASE("all offspring worse leaves members unchanged") {
        auto pop = population_with_fitness({10, 20, 30, 40});
        const auto before = pop.members;
        update_population(pop, {{{9}, 99}, {{8}, 77}});
        CHECK(pop.generation == 1);
        for (int i = 0; i < 4; ++i) CHECK(pop.members[i].perm == before[i].perm);
    }
    SUBCASE("a better offspring becomes the new best") {
        auto pop = population_with_fitness({10, 20, 30, 40});
        update_population(pop, {{{9}, 5}});
        CHECK(pop.best_fitness() == 5);
        CHECK(pop.best().perm == Permutation{9});
        CHECK(pop.size() == 4);
    }
    SUBCASE("merge and truncate keeps the best M overall") {
        auto pop = population_with_fitness({10, 20, 30, 40});
        update_population(pop, {{{9}, 15}, {{8}, 35}});
        std::vector<Duration> fitness;
        for (const auto& ind : pop.members) fitness.push_back(ind.fitness);
        CHECK(fitness == std::vector<Duration>{10, 15, 20, 30});
    }
    SUBCASE("incumbent wins fitness ties") {
        auto pop = population_with_fitness({10, 20, 30, 40});
        update_population(pop, {{{9}, 40}});
        CHECK(pop.members.back().perm == Permutation{3}); // incumbent with fitness 40 stays
    }
}

TEST_CASE("average_fitness examples") {
    CHECK(average_fitness(population_with_fitness({10, 20, 30})) == doctest::Approx(20.0));
    CHECK(average_fitness(population_with_fitness({7, 7, 7, 7})) == doctest::Approx(7.0));
    CHECK(average_fitness(population_with_fitness({1338})) == doctest::Approx(1338.0));
}

TEST_CASE("population_entropy: uniform, worked, and degenerate cases") {
    CHECK(population_entropy(population_with_fitness({5, 5, 5, 5})) == doctest::Approx(2.0));
    CHECK(population_entropy(population_with_fitness({100, 300})) ==
          doctest::Approx(0.811278).epsilon(1e-4));
    CHECK(population_entropy(population_with_fitness({1338})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(population_entropy(population_with_fitness({0, 5})), ContractError);
}

TEST_CASE("population_entropy bounds hold on random populations") {
    Rng rng(271);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + static_cast<int>(rng.index(40));
        std::vector<Duration> fitness(m);
        for (auto& f : fitness) f = 1 + static_cast<Duration>(rng.index(2000));
        const double h = population_entropy(population_with_fitness(fitness));
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(static_cast<double>(m)) + 1e-12);
    }
}

TEST_CASE("ga_step: best fitness never degrades and size stays constant") {
    const auto inst = toy_20_5();
    Rng rng(33);
    auto pop = init_population(inst, 20, rng);
    Duration best = pop.best_fitness();
    for (int gen = 0; gen < 40; ++gen) {
        GenerationParams params{SelectionMethod::Rank, 0.6, 0.4};
        const auto outcome = ga_step(inst, pop, params, rng);
        CHECK(outcome.old_best >= outcome.new_best);
        CHECK(pop.best_fitness() <= best);
        best = pop.best_fitness();
        CHECK(pop.size() == 20);
        for (const auto& ind : pop.members) CHECK(validate_permutation(inst, ind.perm).ok());
        for (int i = 1; i < pop.size(); ++i)
            CHECK(pop.members[i - 1].fitness <= pop.members[i].fitness);
    }
}

TEST_CASE("ga_step: replaying the rng stream reproduces the exact step") {
    const auto inst = toy_20_5();
    for (const double p_mut : {0.0, 1.0, 0.35}) {
        Rng init_rng(55);
        auto pop = init_population(inst, 12, init_rng);
        auto replay = pop;

        const GenerationParams params{SelectionMethod::Roulette, 0.5, p_mut};
        Rng rng(91);
        const auto outcome = ga_step(inst, pop, params, rng);

        // manual replay with an identical stream
        Rng rng2(91);
        const auto pairs = select_parents(replay, params.method, params.selection_rate, rng2);
        std::vector<Individual> offspring;
        std::vector<PairOutcome> expected_pairs;
        for (const auto& [a, b] : pairs) {
            auto [c1, c2] =
                crossover_two_point_v1(replay.members[a].perm, replay.members[b].perm, rng2);
            if (rng2.bernoulli(p_mut)) c1 = shift_mutation(c1, rng2);
            if (rng2.bernoulli(p_mut)) c2 = shift_mutation(c2, rng2);
            Individual i1{c1, makespan(inst, c1)}, i2{c2, makespan(inst, c2)};
            expected_pairs.push_back(
                {replay.members[a].fitness, replay.members[b].fitness, i1.fitness, i2.fitness});
            offspring.push_back(i1);
            offspring.push_back(i2);
        }
        update_population(replay, offspring);

        REQUIRE(outcome.pairs.size() == expected_pairs.size());
        for (std::size_t k = 0; k < expected_pairs.size(); ++k) {
            CHECK(outcome.pairs[k].child1_fitness == expected_pairs[k].child1_fitness);
            CHECK(outcome.pairs[k].child2_fitness == expected_pairs[k].child2_fitness);
        }
        REQUIRE(pop.size() == replay.size());
        for (int i = 0; i < pop.size(); ++i) CHECK(pop.members[i].perm == replay.members[i].perm);
    }
}

TEST_CASE("ga_step: identical seeds give identical evolutions") {
    const auto inst = toy_20_5();
    Rng a(123), b(123);
    auto pop1 = init_population(inst, 16, a);
    auto pop2 = init_population(inst, 16, b);
    const GenerationParams params{SelectionMethod::Elitism, 0.5, 0.5};
    for (int gen = 0; gen < 25; ++gen) {
        ga_step(inst, pop1, params, a);
        ga_step(inst, pop2, params, b);
        REQUIRE(pop1.size() == pop2.size());
        for (int i = 0; i < pop1.size(); ++i) CHECK(pop1.members[i].perm == pop2.members[i].perm);
    }
}

TEST_CASE("ga_step: single-job instance stays at the chain sum") {
    Instance inst;
    inst.id = "one";
    inst.n_jobs = 1;
    inst.n_machines = 3;
    inst.proc_times = {{2}, {3}, {4}};
    Rng rng(4);
    auto pop = init_population(inst, 4, rng);
    const GenerationParams params{SelectionMethod::Roulette, 0.5, 0.5};
    ga_step(inst, pop, params, rng);
    CHECK(pop.best_fitness() == 9);
}
