#include <doctest.h>

#include <cmath>
#include <random>

#include "underlords/ilp.hpp"
#include "underlords/solver.hpp"
#include "underlords/verify.hpp"

#include "test_support.hpp"

using namespace underlords;
using test_support::powers_only_instance;

namespace {

Instance two_hero_fixture() {
    return load_instance(test_support::source_path("fixtures/two_hero.json"));
}

} // namespace

TEST_CASE("greedy special case picks the heaviest heroes") {
    SUBCASE("plain ordering") {
        const Solution sol = solve_no_alliance(powers_only_instance({5, 3, 2, 1}, 2));
        CHECK(sol.team == make_team({0, 1}));
        CHECK(sol.objective == doctest::Approx(8.0));
        CHECK(sol.proven_optimal);
    }
    SUBCASE("ties break to the smallest ids") {
        const Solution sol = solve_no_alliance(powers_only_instance({2, 2, 2}, 2));
        CHECK(sol.team == make_team({0, 1}));
        CHECK(sol.objective == doctest::Approx(4.0));
    }
    SUBCASE("cap above the roster takes everyone") {
        const Solution sol = solve_no_alliance(powers_only_instance({1, 2, 3}, 7));
        CHECK(sol.team == make_team({0, 1, 2}));
        CHECK(sol.objective == doctest::Approx(6.0));
    }
    SUBCASE("bonus tensors are out of scope") {
        CHECK_THROWS_WITH_AS(solve_no_alliance(two_hero_fixture()),
                             doctest::Contains("NotApplicable"), Error);
    }
}

TEST_CASE("brute force enumerates the documented subset count") {
    const Solution sol = brute_force(powers_only_instance({1, 2, 3, 4, 5}, 2));
    CHECK(sol.nodes_explored == 16); // C(5,0) + C(5,1) + C(5,2)
    CHECK(sol.team == make_team({3, 4}));
    CHECK(sol.objective == doctest::Approx(9.0));
}

TEST_CASE("brute force agrees with the greedy special case") {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 20; ++round) {
        const Instance inst = random_instance(rng, InstanceShape::empty_tensor);
        CHECK(brute_force(inst).objective ==
              doctest::Approx(solve_no_alliance(inst).objective).epsilon(1e-12));
    }
}

TEST_CASE("brute force solves the two-hero fixture") {
    const Solution sol = brute_force(two_hero_fixture());
    CHECK(sol.team == make_team({0, 1}));
    CHECK(sol.objective == doctest::Approx(2.5));
}

TEST_CASE("brute force guard rejects oversized enumerations") {
    CHECK_THROWS_WITH_AS(brute_force(powers_only_instance(std::vector<double>(40, 1.0), 20), 1000),
                         doctest::Contains("TooLarge"), Error);
}

TEST_CASE("optimistic bound behaviour") {
    const Instance fixture = two_hero_fixture();

    SUBCASE("formula value on the unfixed fixture") {
        // v = (1 + 0.5, 1); top-2 sum is 2.5, which also equals the optimum.
        CHECK(optimistic_bound(fixture, Team{}, {}) == doctest::Approx(2.5));
    }
    SUBCASE("admissible at leaves") {
        std::mt19937_64 rng(59);
        for (int round = 0; round < 30; ++round) {
            const Instance inst = random_instance(rng, InstanceShape::general);
            const Solution best = brute_force(inst);
            std::vector<int> out;
            for (int i = 0; i < inst.hero_count(); ++i)
                if (!best.team.contains(i)) out.push_back(i);
            CHECK(optimistic_bound(inst, best.team, out) >= best.objective - 1e-9);
        }
    }
    SUBCASE("empty tensor collapses to the exact greedy optimum") {
        std::mt19937_64 rng(61);
        for (int round = 0; round < 20; ++round) {
            const Instance inst = random_instance(rng, InstanceShape::empty_tensor);
            CHECK(optimistic_bound(inst, Team{}, {}) ==
                  doctest::Approx(solve_no_alliance(inst).objective).epsilon(1e-12));
        }
    }
    SUBCASE("restricted subproblems stay below the bound") {
        std::mt19937_64 rng(67);
        for (int round = 0; round < 30; ++round) {
            const Instance inst = random_instance(rng, InstanceShape::general);
            const int n = inst.hero_count();
            std::vector<int> pool(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
            for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
            const int in_size =
                static_cast<int>(rng() % static_cast<std::uint64_t>(
                                             std::min(inst.team_cap, n) / 2 + 1));
            const int out_size = static_cast<int>(rng() % static_cast<std::uint64_t>(n - in_size + 1));
            const Team fixed_in = make_team(std::vector<int>(pool.begin(), pool.begin() + in_size));
            const std::vector<int> fixed_out(pool.begin() + in_size,
                                             pool.begin() + in_size + out_size);
            const double bound = optimistic_bound(inst, fixed_in, fixed_out);

            // Restricted brute force over extensions of fixed_in.
            double best = -1.0;
            std::vector<int> free_ids;
            for (int i = 0; i < n; ++i)
                if (!fixed_in.contains(i) &&
                    std::find(fixed_out.begin(), fixed_out.end(), i) == fixed_out.end())
                    free_ids.push_back(i);
            std::vector<int> current = fixed_in.members;
            const auto rec = [&](auto&& self, std::size_t next) -> void {
                best = std::max(best, evaluate_team(inst, make_team(current)).total);
                if (static_cast<int>(current.size()) == inst.team_cap) return;
                for (std::size_t i = next; i < free_ids.size(); ++i) {
                    current.push_back(free_ids[i]);
                    self(self, i + 1);
                    current.pop_back();
                }
            };
            rec(rec, 0);
            CHECK(bound >= best - 1e-9);
        }
    }
    SUBCASE("contradictory fixings are rejected") {
        CHECK_THROWS_WITH_AS(optimistic_bound(fixture, make_team({0}), {0}),
                             doctest::Contains("InvalidBranch"), Error);
    }
}

TEST_CASE("branch and bound equals brute force on random instances") {
    std::mt19937_64 rng(71);
    for (int round = 0; round < 60; ++round) {
        const Instance inst = random_instance(rng, static_cast<InstanceShape>(round % 4));
        const Solution reference = brute_force(inst);
        const Solution searched = branch_and_bound(inst);
        CHECK(searched.proven_optimal);
        CHECK(searched.objective == reference.objective);
        CHECK(searched.team == reference.team);
    }
}

TEST_CASE("solver results are worker-count invariant") {
    std::mt19937_64 rng(73);
    for (int round = 0; round < 15; ++round) {
        const Instance inst = random_instance(rng, InstanceShape::general);
        SearchOptions one;
        SearchOptions four;
        four.parallel_workers = 4;
        const Solution a = branch_and_bound(inst, one);
        const Solution b = branch_and_bound(inst, four);
        CHECK(a.objective == b.objective);
        CHECK(a.team == b.team);
    }
}

TEST_CASE("returned teams are cap-feasible and model-feasible") {
    std::mt19937_64 rng(79);
    for (int round = 0; round < 20; ++round) {
        const Instance inst = random_instance(rng, InstanceShape::general);
        const Solution sol = branch_and_bound(inst);
        CHECK(sol.team.size() <= inst.team_cap);
        CHECK(sol.objective == evaluate_team(inst, sol.team).total);
        const LinearModel model = build_model(inst);
        CHECK(check_feasible(model, greedy_assignment(inst, sol.team)).empty());
        CHECK(sol.objective >= evaluate_team(inst, Team{}).total); // incumbents never regress
    }
}

TEST_CASE("zero cap returns the empty team") {
    Instance inst = two_hero_fixture();
    inst.team_cap = 0;
    const Solution sol = branch_and_bound(inst);
    CHECK(sol.team.members.empty());
    CHECK(sol.objective == 0.0);
    CHECK(sol.proven_optimal);
}

TEST_CASE("node limits return unproven incumbents") {
    const Instance inst = load_instance(test_support::source_path("data/underlords.json"));
    SearchOptions options;
    options.node_limit = 1;
    const Solution sol = branch_and_bound(inst, options);
    CHECK_FALSE(sol.proven_optimal);
    CHECK(sol.team.size() <= inst.team_cap);
    CHECK(sol.objective > 0.0); // the greedy seed is already a valid incumbent
}
