#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "underlords/errors.hpp"
#include "underlords/evaluator.hpp"
#include "underlords/ilp.hpp"
#include "underlords/instance.hpp"
#include "underlords/reductions.hpp"
#include "underlords/solver.hpp"

namespace underlords {

enum class InstanceShape { general, empty_tensor, pair_form, triple_form };

struct GenBounds {
    int min_n = 2;
    int max_n = 12;
    int min_m = 1;
    int max_m = 5;
};

namespace detail {

// mt19937_64 output is standardised, so these stay reproducible across
// platforms (uniform_int_distribution would not).
inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double rand_tenths(std::mt19937_64& rng, int lo_tenths, int hi_tenths) {
    return static_cast<double>(rand_int(rng, lo_tenths, hi_tenths)) / 10.0;
}

inline std::mt19937_64 case_rng(std::uint64_t seed, int case_index) {
    return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL +
                           static_cast<std::uint64_t>(case_index) * 0x2545F4914F6CDD1DULL + 1);
}

} // namespace detail

/// Seeded instance generator used by the verify command and the
/// acceptance suites. Every emitted instance is valid by construction.
inline Instance random_instance(std::mt19937_64& rng, InstanceShape shape,
                                const GenBounds& bounds = {}) {
    using detail::rand_int;
    using detail::rand_tenths;

    if (shape == InstanceShape::pair_form || shape == InstanceShape::triple_form) {
        const int q = shape == InstanceShape::pair_form ? 2 : 3;
        const int m = std::max(q, std::min(rand_int(rng, q, 3), bounds.max_m));
        const int n = rand_int(rng, std::max(m, q), std::max(std::min(5, bounds.max_n), std::max(m, q)));

        std::vector<Hero> heroes(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            heroes[static_cast<std::size_t>(i)].name = "h" + std::to_string(i);
            heroes[static_cast<std::size_t>(i)].power = rand_tenths(rng, 0, 50);
        }
        std::vector<std::vector<int>> groups;
        std::vector<bool> covered(static_cast<std::size_t>(n), false);
        const auto add_group = [&](std::vector<int> members) {
            std::sort(members.begin(), members.end());
            const std::string name = "g" + std::to_string(groups.size());
            for (int i : members) {
                heroes[static_cast<std::size_t>(i)].alliances.push_back(name);
                covered[static_cast<std::size_t>(i)] = true;
            }
            groups.push_back(std::move(members));
        };
        for (int i = 0; i < n; ++i) {
            if (covered[static_cast<std::size_t>(i)]) continue;
            std::vector<int> members{i};
            while (static_cast<int>(members.size()) < q) {
                const int other = rand_int(rng, 0, n - 1);
                if (std::find(members.begin(), members.end(), other) == members.end())
                    members.push_back(other);
            }
            add_group(std::move(members));
        }
        const int extras = rand_int(rng, 0, 2);
        for (int e = 0; e < extras; ++e) {
            std::vector<int> members;
            while (static_cast<int>(members.size()) < q) {
                const int other = rand_int(rng, 0, n - 1);
                if (std::find(members.begin(), members.end(), other) == members.end())
                    members.push_back(other);
            }
            add_group(std::move(members));
        }
        std::vector<BonusRule> rules;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (rand_int(rng, 0, 2) == 0) continue; // some alliances stay bonus-free
            BonusRule rule;
            rule.alliance = "g" + std::to_string(g);
            rule.threshold = q;
            rule.member_percent = rand_tenths(rng, 1, 3);
            rule.global_percent = rand_int(rng, 0, 1) == 0 ? 0.0 : 0.1;
            rules.push_back(std::move(rule));
        }
        return make_instance(std::move(heroes), rules, {}, m);
    }

    const int n = rand_int(rng, bounds.min_n, bounds.max_n);
    const int m = rand_int(rng, bounds.min_m, bounds.max_m);
    const int t = rand_int(rng, 1, 4);
    static const char* kNames[] = {"alpha", "beta", "gamma", "delta"};

    std::vector<Hero> heroes(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> members(static_cast<std::size_t>(t));
    for (int i = 0; i < n; ++i) {
        heroes[static_cast<std::size_t>(i)].name = "h" + std::to_string(i);
        heroes[static_cast<std::size_t>(i)].power = rand_tenths(rng, 0, 50);
    }
    for (int j = 0; j < t; ++j) {
        for (int i = 0; i < n; ++i)
            if (rand_int(rng, 0, 4) < 2) members[static_cast<std::size_t>(j)].push_back(i);
        if (members[static_cast<std::size_t>(j)].empty())
            members[static_cast<std::size_t>(j)].push_back(rand_int(rng, 0, n - 1));
        for (int i : members[static_cast<std::size_t>(j)])
            heroes[static_cast<std::size_t>(i)].alliances.push_back(kNames[j]);
    }
    for (int i = 0; i < n; ++i)
        if (heroes[static_cast<std::size_t>(i)].alliances.empty()) {
            const int j = rand_int(rng, 0, t - 1);
            heroes[static_cast<std::size_t>(i)].alliances.push_back(kNames[j]);
            members[static_cast<std::size_t>(j)].push_back(i);
        }

    std::vector<BonusRule> rules;
    std::vector<BonusTensorEntry> entries;
    if (shape == InstanceShape::general) {
        // Explicit entries carry alliance ids, which follow first
        // appearance over hero lists rather than generation order.
        const std::vector<std::string> alliance_order = detail::collect_alliances(heroes);
        const auto collected_id = [&](int gen_j) {
            return static_cast<int>(std::find(alliance_order.begin(), alliance_order.end(),
                                              kNames[gen_j]) -
                                    alliance_order.begin());
        };
        std::vector<std::pair<int, int>> used; // (alliance id, threshold) taken by rules
        const int rule_count = rand_int(rng, 0, 3);
        for (int r = 0; r < rule_count; ++r) {
            const int j = rand_int(rng, 0, t - 1);
            const int size_j = static_cast<int>(members[static_cast<std::size_t>(j)].size());
            BonusRule rule;
            rule.alliance = kNames[j];
            rule.threshold = rand_int(rng, 1, std::max(size_j, 1));
            if (std::find(used.begin(), used.end(),
                          std::make_pair(collected_id(j), rule.threshold)) != used.end())
                continue;
            used.emplace_back(collected_id(j), rule.threshold);
            rule.member_percent = rand_tenths(rng, 0, 3);
            rule.global_percent = rand_int(rng, 0, 2) == 0 ? 0.1 : 0.0;
            rules.push_back(std::move(rule));
        }
        const int entry_count = rand_int(rng, 0, 3);
        for (int r = 0; r < entry_count; ++r) {
            const int j = rand_int(rng, 0, t - 1);
            const int size_j = static_cast<int>(members[static_cast<std::size_t>(j)].size());
            const int k = rand_int(rng, 1, std::max(size_j, 1));
            if (std::find(used.begin(), used.end(), std::make_pair(collected_id(j), k)) != used.end())
                continue;
            entries.push_back({rand_int(rng, 0, n - 1), collected_id(j), k, rand_tenths(rng, 1, 10)});
        }
        std::sort(entries.begin(), entries.end(), tensor_key_less);
        entries.erase(std::unique(entries.begin(), entries.end(),
                                  [](const BonusTensorEntry& a, const BonusTensorEntry& b) {
                                      return !tensor_key_less(a, b) && !tensor_key_less(b, a);
                                  }),
                      entries.end());
    }
    return make_instance(std::move(heroes), rules, std::move(entries), m);
}

/// Oracle over teams of exactly `size` heroes (the clique reductions
/// optimise this variant).
inline Solution brute_force_exact_size(const Instance& inst, int size) {
    const int n = inst.hero_count();
    if (size > n) raise(Errc::not_enough_heroes, "cannot field " + std::to_string(size) +
                                                     " of " + std::to_string(n) + " heroes");
    Solution sol;
    std::vector<int> current;
    bool have_best = false;
    std::uint64_t evaluated = 0;
    const auto rec = [&](auto&& self, int next) -> void {
        if (static_cast<int>(current.size()) == size) {
            ++evaluated;
            Team team{current};
            const double value = evaluate_team(inst, team).total;
            if (!have_best ||
                detail::candidate_improves(value, team.members, sol.objective, sol.team.members)) {
                sol.objective = value;
                sol.team = std::move(team);
                have_best = true;
            }
            return;
        }
        for (int i = next; i < n; ++i) {
            if (n - i < size - static_cast<int>(current.size())) break;
            current.push_back(i);
            self(self, i + 1);
            current.pop_back();
        }
    };
    rec(rec, 0);
    sol.proven_optimal = true;
    sol.nodes_explored = evaluated;
    return sol;
}

struct VerifyReport {
    int cases = 0;
    int solver_checks = 0;
    int bigm_checks = 0;
    int reduction_checks = 0;
    int roundtrip_checks = 0;
    int failures = 0;
    std::vector<std::string> failure_details;

    bool ok() const { return failures == 0; }
};

namespace detail {

inline std::string reproducer(std::uint64_t seed, int case_index, const std::string& check,
                              const Instance& inst) {
    return "seed=" + std::to_string(seed) + " case=" + std::to_string(case_index) +
           " check=" + check + "\n" + serialize_instance(inst);
}

} // namespace detail

/// Cross-oracle suite over seeded random instances: solver equivalence,
/// big-M soundness/completeness, LP round-trips and the clique-reduction
/// equalities on shapes that admit them.
inline VerifyReport run_verify(std::uint64_t seed, int cases, int workers = 1,
                               std::ostream* log = nullptr) {
    VerifyReport report;
    constexpr double kTol = 1e-9;
    for (int case_index = 0; case_index < cases; ++case_index) {
        std::mt19937_64 rng = detail::case_rng(seed, case_index);
        InstanceShape shape;
        switch (case_index % 4) {
            case 0: shape = InstanceShape::empty_tensor; break;
            case 1: shape = InstanceShape::pair_form; break;
            case 2: shape = InstanceShape::triple_form; break;
            default: shape = InstanceShape::general; break;
        }
        const Instance inst = random_instance(rng, shape);
        ++report.cases;

        const auto fail = [&](const std::string& check, const std::string& message) {
            ++report.failures;
            if (report.failure_details.size() < 8)
                report.failure_details.push_back(
                    message + "\n" + detail::reproducer(seed, case_index, check, inst));
            if (log) *log << "case " << case_index << " FAILED: " << message << "\n";
        };

        // Solver oracle equivalence.
        const Solution reference = brute_force(inst);
        SearchOptions options;
        options.parallel_workers = workers;
        const Solution searched = branch_and_bound(inst, options);
        ++report.solver_checks;
        if (std::abs(reference.objective - searched.objective) > kTol ||
            !(reference.team == searched.team) || !searched.proven_optimal)
            fail("solver_oracle",
                 "branch_and_bound disagrees with brute_force (got " +
                     format_number(searched.objective) + ", expected " +
                     format_number(reference.objective) + ")");

        // Big-M completeness: the greedy activation of the optimal team is
        // feasible and reproduces the evaluator's objective.
        const LinearModel model = build_model(inst);
        ++report.bigm_checks;
        {
            const VariableAssignment greedy = greedy_assignment(inst, reference.team);
            if (!check_feasible(model, greedy).empty())
                fail("bigm_completeness", "greedy activation of the optimal team is infeasible");
            else if (std::abs(objective_value(model, greedy) - reference.objective) > kTol)
                fail("bigm_completeness", "model objective disagrees with the evaluator");
        }
        // Big-M soundness: every feasible sampled assignment only switches
        // indicators whose alliances really reach their thresholds.
        for (int sample = 0; sample < 40; ++sample) {
            std::vector<int> pool(static_cast<std::size_t>(inst.hero_count()));
            for (int i = 0; i < inst.hero_count(); ++i) pool[static_cast<std::size_t>(i)] = i;
            for (std::size_t i = pool.size(); i > 1; --i)
                std::swap(pool[i - 1], pool[rng() % i]);
            const int size = detail::rand_int(rng, 0, std::min(inst.team_cap, inst.hero_count()));
            Team team = make_team(std::vector<int>(pool.begin(), pool.begin() + size));

            VariableAssignment assignment = greedy_assignment(inst, team);
            for (auto& [name, value] : assignment.values)
                if (name[0] == 'I' && detail::rand_int(rng, 0, 1) == 0)
                    value = value == 0 ? 1 : 0; // perturb indicators both ways
            if (!check_feasible(model, assignment).empty()) continue;
            const std::vector<int> counts = alliance_counts(inst, team);
            for (const BonusTensorEntry& e : inst.bonuses) {
                const std::string name = detail::indicator_name(e);
                if (assignment.values.at(name) == 1 &&
                    (!team.contains(e.hero) ||
                     counts[static_cast<std::size_t>(e.alliance)] < e.threshold)) {
                    fail("bigm_soundness", "feasible assignment activates " + name +
                                               " without the required alliance members");
                    break;
                }
            }
        }

        // LP export/import round-trip.
        ++report.roundtrip_checks;
        if (!(import_lp(export_lp(model)) == model))
            fail("lp_roundtrip", "LP text does not round-trip structurally");

        // Reduction equalities on shapes that admit them.
        const int n = inst.hero_count();
        const int m = inst.team_cap;
        if (shape == InstanceShape::empty_tensor && m >= 2 && n >= m && m * n <= 64) {
            ++report.reduction_checks;
            const CliqueSolution clique = solve_mewc_exact(du_to_mewc_basic(inst));
            const Solution exact = brute_force_exact_size(inst, m);
            if (std::abs(clique.weight - exact.objective) > kTol)
                fail("reduction_basic", "slot-graph clique weight " + format_number(clique.weight) +
                                            " != exact-size optimum " +
                                            format_number(exact.objective));
        }
        const std::uint64_t group_vertices =
            shape == InstanceShape::pair_form
                ? detail::binomial(m, 2) * detail::binomial(n, 2)
                : detail::binomial(m, 3) * detail::binomial(n, 3);
        if ((shape == InstanceShape::pair_form || shape == InstanceShape::triple_form) &&
            static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n) + group_vertices <= 64) {
            const int q = shape == InstanceShape::pair_form ? 2 : 3;
            ++report.reduction_checks;
            const WeightedGraph graph =
                q == 2 ? du_to_mewc_pairs(inst) : du_to_mewc_general(inst, q);
            const CliqueSolution clique = solve_mewc_exact(graph);
            const Solution exact = brute_force_exact_size(inst, m);
            const double shifted =
                clique.weight -
                static_cast<double>(q) * static_cast<double>(detail::binomial(m, q)) * graph.heavy_n;
            if (std::abs(shifted - exact.objective) > kTol) {
                fail("reduction_q" + std::to_string(q),
                     "shifted clique weight " + format_number(shifted) + " != exact-size optimum " +
                         format_number(exact.objective));
            } else {
                const Team recovered = clique_to_team(graph, clique);
                if (std::abs(evaluate_team(inst, recovered).total - exact.objective) > kTol)
                    fail("reduction_team", "clique_to_team does not recover an optimal team");
            }
        }

        if (log && (case_index + 1) % 50 == 0)
            *log << "  " << (case_index + 1) << "/" << cases << " cases checked\n";
    }
    return report;
}

} // namespace underlords
