// Acceptance suite: runs every toolkit-level criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "underlords/evaluator.hpp"
#include "underlords/ilp.hpp"
#include "underlords/instance.hpp"
#include "underlords/reductions.hpp"
#include "underlords/solver.hpp"
#include "underlords/verify.hpp"

using namespace underlords;

namespace {

constexpr double kTol = 1e-9;

std::string source_path(const std::string& relative) {
    return std::string(UNDERLORDS_SOURCE_DIR) + "/" + relative;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const std::vector<std::string> kOptimalTeam = {
    "broodmother", "disruptor", "dragon knight", "lich",          "medusa",
    "necrophos",   "sand king", "sven",          "troll warlord", "witch doctor"};

struct ExpectedRow {
    const char* hero;
    double contribution;
    double power;
    double sum;
};

constexpr ExpectedRow kReferenceRows[] = {
    {"broodmother", 3.0, 3.0, 6.0},  {"disruptor", 4.0, 4.0, 8.0},
    {"dragon knight", 5.0, 5.0, 10.0}, {"lich", 4.0, 5.0, 9.0},
    {"medusa", 4.0, 5.0, 9.0},       {"necrophos", 4.0, 4.0, 8.0},
    {"sand king", 4.0, 5.0, 9.0},    {"sven", 4.0, 4.0, 8.0},
    {"troll warlord", 4.5, 5.0, 9.5}, {"witch doctor", 2.2, 2.0, 4.2},
};

int failures = 0;

void report(int criterion, bool pass, const std::string& description, const std::string& note = "") {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << "  "
              << description;
    if (!note.empty()) std::cout << "  [" << note << "]";
    std::cout << std::endl;
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Mirrors the shape schedule inside run_verify so criteria 9 and 10 reuse
// the exact criterion-3 instances.
Instance verify_case_instance(std::uint64_t seed, int case_index) {
    std::mt19937_64 rng = detail::case_rng(seed, case_index);
    InstanceShape shape;
    switch (case_index % 4) {
        case 0: shape = InstanceShape::empty_tensor; break;
        case 1: shape = InstanceShape::pair_form; break;
        case 2: shape = InstanceShape::triple_form; break;
        default: shape = InstanceShape::general; break;
    }
    return random_instance(rng, shape);
}

void criterion1_reference_rows(const Instance& roster) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string note;
    const Team team = team_from_names(roster, kOptimalTeam);
    const Evaluation eval = evaluate_team(roster, team);
    for (const ExpectedRow& row : kReferenceRows) {
        const int hero = *roster.hero_id(row.hero);
        double contribution = 0.0;
        bool found = false;
        for (const auto& [id, awards] : eval.per_hero)
            if (id == hero) {
                found = true;
                for (const BonusAward& award : awards) contribution += award.value;
            }
        const double power = roster.heroes[static_cast<std::size_t>(hero)].power;
        if (!found || std::abs(contribution - row.contribution) > kTol ||
            std::abs(power - row.power) > kTol ||
            std::abs(power + contribution - row.sum) > kTol) {
            pass = false;
            note = std::string("row mismatch for ") + row.hero;
        }
    }
    if (std::abs(eval.total - 80.7) > kTol) {
        pass = false;
        note = "total " + format_number(eval.total);
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 1.0) {
        pass = false;
        note = "took " + format_number(elapsed) + "s";
    }
    report(1, pass, "reference breakdown rows and 80.7 total reproduced within 1e-9",
           note.empty() ? format_number(eval.total) : note);
}

Solution criterion2_full_solve(const Instance& roster) {
    Instance capped = roster;
    capped.team_cap = 10;
    SearchOptions options;
    options.time_limit = std::chrono::duration<double>(900.0);
    const Solution sol = branch_and_bound(capped, options);
    bool pass = sol.proven_optimal && sol.objective >= 80.7 - kTol &&
                sol.wall_time.count() < 900.0;
    std::string note = "objective " + format_number(sol.objective) + ", " +
                       std::to_string(sol.nodes_explored) + " nodes, " +
                       format_compact(sol.wall_time.count()) + "s";

    // Soft part: exact recovery of the reference team needs the complete
    // rule set. The shipped reconstruction already attains it; an external
    // dataset at data/underlords_full.json is honoured when present.
    Instance full = capped;
    const std::string full_path = source_path("data/underlords_full.json");
    if (std::filesystem::exists(full_path)) {
        full = load_instance(full_path);
        full.team_cap = 10;
    }
    const Solution full_sol = branch_and_bound(full, options);
    const Team reference = team_from_names(full, kOptimalTeam);
    if (full_sol.team == reference && std::abs(full_sol.objective - 80.7) <= kTol)
        note += "; reference team recovered exactly";
    else
        note += "; reference team not recovered (soft)";
    report(2, pass, "full-roster solve proves optimality with objective >= 80.7", note);
    return sol;
}

void criterion3_oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const VerifyReport verify = run_verify(42, 200, 1);
    const double elapsed = seconds_since(start);
    const bool pass = verify.ok() && elapsed < 120.0;
    report(3, pass, "verify --seed 42 --cases 200 passes every cross-oracle check",
           std::to_string(verify.solver_checks) + " solver checks, " +
               std::to_string(verify.reduction_checks) + " reduction checks, " +
               format_compact(elapsed) + "s");
    if (!verify.failure_details.empty()) std::cout << verify.failure_details.front();
}

void criterion4_bigm_suite() {
    int soundness_violations = 0;
    int completeness_violations = 0;
    int feasible_samples = 0;
    for (int instance_index = 0; instance_index < 100; ++instance_index) {
        std::mt19937_64 rng = detail::case_rng(1042, instance_index);
        const Instance inst = random_instance(rng, InstanceShape::general);
        const LinearModel model = build_model(inst);
        const int n = inst.hero_count();
        for (int sample = 0; sample < 1000; ++sample) {
            std::vector<int> pool(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
            for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
            const int size =
                static_cast<int>(rng() % static_cast<std::uint64_t>(
                                             std::min(inst.team_cap, n) + 1));
            const Team team = make_team(std::vector<int>(pool.begin(), pool.begin() + size));

            // Completeness: greedy activation of a valid team is feasible.
            VariableAssignment assignment = greedy_assignment(inst, team);
            if (!check_feasible(model, assignment).empty()) ++completeness_violations;

            // Soundness over a randomly perturbed assignment.
            for (auto& [name, value] : assignment.values)
                if (name[0] == 'I' && rng() % 2 == 0) value = value == 0 ? 1 : 0;
            if (!check_feasible(model, assignment).empty()) continue;
            ++feasible_samples;
            const std::vector<int> counts = alliance_counts(inst, team);
            for (const BonusTensorEntry& e : inst.bonuses)
                if (assignment.values.at(detail::indicator_name(e)) == 1 &&
                    (!team.contains(e.hero) ||
                     counts[static_cast<std::size_t>(e.alliance)] < e.threshold))
                    ++soundness_violations;
        }
    }
    report(4, soundness_violations == 0 && completeness_violations == 0,
           "big-M linking sound and complete over 100 instances x 1000 samples",
           std::to_string(feasible_samples) + " feasible samples, " +
               std::to_string(soundness_violations + completeness_violations) + " violations");
}

void criterion5_basic_reduction() {
    int checked = 0;
    bool pass = true;
    std::mt19937_64 rng(2042);
    while (checked < 50) {
        const Instance inst = random_instance(rng, InstanceShape::empty_tensor, GenBounds{2, 6, 2, 3});
        if (inst.team_cap < 2 || inst.hero_count() < inst.team_cap) continue;
        ++checked;
        const CliqueSolution clique = solve_mewc_exact(du_to_mewc_basic(inst));
        const Solution exact = brute_force_exact_size(inst, inst.team_cap);
        if (std::abs(clique.weight - exact.objective) > kTol) pass = false;
    }
    report(5, pass, "no-alliance reduction equals the exact-size optimum on 50 instances");
}

void criterion6_pair_reduction() {
    int checked = 0;
    bool pass = true;
    std::mt19937_64 rng(3042);
    while (checked < 30) {
        const Instance inst = random_instance(rng, InstanceShape::pair_form);
        const WeightedGraph graph = du_to_mewc_pairs(inst);
        if (graph.vertex_count > 64) continue;
        ++checked;
        const CliqueSolution clique = solve_mewc_exact(graph);
        const Solution exact = brute_force_exact_size(inst, inst.team_cap);
        const double heavy_total =
            2.0 * static_cast<double>(detail::binomial(inst.team_cap, 2)) * graph.heavy_n;
        if (std::abs(clique.weight - heavy_total - exact.objective) > kTol) pass = false;
        const Team recovered = clique_to_team(graph, clique);
        if (std::abs(evaluate_team(inst, recovered).total - exact.objective) > kTol) pass = false;
    }

    const Instance four_hero = load_instance(source_path("fixtures/four_hero_pairs.json"));
    const WeightedGraph graph = du_to_mewc_pairs(four_hero);
    const CliqueSolution best = solve_mewc_exact(graph);
    const bool fixture_ok = graph.vertex_count == 30 && best.vertices.size() == 6;
    report(6, pass && fixture_ok,
           "pair reduction equals the exact-size optimum on 30 instances; 4-hero pair graph is 30 "
           "vertices with a 6-clique",
           fixture_ok ? "" : "pair-fixture mismatch");
}

void criterion7_triple_reduction() {
    int checked = 0;
    bool pass = true;
    std::mt19937_64 rng(4042);
    while (checked < 10) {
        const Instance inst = random_instance(rng, InstanceShape::triple_form);
        const WeightedGraph graph = du_to_mewc_general(inst, 3);
        if (graph.vertex_count > 64) continue;
        ++checked;
        const CliqueSolution clique = solve_mewc_exact(graph);
        const Solution exact = brute_force_exact_size(inst, inst.team_cap);
        const double heavy_total =
            3.0 * static_cast<double>(detail::binomial(inst.team_cap, 3)) * graph.heavy_n;
        if (std::abs(clique.weight - heavy_total - exact.objective) > kTol) pass = false;
    }
    report(7, pass, "size-3 reduction equals the exact-size optimum on 10 instances");
}

void criterion8_dks_equivalence() {
    bool pass = true;
    std::mt19937_64 rng(5042);
    for (int round = 0; round < 30; ++round) {
        const int n = 2 + static_cast<int>(rng() % 7); // up to 8 vertices
        SimpleGraph graph;
        graph.vertex_count = n;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng() % 2 == 0) graph.edges.emplace_back(u, v);
        for (int k = 1; k <= n; ++k) {
            const Instance inst = dks_to_du({graph, k});
            int best_edges = -1;
            std::vector<int> chosen;
            const auto rec = [&](auto&& self, int next) -> void {
                if (static_cast<int>(chosen.size()) == k) {
                    int edges = 0;
                    for (const auto& [u, v] : graph.edges)
                        if (std::binary_search(chosen.begin(), chosen.end(), u) &&
                            std::binary_search(chosen.begin(), chosen.end(), v))
                            ++edges;
                    best_edges = std::max(best_edges, edges);
                    if (std::abs(evaluate_team(inst, Team{chosen}).total -
                                 (static_cast<double>(k) + 2.0 * edges)) > kTol)
                        pass = false;
                    return;
                }
                for (int i = next; i < n; ++i) {
                    chosen.push_back(i);
                    self(self, i + 1);
                    chosen.pop_back();
                }
            };
            rec(rec, 0);
            if (std::abs(brute_force(inst).objective -
                         (static_cast<double>(k) + 2.0 * best_edges)) > kTol)
                pass = false;
        }
    }
    report(8, pass, "densest-subgraph reduction selects exactly the max-edge subsets (30 graphs)");
}

void criterion9_determinism(const Instance& roster, const Solution& sequential_full) {
    Instance capped = roster;
    capped.team_cap = 10;
    SearchOptions four;
    four.parallel_workers = 4;
    const Solution parallel_full = branch_and_bound(capped, four);
    bool pass = parallel_full.team == sequential_full.team &&
                parallel_full.objective == sequential_full.objective;

    for (int case_index = 0; case_index < 200 && pass; ++case_index) {
        const Instance inst = verify_case_instance(42, case_index);
        const Solution a = branch_and_bound(inst);
        const Solution b = branch_and_bound(inst, four);
        if (!(a.team == b.team) || a.objective != b.objective) pass = false;
    }
    report(9, pass, "solver results are bit-identical with 1 and 4 workers");
}

void criterion10_format_stability() {
    bool pass = true;
    std::string note;

    const struct {
        const char* fixture;
        const char* golden;
        bool lp;
    } goldens[] = {
        {"fixtures/two_hero.json", "fixtures/two_hero.lp", true},
        {"fixtures/three_hero.json", "fixtures/three_hero.lp", true},
        {"fixtures/three_hero.json", "fixtures/three_hero_basic.dot", false},
        {"fixtures/four_hero_pairs.json", "fixtures/four_hero_pairs.dot", false},
    };
    for (const auto& g : goldens) {
        const Instance inst = load_instance(source_path(g.fixture));
        const std::string produced =
            g.lp ? export_lp(build_model(inst))
                 : (std::string(g.golden).find("pairs") != std::string::npos
                        ? export_dot(du_to_mewc_pairs(inst))
                        : export_dot(du_to_mewc_basic(inst)));
        if (produced != read_file(source_path(g.golden))) {
            pass = false;
            note = std::string("golden mismatch: ") + g.golden;
        }
    }

    for (int case_index = 0; case_index < 200 && pass; ++case_index) {
        const Instance inst = verify_case_instance(42, case_index);
        const LinearModel model = build_model(inst);
        if (!(import_lp(export_lp(model)) == model)) {
            pass = false;
            note = "round-trip failure on verify case " + std::to_string(case_index);
        }
    }
    report(10, pass, "LP round-trips on all verify-suite instances; golden files byte-stable", note);
}

} // namespace

int main() {
    const Instance roster = load_instance(source_path("data/underlords.json"));

    criterion1_reference_rows(roster);
    const Solution full = criterion2_full_solve(roster);
    criterion3_oracle_equivalence();
    criterion4_bigm_suite();
    criterion5_basic_reduction();
    criterion6_pair_reduction();
    criterion7_triple_reduction();
    criterion8_dks_equivalence();
    criterion9_determinism(roster, full);
    criterion10_format_stability();

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
