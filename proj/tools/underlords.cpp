// Command-line surface for the team-selection toolkit: load datasets,
// solve and evaluate teams, export models and reduction graphs, run the
// cross-verification suites.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "underlords/errors.hpp"
#include "underlords/evaluator.hpp"
#include "underlords/format.hpp"
#include "underlords/ilp.hpp"
#include "underlords/instance.hpp"
#include "underlords/reductions.hpp"
#include "underlords/solver.hpp"
#include "underlords/verify.hpp"

namespace {

using namespace underlords;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitDataError = 2;
constexpr int kExitGuardAbort = 3;

nlohmann::ordered_json breakdown_json(const Instance& inst, const Evaluation& eval) {
    struct Row {
        std::string name;
        nlohmann::ordered_json bonuses;
        double contribution;
        double power;
    };
    std::vector<Row> rows;
    for (const auto& [hero, awards] : eval.per_hero) {
        Row row;
        row.name = inst.heroes[static_cast<std::size_t>(hero)].name;
        row.power = inst.heroes[static_cast<std::size_t>(hero)].power;
        row.contribution = 0.0;
        row.bonuses = nlohmann::ordered_json::array();
        std::vector<BonusAward> sorted = awards;
        std::sort(sorted.begin(), sorted.end(), [&](const BonusAward& a, const BonusAward& b) {
            const std::string& an = inst.alliance_names[static_cast<std::size_t>(a.alliance)];
            const std::string& bn = inst.alliance_names[static_cast<std::size_t>(b.alliance)];
            if (an != bn) return an < bn;
            return a.threshold < b.threshold;
        });
        for (const BonusAward& award : sorted) {
            row.bonuses.push_back(
                {{"alliance", inst.alliance_names[static_cast<std::size_t>(award.alliance)]},
                 {"threshold", award.threshold},
                 {"value", award.value}});
            row.contribution += award.value;
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.name < b.name; });

    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (Row& row : rows)
        out.push_back({{"hero", row.name},
                       {"bonuses", std::move(row.bonuses)},
                       {"alliance_contribution", row.contribution},
                       {"power", row.power},
                       {"sum", row.power + row.contribution}});
    return out;
}

nlohmann::ordered_json team_names_json(const Instance& inst, const Team& team) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (int id : team.members) names.push_back(inst.heroes[static_cast<std::size_t>(id)].name);
    return names;
}

int cmd_solve(const std::string& dataset, std::optional<int> cap, const std::string& format,
              int workers, std::optional<double> time_limit) {
    Instance inst = load_instance(dataset);
    if (cap) {
        if (*cap < 0) raise(Errc::format_error, "--cap must be >= 0");
        inst.team_cap = *cap;
    }
    SearchOptions options;
    options.parallel_workers = workers;
    if (time_limit) options.time_limit = std::chrono::duration<double>(*time_limit);
    const Solution sol = branch_and_bound(inst, options);
    const Evaluation eval = evaluate_team(inst, sol.team);

    if (format == "json") {
        nlohmann::ordered_json out;
        out["team"] = team_names_json(inst, sol.team);
        out["objective"] = sol.objective;
        out["proven_optimal"] = sol.proven_optimal;
        out["breakdown"] = breakdown_json(inst, eval);
        out["nodes"] = sol.nodes_explored;
        out["wall_time"] = sol.wall_time.count();
        std::cout << out.dump(2) << "\n";
    } else {
        char wall[32];
        std::snprintf(wall, sizeof(wall), "%.3f", sol.wall_time.count());
        std::cout << render_breakdown(inst, eval);
        std::cout << "objective: " << format_compact(sol.objective) << "\n";
        std::cout << "proven optimal: " << (sol.proven_optimal ? "yes" : "no") << "\n";
        std::cout << "nodes: " << sol.nodes_explored << "\n";
        std::cout << "wall time: " << wall << "s\n";
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& dataset, const std::vector<std::string>& names,
                 const std::string& format) {
    const Instance inst = load_instance(dataset);
    const Team team = team_from_names(inst, names);
    const Evaluation eval = evaluate_team(inst, team);
    if (format == "json") {
        nlohmann::ordered_json out;
        out["team"] = team_names_json(inst, team);
        out["objective"] = eval.total;
        out["breakdown"] = breakdown_json(inst, eval);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << render_breakdown(inst, eval);
    }
    return kExitOk;
}

int cmd_export(const std::string& dataset, const std::string& what, const std::string& out_path,
               std::optional<int> q) {
    const Instance inst = load_instance(dataset);
    std::string payload;
    if (what == "lp") {
        payload = export_lp(build_model(inst));
    } else if (what == "dot-basic") {
        payload = export_dot(du_to_mewc_basic(inst));
    } else if (what == "dot-pairs") {
        payload = export_dot(du_to_mewc_pairs(inst));
    } else if (what == "dot-general") {
        payload = export_dot(du_to_mewc_general(inst, q.value_or(inst.max_alliance_size)));
    } else {
        raise(Errc::format_error, "unknown export target '" + what +
                                      "' (expected lp, dot-basic, dot-pairs or dot-general)");
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(Errc::format_error, "cannot write output file '" + out_path + "'");
    out << payload;
    return kExitOk;
}

int cmd_verify(std::uint64_t seed, int cases, int workers) {
    const VerifyReport report = run_verify(seed, cases, workers, &std::cout);
    std::cout << "cases: " << report.cases << "\n";
    std::cout << "solver-oracle checks: " << report.solver_checks << "\n";
    std::cout << "big-M checks: " << report.bigm_checks << "\n";
    std::cout << "reduction checks: " << report.reduction_checks << "\n";
    std::cout << "lp-roundtrip checks: " << report.roundtrip_checks << "\n";
    std::cout << "failures: " << report.failures << "\n";
    for (const std::string& detail : report.failure_details)
        std::cerr << "---\n" << detail;
    return report.ok() ? kExitOk : kExitVerifyFailed;
}

SimpleGraph read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::format_error, "cannot open graph file '" + path + "'");
    SimpleGraph graph;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream tokens(line);
        long long u = 0, v = 0;
        if (!(tokens >> u)) continue; // blank or comment-only line
        if (!(tokens >> v) || u < 0 || v < 0)
            raise(Errc::format_error, "line " + std::to_string(line_number) +
                                          ": expected two non-negative vertex ids");
        std::string trailing;
        if (tokens >> trailing)
            raise(Errc::format_error, "line " + std::to_string(line_number) + ": trailing content");
        if (u == v)
            raise(Errc::format_error, "line " + std::to_string(line_number) + ": self-loop");
        if (u > v) std::swap(u, v);
        graph.edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        graph.vertex_count = std::max(graph.vertex_count, static_cast<int>(v) + 1);
    }
    std::sort(graph.edges.begin(), graph.edges.end());
    const auto dup = std::adjacent_find(graph.edges.begin(), graph.edges.end());
    if (dup != graph.edges.end())
        raise(Errc::format_error, "duplicate edge (" + std::to_string(dup->first) + "," +
                                      std::to_string(dup->second) + ")");
    return graph;
}

int cmd_reduce_dks(const std::string& graph_path, int k, const std::string& out_path,
                   double base_power, double edge_bonus) {
    DksInstance dks;
    dks.graph = read_edge_list(graph_path);
    dks.k = k;
    save_instance(dks_to_du(dks, base_power, edge_bonus), out_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact team-composition toolkit for auto-chess rosters"};
    app.require_subcommand(1);

    std::string dataset;
    std::string format = "table";
    std::optional<int> cap;
    int workers = 1;
    std::optional<double> time_limit;

    CLI::App* solve = app.add_subcommand("solve", "Find a provably optimal team for a dataset");
    solve->add_option("dataset", dataset, "dataset JSON file")->required();
    solve->add_option("--cap", cap, "override the dataset team cap");
    solve->add_option("--format", format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));
    solve->add_option("--workers", workers, "parallel search workers")->check(CLI::PositiveNumber);
    solve->add_option("--time-limit", time_limit, "seconds before returning the incumbent");

    std::vector<std::string> team_names;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a fixed team with a full breakdown");
    evaluate->add_option("dataset", dataset, "dataset JSON file")->required();
    evaluate->add_option("team", team_names, "hero names")->required();
    evaluate->add_option("--format", format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));

    std::string what;
    std::string out_path;
    std::optional<int> general_q;
    CLI::App* exporter = app.add_subcommand("export", "Write the MILP or a reduction graph");
    exporter->add_option("dataset", dataset, "dataset JSON file")->required();
    exporter->add_option("what", what, "lp, dot-basic, dot-pairs or dot-general")->required();
    exporter->add_option("out", out_path, "output file")->required();
    exporter->add_option("--q", general_q, "alliance size for dot-general");

    std::uint64_t seed = 0;
    int cases = 100;
    CLI::App* verify = app.add_subcommand("verify", "Run the cross-oracle property suites");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--cases", cases, "number of random instances")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--workers", workers, "parallel search workers")->check(CLI::PositiveNumber);

    std::string graph_path;
    int k = 1;
    double base_power = 1.0;
    double edge_bonus = 1.0;
    CLI::App* reduce = app.add_subcommand("reduce-dks", "Densest-k-subgraph to dataset reduction");
    reduce->add_option("graph", graph_path, "edge list file (u v per line, 0-based, # comments)")
        ->required();
    reduce->add_option("k", k, "subgraph size")->required();
    reduce->add_option("out", out_path, "output dataset file")->required();
    reduce->add_option("--base-power", base_power, "hero power for every vertex");
    reduce->add_option("--edge-bonus", edge_bonus, "bonus granted to both endpoints of an edge");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(dataset, cap, format, workers, time_limit);
        if (evaluate->parsed()) return cmd_evaluate(dataset, team_names, format);
        if (exporter->parsed()) return cmd_export(dataset, what, out_path, general_q);
        if (verify->parsed()) return cmd_verify(seed, cases, workers);
        if (reduce->parsed()) return cmd_reduce_dks(graph_path, k, out_path, base_power, edge_bonus);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_guard_abort() ? kExitGuardAbort : kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitOk;
}
