#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "underlords/errors.hpp"
#include "underlords/evaluator.hpp"
#include "underlords/format.hpp"
#include "underlords/instance.hpp"

namespace underlords {

enum class Relation { less_equal, greater_equal };

struct LinearTerm {
    int variable = 0; // index into LinearModel::variables
    double coefficient = 0.0;
};

inline bool operator==(const LinearTerm& a, const LinearTerm& b) {
    return a.variable == b.variable && a.coefficient == b.coefficient;
}

struct LinearConstraint {
    std::string name;
    std::vector<LinearTerm> terms; // ordered by variable index
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

inline bool operator==(const LinearConstraint& a, const LinearConstraint& b) {
    return a.name == b.name && a.terms == b.terms && a.relation == b.relation && a.rhs == b.rhs;
}

/// Solver-agnostic MILP: all variables binary, objective maximised.
/// Variable order is canonical: x_<hero> by hero id, then
/// I_<hero>_<alliance>_<k> in tensor order.
struct LinearModel {
    std::vector<std::string> variables;
    std::vector<double> objective; // aligned with variables
    std::vector<LinearConstraint> constraints;
    double big_m = 0.0;

    int variable_index(std::string_view name) const {
        for (std::size_t v = 0; v < variables.size(); ++v)
            if (variables[v] == name) return static_cast<int>(v);
        return -1;
    }
};

inline bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.variables == b.variables && a.objective == b.objective &&
           a.constraints == b.constraints && a.big_m == b.big_m;
}

struct VariableAssignment {
    std::map<std::string, int> values; // name -> {0, 1}
};

namespace detail {

inline std::string x_name(int hero) { return "x_" + std::to_string(hero); }

inline std::string indicator_name(const BonusTensorEntry& e) {
    return "I_" + std::to_string(e.hero) + "_" + std::to_string(e.alliance) + "_" +
           std::to_string(e.threshold);
}

inline std::string link_name(const BonusTensorEntry& e) {
    return "link_" + std::to_string(e.hero) + "_" + std::to_string(e.alliance) + "_" +
           std::to_string(e.threshold);
}

inline std::string act_name(const BonusTensorEntry& e) {
    return "act_" + std::to_string(e.hero) + "_" + std::to_string(e.alliance) + "_" +
           std::to_string(e.threshold);
}

} // namespace detail

/// Build the team-selection MILP: binary x_i per hero, binary I_ijk per
/// stored tensor entry (zero-bonus indicators are never created), big-M
/// linking with M = q + 1:
///   cap:   sum x_i <= m
///   link:  sum_{i' in alliance j} x_i' - M I_ijk >= k - M
///   act:   I_ijk - x_i <= 0
inline LinearModel build_model(const Instance& inst) {
    if (inst.heroes.empty()) raise(Errc::empty_instance, "cannot build a model with no heroes");
    LinearModel model;
    model.big_m = static_cast<double>(inst.max_alliance_size + 1);

    const int n = inst.hero_count();
    for (int i = 0; i < n; ++i) {
        model.variables.push_back(detail::x_name(i));
        model.objective.push_back(inst.heroes[static_cast<std::size_t>(i)].power);
    }
    for (const BonusTensorEntry& e : inst.bonuses) {
        model.variables.push_back(detail::indicator_name(e));
        model.objective.push_back(e.value);
    }

    LinearConstraint cap;
    cap.name = "cap";
    for (int i = 0; i < n; ++i) cap.terms.push_back({i, 1.0});
    cap.relation = Relation::less_equal;
    cap.rhs = static_cast<double>(inst.team_cap);
    model.constraints.push_back(std::move(cap));

    for (std::size_t idx = 0; idx < inst.bonuses.size(); ++idx) {
        const BonusTensorEntry& e = inst.bonuses[idx];
        const int indicator = n + static_cast<int>(idx);
        LinearConstraint link;
        link.name = detail::link_name(e);
        for (int i : inst.alliance_members[static_cast<std::size_t>(e.alliance)])
            link.terms.push_back({i, 1.0});
        link.terms.push_back({indicator, -model.big_m});
        link.relation = Relation::greater_equal;
        link.rhs = static_cast<double>(e.threshold) - model.big_m;
        model.constraints.push_back(std::move(link));
    }
    for (std::size_t idx = 0; idx < inst.bonuses.size(); ++idx) {
        const BonusTensorEntry& e = inst.bonuses[idx];
        const int indicator = n + static_cast<int>(idx);
        LinearConstraint act;
        act.name = detail::act_name(e);
        act.terms.push_back({e.hero, -1.0}); // hero indices precede indicators
        act.terms.push_back({indicator, 1.0});
        act.relation = Relation::less_equal;
        act.rhs = 0.0;
        model.constraints.push_back(std::move(act));
    }
    return model;
}

namespace detail {

inline std::vector<double> assignment_vector(const LinearModel& model,
                                             const VariableAssignment& assignment) {
    std::vector<double> values(model.variables.size(), 0.0);
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
        auto it = assignment.values.find(model.variables[v]);
        if (it == assignment.values.end())
            raise(Errc::incomplete_assignment,
                  "assignment is missing variable '" + model.variables[v] + "'");
        values[v] = static_cast<double>(it->second);
    }
    return values;
}

} // namespace detail

/// Names of all constraints violated by the assignment; empty means
/// feasible. Used to cross-check solver outputs against Eq-style rows.
inline std::vector<std::string> check_feasible(const LinearModel& model,
                                               const VariableAssignment& assignment) {
    const std::vector<double> values = detail::assignment_vector(model, assignment);
    std::vector<std::string> violated;
    constexpr double kTolerance = 1e-9;
    for (const LinearConstraint& c : model.constraints) {
        double lhs = 0.0;
        for (const LinearTerm& term : c.terms)
            lhs += term.coefficient * values[static_cast<std::size_t>(term.variable)];
        const bool ok = c.relation == Relation::less_equal ? lhs <= c.rhs + kTolerance
                                                           : lhs >= c.rhs - kTolerance;
        if (!ok) violated.push_back(c.name);
    }
    return violated;
}

inline double objective_value(const LinearModel& model, const VariableAssignment& assignment) {
    const std::vector<double> values = detail::assignment_vector(model, assignment);
    double total = 0.0;
    for (std::size_t v = 0; v < values.size(); ++v) total += model.objective[v] * values[v];
    return total;
}

/// Assignment induced by a team under greedy activation: x marks the
/// team, every indicator whose alliance threshold is met within the team
/// is switched on. With e >= 0 this attains the model optimum for fixed x.
inline VariableAssignment greedy_assignment(const Instance& inst, const Team& team) {
    const std::vector<int> counts = alliance_counts(inst, team);
    VariableAssignment assignment;
    for (int i = 0; i < inst.hero_count(); ++i)
        assignment.values[detail::x_name(i)] = team.contains(i) ? 1 : 0;
    for (const BonusTensorEntry& e : inst.bonuses) {
        const bool on =
            team.contains(e.hero) && counts[static_cast<std::size_t>(e.alliance)] >= e.threshold;
        assignment.values[detail::indicator_name(e)] = on ? 1 : 0;
    }
    return assignment;
}

// --- LP text format -------------------------------------------------------

namespace detail {

inline void append_terms(std::string& out, const std::vector<LinearTerm>& terms,
                         const std::vector<std::string>& variables, std::size_t indent) {
    std::size_t line_len = out.size() - out.rfind('\n') - 1;
    bool first = true;
    for (const LinearTerm& term : terms) {
        std::string piece;
        const double coef = term.coefficient;
        const double magnitude = coef < 0 ? -coef : coef;
        if (first) {
            if (coef < 0) piece += "- ";
        } else {
            piece += coef < 0 ? " - " : " + ";
        }
        if (magnitude != 1.0) piece += format_number(magnitude) + " ";
        piece += variables[static_cast<std::size_t>(term.variable)];
        if (!first && line_len + piece.size() > 200) {
            out += "\n" + std::string(indent, ' ');
            line_len = indent;
            // continuation keeps the operator at line start
            if (piece.rfind(" - ", 0) == 0 || piece.rfind(" + ", 0) == 0) piece = piece.substr(1);
        }
        out += piece;
        line_len += piece.size();
        first = false;
    }
}

} // namespace detail

/// CPLEX-style LP text (Maximize / Subject To / Binary / End) with the
/// canonical variable ordering. Deterministic byte-for-byte; the big-M
/// constant rides in a leading comment so import is lossless.
inline std::string export_lp(const LinearModel& model) {
    std::string out;
    out += "\\ big_M " + format_number(model.big_m) + "\n";
    out += "Maximize\n";
    out += " obj: ";
    std::vector<LinearTerm> objective_terms;
    for (std::size_t v = 0; v < model.variables.size(); ++v)
        objective_terms.push_back({static_cast<int>(v), model.objective[v]});
    detail::append_terms(out, objective_terms, model.variables, 6);
    out += "\n";
    out += "Subject To\n";
    for (const LinearConstraint& c : model.constraints) {
        out += " " + c.name + ": ";
        detail::append_terms(out, c.terms, model.variables, 4);
        out += c.relation == Relation::less_equal ? " <= " : " >= ";
        out += format_number(c.rhs);
        out += "\n";
    }
    out += "Binary\n";
    for (const std::string& name : model.variables) out += " " + name + "\n";
    out += "End\n";
    return out;
}

namespace detail {

struct LpRow {
    std::string name;
    std::vector<std::string> tokens;
};

inline bool parse_lp_number(const std::string& token, double& value) {
    const char* s = token.c_str();
    char* end = nullptr;
    value = std::strtod(s, &end);
    return end != s && *end == '\0';
}

} // namespace detail

/// Parse text produced by export_lp back into a structurally identical
/// model.
inline LinearModel import_lp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    double big_m = 0.0;
    bool saw_end = false;

    enum class Section { none, objective, constraints, binary };
    Section section = Section::none;
    std::vector<detail::LpRow> objective_rows;
    std::vector<detail::LpRow> constraint_rows;
    std::vector<std::string> variables;

    // Rows open with a "name:" token; wrapped continuations carry none.
    const auto push_tokens = [](std::vector<detail::LpRow>& rows, std::istringstream& tokens) {
        std::string token;
        while (tokens >> token) {
            if (token.size() > 1 && token.back() == ':') {
                rows.push_back({token.substr(0, token.size() - 1), {}});
            } else if (rows.empty()) {
                raise(Errc::format_error, "expression before any row label");
            } else {
                rows.back().tokens.push_back(token);
            }
        }
    };

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '\\') {
            std::istringstream comment(line.substr(1));
            std::string key;
            comment >> key;
            if (key == "big_M") comment >> big_m;
            continue;
        }
        if (line == "Maximize") { section = Section::objective; continue; }
        if (line == "Subject To") { section = Section::constraints; continue; }
        if (line == "Binary") { section = Section::binary; continue; }
        if (line == "End") { saw_end = true; break; }

        std::istringstream tokens(line);
        switch (section) {
            case Section::none:
                raise(Errc::format_error, "content before the Maximize section: '" + line + "'");
            case Section::objective:
                push_tokens(objective_rows, tokens);
                break;
            case Section::constraints:
                push_tokens(constraint_rows, tokens);
                break;
            case Section::binary: {
                std::string name;
                while (tokens >> name) variables.push_back(name);
                break;
            }
        }
    }
    if (!saw_end) raise(Errc::format_error, "missing End marker");
    if (objective_rows.size() != 1 || objective_rows[0].name != "obj")
        raise(Errc::format_error, "expected exactly one objective row named 'obj'");

    LinearModel model;
    model.big_m = big_m;
    model.variables = variables;
    model.objective.assign(variables.size(), 0.0);

    const auto var_index = [&](const std::string& name) {
        const int idx = model.variable_index(name);
        if (idx < 0) raise(Errc::format_error, "expression references undeclared variable '" + name + "'");
        return idx;
    };

    // Parse "[-] [coef] var [+|- [coef] var ...] [<=|>= rhs]".
    const auto parse_terms = [&](const std::vector<std::string>& tokens, std::vector<LinearTerm>& terms,
                                 bool allow_relation, Relation& relation, double& rhs) {
        double sign = 1.0;
        bool have_coef = false;
        double coef = 1.0;
        bool have_relation = false;
        for (const std::string& token : tokens) {
            if (token == "+") { sign = 1.0; continue; }
            if (token == "-") { sign = -1.0; continue; }
            if (token == "<=" || token == ">=") {
                if (!allow_relation) raise(Errc::format_error, "unexpected relation in objective");
                relation = token == "<=" ? Relation::less_equal : Relation::greater_equal;
                have_relation = true;
                continue;
            }
            double number = 0.0;
            if (detail::parse_lp_number(token, number)) {
                if (have_relation) { rhs = number; continue; }
                coef = number;
                have_coef = true;
                continue;
            }
            terms.push_back({var_index(token), sign * (have_coef ? coef : 1.0)});
            sign = 1.0;
            coef = 1.0;
            have_coef = false;
        }
        if (allow_relation && !have_relation)
            raise(Errc::format_error, "constraint row lacks a relation");
    };

    {
        Relation unused = Relation::less_equal;
        double unused_rhs = 0.0;
        std::vector<LinearTerm> terms;
        parse_terms(objective_rows[0].tokens, terms, false, unused, unused_rhs);
        for (const LinearTerm& term : terms)
            model.objective[static_cast<std::size_t>(term.variable)] = term.coefficient;
    }
    for (const detail::LpRow& row : constraint_rows) {
        LinearConstraint c;
        c.name = row.name;
        parse_terms(row.tokens, c.terms, true, c.relation, c.rhs);
        model.constraints.push_back(std::move(c));
    }
    return model;
}

} // namespace underlords
