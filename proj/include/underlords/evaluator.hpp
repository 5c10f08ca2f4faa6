#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "underlords/errors.hpp"
#include "underlords/format.hpp"
#include "underlords/instance.hpp"

namespace underlords {

/// A chosen hero subset, kept as a sorted unique id list.
struct Team {
    std::vector<int> members;

    int size() const { return static_cast<int>(members.size()); }
    bool contains(int hero) const {
        return std::binary_search(members.begin(), members.end(), hero);
    }
};

inline bool operator==(const Team& a, const Team& b) { return a.members == b.members; }

inline Team make_team(std::vector<int> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return Team{std::move(ids)};
}

/// Resolve names against the roster. All unknown names are reported at
/// once — the CLI surfaces the full offender list.
inline Team team_from_names(const Instance& inst, const std::vector<std::string>& names) {
    std::vector<int> ids;
    std::string unknown;
    for (const std::string& name : names) {
        if (auto id = inst.hero_id(name)) {
            ids.push_back(*id);
        } else {
            if (!unknown.empty()) unknown += ", ";
            unknown += "'" + name + "'";
        }
    }
    if (!unknown.empty()) raise(Errc::unknown_hero, "unknown hero name(s): " + unknown);
    return make_team(std::move(ids));
}

struct BonusAward {
    int alliance = 0;
    int threshold = 0;
    double value = 0.0;
};

inline bool operator==(const BonusAward& a, const BonusAward& b) {
    return a.alliance == b.alliance && a.threshold == b.threshold && a.value == b.value;
}

/// Objective of a fixed team with the full per-hero, per-bonus breakdown.
/// total = base_power + sum of every listed award, with no hidden terms.
struct Evaluation {
    double total = 0.0;
    double base_power = 0.0;
    std::vector<std::pair<int, std::vector<BonusAward>>> per_hero; // hero id ascending
    std::vector<int> active_counts;                                // per alliance id
};

namespace detail {

/// Total order used by every exact search: larger objective wins, exact
/// ties go to the lexicographically smallest sorted id list. A shorter
/// list precedes its extensions. Order-independent, which is what makes
/// parallel searches deterministic.
inline bool candidate_improves(double value, const std::vector<int>& ids, double best_value,
                               const std::vector<int>& best_ids) {
    if (value > best_value) return true;
    if (value < best_value) return false;
    return std::lexicographical_compare(ids.begin(), ids.end(), best_ids.begin(), best_ids.end());
}

inline void check_team_ids(const Instance& inst, const Team& team) {
    for (int id : team.members)
        if (id < 0 || id >= inst.hero_count())
            raise(Errc::unknown_hero, "hero id " + std::to_string(id) + " is not in the instance");
}

} // namespace detail

/// Member count per alliance restricted to the team's rows of the
/// membership matrix. O(n * t).
inline std::vector<int> alliance_counts(const Instance& inst, const Team& team) {
    detail::check_team_ids(inst, team);
    std::vector<int> counts(static_cast<std::size_t>(inst.alliance_count()), 0);
    for (std::size_t j = 0; j < inst.alliance_members.size(); ++j) {
        const auto& members = inst.alliance_members[j];
        auto a = members.begin();
        auto b = team.members.begin();
        int c = 0;
        while (a != members.end() && b != team.members.end()) {
            if (*a < *b) ++a;
            else if (*b < *a) ++b;
            else { ++c; ++a; ++b; }
        }
        counts[j] = c;
    }
    return counts;
}

/// Certificate check: activate every stored bonus whose alliance reaches
/// its threshold within the team. All satisfied thresholds fire
/// simultaneously; with non-negative bonuses this greedy activation is
/// the optimum of the model for fixed x, so the result is a valid
/// objective oracle. O(n*t + |tensor|).
inline Evaluation evaluate_team(const Instance& inst, const Team& team) {
    detail::check_team_ids(inst, team);
    if (team.size() > inst.team_cap)
        raise(Errc::team_too_large, "team has " + std::to_string(team.size()) +
                                        " heroes but the cap is " + std::to_string(inst.team_cap));

    Evaluation eval;
    eval.active_counts = alliance_counts(inst, team);
    for (int id : team.members) {
        eval.base_power += inst.heroes[static_cast<std::size_t>(id)].power;
        eval.per_hero.emplace_back(id, std::vector<BonusAward>{});
    }
    eval.total = eval.base_power;
    // Canonical accumulation order (tensor order) — the solver reproduces
    // the exact same doubles at its leaves.
    for (const BonusTensorEntry& e : inst.bonuses) {
        if (!team.contains(e.hero)) continue;
        if (eval.active_counts[static_cast<std::size_t>(e.alliance)] < e.threshold) continue;
        eval.total += e.value;
        auto row = std::lower_bound(eval.per_hero.begin(), eval.per_hero.end(), e.hero,
                                    [](const auto& p, int id) { return p.first < id; });
        row->second.push_back({e.alliance, e.threshold, e.value});
    }
    return eval;
}

/// Decision-version certificate: is the team's total strictly above the
/// bound?
inline bool check_decision(const Instance& inst, const Team& team, double bound) {
    return evaluate_team(inst, team).total > bound;
}

/// One row per hero, bonus cells "alliance k +value" sorted by alliance
/// name then threshold, then contribution | power | sum columns.
inline std::string render_breakdown(const Instance& inst, const Evaluation& eval) {
    struct Row {
        std::string name;
        std::string cells;
        double contribution = 0.0;
        double power = 0.0;
    };
    std::vector<Row> rows;
    for (const auto& [hero, awards] : eval.per_hero) {
        Row row;
        row.name = inst.heroes[static_cast<std::size_t>(hero)].name;
        row.power = inst.heroes[static_cast<std::size_t>(hero)].power;
        std::vector<BonusAward> sorted = awards;
        std::sort(sorted.begin(), sorted.end(), [&](const BonusAward& a, const BonusAward& b) {
            const std::string& an = inst.alliance_names[static_cast<std::size_t>(a.alliance)];
            const std::string& bn = inst.alliance_names[static_cast<std::size_t>(b.alliance)];
            if (an != bn) return an < bn;
            return a.threshold < b.threshold;
        });
        for (const BonusAward& award : sorted) {
            if (!row.cells.empty()) row.cells += "  ";
            row.cells += inst.alliance_names[static_cast<std::size_t>(award.alliance)] + " " +
                         std::to_string(award.threshold) + " +" + format_compact(award.value);
            row.contribution += award.value;
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.name < b.name; });

    std::size_t name_width = std::string("Hero").size();
    std::size_t cell_width = 0;
    for (const Row& row : rows) {
        name_width = std::max(name_width, row.name.size());
        cell_width = std::max(cell_width, row.cells.size());
    }
    const auto pad = [](const std::string& s, std::size_t width) {
        return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
    };

    std::string out = pad("Hero", name_width) + "  " + pad("", cell_width) +
                      "  Alliance contribution  Hero power  Sum\n";
    double contribution_sum = 0.0;
    for (const Row& row : rows) {
        contribution_sum += row.contribution;
        out += pad(row.name, name_width) + "  " + pad(row.cells, cell_width) + "  " +
               pad(format_compact(row.contribution), 21) + "  " +
               pad(format_compact(row.power), 10) + "  " +
               format_compact(row.power + row.contribution) + "\n";
    }
    out += pad("Total", name_width) + "  " + pad("", cell_width) + "  " +
           pad(format_compact(contribution_sum), 21) + "  " +
           pad(format_compact(eval.base_power), 10) + "  " + format_compact(eval.total) + "\n";
    return out;
}

} // namespace underlords
