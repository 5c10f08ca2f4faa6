#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "underlords/errors.hpp"
#include "underlords/format.hpp"

namespace underlords {

/// One selectable unit. Ids are dense 0-based indices assigned in dataset
/// order; all downstream modules work with ids, names are the CLI surface.
struct Hero {
    int id = 0;
    std::string name;
    double power = 0.0;
    std::vector<std::string> alliances; // unique, dataset order
};

inline bool operator==(const Hero& a, const Hero& b) {
    return a.id == b.id && a.name == b.name && a.power == b.power && a.alliances == b.alliances;
}

/// Percentage-based bonus specification. Members of the alliance receive
/// member_percent of their own power, everyone else receives
/// global_percent of theirs, once the alliance has at least `threshold`
/// members on the team. Rules compile down to tensor entries.
struct BonusRule {
    std::string alliance;
    int threshold = 1;
    double member_percent = 0.0;
    double global_percent = 0.0;
};

/// Sparse bonus tensor element: hero `hero` gains `value` when alliance
/// `alliance` has at least `threshold` members fielded. Zero-valued
/// entries are never stored.
struct BonusTensorEntry {
    int hero = 0;
    int alliance = 0;
    int threshold = 1;
    double value = 0.0;
};

inline bool operator==(const BonusTensorEntry& a, const BonusTensorEntry& b) {
    return a.hero == b.hero && a.alliance == b.alliance && a.threshold == b.threshold &&
           a.value == b.value;
}

inline bool tensor_key_less(const BonusTensorEntry& a, const BonusTensorEntry& b) {
    if (a.hero != b.hero) return a.hero < b.hero;
    if (a.alliance != b.alliance) return a.alliance < b.alliance;
    return a.threshold < b.threshold;
}

struct Violation {
    std::string invariant;
    std::string detail;
};

/// The full problem datum. `alliance_members` is the membership matrix in
/// column form: alliance j -> sorted hero ids with a_ij = 1.
struct Instance {
    std::vector<Hero> heroes;
    std::vector<std::string> alliance_names;        // ordered, defines alliance ids
    std::vector<std::vector<int>> alliance_members; // per alliance, sorted hero ids
    std::vector<BonusTensorEntry> bonuses;          // sorted by (hero, alliance, threshold)
    int team_cap = 1;
    int max_alliance_size = 1; // q

    int hero_count() const { return static_cast<int>(heroes.size()); }
    int alliance_count() const { return static_cast<int>(alliance_names.size()); }

    bool is_member(int hero, int alliance) const {
        const auto& members = alliance_members[static_cast<std::size_t>(alliance)];
        return std::binary_search(members.begin(), members.end(), hero);
    }

    std::optional<int> hero_id(std::string_view name) const {
        for (const Hero& h : heroes)
            if (h.name == name) return h.id;
        return std::nullopt;
    }

    std::optional<int> alliance_id(std::string_view name) const {
        for (std::size_t j = 0; j < alliance_names.size(); ++j)
            if (alliance_names[j] == name) return static_cast<int>(j);
        return std::nullopt;
    }

    double power_sum() const {
        double sum = 0.0;
        for (const Hero& h : heroes) sum += h.power;
        return sum;
    }

    double bonus_sum() const {
        double sum = 0.0;
        for (const BonusTensorEntry& e : bonuses) sum += e.value;
        return sum;
    }

    /// hero id -> sorted alliance ids the hero belongs to.
    std::vector<std::vector<int>> alliance_ids_by_hero() const {
        std::vector<std::vector<int>> out(heroes.size());
        for (std::size_t j = 0; j < alliance_members.size(); ++j)
            for (int i : alliance_members[j]) out[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
        return out;
    }
};

inline bool operator==(const Instance& a, const Instance& b) {
    return a.heroes == b.heroes && a.alliance_names == b.alliance_names &&
           a.alliance_members == b.alliance_members && a.bonuses == b.bonuses &&
           a.team_cap == b.team_cap && a.max_alliance_size == b.max_alliance_size;
}

namespace detail {

/// Alliance ordering is first appearance over heroes in id order.
inline std::vector<std::string> collect_alliances(const std::vector<Hero>& heroes) {
    std::vector<std::string> names;
    for (const Hero& h : heroes)
        for (const std::string& a : h.alliances)
            if (std::find(names.begin(), names.end(), a) == names.end()) names.push_back(a);
    return names;
}

inline int alliance_index_or_throw(const std::vector<std::string>& names, const std::string& name,
                                   const char* context) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        raise(Errc::unknown_alliance,
              std::string(context) + " references alliance '" + name + "' that no hero belongs to");
    return static_cast<int>(it - names.begin());
}

} // namespace detail

/// Expand percentage rules into tensor entries: members get
/// member_percent * power, non-members get global_percent * power, zero
/// values are dropped. Alliance ids follow first appearance over heroes.
inline std::vector<BonusTensorEntry> compile_bonus_rules(const std::vector<Hero>& heroes,
                                                         const std::vector<BonusRule>& rules) {
    const std::vector<std::string> names = detail::collect_alliances(heroes);
    std::vector<BonusTensorEntry> entries;
    for (const BonusRule& rule : rules) {
        if (rule.member_percent < 0.0 || rule.global_percent < 0.0)
            raise(Errc::negative_bonus, "rule for alliance '" + rule.alliance +
                                            "' carries a negative percentage; bonuses must be >= 0");
        if (rule.threshold < 1)
            raise(Errc::format_error,
                  "rule for alliance '" + rule.alliance + "' has threshold < 1");
        const int j = detail::alliance_index_or_throw(names, rule.alliance, "bonus rule");
        for (const Hero& h : heroes) {
            const bool member =
                std::find(h.alliances.begin(), h.alliances.end(), rule.alliance) != h.alliances.end();
            const double percent = member ? rule.member_percent : rule.global_percent;
            const double value = percent * h.power;
            if (value > 0.0) entries.push_back({h.id, j, rule.threshold, value});
        }
    }
    std::sort(entries.begin(), entries.end(), tensor_key_less);
    for (std::size_t idx = 1; idx < entries.size(); ++idx)
        if (!tensor_key_less(entries[idx - 1], entries[idx]))
            raise(Errc::format_error, "two rules emit a bonus for the same (hero, alliance, threshold)");
    return entries;
}

/// Assemble and validate an Instance from raw parts. Hero ids are
/// reassigned densely in the given order; q is the larger of the declared
/// bound and the largest observed alliance size.
inline Instance make_instance(std::vector<Hero> heroes, const std::vector<BonusRule>& rules,
                              std::vector<BonusTensorEntry> explicit_entries, int team_cap,
                              int declared_max_alliance_size = 0) {
    if (heroes.empty()) raise(Errc::empty_instance, "instance has no heroes");
    if (team_cap < 1) raise(Errc::format_error, "team_cap must be >= 1");

    Instance inst;
    for (std::size_t i = 0; i < heroes.size(); ++i) {
        Hero& h = heroes[i];
        h.id = static_cast<int>(i);
        if (h.power < 0.0)
            raise(Errc::format_error, "hero '" + h.name + "' has negative power");
        std::vector<std::string> deduped;
        for (const std::string& a : h.alliances)
            if (std::find(deduped.begin(), deduped.end(), a) == deduped.end()) deduped.push_back(a);
        h.alliances = std::move(deduped);
        if (h.alliances.empty())
            raise(Errc::format_error, "hero '" + h.name + "' belongs to no alliance");
        for (std::size_t k = 0; k < i; ++k)
            if (heroes[k].name == h.name)
                raise(Errc::duplicate_hero, "hero name '" + h.name + "' appears twice");
    }
    inst.heroes = std::move(heroes);
    inst.alliance_names = detail::collect_alliances(inst.heroes);
    inst.alliance_members.assign(inst.alliance_names.size(), {});
    for (const Hero& h : inst.heroes)
        for (const std::string& a : h.alliances) {
            auto it = std::find(inst.alliance_names.begin(), inst.alliance_names.end(), a);
            inst.alliance_members[static_cast<std::size_t>(it - inst.alliance_names.begin())]
                .push_back(h.id);
        }

    int max_column = 0;
    for (const auto& members : inst.alliance_members)
        max_column = std::max(max_column, static_cast<int>(members.size()));
    inst.max_alliance_size = std::max(std::max(declared_max_alliance_size, max_column), 1);

    std::vector<BonusTensorEntry> entries = compile_bonus_rules(inst.heroes, rules);
    for (const BonusTensorEntry& e : explicit_entries) {
        if (e.value < 0.0)
            raise(Errc::negative_bonus, "bonus entry for hero id " + std::to_string(e.hero) +
                                            " has negative value; bonuses must be >= 0");
        if (e.value == 0.0) continue;
        if (e.hero < 0 || e.hero >= inst.hero_count())
            raise(Errc::format_error, "bonus entry references unknown hero id " + std::to_string(e.hero));
        if (e.alliance < 0 || e.alliance >= inst.alliance_count())
            raise(Errc::unknown_alliance,
                  "bonus entry references unknown alliance id " + std::to_string(e.alliance));
        entries.push_back(e);
    }
    std::sort(entries.begin(), entries.end(), tensor_key_less);
    for (std::size_t idx = 1; idx < entries.size(); ++idx)
        if (!tensor_key_less(entries[idx - 1], entries[idx]))
            raise(Errc::format_error, "duplicate bonus entry for (hero " +
                                          std::to_string(entries[idx].hero) + ", alliance " +
                                          std::to_string(entries[idx].alliance) + ", threshold " +
                                          std::to_string(entries[idx].threshold) + ")");
    for (const BonusTensorEntry& e : entries) {
        if (e.threshold < 1) raise(Errc::format_error, "bonus entry threshold must be >= 1");
        if (e.threshold > inst.max_alliance_size)
            raise(Errc::format_error, "bonus entry threshold " + std::to_string(e.threshold) +
                                          " exceeds max alliance size " +
                                          std::to_string(inst.max_alliance_size));
    }
    inst.bonuses = std::move(entries);
    inst.team_cap = team_cap;
    return inst;
}

/// Check every Instance invariant; violations are data, not failures.
inline std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> out;
    const int n = inst.hero_count();
    const int t = inst.alliance_count();

    if (inst.team_cap < 1) out.push_back({"team_cap_positive", "team_cap is " + std::to_string(inst.team_cap)});
    if (inst.max_alliance_size < 1)
        out.push_back({"max_alliance_size_positive",
                       "q is " + std::to_string(inst.max_alliance_size)});

    for (int i = 0; i < n; ++i) {
        const Hero& h = inst.heroes[static_cast<std::size_t>(i)];
        if (h.id != i)
            out.push_back({"hero_ids_dense", "hero at position " + std::to_string(i) + " has id " +
                                                 std::to_string(h.id)});
        if (h.power < 0.0)
            out.push_back({"hero_power_nonnegative",
                           "hero '" + h.name + "' has power " + format_number(h.power)});
        if (h.alliances.empty())
            out.push_back({"hero_has_alliance", "hero '" + h.name + "' belongs to no alliance"});
        for (int k = 0; k < i; ++k)
            if (inst.heroes[static_cast<std::size_t>(k)].name == h.name)
                out.push_back({"hero_names_unique", "hero name '" + h.name + "' appears twice"});
    }

    if (static_cast<int>(inst.alliance_members.size()) != t) {
        out.push_back({"membership_shape", "membership has " +
                                               std::to_string(inst.alliance_members.size()) +
                                               " columns for " + std::to_string(t) + " alliances"});
        return out; // the cross checks below would index out of range
    }

    for (int j = 0; j < t; ++j) {
        const auto& members = inst.alliance_members[static_cast<std::size_t>(j)];
        if (static_cast<int>(members.size()) > inst.max_alliance_size)
            out.push_back({"alliance_size_at_most_q",
                           "alliance '" + inst.alliance_names[static_cast<std::size_t>(j)] + "' (j=" +
                               std::to_string(j) + ") has " + std::to_string(members.size()) +
                               " members but q=" + std::to_string(inst.max_alliance_size)});
        for (std::size_t pos = 0; pos < members.size(); ++pos) {
            const int i = members[pos];
            if (i < 0 || i >= n) {
                out.push_back({"membership_valid_ids",
                               "alliance j=" + std::to_string(j) + " lists hero id " + std::to_string(i)});
                continue;
            }
            if (pos > 0 && members[pos - 1] >= i)
                out.push_back({"membership_sorted", "alliance j=" + std::to_string(j) +
                                                        " member list not strictly increasing"});
            const Hero& h = inst.heroes[static_cast<std::size_t>(i)];
            const std::string& name = inst.alliance_names[static_cast<std::size_t>(j)];
            if (std::find(h.alliances.begin(), h.alliances.end(), name) == h.alliances.end())
                out.push_back({"membership_matches_heroes",
                               "a(" + std::to_string(i) + "," + std::to_string(j) + ")=1 but hero '" +
                                   h.name + "' does not list '" + name + "'"});
        }
    }
    for (int i = 0; i < n; ++i) {
        const Hero& h = inst.heroes[static_cast<std::size_t>(i)];
        for (const std::string& a : h.alliances) {
            const auto id = inst.alliance_id(a);
            if (!id) {
                out.push_back({"membership_matches_heroes",
                               "hero '" + h.name + "' lists unknown alliance '" + a + "'"});
                continue;
            }
            const auto& members = inst.alliance_members[static_cast<std::size_t>(*id)];
            if (!std::binary_search(members.begin(), members.end(), i))
                out.push_back({"membership_matches_heroes",
                               "hero '" + h.name + "' lists '" + a + "' but a(" + std::to_string(i) +
                                   "," + std::to_string(*id) + ")=0"});
        }
    }

    for (std::size_t idx = 0; idx < inst.bonuses.size(); ++idx) {
        const BonusTensorEntry& e = inst.bonuses[idx];
        const std::string where = "entry #" + std::to_string(idx);
        if (e.hero < 0 || e.hero >= n)
            out.push_back({"tensor_valid_hero", where + " references hero id " + std::to_string(e.hero)});
        if (e.alliance < 0 || e.alliance >= t)
            out.push_back({"tensor_valid_alliance",
                           where + " references alliance id " + std::to_string(e.alliance)});
        if (e.threshold < 1)
            out.push_back({"tensor_threshold_positive", where + " has threshold " +
                                                            std::to_string(e.threshold)});
        if (e.threshold > inst.max_alliance_size)
            out.push_back({"tensor_threshold_at_most_q",
                           where + " has threshold " + std::to_string(e.threshold) + " but q=" +
                               std::to_string(inst.max_alliance_size)});
        if (!(e.value > 0.0))
            out.push_back({"tensor_value_positive", where + " has non-positive value"});
        if (idx > 0 && !tensor_key_less(inst.bonuses[idx - 1], e))
            out.push_back({"tensor_sorted_unique", where + " breaks (hero, alliance, threshold) order"});
    }
    return out;
}

// --- dataset file format -------------------------------------------------

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& context) {
    if (!j.is_number()) raise(Errc::format_error, "field '" + context + "' must be a number");
    return j.get<double>();
}

inline int require_int(const nlohmann::json& j, const std::string& context) {
    if (!j.is_number_integer()) raise(Errc::format_error, "field '" + context + "' must be an integer");
    return j.get<int>();
}

inline std::string require_string(const nlohmann::json& j, const std::string& context) {
    if (!j.is_string()) raise(Errc::format_error, "field '" + context + "' must be a string");
    return j.get<std::string>();
}

} // namespace detail

inline Instance instance_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) raise(Errc::format_error, "dataset root must be an object");
    if (!doc.contains("heroes") || !doc["heroes"].is_array())
        raise(Errc::format_error, "field 'heroes' must be an array");
    if (doc["heroes"].empty()) raise(Errc::empty_instance, "dataset lists no heroes");
    if (!doc.contains("team_cap")) raise(Errc::format_error, "field 'team_cap' is required");

    std::vector<Hero> heroes;
    for (std::size_t i = 0; i < doc["heroes"].size(); ++i) {
        const auto& hj = doc["heroes"][i];
        const std::string ctx = "heroes[" + std::to_string(i) + "]";
        if (!hj.is_object()) raise(Errc::format_error, "field '" + ctx + "' must be an object");
        Hero h;
        h.name = detail::require_string(hj.value("name", nlohmann::json()), ctx + ".name");
        h.power = detail::require_number(hj.value("power", nlohmann::json()), ctx + ".power");
        if (!hj.contains("alliances") || !hj["alliances"].is_array())
            raise(Errc::format_error, "field '" + ctx + ".alliances' must be an array");
        for (std::size_t k = 0; k < hj["alliances"].size(); ++k)
            h.alliances.push_back(detail::require_string(
                hj["alliances"][k], ctx + ".alliances[" + std::to_string(k) + "]"));
        heroes.push_back(std::move(h));
    }

    std::vector<BonusRule> rules;
    if (doc.contains("bonus_rules")) {
        if (!doc["bonus_rules"].is_array())
            raise(Errc::format_error, "field 'bonus_rules' must be an array");
        for (std::size_t r = 0; r < doc["bonus_rules"].size(); ++r) {
            const auto& rj = doc["bonus_rules"][r];
            const std::string ctx = "bonus_rules[" + std::to_string(r) + "]";
            BonusRule rule;
            rule.alliance = detail::require_string(rj.value("alliance", nlohmann::json()), ctx + ".alliance");
            rule.threshold = detail::require_int(rj.value("threshold", nlohmann::json()), ctx + ".threshold");
            rule.member_percent =
                detail::require_number(rj.value("member_percent", nlohmann::json()), ctx + ".member_percent");
            rule.global_percent =
                detail::require_number(rj.value("global_percent", nlohmann::json()), ctx + ".global_percent");
            rules.push_back(std::move(rule));
        }
    }

    // Explicit entries reference heroes and alliances by name; resolve to
    // ids against the roster order.
    std::vector<BonusTensorEntry> entries;
    if (doc.contains("bonus_entries")) {
        if (!doc["bonus_entries"].is_array())
            raise(Errc::format_error, "field 'bonus_entries' must be an array");
        const std::vector<std::string> alliance_order = detail::collect_alliances(heroes);
        for (std::size_t r = 0; r < doc["bonus_entries"].size(); ++r) {
            const auto& ej = doc["bonus_entries"][r];
            const std::string ctx = "bonus_entries[" + std::to_string(r) + "]";
            const std::string hero_name =
                detail::require_string(ej.value("hero", nlohmann::json()), ctx + ".hero");
            const std::string alliance_name =
                detail::require_string(ej.value("alliance", nlohmann::json()), ctx + ".alliance");
            BonusTensorEntry e;
            e.threshold = detail::require_int(ej.value("threshold", nlohmann::json()), ctx + ".threshold");
            e.value = detail::require_number(ej.value("value", nlohmann::json()), ctx + ".value");
            e.hero = -1;
            for (std::size_t i = 0; i < heroes.size(); ++i)
                if (heroes[i].name == hero_name) e.hero = static_cast<int>(i);
            if (e.hero < 0)
                raise(Errc::format_error, "field '" + ctx + "' references unknown hero '" + hero_name + "'");
            e.alliance = detail::alliance_index_or_throw(alliance_order, alliance_name, ctx.c_str());
            entries.push_back(e);
        }
    }

    const int team_cap = detail::require_int(doc["team_cap"], "team_cap");
    int declared_q = 0;
    if (doc.contains("max_alliance_size"))
        declared_q = detail::require_int(doc["max_alliance_size"], "max_alliance_size");
    return make_instance(std::move(heroes), rules, std::move(entries), team_cap, declared_q);
}

inline Instance parse_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        raise(Errc::format_error, e.what());
    }
    try {
        return instance_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::format_error, e.what());
    }
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::format_error, "cannot open dataset file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
    nlohmann::ordered_json doc;
    doc["team_cap"] = inst.team_cap;
    doc["max_alliance_size"] = inst.max_alliance_size;
    doc["heroes"] = nlohmann::ordered_json::array();
    for (const Hero& h : inst.heroes) {
        nlohmann::ordered_json hj;
        hj["name"] = h.name;
        hj["power"] = h.power;
        hj["alliances"] = h.alliances;
        doc["heroes"].push_back(std::move(hj));
    }
    doc["bonus_entries"] = nlohmann::ordered_json::array();
    for (const BonusTensorEntry& e : inst.bonuses) {
        nlohmann::ordered_json ej;
        ej["hero"] = inst.heroes[static_cast<std::size_t>(e.hero)].name;
        ej["alliance"] = inst.alliance_names[static_cast<std::size_t>(e.alliance)];
        ej["threshold"] = e.threshold;
        ej["value"] = e.value;
        doc["bonus_entries"].push_back(std::move(ej));
    }
    return doc;
}

inline std::string serialize_instance(const Instance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::format_error, "cannot write dataset file '" + path + "'");
    out << serialize_instance(inst);
}

} // namespace underlords
