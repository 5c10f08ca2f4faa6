#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "underlords/errors.hpp"
#include "underlords/evaluator.hpp"
#include "underlords/format.hpp"
#include "underlords/instance.hpp"

namespace underlords {

/// Structured vertex label for reduction graphs. Slot vertices (family F)
/// carry one hero in one team slot; group vertices (family F_q) carry an
/// unordered q-set of heroes assigned to a q-set of slots.
struct VertexLabel {
    enum class Family { slot_hero, hero_group };
    Family family = Family::slot_hero;
    std::vector<int> heroes; // sorted, size 1 or q
    std::vector<int> slots;  // sorted, size 1 or q

    std::string text() const {
        std::string out = family == Family::slot_hero ? "v_" : "w_";
        for (std::size_t i = 0; i < heroes.size(); ++i) {
            if (i) out += "+";
            out += std::to_string(heroes[i]);
        }
        out += "@";
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (i) out += "+";
            out += std::to_string(slots[i]);
        }
        return out;
    }
};

inline bool operator==(const VertexLabel& a, const VertexLabel& b) {
    return a.family == b.family && a.heroes == b.heroes && a.slots == b.slots;
}

struct EdgeInfo {
    double weight = 0.0;
    bool heavy = false;
};

inline bool operator==(const EdgeInfo& a, const EdgeInfo& b) {
    return a.weight == b.weight && a.heavy == b.heavy;
}

/// Undirected edge-weighted graph produced by the clique reductions.
/// heavy_n is the consistency constant N (0 when unused).
struct WeightedGraph {
    int vertex_count = 0;
    std::vector<VertexLabel> labels;
    std::map<std::pair<int, int>, EdgeInfo> edges; // key (u, v) with u < v
    double heavy_n = 0.0;

    bool adjacent(int u, int v) const {
        if (u > v) std::swap(u, v);
        return edges.find({u, v}) != edges.end();
    }
    double weight(int u, int v) const {
        if (u > v) std::swap(u, v);
        auto it = edges.find({u, v});
        return it == edges.end() ? 0.0 : it->second.weight;
    }
    void add_edge(int u, int v, double weight, bool heavy = false) {
        if (u > v) std::swap(u, v);
        edges[{u, v}] = EdgeInfo{weight, heavy};
    }
    void add_weight(int u, int v, double delta) {
        if (u > v) std::swap(u, v);
        edges[{u, v}].weight += delta;
    }
};

inline bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.vertex_count == b.vertex_count && a.labels == b.labels && a.edges == b.edges &&
           a.heavy_n == b.heavy_n;
}

struct CliqueSolution {
    std::vector<int> vertices; // sorted
    double weight = 0.0;
    bool proven_optimal = false;
};

/// Plain undirected graph for the densest-k-subgraph side.
struct SimpleGraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges; // normalised u < v, sorted, unique
};

struct DksInstance {
    SimpleGraph graph;
    int k = 1;
};

namespace detail {

inline std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> current(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(current);
        int pos = k - 1;
        while (pos >= 0 && current[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++current[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i)
            current[static_cast<std::size_t>(i)] = current[static_cast<std::size_t>(i - 1)] + 1;
    }
    return out;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) /
                                          static_cast<std::uint64_t>(i);
    return result;
}

/// Family F shared by all three constructions: m slots of n hero
/// vertices, edges between different heroes in different slots carrying
/// s_a/(m-1) + s_b/(m-1).
inline WeightedGraph build_slot_family(const Instance& inst, int m) {
    const int n = inst.hero_count();
    WeightedGraph graph;
    graph.vertex_count = m * n;
    graph.labels.reserve(static_cast<std::size_t>(graph.vertex_count));
    for (int slot = 0; slot < m; ++slot)
        for (int hero = 0; hero < n; ++hero)
            graph.labels.push_back({VertexLabel::Family::slot_hero, {hero}, {slot}});
    const double divisor = static_cast<double>(m - 1);
    for (int slot = 0; slot < m; ++slot)
        for (int other = slot + 1; other < m; ++other)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (a == b) continue;
                    graph.add_edge(slot * n + a, other * n + b,
                                   inst.heroes[static_cast<std::size_t>(a)].power / divisor +
                                       inst.heroes[static_cast<std::size_t>(b)].power / divisor);
                }
    return graph;
}

} // namespace detail

/// Consistency constant: strictly larger than the total non-heavy weight
/// any clique can collect, so one missing heavy edge can never be repaid.
inline double choose_big_n(const Instance& inst) {
    return 1.0 + inst.power_sum() + inst.bonus_sum();
}

/// Densest-subgraph embedding: vertices become uniform heroes, edges become
/// two-member alliances whose bonus fires only with both endpoints
/// fielded. Densest k-subgraphs and optimal teams coincide; the optimum
/// objective is k*base_power + 2*edge_bonus*|E(G')|.
inline Instance dks_to_du(const DksInstance& dks, double base_power = 1.0,
                          double edge_bonus = 1.0) {
    const int n = dks.graph.vertex_count;
    if (dks.k < 1 || dks.k > n)
        raise(Errc::invalid_k, "k=" + std::to_string(dks.k) + " is outside 1.." + std::to_string(n));
    if (base_power < 0.0) raise(Errc::format_error, "base_power must be >= 0");
    if (!(edge_bonus > 0.0)) raise(Errc::format_error, "edge_bonus must be > 0");

    std::vector<Hero> heroes(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        heroes[static_cast<std::size_t>(v)].name = "v" + std::to_string(v);
        heroes[static_cast<std::size_t>(v)].power = base_power;
    }
    std::vector<bool> covered(static_cast<std::size_t>(n), false);
    std::vector<std::pair<int, int>> seen;
    for (const auto& [u, v] : dks.graph.edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u >= v)
            raise(Errc::format_error, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                          ") is not a normalised simple-graph edge on " +
                                          std::to_string(n) + " vertices");
        if (std::find(seen.begin(), seen.end(), std::make_pair(u, v)) != seen.end())
            raise(Errc::format_error, "duplicate edge (" + std::to_string(u) + "," +
                                          std::to_string(v) + ")");
        seen.emplace_back(u, v);
        const std::string name = "e" + std::to_string(u) + "_" + std::to_string(v);
        heroes[static_cast<std::size_t>(u)].alliances.push_back(name);
        heroes[static_cast<std::size_t>(v)].alliances.push_back(name);
        covered[static_cast<std::size_t>(u)] = covered[static_cast<std::size_t>(v)] = true;
    }
    // Isolated vertices still need one alliance each; a private singleton
    // with no bonus entries leaves the objective untouched.
    for (int v = 0; v < n; ++v)
        if (!covered[static_cast<std::size_t>(v)])
            heroes[static_cast<std::size_t>(v)].alliances.push_back("lone" + std::to_string(v));

    // Alliance ids follow first appearance over heroes, not edge order.
    const std::vector<std::string> alliance_order = detail::collect_alliances(heroes);
    std::vector<BonusTensorEntry> entries;
    for (const auto& [u, v] : dks.graph.edges) {
        const std::string name = "e" + std::to_string(u) + "_" + std::to_string(v);
        const int j = detail::alliance_index_or_throw(alliance_order, name, "edge alliance");
        entries.push_back({u, j, 2, edge_bonus});
        entries.push_back({v, j, 2, edge_bonus});
    }
    return make_instance(std::move(heroes), {}, std::move(entries), dks.k, 2);
}

/// No-alliance reduction: max-weight cliques of the slot
/// family select one hero per slot and weigh exactly the team power.
inline WeightedGraph du_to_mewc_basic(const Instance& inst) {
    if (!inst.bonuses.empty())
        raise(Errc::not_applicable, "the no-alliance reduction requires an empty bonus tensor");
    const int m = inst.team_cap;
    if (m < 2) raise(Errc::degenerate_cap, "team cap " + std::to_string(m) +
                                               " leaves no edges; use the greedy solver instead");
    if (inst.hero_count() < m)
        raise(Errc::not_enough_heroes, "need at least " + std::to_string(m) + " heroes, have " +
                                           std::to_string(inst.hero_count()));
    return detail::build_slot_family(inst, m);
}

namespace detail {

inline void require_uniform_alliances(const Instance& inst, int q, Errc code) {
    for (std::size_t j = 0; j < inst.alliance_members.size(); ++j)
        if (static_cast<int>(inst.alliance_members[j].size()) != q)
            raise(code, "alliance '" + inst.alliance_names[j] + "' has " +
                            std::to_string(inst.alliance_members[j].size()) + " members, expected " +
                            std::to_string(q));
    for (const BonusTensorEntry& e : inst.bonuses)
        if (e.threshold != q)
            raise(code, "bonus entry with threshold " + std::to_string(e.threshold) +
                            " is not a full-size activation (q=" + std::to_string(q) + ")");
}

} // namespace detail

/// Pair-alliance reduction (all alliances of size two): adds one vertex per
/// hero pair per slot pair, heavy edges force consistent cliques, and each
/// pair alliance's bonuses ride on the slot-to-pair edges. A consistent
/// clique for team T weighs 2*C(m,2)*N + evaluate_team(T).total.
inline WeightedGraph du_to_mewc_pairs(const Instance& inst, std::uint64_t vertex_guard = 100000) {
    const int n = inst.hero_count();
    const int m = inst.team_cap;
    if (m < 2 || n < m)
        raise(Errc::not_pair_form, "pair reduction needs n >= m >= 2 (n=" + std::to_string(n) +
                                       ", m=" + std::to_string(m) + ")");
    detail::require_uniform_alliances(inst, 2, Errc::not_pair_form);
    const std::uint64_t total_vertices =
        detail::binomial(m, 2) * detail::binomial(n, 2) +
        static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
    if (total_vertices > vertex_guard)
        raise(Errc::too_large, "reduction graph would have " + std::to_string(total_vertices) +
                                   " vertices, above the guard of " + std::to_string(vertex_guard));

    WeightedGraph graph = detail::build_slot_family(inst, m);
    const double big_n = choose_big_n(inst);
    graph.heavy_n = big_n;

    // Slot pairs and hero pairs in lexicographic order define the W ids.
    std::vector<std::pair<int, int>> slot_pairs;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) slot_pairs.emplace_back(i, j);
    std::vector<std::pair<int, int>> hero_pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) hero_pairs.emplace_back(a, b);

    const int base = m * n;
    const int per_set = static_cast<int>(hero_pairs.size());
    graph.vertex_count = base + static_cast<int>(slot_pairs.size()) * per_set;
    for (const auto& [i, j] : slot_pairs)
        for (const auto& [a, b] : hero_pairs)
            graph.labels.push_back({VertexLabel::Family::hero_group, {a, b}, {i, j}});

    const auto w_id = [&](int set_index, int pair_index) {
        return base + set_index * per_set + pair_index;
    };

    // W-W: different hero pair and different slot pair.
    for (std::size_t p = 0; p < slot_pairs.size(); ++p)
        for (std::size_t p2 = p + 1; p2 < slot_pairs.size(); ++p2)
            for (int h = 0; h < per_set; ++h)
                for (int h2 = 0; h2 < per_set; ++h2) {
                    if (h == h2) continue;
                    graph.add_edge(w_id(static_cast<int>(p), h), w_id(static_cast<int>(p2), h2), 0.0);
                }

    // F-W: every pair is an edge; slot-matched hero membership is heavy.
    for (int slot = 0; slot < m; ++slot)
        for (int hero = 0; hero < n; ++hero)
            for (std::size_t p = 0; p < slot_pairs.size(); ++p)
                for (int h = 0; h < per_set; ++h) {
                    const auto& [i, j] = slot_pairs[p];
                    const auto& [a, b] = hero_pairs[static_cast<std::size_t>(h)];
                    const bool heavy = (hero == a || hero == b) && (slot == i || slot == j);
                    graph.add_edge(slot * n + hero, w_id(static_cast<int>(p), h),
                                   heavy ? big_n : 0.0, heavy);
                }

    // Bonuses: alliance {a,b} granting hero c rides on every edge from a
    // c-slot vertex to a {a,b} group vertex; a consistent clique induces
    // exactly one of them.
    for (const BonusTensorEntry& e : inst.bonuses) {
        const auto& members = inst.alliance_members[static_cast<std::size_t>(e.alliance)];
        const int pair_index = static_cast<int>(
            std::lower_bound(hero_pairs.begin(), hero_pairs.end(),
                             std::make_pair(members[0], members[1])) -
            hero_pairs.begin());
        for (int slot = 0; slot < m; ++slot)
            for (std::size_t p = 0; p < slot_pairs.size(); ++p)
                graph.add_weight(slot * n + e.hero, w_id(static_cast<int>(p), pair_index), e.value);
    }
    return graph;
}

/// General reduction (all alliances of size q): q-index
/// generalisation of the pair graph. Consistent cliques carry exactly
/// q*C(m,q) heavy edges and weigh q*C(m,q)*N + evaluate_team(T).total.
inline WeightedGraph du_to_mewc_general(const Instance& inst, int q,
                                        std::uint64_t vertex_guard = 100000) {
    const int n = inst.hero_count();
    const int m = inst.team_cap;
    if (q < 2) raise(Errc::not_applicable, "q must be >= 2");
    if (m < q || n < m)
        raise(Errc::not_applicable, "general reduction needs n >= m >= q (n=" + std::to_string(n) +
                                        ", m=" + std::to_string(m) + ", q=" + std::to_string(q) + ")");
    detail::require_uniform_alliances(inst, q, Errc::not_applicable);
    const std::uint64_t group_vertices = detail::binomial(m, q) * detail::binomial(n, q);
    if (group_vertices + static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n) > vertex_guard)
        raise(Errc::too_large, "reduction graph would have " +
                                   std::to_string(group_vertices +
                                                  static_cast<std::uint64_t>(m) *
                                                      static_cast<std::uint64_t>(n)) +
                                   " vertices, above the guard of " + std::to_string(vertex_guard));

    WeightedGraph graph = detail::build_slot_family(inst, m);
    const double big_n = choose_big_n(inst);
    graph.heavy_n = big_n;

    const std::vector<std::vector<int>> slot_sets = detail::combinations(m, q);
    const std::vector<std::vector<int>> hero_sets = detail::combinations(n, q);
    const int base = m * n;
    const int per_set = static_cast<int>(hero_sets.size());
    graph.vertex_count = base + static_cast<int>(slot_sets.size()) * per_set;
    for (const auto& slots : slot_sets)
        for (const auto& heroes : hero_sets)
            graph.labels.push_back({VertexLabel::Family::hero_group, heroes, slots});

    const auto w_id = [&](int set_index, int group_index) {
        return base + set_index * per_set + group_index;
    };
    std::map<std::vector<int>, int> hero_set_index;
    for (int h = 0; h < per_set; ++h) hero_set_index[hero_sets[static_cast<std::size_t>(h)]] = h;

    for (std::size_t p = 0; p < slot_sets.size(); ++p)
        for (std::size_t p2 = p + 1; p2 < slot_sets.size(); ++p2)
            for (int h = 0; h < per_set; ++h)
                for (int h2 = 0; h2 < per_set; ++h2) {
                    if (h == h2) continue;
                    graph.add_edge(w_id(static_cast<int>(p), h), w_id(static_cast<int>(p2), h2), 0.0);
                }

    for (int slot = 0; slot < m; ++slot)
        for (int hero = 0; hero < n; ++hero)
            for (std::size_t p = 0; p < slot_sets.size(); ++p) {
                const auto& slots = slot_sets[p];
                const bool slot_matched =
                    std::binary_search(slots.begin(), slots.end(), slot);
                for (int h = 0; h < per_set; ++h) {
                    const auto& heroes = hero_sets[static_cast<std::size_t>(h)];
                    const bool heavy =
                        slot_matched && std::binary_search(heroes.begin(), heroes.end(), hero);
                    graph.add_edge(slot * n + hero, w_id(static_cast<int>(p), h),
                                   heavy ? big_n : 0.0, heavy);
                }
            }

    for (const BonusTensorEntry& e : inst.bonuses) {
        const auto& members = inst.alliance_members[static_cast<std::size_t>(e.alliance)];
        const int group_index = hero_set_index.at(members);
        for (int slot = 0; slot < m; ++slot)
            for (std::size_t p = 0; p < slot_sets.size(); ++p)
                graph.add_weight(slot * n + e.hero, w_id(static_cast<int>(p), group_index), e.value);
    }
    return graph;
}

/// Exact maximum edge-weighted clique by branch and bound; verification
/// scale only. Deterministic lexicographic tie-break.
inline CliqueSolution solve_mewc_exact(const WeightedGraph& graph, int size_limit = 64) {
    const int n = graph.vertex_count;
    if (n > size_limit)
        raise(Errc::too_large, "graph has " + std::to_string(n) + " vertices, above the limit of " +
                                   std::to_string(size_limit));

    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
    std::vector<std::vector<double>> weight(static_cast<std::size_t>(n),
                                            std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (const auto& [key, info] : graph.edges) {
        const auto [u, v] = key;
        if (u < 0 || v < 0 || u >= n || v >= n || u == v)
            raise(Errc::format_error, "edge endpoints outside the vertex range");
        adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
        adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = true;
        weight[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = info.weight;
        weight[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = info.weight;
    }

    CliqueSolution best;
    best.proven_optimal = true;

    // Clique members are always ascending, so the induced weight can be
    // recomputed in a canonical order; ties then compare exactly.
    const auto canonical_weight = [&](const std::vector<int>& clique) {
        double total = 0.0;
        for (std::size_t i = 0; i < clique.size(); ++i)
            for (std::size_t j = i + 1; j < clique.size(); ++j)
                total += weight[static_cast<std::size_t>(clique[i])]
                               [static_cast<std::size_t>(clique[j])];
        return total;
    };

    std::vector<int> clique;
    const auto expand = [&](auto&& self, const std::vector<int>& candidates) -> void {
        const double current = canonical_weight(clique);
        if (detail::candidate_improves(current, clique, best.weight, best.vertices)) {
            best.weight = current;
            best.vertices = clique;
        }
        if (candidates.empty()) return;

        double bound = current;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const int v = candidates[i];
            for (int u : clique)
                bound += std::max(weight[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)], 0.0);
            for (std::size_t j = i + 1; j < candidates.size(); ++j) {
                const int u = candidates[j];
                if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)])
                    bound +=
                        std::max(weight[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)], 0.0);
            }
        }
        if (bound <= best.weight - 1e-12) return;

        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const int v = candidates[i];
            std::vector<int> next;
            for (std::size_t j = i + 1; j < candidates.size(); ++j)
                if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(candidates[j])])
                    next.push_back(candidates[j]);
            clique.push_back(v);
            self(self, next);
            clique.pop_back();
        }
    };
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
    expand(expand, all);
    return best;
}

/// Read the team back off a clique's family-F vertices.
inline Team clique_to_team(const WeightedGraph& graph, const CliqueSolution& clique) {
    std::vector<int> heroes;
    for (int v : clique.vertices) {
        if (v < 0 || v >= graph.vertex_count)
            raise(Errc::label_mismatch, "vertex " + std::to_string(v) + " is not in the graph");
        const VertexLabel& label = graph.labels[static_cast<std::size_t>(v)];
        if (label.family != VertexLabel::Family::slot_hero) continue;
        const int hero = label.heroes[0];
        if (std::find(heroes.begin(), heroes.end(), hero) != heroes.end())
            raise(Errc::inconsistent_clique,
                  "hero " + std::to_string(hero) + " appears in two slots of the clique");
        heroes.push_back(hero);
    }
    return make_team(std::move(heroes));
}

/// DOT rendering with deterministic label ordering; heavy edges carry a
/// heavy=true attribute.
inline std::string export_dot(const WeightedGraph& graph) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(graph.vertex_count));
    for (const VertexLabel& label : graph.labels) labels.push_back(label.text());

    std::vector<std::string> vertex_lines(labels.begin(), labels.end());
    std::sort(vertex_lines.begin(), vertex_lines.end());

    std::vector<std::string> edge_lines;
    edge_lines.reserve(graph.edges.size());
    for (const auto& [key, info] : graph.edges) {
        std::string a = labels[static_cast<std::size_t>(key.first)];
        std::string b = labels[static_cast<std::size_t>(key.second)];
        if (b < a) std::swap(a, b);
        std::string line = "  \"" + a + "\" -- \"" + b + "\" [weight=" + format_number(info.weight);
        if (info.heavy) line += ", heavy=true";
        line += "];\n";
        edge_lines.push_back(std::move(line));
    }
    std::sort(edge_lines.begin(), edge_lines.end());

    std::string out = "graph reduction {\n";
    for (const std::string& label : vertex_lines) out += "  \"" + label + "\";\n";
    for (const std::string& line : edge_lines) out += line;
    out += "}\n";
    return out;
}

} // namespace underlords
