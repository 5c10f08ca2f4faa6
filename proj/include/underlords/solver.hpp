#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "underlords/errors.hpp"
#include "underlords/evaluator.hpp"
#include "underlords/instance.hpp"

namespace underlords {

struct SearchOptions {
    std::optional<std::chrono::duration<double>> time_limit;
    std::optional<std::uint64_t> node_limit;
    int parallel_workers = 1;
};

struct Solution {
    Team team;
    double objective = 0.0;
    bool proven_optimal = false;
    std::uint64_t nodes_explored = 0;
    std::chrono::duration<double> wall_time{0.0};
};

namespace detail {

struct EntryRef {
    int alliance = 0;
    int threshold = 0;
    double value = 0.0;
};

struct SolverContext {
    const Instance* inst = nullptr;
    int n = 0;
    int m = 0;
    int t = 0;
    std::vector<double> power;
    std::vector<std::vector<int>> hero_alliances;      // i -> sorted alliance ids
    std::vector<std::vector<EntryRef>> hero_entries;   // i -> own tensor entries
    std::vector<int> alliance_sizes;

    explicit SolverContext(const Instance& instance, int cap)
        : inst(&instance), n(instance.hero_count()), m(cap), t(instance.alliance_count()) {
        power.reserve(static_cast<std::size_t>(n));
        for (const Hero& h : instance.heroes) power.push_back(h.power);
        hero_alliances = instance.alliance_ids_by_hero();
        hero_entries.assign(static_cast<std::size_t>(n), {});
        for (const BonusTensorEntry& e : instance.bonuses)
            hero_entries[static_cast<std::size_t>(e.hero)].push_back(
                {e.alliance, e.threshold, e.value});
        alliance_sizes.reserve(static_cast<std::size_t>(t));
        for (const auto& members : instance.alliance_members)
            alliance_sizes.push_back(static_cast<int>(members.size()));
    }
};

/// Mutable search node data, updated incrementally on include/exclude.
struct BranchState {
    std::vector<signed char> decision; // per hero: 0 free, +1 in, -1 out
    std::vector<int> in_count;         // alliance members fixed in
    std::vector<int> free_count;       // alliance members still free
    std::vector<int> in_list;
    int in_size = 0;

    explicit BranchState(const SolverContext& ctx)
        : decision(static_cast<std::size_t>(ctx.n), 0),
          in_count(static_cast<std::size_t>(ctx.t), 0),
          free_count(ctx.alliance_sizes.begin(), ctx.alliance_sizes.end()) {}

    void include(const SolverContext& ctx, int hero) {
        decision[static_cast<std::size_t>(hero)] = 1;
        in_list.push_back(hero);
        ++in_size;
        for (int j : ctx.hero_alliances[static_cast<std::size_t>(hero)]) {
            ++in_count[static_cast<std::size_t>(j)];
            --free_count[static_cast<std::size_t>(j)];
        }
    }
    void undo_include(const SolverContext& ctx, int hero) {
        decision[static_cast<std::size_t>(hero)] = 0;
        in_list.pop_back();
        --in_size;
        for (int j : ctx.hero_alliances[static_cast<std::size_t>(hero)]) {
            --in_count[static_cast<std::size_t>(j)];
            ++free_count[static_cast<std::size_t>(j)];
        }
    }
    void exclude(const SolverContext& ctx, int hero) {
        decision[static_cast<std::size_t>(hero)] = -1;
        for (int j : ctx.hero_alliances[static_cast<std::size_t>(hero)])
            --free_count[static_cast<std::size_t>(j)];
    }
    void undo_exclude(const SolverContext& ctx, int hero) {
        decision[static_cast<std::size_t>(hero)] = 0;
        for (int j : ctx.hero_alliances[static_cast<std::size_t>(hero)])
            ++free_count[static_cast<std::size_t>(j)];
    }
};

/// Optimistic per-hero value: own power plus every bonus that is still
/// achievable. An entry is dead once its alliance can no longer reach the
/// threshold — members fixed in plus the most free members a completed
/// team could still add.
inline double optimistic_value(const SolverContext& ctx, const BranchState& st, int hero) {
    const int slots = ctx.m - st.in_size;
    double v = ctx.power[static_cast<std::size_t>(hero)];
    for (const EntryRef& e : ctx.hero_entries[static_cast<std::size_t>(hero)]) {
        const int reachable = st.in_count[static_cast<std::size_t>(e.alliance)] +
                              std::min(st.free_count[static_cast<std::size_t>(e.alliance)], slots);
        if (reachable >= e.threshold) v += e.value;
    }
    return v;
}

/// Admissible upper bound for teams extending the fixed-in set: sum of
/// optimistic values over fixed-in heroes plus the best remaining
/// optimistic values filling the open slots.
inline double state_bound(const SolverContext& ctx, const BranchState& st,
                          std::vector<double>& scratch) {
    double bound = 0.0;
    for (int hero : st.in_list) bound += optimistic_value(ctx, st, hero);
    int slots = ctx.m - st.in_size;
    if (slots <= 0) return bound;
    scratch.clear();
    for (int hero = 0; hero < ctx.n; ++hero)
        if (st.decision[static_cast<std::size_t>(hero)] == 0)
            scratch.push_back(optimistic_value(ctx, st, hero));
    if (slots < static_cast<int>(scratch.size()))
        std::nth_element(scratch.begin(), scratch.begin() + slots, scratch.end(),
                         std::greater<double>());
    else
        slots = static_cast<int>(scratch.size());
    for (int k = 0; k < slots; ++k) bound += scratch[static_cast<std::size_t>(k)];
    return bound;
}

/// Objective of the fixed-in set, accumulated in the same order as
/// evaluate_team so the doubles are bit-identical.
inline double leaf_objective(const SolverContext& ctx, const BranchState& st) {
    double total = 0.0;
    for (int hero = 0; hero < ctx.n; ++hero)
        if (st.decision[static_cast<std::size_t>(hero)] == 1)
            total += ctx.power[static_cast<std::size_t>(hero)];
    for (const BonusTensorEntry& e : ctx.inst->bonuses) {
        if (st.decision[static_cast<std::size_t>(e.hero)] != 1) continue;
        if (st.in_count[static_cast<std::size_t>(e.alliance)] < e.threshold) continue;
        total += e.value;
    }
    return total;
}

struct SharedIncumbent {
    std::mutex mu;
    std::atomic<double> value{0.0};
    std::vector<int> team;

    void offer(double candidate_value, std::vector<int> candidate_team) {
        // Strictly worse leaves can neither improve nor tie; skip the lock.
        if (candidate_value < value.load(std::memory_order_relaxed)) return;
        std::sort(candidate_team.begin(), candidate_team.end());
        std::lock_guard<std::mutex> lock(mu);
        if (candidate_improves(candidate_value, candidate_team, value.load(std::memory_order_relaxed),
                               team)) {
            team = std::move(candidate_team);
            value.store(candidate_value, std::memory_order_relaxed);
        }
    }
};

struct SearchLimits {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::optional<std::uint64_t> node_limit;
    std::atomic<std::uint64_t> nodes{0};
    std::atomic<bool> stopped{false};

    // Batched so the hot loop touches atomics rarely.
    bool tick(std::uint64_t& local_nodes) {
        ++local_nodes;
        if ((local_nodes & 0xFF) != 0) return stopped.load(std::memory_order_relaxed);
        nodes.fetch_add(256, std::memory_order_relaxed);
        if (node_limit && nodes.load(std::memory_order_relaxed) > *node_limit)
            stopped.store(true, std::memory_order_relaxed);
        if (deadline && std::chrono::steady_clock::now() > *deadline)
            stopped.store(true, std::memory_order_relaxed);
        return stopped.load(std::memory_order_relaxed);
    }
    void flush(std::uint64_t local_nodes) { nodes.fetch_add(local_nodes & 0xFF, std::memory_order_relaxed); }
};

constexpr double kPruneTolerance = 1e-12;

/// Depth-first include/exclude search over the fixed branching order.
/// Prune strictly below the incumbent so equal-objective optima stay
/// reachable for the lexicographic tie-break.
inline void dfs(const SolverContext& ctx, BranchState& st, const std::vector<int>& order,
                std::size_t pos, SharedIncumbent& incumbent, SearchLimits& limits,
                std::uint64_t& local_nodes, std::vector<double>& scratch) {
    if (limits.tick(local_nodes)) return;
    if (st.in_size == ctx.m || pos == order.size()) {
        incumbent.offer(leaf_objective(ctx, st), st.in_list);
        return;
    }
    const double bound = state_bound(ctx, st, scratch);
    if (bound <= incumbent.value.load(std::memory_order_relaxed) - kPruneTolerance) return;

    const int hero = order[pos];
    st.include(ctx, hero);
    dfs(ctx, st, order, pos + 1, incumbent, limits, local_nodes, scratch);
    st.undo_include(ctx, hero);
    if (limits.stopped.load(std::memory_order_relaxed)) return;
    st.exclude(ctx, hero);
    dfs(ctx, st, order, pos + 1, incumbent, limits, local_nodes, scratch);
    st.undo_exclude(ctx, hero);
}

} // namespace detail

/// Greedy special case: with no bonuses the optimum is the cap's worth of
/// highest-power heroes, ties to the smallest id.
inline Solution solve_no_alliance(const Instance& inst) {
    if (!inst.bonuses.empty())
        raise(Errc::not_applicable, "solve_no_alliance requires an empty bonus tensor");
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> ids(static_cast<std::size_t>(inst.hero_count()));
    for (int i = 0; i < inst.hero_count(); ++i) ids[static_cast<std::size_t>(i)] = i;
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        return inst.heroes[static_cast<std::size_t>(a)].power >
               inst.heroes[static_cast<std::size_t>(b)].power;
    });
    const int take = std::min(inst.team_cap, inst.hero_count());
    ids.resize(static_cast<std::size_t>(std::max(take, 0)));

    Solution sol;
    sol.team = make_team(std::move(ids));
    sol.objective = evaluate_team(inst, sol.team).total;
    sol.proven_optimal = true;
    sol.wall_time = std::chrono::steady_clock::now() - start;
    return sol;
}

namespace detail {

inline std::uint64_t subsets_up_to(int n, int m, std::uint64_t limit) {
    std::uint64_t total = 0;
    long double binom = 1.0L;
    for (int r = 0; r <= std::min(m, n); ++r) {
        if (r > 0) binom = binom * static_cast<long double>(n - r + 1) / static_cast<long double>(r);
        if (binom > static_cast<long double>(limit) || total > limit) return limit + 1;
        total += static_cast<std::uint64_t>(binom + 0.5L);
        if (total > limit) return limit + 1;
    }
    return total;
}

} // namespace detail

/// Independent oracle: enumerate every team of size <= cap and keep the
/// best under the shared tie-break. Guarded by subset count.
inline Solution brute_force(const Instance& inst, std::uint64_t max_subsets = 10'000'000) {
    const auto start = std::chrono::steady_clock::now();
    const int n = inst.hero_count();
    const int m = std::max(inst.team_cap, 0);
    if (detail::subsets_up_to(n, m, max_subsets) > max_subsets)
        raise(Errc::too_large, "subset count exceeds the brute-force guard of " +
                                   std::to_string(max_subsets));

    Solution sol;
    sol.team = Team{};
    sol.objective = 0.0;
    std::uint64_t evaluated = 0;
    std::vector<int> current;
    bool have_best = false;

    const auto consider = [&](const std::vector<int>& members) {
        ++evaluated;
        Team team{members};
        const double value = evaluate_team(inst, team).total;
        if (!have_best ||
            detail::candidate_improves(value, team.members, sol.objective, sol.team.members)) {
            sol.objective = value;
            sol.team = std::move(team);
            have_best = true;
        }
    };

    // Lexicographic subset enumeration; every prefix is itself a team.
    const auto rec = [&](auto&& self, int next) -> void {
        consider(current);
        if (static_cast<int>(current.size()) == m) return;
        for (int i = next; i < n; ++i) {
            current.push_back(i);
            self(self, i + 1);
            current.pop_back();
        }
    };
    rec(rec, 0);

    sol.proven_optimal = true;
    sol.nodes_explored = evaluated;
    sol.wall_time = std::chrono::steady_clock::now() - start;
    return sol;
}

/// Upper bound on the best objective of any team that extends fixed_in,
/// avoids fixed_out and respects the cap.
inline double optimistic_bound(const Instance& inst, const Team& fixed_in,
                               const std::vector<int>& fixed_out) {
    detail::SolverContext ctx(inst, inst.team_cap);
    for (int id : fixed_in.members)
        if (id < 0 || id >= ctx.n)
            raise(Errc::unknown_hero, "hero id " + std::to_string(id) + " is not in the instance");
    for (int id : fixed_out)
        if (id < 0 || id >= ctx.n)
            raise(Errc::unknown_hero, "hero id " + std::to_string(id) + " is not in the instance");
    for (int id : fixed_out)
        if (fixed_in.contains(id))
            raise(Errc::invalid_branch, "hero id " + std::to_string(id) + " is fixed both in and out");
    if (fixed_in.size() > ctx.m)
        raise(Errc::invalid_branch, "fixed-in set exceeds the team cap");

    detail::BranchState st(ctx);
    for (int id : fixed_in.members) st.include(ctx, id);
    for (int id : fixed_out)
        if (st.decision[static_cast<std::size_t>(id)] == 0) st.exclude(ctx, id);
    std::vector<double> scratch;
    return detail::state_bound(ctx, st, scratch);
}

/// Exact optimisation by depth-first branch and bound. Heroes are branched
/// in descending root optimistic value; the incumbent is seeded with the
/// greedy top-cap team under that value. Natural termination proves
/// optimality; hitting a limit returns the incumbent unproven.
inline Solution branch_and_bound(const Instance& inst, const SearchOptions& options = {}) {
    const auto start = std::chrono::steady_clock::now();
    detail::SolverContext ctx(inst, std::max(inst.team_cap, 0));

    Solution sol;
    if (ctx.m == 0 || ctx.n == 0) {
        sol.team = Team{};
        sol.objective = 0.0;
        sol.proven_optimal = true;
        sol.wall_time = std::chrono::steady_clock::now() - start;
        return sol;
    }

    detail::BranchState root(ctx);
    std::vector<int> order(static_cast<std::size_t>(ctx.n));
    std::vector<double> root_value(static_cast<std::size_t>(ctx.n));
    for (int i = 0; i < ctx.n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
        root_value[static_cast<std::size_t>(i)] = detail::optimistic_value(ctx, root, i);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return root_value[static_cast<std::size_t>(a)] > root_value[static_cast<std::size_t>(b)];
    });

    detail::SharedIncumbent incumbent;
    {
        std::vector<int> seed(order.begin(),
                              order.begin() + std::min<std::size_t>(order.size(),
                                                                    static_cast<std::size_t>(ctx.m)));
        Team seed_team = make_team(std::move(seed));
        incumbent.value.store(evaluate_team(inst, seed_team).total, std::memory_order_relaxed);
        incumbent.team = seed_team.members;
    }

    detail::SearchLimits limits;
    if (options.time_limit)
        limits.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      *options.time_limit);
    limits.node_limit = options.node_limit;

    const int workers = std::max(options.parallel_workers, 1);
    if (workers == 1) {
        std::uint64_t local_nodes = 0;
        std::vector<double> scratch;
        detail::dfs(ctx, root, order, 0, incumbent, limits, local_nodes, scratch);
        limits.flush(local_nodes);
    } else {
        // Carve the tree into prefix subproblems, then let workers drain
        // them; the incumbent merge is order-independent, so the result
        // matches the sequential run exactly.
        std::vector<std::vector<signed char>> frontier;
        std::vector<std::vector<signed char>> queue{{}};
        const std::size_t target = static_cast<std::size_t>(workers) * 16;
        std::uint64_t phase_nodes = 0;
        std::vector<double> scratch;
        while (!queue.empty()) {
            if (queue.size() + frontier.size() >= target) {
                frontier.insert(frontier.end(), queue.begin(), queue.end());
                queue.clear();
                break;
            }
            std::vector<signed char> prefix = std::move(queue.front());
            queue.erase(queue.begin());
            detail::BranchState st(ctx);
            for (std::size_t d = 0; d < prefix.size(); ++d) {
                if (prefix[d] > 0) st.include(ctx, order[d]);
                else st.exclude(ctx, order[d]);
            }
            if (limits.tick(phase_nodes)) break;
            if (st.in_size == ctx.m || prefix.size() == order.size()) {
                incumbent.offer(detail::leaf_objective(ctx, st), st.in_list);
                continue;
            }
            const double bound = detail::state_bound(ctx, st, scratch);
            if (bound <= incumbent.value.load(std::memory_order_relaxed) - detail::kPruneTolerance)
                continue;
            std::vector<signed char> child = prefix;
            child.push_back(1);
            queue.push_back(child);
            child.back() = -1;
            queue.push_back(std::move(child));
        }
        limits.flush(phase_nodes);

        std::atomic<std::size_t> next{0};
        const auto worker_main = [&]() {
            std::uint64_t local_nodes = 0;
            std::vector<double> worker_scratch;
            detail::BranchState st(ctx);
            while (true) {
                const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed);
                if (idx >= frontier.size()) break;
                if (limits.stopped.load(std::memory_order_relaxed)) break;
                const std::vector<signed char>& prefix = frontier[idx];
                for (std::size_t d = 0; d < prefix.size(); ++d) {
                    if (prefix[d] > 0) st.include(ctx, order[d]);
                    else st.exclude(ctx, order[d]);
                }
                detail::dfs(ctx, st, order, prefix.size(), incumbent, limits, local_nodes,
                            worker_scratch);
                for (std::size_t d = prefix.size(); d-- > 0;) {
                    if (prefix[d] > 0) st.undo_include(ctx, order[d]);
                    else st.undo_exclude(ctx, order[d]);
                }
            }
            limits.flush(local_nodes);
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_main);
        for (std::thread& th : pool) th.join();
    }

    sol.team = Team{incumbent.team};
    sol.objective = incumbent.value.load(std::memory_order_relaxed);
    sol.proven_optimal = !limits.stopped.load(std::memory_order_relaxed);
    sol.nodes_explored = limits.nodes.load(std::memory_order_relaxed);
    sol.wall_time = std::chrono::steady_clock::now() - start;
    return sol;
}

} // namespace underlords
