#include <doctest.h>

#include <cmath>
#include <random>

#include "underlords/evaluator.hpp"
#include "underlords/solver.hpp"
#include "underlords/verify.hpp"

#include "test_support.hpp"

using namespace underlords;

namespace {

const std::vector<std::string> kOptimalTeam = {
    "broodmother", "disruptor", "dragon knight", "lich",          "medusa",
    "necrophos",   "sand king", "sven",          "troll warlord", "witch doctor"};

Instance roster_instance() {
    return load_instance(test_support::source_path("data/underlords.json"));
}

Instance two_hero_fixture() {
    return load_instance(test_support::source_path("fixtures/two_hero.json"));
}

double contribution_of(const Evaluation& eval, int hero) {
    for (const auto& [id, awards] : eval.per_hero)
        if (id == hero) {
            double sum = 0.0;
            for (const BonusAward& award : awards) sum += award.value;
            return sum;
        }
    return -1.0;
}

} // namespace

TEST_CASE("alliance counts restricted to the team") {
    const Instance inst = roster_instance();
    const Team team = team_from_names(inst, kOptimalTeam);
    const std::vector<int> counts = alliance_counts(inst, team);
    CHECK(counts[static_cast<std::size_t>(*inst.alliance_id("warlock"))] == 4);
    CHECK(counts[static_cast<std::size_t>(*inst.alliance_id("scaled"))] == 2);
    CHECK(counts[static_cast<std::size_t>(*inst.alliance_id("troll"))] == 2);
    CHECK(counts[static_cast<std::size_t>(*inst.alliance_id("knight"))] == 2);

    const std::vector<int> empty_counts = alliance_counts(inst, Team{});
    for (int c : empty_counts) CHECK(c == 0);
}

TEST_CASE("full roster counts equal the column sums") {
    const Instance inst = load_instance(test_support::source_path("fixtures/three_hero.json"));
    Instance relaxed = inst;
    relaxed.team_cap = 3;
    const std::vector<int> counts = alliance_counts(relaxed, make_team({0, 1, 2}));
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 2);
}

TEST_CASE("optimal team reproduces the reference breakdown") {
    const Instance inst = roster_instance();
    const Team team = team_from_names(inst, kOptimalTeam);
    const Evaluation eval = evaluate_team(inst, team);

    CHECK(std::abs(eval.total - 80.7) <= 1e-9);
    CHECK(std::abs(eval.base_power - 42.0) <= 1e-9);

    const int witch_doctor = *inst.hero_id("witch doctor");
    CHECK(std::abs(contribution_of(eval, witch_doctor) - 2.2) <= 1e-9);
    CHECK(inst.heroes[static_cast<std::size_t>(witch_doctor)].power == doctest::Approx(2.0));

    // Row cells: witch doctor collects all seven active bonuses.
    for (const auto& [id, awards] : eval.per_hero)
        if (id == witch_doctor) CHECK(awards.size() == 7);
}

TEST_CASE("two-hero fixture activates its pair bonus only together") {
    const Instance inst = two_hero_fixture();
    CHECK(evaluate_team(inst, make_team({0})).total == doctest::Approx(1.0));
    const Evaluation both = evaluate_team(inst, make_team({0, 1}));
    CHECK(both.total == doctest::Approx(2.5));
    CHECK(both.base_power == doctest::Approx(2.0));
}

TEST_CASE("empty team evaluates to zero") {
    const Evaluation eval = evaluate_team(roster_instance(), Team{});
    CHECK(eval.total == 0.0);
    CHECK(eval.per_hero.empty());
}

TEST_CASE("decision certificate compares strictly") {
    const Instance inst = roster_instance();
    const Team team = team_from_names(inst, kOptimalTeam);
    CHECK(check_decision(inst, team, 80.0));
    CHECK_FALSE(check_decision(inst, Team{}, 0.0));

    const Instance fixture = two_hero_fixture();
    CHECK(check_decision(fixture, make_team({0, 1}), 2.0));
}

TEST_CASE("evaluator rejects oversized teams and unknown ids") {
    const Instance inst = two_hero_fixture();
    Instance capped = inst;
    capped.team_cap = 1;
    CHECK_THROWS_WITH_AS(evaluate_team(capped, make_team({0, 1})),
                         doctest::Contains("TeamTooLarge"), Error);
    CHECK_THROWS_WITH_AS(evaluate_team(inst, make_team({7})), doctest::Contains("UnknownHero"),
                         Error);
    CHECK_THROWS_WITH_AS(team_from_names(inst, {"h1", "nobody", "ghost"}),
                         doctest::Contains("'nobody', 'ghost'"), Error);
}

TEST_CASE("adding a hero never lowers the objective") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 40; ++round) {
        const Instance inst = random_instance(rng, InstanceShape::general);
        const int n = inst.hero_count();
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
        const int size = static_cast<int>(rng() % static_cast<std::uint64_t>(
                                                      std::min(inst.team_cap, n) + 1));
        if (size == 0 || size > std::min(inst.team_cap, n) - 1) continue;
        const Team team = make_team(std::vector<int>(pool.begin(), pool.begin() + size));
        const Team extended =
            make_team(std::vector<int>(pool.begin(), pool.begin() + size + 1));
        CHECK(evaluate_team(inst, extended).total >= evaluate_team(inst, team).total - 1e-12);
    }
}

TEST_CASE("breakdown is additive and activation-sound") {
    std::mt19937_64 rng(37);
    for (int round = 0; round < 40; ++round) {
        const Instance inst = random_instance(rng, InstanceShape::general);
        const int n = inst.hero_count();
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
        const int size =
            static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(inst.team_cap, n) + 1));
        const Team team = make_team(std::vector<int>(pool.begin(), pool.begin() + size));
        const Evaluation eval = evaluate_team(inst, team);

        double awards = 0.0;
        for (const auto& [hero, list] : eval.per_hero) {
            CHECK(team.contains(hero));
            for (const BonusAward& award : list) awards += award.value;
        }
        CHECK(std::abs(eval.total - (eval.base_power + awards)) <= 1e-9);

        // Naive recount confirms every activation.
        for (const auto& [hero, list] : eval.per_hero)
            for (const BonusAward& award : list) {
                int recount = 0;
                for (int member : team.members)
                    if (inst.is_member(member, award.alliance)) ++recount;
                CHECK(recount >= award.threshold);
                bool stored = false;
                for (const BonusTensorEntry& e : inst.bonuses)
                    if (e.hero == hero && e.alliance == award.alliance &&
                        e.threshold == award.threshold && e.value == award.value)
                        stored = true;
                CHECK(stored);
            }
    }
}

TEST_CASE("scaling all powers scales the optimum without moving the argmax set") {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 10; ++round) {
        Instance inst = random_instance(rng, InstanceShape::pair_form);
        const double lambda = 3.0;
        Instance scaled = inst;
        for (Hero& h : scaled.heroes) h.power *= lambda;
        for (BonusTensorEntry& e : scaled.bonuses) e.value *= lambda;
        const Solution base = brute_force(inst);
        const Solution stretched = brute_force(scaled);
        CHECK(stretched.objective == doctest::Approx(lambda * base.objective));
        // The base-optimal team stays optimal after scaling (rounding can
        // still move exact ties between equal-objective teams).
        CHECK(evaluate_team(scaled, base.team).total ==
              doctest::Approx(stretched.objective).epsilon(1e-12));
    }
}

TEST_CASE("breakdown rendering lists bonuses, contributions and sums") {
    const Instance inst = roster_instance();
    const Evaluation eval = evaluate_team(inst, team_from_names(inst, kOptimalTeam));
    const std::string table = render_breakdown(inst, eval);
    CHECK(table.find("Alliance contribution  Hero power  Sum") != std::string::npos);
    CHECK(table.find("warlock 2 +0.6") != std::string::npos); // broodmother cell
    CHECK(table.find("knight 2 +1") != std::string::npos);    // dragon knight cell
    CHECK(table.find("80.7") != std::string::npos);
    // Rows are name-sorted: broodmother first.
    CHECK(table.find("broodmother") < table.find("disruptor"));
}
