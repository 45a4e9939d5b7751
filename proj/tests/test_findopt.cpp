#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "mechfront/findopt.hpp"

using namespace mechfront;
using mftest::rat;

TEST_CASE("build_lp layout and row counts at n = m = 3") {
    ProfileSpace space(Setting(3, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_plurality(space));
    const Rat eps = rat(1, 7);  // recognizable tag for SP right-hand sides
    LPProblem lp = build_lp(problem, eps);
    CHECK(lp.num_vars == 216 * 3 + 1);
    // 3 agents x 216 profiles x 5 misreports x 2 non-vacuous contour levels
    int sp = 0, prob = 0, deficit = 0;
    for (const auto& con : lp.constraints) {
        if (con.rel == Rel::LE && con.rhs == eps)
            ++sp;
        else if (con.rel == Rel::EQ && con.rhs == Rat(1))
            ++prob;
        else if (con.rel == Rel::GE)
            ++deficit;
    }
    CHECK(sp == 6480);
    CHECK(prob == 216);
    CHECK(deficit == 216);
    CHECK(lp.constraints.size() == 6480 + 216 + 216);
    for (const auto& b : lp.bounds) {
        CHECK(*b.lo == Rat(0));
        CHECK(*b.hi == Rat(1));
    }
    // objective is d alone, located after all f-variables
    CHECK(lp.objective.terms.size() == 1);
    CHECK(lp.objective.terms.count(216 * 3) == 1);
}

TEST_CASE("build_lp validates inputs") {
    ProfileSpace space(Setting(2, 2), OrderKind::Strict);
    ProblemSpec problem(space, build_plurality(space));
    CHECK_THROWS_AS(build_lp(problem, rat(-1, 2)), InvalidSettingError);
    CHECK_THROWS_AS(build_lp(problem, rat(3, 2)), InvalidSettingError);
    // open restriction: slot 0 uses both orders, so (ba, ab) is a required
    // deviation from (ab, ab) but is not listed
    std::vector<Profile> profs = {mftest::prof({"ab", "ab"}), mftest::prof({"ba", "ba"})};
    ProfileSpace open(Setting(2, 2), profs);
    ProblemSpec bad(open, build_plurality(open));
    CHECK_THROWS_AS(build_lp(bad, Rat(0)), InvalidSettingError);
}

TEST_CASE("ex-ante mode emits one deficit row") {
    ProfileSpace space(Setting(2, 2), OrderKind::Strict);
    ProfileDistribution mu = ProfileDistribution::uniform(space.size());
    ProblemSpec problem(space, build_plurality(space), DeficitKind::ExAnte, mu);
    LPProblem lp = build_lp(problem, Rat(0));
    int ge = 0;
    for (const auto& con : lp.constraints) ge += con.rel == Rel::GE;
    CHECK(ge == 1);
}

TEST_CASE("plurality problem: the paper grid") {
    ProfileSpace space(Setting(3, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_plurality(space));
    FindOptSession session(problem);

    FindOptResult at0 = session.solve(Rat(0));
    CHECK(at0.deficit == rat(1, 9));
    CHECK(manipulability(at0.mechanism) == Rat(0));
    CHECK(deficit_of(at0.mechanism, problem) == rat(1, 9));
    CHECK(at0.lp_stats.constraints > 0);
    CHECK(at0.lp_stats.pivots > 0);

    // single linear segment between (0, 1/9) and (1/3, 0)
    CHECK(session.solve(rat(1, 6)).deficit == rat(1, 18));
    CHECK(session.solve(rat(1, 3)).deficit == Rat(0));
    CHECK(session.solve(Rat(1)).deficit == Rat(0));

    // warm-started revisits reproduce earlier objectives
    CHECK(session.solve(Rat(0)).deficit == rat(1, 9));
}

TEST_CASE("veto problem: the paper values") {
    ProfileSpace space(Setting(3, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_veto(space));
    FindOptSession session(problem);
    CHECK(session.solve(Rat(0)).deficit == rat(2, 9));
    CHECK(session.solve(rat(1, 21)).deficit == rat(10, 63));
    CHECK(session.solve(rat(1, 12)).deficit == rat(5, 36));
    CHECK(session.solve(rat(1, 2)).deficit == Rat(0));
}

TEST_CASE("deficit is weakly decreasing in eps") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_veto(space));
    FindOptSession session(problem);
    Rat prev = session.solve(Rat(0)).deficit;
    for (const Rat& eps : {rat(1, 8), rat(1, 4), rat(1, 2), rat(3, 4), Rat(1)}) {
        const Rat cur = session.solve(eps).deficit;
        CHECK(cur <= prev);
        prev = cur;
    }
    CHECK(prev == Rat(0));
}

TEST_CASE("bar epsilon values and representatives") {
    ProfileSpace space(Setting(3, 3), OrderKind::Strict);
    SUBCASE("plurality -> 1/3") {
        ProblemSpec problem(space, build_plurality(space));
        BarEpsilonResult bar = bar_epsilon(problem);
        CHECK(bar.value == rat(1, 3));
        CHECK(manipulability(bar.representative) == rat(1, 3));
        CHECK(deficit_of(bar.representative, problem) == Rat(0));
    }
    SUBCASE("veto -> 1/2") {
        ProblemSpec problem(space, build_veto(space));
        CHECK(compute_bar_epsilon(problem) == rat(1, 2));
    }
    SUBCASE("constant desideratum -> 0") {
        std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(3, rat(1, 2)));
        DesideratumFn d(space, values);
        ProblemSpec problem(space, d);
        CHECK(compute_bar_epsilon(problem) == Rat(0));
    }
}

TEST_CASE("unanimity rows lift the veto optimum at eps = 0 to 4/9") {
    ProfileSpace space(Setting(3, 3), OrderKind::Strict);
    AxiomSet axioms;
    axioms.unanimity = true;
    ProblemSpec problem(space, build_veto(space), DeficitKind::WorstCase, std::nullopt, axioms);
    FindOptResult res = find_opt(problem, Rat(0));
    CHECK(res.deficit == rat(4, 9));
    // the pinned profiles put everything on the unanimous winner
    const Profile all_abc = mftest::prof({"abc", "abc", "abc"});
    CHECK(res.mechanism.outcome(space.index_of(all_abc)).probs == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
}

TEST_CASE("anonymity+neutrality rows leave symmetric optima unchanged") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    AxiomSet sym;
    sym.anonymity = true;
    sym.neutrality = true;
    for (bool veto : {false, true}) {
        DesideratumFn d = veto ? build_veto(space) : build_plurality(space);
        ProblemSpec plain(space, d);
        ProblemSpec with(space, d, DeficitKind::WorstCase, std::nullopt, sym);
        const Rat bar = compute_bar_epsilon(plain);
        for (const Rat& eps : {Rat(0), bar}) {
            FindOptResult a = find_opt(plain, eps);
            FindOptResult b = find_opt(with, eps);
            CHECK(a.deficit == b.deficit);
            CHECK(is_anonymous(b.mechanism));
            CHECK(is_neutral(b.mechanism));
        }
    }
}

TEST_CASE("weak-order spaces solve") {
    ProfileSpace space(Setting(2, 2), OrderKind::Weak);  // 3 orders, 9 profiles
    ProblemSpec problem(space, build_plurality(space));
    FindOptResult res = find_opt(problem, Rat(0));
    CHECK(res.deficit >= Rat(0));
    CHECK(manipulability(res.mechanism) == Rat(0));
    CHECK(deficit_of(res.mechanism, problem) == res.deficit);
}

TEST_CASE("single-agent problems are trivially strategyproof-optimal") {
    ProfileSpace space(Setting(1, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_plurality(space));
    CHECK(find_opt(problem, Rat(0)).deficit == Rat(0));
    CHECK(compute_bar_epsilon(problem) == Rat(0));
}

TEST_CASE("ex-ante deficits are optimized exactly") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    ProfileDistribution mu = ProfileDistribution::uniform(space.size());
    ProblemSpec problem(space, build_plurality(space), DeficitKind::ExAnte, mu);
    FindOptSession session(problem);
    const Rat at0 = session.solve(Rat(0)).deficit;
    ProblemSpec worst(space, build_plurality(space));
    // ex-ante deficit of any mechanism is bounded by its worst-case deficit
    CHECK(at0 <= find_opt(worst, Rat(0)).deficit);
    CHECK(session.solve(Rat(1)).deficit == Rat(0));
}
