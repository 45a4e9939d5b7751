#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "mechfront/frontier.hpp"

using namespace mechfront;
using mftest::rat;

namespace {

/// Fig. 5(b)-shaped frontier with placeholder representatives, for the pure
/// interpolation helpers.
ParetoFrontier veto_shaped(const ProfileSpace& space) {
    Mechanism rep = constant_mechanism(space, Outcome::uniform(space.setting().m));
    ParetoFrontier fr;
    fr.points.push_back({Rat(0), rat(2, 9), rep});
    fr.points.push_back({rat(1, 21), rat(10, 63), rep});
    fr.points.push_back({rat(1, 12), rat(5, 36), rep});
    fr.points.push_back({rat(1, 2), Rat(0), rep});
    return fr;
}

}  // namespace

TEST_CASE("delta_at interpolates the piecewise-linear map") {
    ProfileSpace space(Setting(1, 3), OrderKind::Strict);
    ParetoFrontier fr = veto_shaped(space);
    // stored bounds return stored deficits
    CHECK(delta_at(fr, Rat(0)) == rat(2, 9));
    CHECK(delta_at(fr, rat(1, 21)) == rat(10, 63));
    CHECK(delta_at(fr, rat(1, 12)) == rat(5, 36));
    CHECK(delta_at(fr, rat(1, 2)) == Rat(0));
    // quarter of the first segment: 2/9 - (4/3)(1/84) = 13/63
    CHECK(delta_at(fr, rat(1, 84)) == rat(13, 63));
    // beyond bar-epsilon the deficit is identically 0
    CHECK(delta_at(fr, rat(3, 4)) == Rat(0));
    CHECK(delta_at(fr, Rat(1)) == Rat(0));
    CHECK_THROWS_AS(delta_at(fr, rat(-1, 2)), InvalidSettingError);
    CHECK_THROWS_AS(delta_at(fr, rat(3, 2)), InvalidSettingError);
}

TEST_CASE("mechanism_at blends adjacent representatives") {
    ProfileSpace space(Setting(1, 2), OrderKind::Strict);
    Mechanism left = constant_mechanism(space, Outcome::degenerate(2, 0));
    Mechanism right = constant_mechanism(space, Outcome::degenerate(2, 1));
    ParetoFrontier fr;
    fr.points.push_back({Rat(0), rat(1, 3), left});
    fr.points.push_back({rat(1, 2), Rat(0), right});
    CHECK(mechanism_at(fr, Rat(0)) == left);
    CHECK(mechanism_at(fr, rat(1, 2)) == right);
    // beta = (1/8)/(1/2) = 1/4 of the way across
    Mechanism mid = mechanism_at(fr, rat(1, 8));
    CHECK(mid.prob(0, 0) == rat(3, 4));
    CHECK(mid.prob(0, 1) == rat(1, 4));
    // past the right end: clamp to the final representative
    CHECK(mechanism_at(fr, Rat(1)) == right);
    CHECK_THROWS_AS(mechanism_at(fr, rat(-1, 3)), InvalidSettingError);
}

TEST_CASE("degenerate problems signal and collapse to a point") {
    ProfileSpace space(Setting(2, 2), OrderKind::Strict);
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(2, rat(1, 2)));
    ProblemSpec problem(space, DesideratumFn(space, values));
    CHECK_THROWS_AS(find_lower(problem), DegenerateFrontierSignal);
    ParetoFrontier fr = compute_frontier(problem);
    REQUIRE(fr.points.size() == 1);
    CHECK(fr.points[0].eps == Rat(0));
    CHECK(fr.points[0].deficit == Rat(0));
}

TEST_CASE("single-segment frontier: veto desideratum at n = 2") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_veto(space));

    const Rat under = find_lower(problem);
    CHECK(under > 0);
    CHECK(under <= rat(1, 2));

    ParetoFrontier fr = find_bounds(problem, under);
    REQUIRE(fr.points.size() == 2);
    CHECK(fr.points[0].eps == Rat(0));
    CHECK(fr.points[0].deficit == rat(1, 4));
    CHECK(fr.points[1].eps == rat(1, 2));
    CHECK(fr.points[1].deficit == Rat(0));
    CHECK(fr.lp_calls <= 4 * 1 + 6);

    // representatives achieve their stored signatures
    for (const auto& pt : fr.points) {
        CHECK(manipulability(pt.representative) <= pt.eps);
        CHECK(deficit_of(pt.representative, problem) == pt.deficit);
    }

    ValidationReport rep = validate(fr, problem);
    CHECK(rep.ok());
    CHECK(rep.midpoint_solves == 1);

    // determinism: a rerun reproduces the frontier bit-for-bit
    ParetoFrontier again = find_bounds(problem, under);
    REQUIRE(again.points.size() == fr.points.size());
    for (size_t i = 0; i < fr.points.size(); ++i) {
        CHECK(again.points[i].eps == fr.points[i].eps);
        CHECK(again.points[i].deficit == fr.points[i].deficit);
        CHECK(again.points[i].representative == fr.points[i].representative);
    }
    CHECK(again.lp_calls == fr.lp_calls);

    CHECK_THROWS_AS(find_bounds(problem, Rat(0)), InvalidSettingError);
    CHECK_THROWS_AS(find_bounds(problem, Rat(1)), InvalidSettingError);
}

TEST_CASE("signature_at clamps past bar-epsilon") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_veto(space));
    SignaturePoint at0 = signature_at(problem, Rat(0));
    CHECK(at0.deficit == rat(1, 4));
    SignaturePoint mid = signature_at(problem, rat(1, 4));
    CHECK(mid.deficit == rat(1, 8));  // on the single linear segment
    CHECK(signature_at(problem, Rat(1)).deficit == Rat(0));
    CHECK_THROWS_AS(signature_at(problem, Rat(-1)), InvalidSettingError);
}

TEST_CASE("weak-order frontier has an interior kink") {
    ProfileSpace space(Setting(2, 3), OrderKind::Weak);
    ProblemSpec problem(space, build_veto(space));
    ParetoFrontier fr = compute_frontier(problem);
    REQUIRE(fr.points.size() == 3);
    CHECK(fr.points[0].eps == Rat(0));
    CHECK(fr.points[0].deficit == rat(1, 3));
    CHECK(fr.points[1].eps == rat(1, 26));
    CHECK(fr.points[1].deficit == rat(3, 13));
    CHECK(fr.points[2].eps == rat(1, 2));
    CHECK(fr.points[2].deficit == Rat(0));

    ValidationReport rep = validate(fr, problem);
    CHECK(rep.ok());
    CHECK(rep.midpoint_solves == 2);

    // the interior bound is a genuine kink: slopes strictly increase
    const Rat s01 = (fr.points[1].deficit - fr.points[0].deficit) / fr.points[1].eps;
    const Rat s12 = (fr.points[2].deficit - fr.points[1].deficit) /
                    (fr.points[2].eps - fr.points[1].eps);
    CHECK(s01 < s12);
    CHECK(delta_at(fr, rat(1, 52)) == (fr.points[0].deficit + fr.points[1].deficit) / 2);
}

TEST_CASE("validate flags corrupted frontiers") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    ProblemSpec problem(space, build_veto(space));
    ParetoFrontier fr = find_bounds(problem, find_lower(problem));
    fr.points[0].deficit += rat(1, 100);
    ValidationReport rep = validate(fr, problem);
    CHECK(!rep.ok());
}
