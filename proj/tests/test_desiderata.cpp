#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace mechfront;
using mftest::ord;
using mftest::prof;
using mftest::rat;

namespace {
const ProfileSpace& strict33() {
    static ProfileSpace sp(Setting(3, 3), OrderKind::Strict);
    return sp;
}
}  // namespace

TEST_CASE("plurality desideratum") {
    const auto& sp = strict33();
    auto d = build_plurality(sp);
    int p = sp.index_of(prof({"abc", "acb", "abc"}));
    CHECK(d.row(p) == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
    p = sp.index_of(prof({"abc", "acb", "bca"}));
    CHECK(d.row(p) == std::vector<Rat>{rat(2, 3), rat(1, 3), Rat(0)});

    ProfileSpace weak(Setting(2, 3), OrderKind::Weak);
    auto dw = build_plurality(weak);
    const int q = weak.index_of(prof({"(ab)c", "c(ab)"}));
    CHECK(dw.row(q) == std::vector<Rat>{rat(1, 2), rat(1, 2), rat(1, 2)});
}

TEST_CASE("veto desideratum") {
    const auto& sp = strict33();
    auto d = build_veto(sp);
    int p = sp.index_of(prof({"abc", "bac", "abc"}));
    CHECK(d.row(p) == std::vector<Rat>{Rat(1), Rat(1), Rat(0)});
    p = sp.index_of(prof({"bca", "acb", "abc"}));  // lasts a, b, c
    CHECK(d.row(p) == std::vector<Rat>{rat(2, 3), rat(2, 3), rat(2, 3)});
    p = sp.index_of(prof({"abc", "bac", "cba"}));  // lasts c, c, a
    CHECK(d.row(p) == std::vector<Rat>{rat(2, 3), Rat(1), rat(1, 3)});
}

TEST_CASE("condorcet desideratum") {
    const auto& sp = strict33();
    auto d = build_condorcet(sp);
    int p = sp.index_of(prof({"abc", "abc", "abc"}));
    CHECK(d.row(p) == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
    p = sp.index_of(prof({"abc", "bca", "cab"}));  // Condorcet cycle
    CHECK(d.row(p) == std::vector<Rat>{Rat(0), Rat(0), Rat(0)});
    p = sp.index_of(prof({"abc", "acb", "bca"}));
    CHECK(d.row(p) == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
}

TEST_CASE("positional scoring") {
    const auto& sp = strict33();
    auto borda = build_positional(sp, ScoringFunction::borda(3));
    const int p = sp.index_of(prof({"abc", "abc", "abc"}));
    CHECK(borda.row(p) == std::vector<Rat>{Rat(1), rat(1, 2), Rat(0)});

    // plurality scoring has the plurality argmax sets on every profile
    auto pos = build_positional(sp, ScoringFunction::plurality(3));
    auto plu = build_plurality(sp);
    for (int q = 0; q < sp.size(); ++q) CHECK(pos.argmax_set(q) == plu.argmax_set(q));

    // all-tied profile scores to zero under veto scoring
    auto veto_sc = build_positional(sp, ScoringFunction::veto(3));
    const int tied = sp.index_of(prof({"abc", "bca", "cab"}));
    CHECK(veto_sc.row(tied) == std::vector<Rat>{Rat(0), Rat(0), Rat(0)});
}

TEST_CASE("binary desiderata") {
    const auto& sp = strict33();
    auto unan = build_binary(sp, BinaryProperty::UnanimityWinner);
    const int p = sp.index_of(prof({"abc", "abc", "abc"}));
    CHECK(unan.row(p) == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
    auto pareto = build_binary(sp, BinaryProperty::ParetoOptimal);
    CHECK(pareto.row(p) == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
    auto egal = build_binary(sp, BinaryProperty::Egalitarian);
    const int q = sp.index_of(prof({"abc", "cba", "acb"}));  // R = (3,3,3)
    CHECK(egal.row(q) == std::vector<Rat>{Rat(1), Rat(1), Rat(1)});

    auto con = build_binary(sp, BinaryProperty::CondorcetWinner);
    const int cyc = sp.index_of(prof({"abc", "bca", "cab"}));
    CHECK(con.row(cyc) == std::vector<Rat>{Rat(0), Rat(0), Rat(0)});
    // min of unanimity and condorcet on a unanimous profile
    CHECK(combine(unan, con, CombineMode::Min).row(p) == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
}

TEST_CASE("target desiderata") {
    const auto& sp = strict33();
    auto d = build_target(sp, constant_mechanism(sp, Outcome::uniform(3)));
    for (int p = 0; p < sp.size(); ++p)
        CHECK(d.row(p) == std::vector<Rat>(3, rat(1, 3)));

    std::vector<std::vector<int>> all(sp.size(), {0, 1, 2});
    auto corr = build_target_correspondence(sp, all);
    CHECK(corr.row(0) == std::vector<Rat>(3, Rat(1)));

    auto up = build_target(sp, uniform_plurality(sp));
    auto plu = build_plurality(sp);
    for (int p = 0; p < sp.size(); ++p) CHECK(up.argmax_set(p) == plu.argmax_set(p));
}

TEST_CASE("combine") {
    const auto& sp = strict33();
    auto d = build_veto(sp);
    auto zero = build_target_correspondence(sp, std::vector<std::vector<int>>(sp.size()));
    for (int p = 0; p < sp.size(); ++p) {
        CHECK(combine(d, d, CombineMode::Min).row(p) == d.row(p));
        CHECK(combine(d, zero, CombineMode::Max).row(p) == d.row(p));
    }
}

TEST_CASE("relative transform") {
    const auto& sp = strict33();
    auto plu = build_plurality(sp);
    auto rel = relative_transform(plu);
    const int p = sp.index_of(prof({"abc", "acb", "bca"}));  // row (2/3, 1/3, 0)
    CHECK(rel.row(p) == std::vector<Rat>{Rat(1), rat(1, 2), Rat(0)});

    auto d = build_target(sp, constant_mechanism(sp, Outcome::uniform(3)));
    auto dz = relative_transform(d);
    CHECK(dz.row(0) == std::vector<Rat>{Rat(0), Rat(0), Rat(0)});

    // relative deficit under d equals absolute deficit under the transform
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick(0, sp.size() - 1);
    std::uniform_int_distribution<int> weight(0, 5);
    for (int t = 0; t < 50; ++t) {
        std::vector<long> w(3);
        long total = 0;
        for (auto& v : w) total += v = weight(rng);
        if (total == 0) w[0] = total = 1;
        std::vector<Rat> probs(3);
        for (int j = 0; j < 3; ++j) probs[j] = make_rat(w[j], total);
        Outcome x(probs);
        const int q = pick(rng);
        CHECK(outcome_deficit(rel, x, q) == relative_outcome_deficit(plu, x, q));
    }
}

TEST_CASE("expected value and deficit") {
    const auto& sp = strict33();
    auto plu = build_plurality(sp);
    auto borda = build_positional(sp, ScoringFunction::borda(3));
    const int unanimous = sp.index_of(prof({"abc", "abc", "abc"}));
    CHECK(expected_value(plu, Outcome::degenerate(3, 0), unanimous) == Rat(1));
    CHECK(expected_value(borda, Outcome::uniform(3), unanimous) == rat(1, 2));
    CHECK(outcome_deficit(plu, Outcome::degenerate(3, 0), unanimous) == Rat(0));

    const int p = sp.index_of(prof({"abc", "acb", "bca"}));
    CHECK(outcome_deficit(plu, Outcome::uniform(3), p) == rat(1, 3));

    // linearity of expected value
    Outcome x = Outcome::degenerate(3, 1), y = Outcome::uniform(3);
    Rat beta = rat(1, 4);
    std::vector<Rat> mix(3);
    for (int j = 0; j < 3; ++j) mix[j] = beta * x.probs[j] + (1 - beta) * y.probs[j];
    CHECK(expected_value(borda, Outcome(mix), p) ==
          beta * expected_value(borda, x, p) + (1 - beta) * expected_value(borda, y, p));
}

TEST_CASE("the Veto deficit of the dispersed-dictatorship outcome") {
    const auto& sp = strict33();
    auto veto = build_veto(sp);
    const int p = sp.index_of(prof({"abc", "abc", "cba"}));
    Outcome rd({rat(2, 3), Rat(0), rat(1, 3)});
    CHECK(outcome_deficit(veto, rd, p) == rat(4, 9));
}

TEST_CASE("validation") {
    const auto& sp = strict33();
    CHECK_THROWS_AS(DesideratumFn(sp, {}), SpaceMismatchError);
    std::vector<std::vector<Rat>> bad(sp.size(), std::vector<Rat>(3, Rat(0)));
    bad[0][0] = rat(3, 2);
    CHECK_THROWS_AS(DesideratumFn(sp, bad), InvalidSettingError);
    CHECK_THROWS_AS(Outcome({rat(1, 2), rat(1, 2), rat(1, 2)}), InvalidSettingError);
    CHECK_THROWS_AS(Outcome({rat(3, 2), rat(-1, 2), Rat(0)}), InvalidSettingError);
}

TEST_CASE("desideratum symmetry checks") {
    const auto& sp = strict33();
    CHECK(build_plurality(sp).is_anonymous());
    CHECK(build_plurality(sp).is_neutral());
    CHECK(build_veto(sp).is_anonymous());
    CHECK(build_veto(sp).is_neutral());
    // dictatorship target is neutral but not anonymous
    auto d = build_target(sp, dictatorship(sp, 0));
    CHECK(!d.is_anonymous());
}
