#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "mechfront/io.hpp"

using namespace mechfront;
using mftest::rat;

namespace {

ParetoFrontier veto_shaped_frontier(const ProfileSpace& space) {
    // the Fig. 5(b) bound/deficit values with placeholder representatives
    Mechanism rep = constant_mechanism(space, Outcome::uniform(space.setting().m));
    ParetoFrontier fr;
    fr.points.push_back({Rat(0), rat(2, 9), rep});
    fr.points.push_back({rat(1, 21), rat(10, 63), rep});
    fr.points.push_back({rat(1, 12), rat(5, 36), rep});
    fr.points.push_back({rat(1, 2), Rat(0), rep});
    fr.lp_calls = 12;
    return fr;
}

}  // namespace

TEST_CASE("mechanism JSON round-trip") {
    ProfileSpace space(Setting(2, 3), OrderKind::Strict);
    std::mt19937 rng(7);
    Mechanism mech = mftest::random_mechanism(space, rng);
    const std::string text = export_mechanism_json(mech);
    Mechanism back = import_mechanism_json(text, space);
    CHECK(back == mech);
    ProfileSpace other(Setting(2, 3), OrderKind::Weak);
    CHECK_THROWS_AS(import_mechanism_json(text, other), SpaceMismatchError);
    CHECK_THROWS_AS(import_mechanism_json("{not json", space), InvalidSettingError);
}

TEST_CASE("mechanism CSV round-trip") {
    ProfileSpace space(Setting(2, 2), OrderKind::Strict);
    std::mt19937 rng(3);
    Mechanism mech = mftest::random_mechanism(space, rng);
    Mechanism back = import_mechanism_csv(export_mechanism_csv(mech), space);
    CHECK(back == mech);
}

TEST_CASE("mechanism CSV rejects bad tables") {
    ProfileSpace space(Setting(2, 2), OrderKind::Strict);
    CHECK_THROWS_AS(import_mechanism_csv("profile_index,alternative,num,den\n0,0,1,2\n", space),
                    InvalidSettingError);  // missing entries
    std::string dup = "0,0,1,2\n0,0,1,2\n";
    CHECK_THROWS_AS(import_mechanism_csv(dup, space), InvalidSettingError);
    std::string oob = "9,0,1,2\n";
    CHECK_THROWS_AS(import_mechanism_csv(oob, space), InvalidSettingError);
}

TEST_CASE("desideratum CSV import") {
    ProfileSpace space(Setting(1, 2), OrderKind::Strict);  // profiles: ab, ba
    const std::string csv =
        "profile_index,alternative,numerator,denominator\n"
        "0,0,1,1\n0,1,0,1\n1,0,1,3\n1,1,1,1\n";
    DesideratumFn d = import_desideratum_csv(csv, space);
    CHECK(d.value(0, 0) == Rat(1));
    CHECK(d.value(1, 0) == rat(1, 3));
    // out-of-range values rejected
    CHECK_THROWS_AS(import_desideratum_csv("0,0,3,2\n0,1,0,1\n1,0,0,1\n1,1,0,1\n", space),
                    InvalidSettingError);
}

TEST_CASE("frontier JSON export") {
    ProfileSpace space(Setting(1, 3), OrderKind::Strict);
    const std::string text = export_frontier_json(veto_shaped_frontier(space));
    auto j = nlohmann::json::parse(text);
    REQUIRE(j.at("bounds").size() == 4);
    CHECK(j.at("bounds")[1].at("eps").at("num") == "1");
    CHECK(j.at("bounds")[1].at("eps").at("den") == "21");
    CHECK(j.at("bounds")[1].at("deficit").at("num") == "10");
    CHECK(j.at("lp_calls") == 12);
    REQUIRE(j.at("slopes").size() == 3);
    // slopes -4/3, -5/9, -1/3 from the stored endpoints
    CHECK(j.at("slopes")[0].at("num") == "-4");
    CHECK(j.at("slopes")[0].at("den") == "3");
    CHECK(j.at("slopes")[1].at("num") == "-5");
    CHECK(j.at("slopes")[1].at("den") == "9");
    CHECK(j.at("slopes")[2].at("num") == "-1");
    CHECK(j.at("slopes")[2].at("den") == "3");
    CHECK(j.at("representatives")[3] == "mech_3.json");
}

TEST_CASE("frontier CSV and sample exports") {
    ProfileSpace space(Setting(1, 3), OrderKind::Strict);
    ParetoFrontier fr = veto_shaped_frontier(space);
    const std::string csv = export_frontier_csv(fr);
    CHECK(csv.find("eps_num,eps_den,deficit_num,deficit_den\n") == 0);
    CHECK(csv.find("1,21,10,63") != std::string::npos);
    CHECK(csv.find("1,12,5,36") != std::string::npos);
    const std::string samples = export_frontier_samples_csv(fr, 4);
    // 5 samples over [0, 1/2]: eps = 0, 1/8, 1/4, 3/8, 1/2
    CHECK(samples.find("\n0,1,2,9") != std::string::npos);
    CHECK(samples.find("\n1,2,0,1") != std::string::npos);
    // eps = 1/4 interpolates the last segment: 5/36 - (1/3)(1/4 - 1/12) = 1/12
    CHECK(samples.find("\n1,4,1,12") != std::string::npos);
    CHECK_THROWS_AS(export_frontier_samples_csv(fr, 0), InvalidSettingError);
}

TEST_CASE("exported rationals are in lowest terms") {
    ProfileSpace space(Setting(1, 2), OrderKind::Strict);
    std::vector<Outcome> table(space.size(), Outcome({rat(2, 4), rat(2, 4)}));
    Mechanism mech(space, std::move(table));
    const std::string csv = export_mechanism_csv(mech);
    CHECK(csv.find("0,0,1,2") != std::string::npos);
    CHECK(csv.find("2,4") == std::string::npos);
}
