#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mechfront/desiderata.hpp"
#include "mechfront/mechanisms.hpp"
#include "mechfront/prefcore.hpp"

namespace mftest {

using namespace mechfront;

/// "acb" -> a > c > b; "(ab)c" -> a ~ b > c. Letters map a=0, b=1, ...
inline PrefOrder ord(const std::string& s) {
    std::vector<std::vector<int>> classes;
    int m = 0;
    bool grouped = false;
    for (char ch : s) {
        if (ch == '(') {
            classes.emplace_back();
            grouped = true;
        } else if (ch == ')') {
            grouped = false;
        } else {
            if (!grouped) classes.emplace_back();
            classes.back().push_back(ch - 'a');
            ++m;
        }
    }
    return PrefOrder(std::move(classes), m);
}

inline Profile prof(const std::vector<std::string>& agents) {
    Profile p;
    for (const auto& s : agents) p.orders.push_back(ord(s));
    return p;
}

inline Rat rat(long n, long d = 1) { return make_rat(n, d); }

inline Mechanism from_rule(const ProfileSpace& space,
                           const std::function<Outcome(const Profile&)>& rule) {
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) table.push_back(rule(space.profile(p)));
    return Mechanism(space, std::move(table));
}

/// Example mechanisms phi/psi on the 1-agent, 3-alternative strict space:
/// outcome depends only on whether the agent ranks b above c.
inline Mechanism example_phi(const ProfileSpace& space) {
    return from_rule(space, [](const Profile& p) {
        return p.orders[0].weakly_prefers(1, 2)
                   ? Outcome({Rat(0), make_rat(2, 3), make_rat(1, 3)})
                   : Outcome({make_rat(1, 3), make_rat(1, 3), make_rat(1, 3)});
    });
}

inline Mechanism example_psi(const ProfileSpace& space) {
    return from_rule(space, [](const Profile& p) {
        return p.orders[0].weakly_prefers(1, 2)
                   ? Outcome({make_rat(5, 9), make_rat(1, 9), make_rat(1, 3)})
                   : Outcome({make_rat(1, 9), make_rat(5, 9), make_rat(1, 3)});
    });
}

/// Random mechanism with small-denominator rational rows.
inline Mechanism random_mechanism(const ProfileSpace& space, std::mt19937& rng) {
    const int m = space.setting().m;
    std::uniform_int_distribution<int> weight(0, 4);
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) {
        std::vector<long> w(m);
        long total = 0;
        for (int j = 0; j < m; ++j) total += w[j] = weight(rng);
        std::vector<Rat> row(m);
        if (total == 0) {
            row.assign(m, make_rat(1, m));
        } else {
            for (int j = 0; j < m; ++j) row[j] = make_rat(w[j], total);
        }
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(space, std::move(table));
}

}  // namespace mftest
