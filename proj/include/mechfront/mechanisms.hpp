#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mechfront/desiderata.hpp"
#include "mechfront/prefcore.hpp"
#include "mechfront/rational.hpp"

namespace mechfront {

/// A random mechanism as a dense table: one Outcome per admissible profile.
class Mechanism {
  public:
    Mechanism(const ProfileSpace& space, std::vector<Outcome> table)
        : space_(&space), table_(std::move(table)) {
        if (static_cast<int>(table_.size()) != space.size())
            throw SpaceMismatchError("mechanism table size mismatch");
        for (const auto& row : table_)
            if (row.size() != space.setting().m)
                throw SpaceMismatchError("mechanism row size mismatch");
    }

    const ProfileSpace& space() const { return *space_; }
    const Outcome& outcome(int profile_idx) const { return table_.at(profile_idx); }
    const Rat& prob(int profile_idx, int alt) const { return table_[profile_idx].probs[alt]; }
    int size() const { return static_cast<int>(table_.size()); }

    bool operator==(const Mechanism& o) const { return table_ == o.table_; }

  private:
    const ProfileSpace* space_;
    std::vector<Outcome> table_;
};

/// A vNM utility representing a preference order: u(a) >= u(b) whenever the
/// order weakly prefers a to b, values in [0,1].
struct UtilityFunction {
    std::vector<Rat> u;
    PrefOrder order;

    UtilityFunction(std::vector<Rat> u_, PrefOrder order_) : u(std::move(u_)), order(std::move(order_)) {
        const int m = order.num_alternatives();
        if (static_cast<int>(u.size()) != m) throw SpaceMismatchError("utility dimension mismatch");
        for (const auto& v : u)
            if (v < 0 || v > 1) throw InvalidSettingError("utility outside [0,1]");
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (order.weakly_prefers(a, b) && u[a] < u[b])
                    throw InvalidSettingError("utility does not represent the order");
    }

    /// Extreme utility: 1 on the upper-contour set at level k, 0 elsewhere.
    static UtilityFunction top_k_indicator(const PrefOrder& order, int k) {
        std::vector<Rat> u(order.num_alternatives(), Rat(0));
        for (int j : order.top_set(k)) u[j] = 1;
        return UtilityFunction(std::move(u), order);
    }
};

struct Signature {
    Rat eps;
    Rat def;
    bool operator==(const Signature&) const = default;
};

enum class DeficitKind { WorstCase, ExAnte };

struct AxiomSet {
    bool anonymity = false;
    bool neutrality = false;
    bool unanimity = false;
    bool pareto = false;
    bool condorcet = false;
};

/// A problem (N, M, delta): the space, the desideratum, the deficit notion,
/// and any axioms imposed on the designed mechanisms.
struct ProblemSpec {
    const ProfileSpace* space;
    DesideratumFn d;
    DeficitKind deficit_kind = DeficitKind::WorstCase;
    std::optional<ProfileDistribution> distribution;
    AxiomSet axioms;

    ProblemSpec(const ProfileSpace& sp, DesideratumFn d_, DeficitKind kind = DeficitKind::WorstCase,
                std::optional<ProfileDistribution> dist = std::nullopt, AxiomSet ax = {})
        : space(&sp), d(std::move(d_)), deficit_kind(kind), distribution(std::move(dist)), axioms(ax) {
        if (&d.space() != space) throw SpaceMismatchError("desideratum space mismatch");
        if ((deficit_kind == DeficitKind::ExAnte) != distribution.has_value())
            throw InvalidSettingError("distribution present iff ex-ante deficit");
        if (distribution) distribution->validate(space->size());
    }
};

/// Expected-utility change for agent i from reporting alt_order instead of
/// its true order in p: sum_j u(j) (phi_j(P') - phi_j(P)).
inline Rat misreport_gain(const UtilityFunction& u, const Profile& p, int agent,
                          const PrefOrder& alt_order, const Mechanism& mech) {
    const ProfileSpace& space = mech.space();
    const int truthful = space.index_of(p);
    if (truthful < 0) throw NotInDomainError("profile not in space");
    if (!(u.order == p.orders[agent]))
        throw SpaceMismatchError("utility does not represent agent's order in p");
    const int deviated = space.deviation_index(truthful, agent, space.order_id(alt_order));
    if (deviated < 0) throw NotInDomainError("deviated profile outside restricted space");
    Rat gain(0);
    for (int j = 0; j < space.setting().m; ++j)
        gain += u.u[j] * (mech.prob(deviated, j) - mech.prob(truthful, j));
    return gain;
}

struct ManipulabilityWitness {
    Rat value;
    int agent = -1;
    int profile_idx = -1;
    int misreport_order_id = -1;
    int k_level = -1;
};

/// Manipulability with the binding (i, P, P', k) witness. The maximum runs
/// over all extreme top-k utilities; identity misreports keep the floor at 0.
inline ManipulabilityWitness manipulability_witness(const Mechanism& mech) {
    const ProfileSpace& space = mech.space();
    const int n = space.setting().n;
    ManipulabilityWitness best{Rat(0)};
    for (int p = 0; p < space.size(); ++p) {
        const auto& ids = space.profile_order_ids(p);
        for (int i = 0; i < n; ++i) {
            const PrefOrder& truth = space.orders()[ids[i]];
            for (int alt = 0; alt < space.num_orders(); ++alt) {
                const int q = space.deviation_index(p, i, alt);
                if (q < 0) continue;  // restricted space: misreport not admitted
                for (int k : truth.rank_levels()) {
                    Rat gain(0);
                    for (int j = 0; j < space.setting().m; ++j)
                        if (truth.rank(j) <= k) gain += mech.prob(q, j) - mech.prob(p, j);
                    if (gain > best.value) best = {gain, i, p, alt, k};
                }
            }
        }
    }
    return best;
}

inline Rat manipulability(const Mechanism& mech) { return manipulability_witness(mech).value; }

struct DeficitWitness {
    Rat value;
    int profile_idx = -1;
};

inline DeficitWitness deficit_worst_witness(const Mechanism& mech, const DesideratumFn& d) {
    if (&mech.space() != &d.space()) throw SpaceMismatchError("deficit space mismatch");
    DeficitWitness best{Rat(0), 0};
    for (int p = 0; p < mech.space().size(); ++p) {
        Rat def = outcome_deficit(d, mech.outcome(p), p);
        if (def > best.value) best = {def, p};
    }
    return best;
}

inline Rat deficit_worst(const Mechanism& mech, const DesideratumFn& d) {
    return deficit_worst_witness(mech, d).value;
}

inline Rat deficit_exante(const Mechanism& mech, const DesideratumFn& d,
                          const ProfileDistribution& dist) {
    if (&mech.space() != &d.space()) throw SpaceMismatchError("deficit space mismatch");
    dist.validate(mech.space().size());
    Rat sum(0);
    for (int p = 0; p < mech.space().size(); ++p)
        if (dist.weights[p] != 0) sum += dist.weights[p] * outcome_deficit(d, mech.outcome(p), p);
    return sum;
}

inline Rat deficit_of(const Mechanism& mech, const ProblemSpec& problem) {
    return problem.deficit_kind == DeficitKind::WorstCase
               ? deficit_worst(mech, problem.d)
               : deficit_exante(mech, problem.d, *problem.distribution);
}

inline Signature signature(const Mechanism& mech, const ProblemSpec& problem) {
    if (&mech.space() != problem.space) throw SpaceMismatchError("signature space mismatch");
    return {manipulability(mech), deficit_of(mech, problem)};
}

/// h_beta(P) = (1-beta) phi(P) + beta psi(P).
inline Mechanism make_hybrid(const Mechanism& phi, const Mechanism& psi, const Rat& beta) {
    if (&phi.space() != &psi.space()) throw SpaceMismatchError("hybrid space mismatch");
    if (beta < 0 || beta > 1) throw InvalidSettingError("beta outside [0,1]");
    std::vector<Outcome> table;
    table.reserve(phi.size());
    for (int p = 0; p < phi.size(); ++p) {
        std::vector<Rat> row(phi.space().setting().m);
        for (int j = 0; j < phi.space().setting().m; ++j)
            row[j] = (1 - beta) * phi.prob(p, j) + beta * psi.prob(p, j);
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(phi.space(), std::move(table));
}

namespace detail {

template <typename Body>
void for_each_permutation(int n, Body&& body) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        body(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace detail

/// phi^anon = (1/n!) sum_pi phi^pi with phi^pi(P) = phi(P^pi).
inline Mechanism anonymize(const Mechanism& mech) {
    const ProfileSpace& space = mech.space();
    const int n = space.setting().n, m = space.setting().m;
    std::vector<std::vector<Rat>> acc(space.size(), std::vector<Rat>(m, Rat(0)));
    long count = 0;
    detail::for_each_permutation(n, [&](const std::vector<int>& perm) {
        const AgentPermutation pi{std::vector<int>(perm)};
        ++count;
        for (int p = 0; p < space.size(); ++p) {
            const int q = space.index_of(apply_agent_permutation(space.profile(p), pi));
            if (q < 0) throw NotInDomainError("space not closed under agent permutations");
            for (int j = 0; j < m; ++j) acc[p][j] += mech.prob(q, j);
        }
    });
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (auto& row : acc) {
        for (auto& v : row) v /= count;
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(space, std::move(table));
}

/// phi^neut = (1/m!) sum_w phi^w with phi^w_j(P) = phi_{w(j)}(P^w).
inline Mechanism neutralize(const Mechanism& mech) {
    const ProfileSpace& space = mech.space();
    const int m = space.setting().m;
    std::vector<std::vector<Rat>> acc(space.size(), std::vector<Rat>(m, Rat(0)));
    long count = 0;
    detail::for_each_permutation(m, [&](const std::vector<int>& perm) {
        const AltPermutation w{std::vector<int>(perm)};
        ++count;
        for (int p = 0; p < space.size(); ++p) {
            const int q = space.index_of(apply_alternative_permutation(space.profile(p), w));
            if (q < 0) throw NotInDomainError("space not closed under alternative permutations");
            for (int j = 0; j < m; ++j) acc[p][j] += mech.prob(q, w.map[j]);
        }
    });
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (auto& row : acc) {
        for (auto& v : row) v /= count;
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(space, std::move(table));
}

inline bool is_anonymous(const Mechanism& mech) {
    const ProfileSpace& space = mech.space();
    const int n = space.setting().n;
    for (int t = 0; t + 1 < n; ++t) {
        const auto pi = AgentPermutation::transposition(n, t, t + 1);
        for (int p = 0; p < space.size(); ++p) {
            const int q = space.index_of(apply_agent_permutation(space.profile(p), pi));
            if (q < 0 || !(mech.outcome(p) == mech.outcome(q))) return false;
        }
    }
    return true;
}

inline bool is_neutral(const Mechanism& mech) {
    const ProfileSpace& space = mech.space();
    const int m = space.setting().m;
    for (int t = 0; t + 1 < m; ++t) {
        const auto w = AltPermutation::transposition(m, t, t + 1);
        for (int p = 0; p < space.size(); ++p) {
            const int q = space.index_of(apply_alternative_permutation(space.profile(p), w));
            if (q < 0) return false;
            for (int j = 0; j < m; ++j)
                if (mech.prob(p, j) != mech.prob(q, w.map[j])) return false;
        }
    }
    return true;
}

namespace detail {

inline void require_strict_space(const ProfileSpace& space, const char* what) {
    for (const auto& o : space.orders())
        if (!o.is_strict()) throw InvalidSettingError(std::string(what) + " requires a strict-order space");
}

}  // namespace detail

/// Selects the first choice of a uniformly random agent.
inline Mechanism random_dictatorship(const ProfileSpace& space) {
    detail::require_strict_space(space, "random_dictatorship");
    const int n = space.setting().n, m = space.setting().m;
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) {
        std::vector<Rat> row(m, Rat(0));
        for (const auto& o : space.profile(p).orders) row[o.classes()[0][0]] += make_rat(1, n);
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(space, std::move(table));
}

/// Always selects the first choice of agent `agent`.
inline Mechanism dictatorship(const ProfileSpace& space, int agent) {
    detail::require_strict_space(space, "dictatorship");
    const int m = space.setting().m;
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p)
        table.push_back(Outcome::degenerate(m, space.profile(p).orders.at(agent).classes()[0][0]));
    return Mechanism(space, std::move(table));
}

/// Uniform lottery over the Plurality winners.
inline Mechanism uniform_plurality(const ProfileSpace& space) {
    detail::require_strict_space(space, "uniform_plurality");
    const int m = space.setting().m;
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) {
        std::vector<int> firsts(m, 0);
        for (const auto& o : space.profile(p).orders) ++firsts[o.classes()[0][0]];
        const int mx = *std::max_element(firsts.begin(), firsts.end());
        std::vector<int> winners;
        for (int j = 0; j < m; ++j)
            if (firsts[j] == mx) winners.push_back(j);
        table.push_back(Outcome::uniform_over(m, winners));
    }
    return Mechanism(space, std::move(table));
}

/// Uniform lottery over alternatives that are the last choice of a minimal
/// number of agents.
inline Mechanism uniform_veto(const ProfileSpace& space) {
    detail::require_strict_space(space, "uniform_veto");
    const int m = space.setting().m;
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) {
        std::vector<int> lasts(m, 0);
        for (const auto& o : space.profile(p).orders) ++lasts[o.classes().back()[0]];
        const int mn = *std::min_element(lasts.begin(), lasts.end());
        std::vector<int> winners;
        for (int j = 0; j < m; ++j)
            if (lasts[j] == mn) winners.push_back(j);
        table.push_back(Outcome::uniform_over(m, winners));
    }
    return Mechanism(space, std::move(table));
}

/// Picks an unordered pair of alternatives uniformly, then the pairwise
/// majority winner; a majority tie splits the pair's probability evenly.
inline Mechanism random_duple(const ProfileSpace& space) {
    detail::require_strict_space(space, "random_duple");
    const int m = space.setting().m;
    const long pairs = static_cast<long>(m) * (m - 1) / 2;
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) {
        const Profile& prof = space.profile(p);
        std::vector<Rat> row(m, Rat(0));
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                const int na = detail::count_strictly_preferring(prof, a, b);
                const int nb = detail::count_strictly_preferring(prof, b, a);
                if (na > nb)
                    row[a] += make_rat(1, pairs);
                else if (nb > na)
                    row[b] += make_rat(1, pairs);
                else {
                    row[a] += make_rat(1, 2 * pairs);
                    row[b] += make_rat(1, 2 * pairs);
                }
            }
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(space, std::move(table));
}

inline Mechanism constant_mechanism(const ProfileSpace& space, const Outcome& x) {
    if (x.size() != space.setting().m) throw SpaceMismatchError("outcome dimension mismatch");
    return Mechanism(space, std::vector<Outcome>(space.size(), x));
}

inline Mechanism builtin(const std::string& name, const ProfileSpace& space) {
    if (name == "random_dictatorship") return random_dictatorship(space);
    if (name == "uniform_plurality") return uniform_plurality(space);
    if (name == "uniform_veto") return uniform_veto(space);
    if (name == "random_duple") return random_duple(space);
    // parametrized forms: dictatorship(i), constant(q0,q1,...)
    const auto open = name.find('('), close = name.rfind(')');
    if (open != std::string::npos && close == name.size() - 1) {
        const std::string head = name.substr(0, open);
        const std::string args = name.substr(open + 1, close - open - 1);
        if (head == "dictatorship") return dictatorship(space, std::stoi(args));
        if (head == "constant") {
            std::vector<Rat> probs;
            std::istringstream in(args);
            std::string cell;
            while (std::getline(in, cell, ',')) probs.push_back(parse_rat(cell));
            return constant_mechanism(space, Outcome(std::move(probs)));
        }
    }
    throw InvalidSettingError("unknown builtin mechanism: " + name);
}

/// Desideratum implicitly specified by a target mechanism: d(j,P) = phi_j(P).
inline DesideratumFn build_target(const ProfileSpace& space, const Mechanism& target) {
    if (&target.space() != &space) throw SpaceMismatchError("target space mismatch");
    std::vector<std::vector<Rat>> values;
    values.reserve(space.size());
    for (int p = 0; p < space.size(); ++p) values.push_back(target.outcome(p).probs);
    return DesideratumFn(space, std::move(values));
}

}  // namespace mechfront
