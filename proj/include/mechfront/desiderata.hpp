#pragma once

#include <algorithm>
#include <vector>

#include "mechfront/prefcore.hpp"
#include "mechfront/rational.hpp"

namespace mechfront {

/// A lottery over alternatives: nonnegative rationals summing to exactly 1.
struct Outcome {
    std::vector<Rat> probs;

    explicit Outcome(std::vector<Rat> p) : probs(std::move(p)) { validate(); }

    static Outcome degenerate(int m, int j) {
        std::vector<Rat> p(m, Rat(0));
        p[j] = 1;
        return Outcome(std::move(p));
    }
    static Outcome uniform(int m) {
        return Outcome(std::vector<Rat>(m, make_rat(1, m)));
    }
    /// Uniform lottery over a subset of alternatives.
    static Outcome uniform_over(int m, const std::vector<int>& support) {
        std::vector<Rat> p(m, Rat(0));
        for (int j : support) p[j] += make_rat(1, static_cast<long>(support.size()));
        return Outcome(std::move(p));
    }

    int size() const { return static_cast<int>(probs.size()); }

    void validate() const {
        Rat sum(0);
        for (const auto& q : probs) {
            if (q < 0) throw InvalidSettingError("negative outcome probability");
            sum += q;
        }
        if (sum != 1) throw InvalidSettingError("outcome probabilities must sum to 1");
    }

    bool operator==(const Outcome&) const = default;
};

struct ScoringFunction {
    std::vector<Rat> scores;  // scores[r-1] is the score of rank r

    static ScoringFunction borda(int m) {
        std::vector<Rat> v;
        for (int r = 1; r <= m; ++r) v.push_back(Rat(m - r));
        return {std::move(v)};
    }
    static ScoringFunction plurality(int m) {
        std::vector<Rat> v(m, Rat(0));
        v[0] = 1;
        return {std::move(v)};
    }
    static ScoringFunction veto(int m) {
        std::vector<Rat> v(m, Rat(0));
        v[m - 1] = -1;
        return {std::move(v)};
    }
};

struct ProfileDistribution {
    std::vector<Rat> weights;  // one per profile index

    void validate(int num_profiles) const {
        if (static_cast<int>(weights.size()) != num_profiles)
            throw SpaceMismatchError("distribution size mismatch");
        Rat sum(0);
        for (const auto& w : weights) {
            if (w < 0) throw InvalidSettingError("negative profile weight");
            sum += w;
        }
        if (sum != 1) throw InvalidSettingError("profile weights must sum to 1");
    }

    static ProfileDistribution uniform(int num_profiles) {
        return {std::vector<Rat>(num_profiles, make_rat(1, num_profiles))};
    }
    static ProfileDistribution point_mass(int num_profiles, int idx) {
        std::vector<Rat> w(num_profiles, Rat(0));
        w[idx] = 1;
        return {std::move(w)};
    }
};

/// Dense table of d-values: one rational in [0,1] per (profile, alternative).
class DesideratumFn {
  public:
    DesideratumFn(const ProfileSpace& space, std::vector<std::vector<Rat>> values)
        : space_(&space), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != space.size())
            throw SpaceMismatchError("desideratum table size mismatch");
        for (const auto& row : values_) {
            if (static_cast<int>(row.size()) != space.setting().m)
                throw SpaceMismatchError("desideratum row size mismatch");
            for (const auto& v : row)
                if (v < 0 || v > 1) throw InvalidSettingError("d-value outside [0,1]");
        }
    }

    const ProfileSpace& space() const { return *space_; }
    const Rat& value(int profile_idx, int alt) const { return values_[profile_idx][alt]; }
    const std::vector<Rat>& row(int profile_idx) const { return values_[profile_idx]; }

    Rat row_max(int profile_idx) const {
        return *std::max_element(values_[profile_idx].begin(), values_[profile_idx].end());
    }
    Rat row_min(int profile_idx) const {
        return *std::min_element(values_[profile_idx].begin(), values_[profile_idx].end());
    }
    std::vector<int> argmax_set(int profile_idx) const {
        const Rat mx = row_max(profile_idx);
        std::vector<int> out;
        for (int j = 0; j < space_->setting().m; ++j)
            if (values_[profile_idx][j] == mx) out.push_back(j);
        return out;
    }

    bool is_anonymous() const {
        const int n = space_->setting().n;
        for (int t = 0; t + 1 < n; ++t) {
            const auto pi = AgentPermutation::transposition(n, t, t + 1);
            for (int p = 0; p < space_->size(); ++p) {
                const int q = space_->index_of(apply_agent_permutation(space_->profile(p), pi));
                if (q < 0 || values_[p] != values_[q]) return false;
            }
        }
        return true;
    }

    bool is_neutral() const {
        const int m = space_->setting().m;
        for (int t = 0; t + 1 < m; ++t) {
            const auto w = AltPermutation::transposition(m, t, t + 1);
            for (int p = 0; p < space_->size(); ++p) {
                const int q = space_->index_of(apply_alternative_permutation(space_->profile(p), w));
                if (q < 0) return false;
                for (int j = 0; j < m; ++j)
                    if (values_[p][j] != values_[q][w.map[j]]) return false;
            }
        }
        return true;
    }

  private:
    const ProfileSpace* space_;
    std::vector<std::vector<Rat>> values_;
};

namespace detail {

/// Count of agents ranking j first; co-first choices in weak orders all count.
inline int count_first(const Profile& p, int j) {
    int c = 0;
    for (const auto& o : p.orders)
        if (o.rank(j) == 1) ++c;
    return c;
}

/// Count of agents ranking j last (rank equals the order's maximum rank).
inline int count_last(const Profile& p, int j) {
    int c = 0;
    for (const auto& o : p.orders)
        if (o.rank(j) == o.max_rank()) ++c;
    return c;
}

inline int count_strictly_preferring(const Profile& p, int a, int b) {
    int c = 0;
    for (const auto& o : p.orders)
        if (o.strictly_prefers(a, b)) ++c;
    return c;
}

inline bool is_condorcet_winner(const Profile& p, int j, int m) {
    for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        if (count_strictly_preferring(p, j, k) < count_strictly_preferring(p, k, j)) return false;
    }
    return true;
}

inline bool is_unanimity_winner(const Profile& p, int j, int m) {
    for (const auto& o : p.orders)
        for (int k = 0; k < m; ++k)
            if (!o.weakly_prefers(j, k)) return false;
    return true;
}

inline bool pareto_dominates(const Profile& p, int a, int b) {
    bool some_strict = false;
    for (const auto& o : p.orders) {
        if (!o.weakly_prefers(a, b)) return false;
        if (o.strictly_prefers(a, b)) some_strict = true;
    }
    return some_strict;
}

inline bool is_pareto_optimal(const Profile& p, int j, int m) {
    for (int k = 0; k < m; ++k)
        if (k != j && pareto_dominates(p, k, j)) return false;
    return true;
}

}  // namespace detail

/// d(j,P) = n_j^1 / n.
inline DesideratumFn build_plurality(const ProfileSpace& space) {
    const int n = space.setting().n, m = space.setting().m;
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(m));
    for (int p = 0; p < space.size(); ++p)
        for (int j = 0; j < m; ++j)
            values[p][j] = make_rat(detail::count_first(space.profile(p), j), n);
    return DesideratumFn(space, std::move(values));
}

/// d(j,P) = (n - n_j^m) / n.
inline DesideratumFn build_veto(const ProfileSpace& space) {
    const int n = space.setting().n, m = space.setting().m;
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(m));
    for (int p = 0; p < space.size(); ++p)
        for (int j = 0; j < m; ++j)
            values[p][j] = make_rat(n - detail::count_last(space.profile(p), j), n);
    return DesideratumFn(space, std::move(values));
}

inline DesideratumFn build_condorcet(const ProfileSpace& space) {
    const int m = space.setting().m;
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(m, Rat(0)));
    for (int p = 0; p < space.size(); ++p)
        for (int j = 0; j < m; ++j)
            if (detail::is_condorcet_winner(space.profile(p), j, m)) values[p][j] = 1;
    return DesideratumFn(space, std::move(values));
}

/// Positional scoring, min-max scaled per profile; all-zero row on ties.
inline DesideratumFn build_positional(const ProfileSpace& space, const ScoringFunction& v) {
    const int n = space.setting().n, m = space.setting().m;
    if (static_cast<int>(v.scores.size()) != m)
        throw InvalidSettingError("scoring function must have one score per rank");
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(m));
    for (int p = 0; p < space.size(); ++p) {
        const Profile& prof = space.profile(p);
        std::vector<Rat> sc(m, Rat(0));
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) sc[j] += v.scores[prof.orders[i].rank(j) - 1];
        const Rat mx = *std::max_element(sc.begin(), sc.end());
        const Rat mn = *std::min_element(sc.begin(), sc.end());
        for (int j = 0; j < m; ++j)
            values[p][j] = (mx > mn) ? Rat((sc[j] - mn) / (mx - mn)) : Rat(0);
    }
    return DesideratumFn(space, std::move(values));
}

enum class BinaryProperty { UnanimityWinner, ParetoOptimal, CondorcetWinner, Egalitarian };

/// Indicator desideratum for a per-alternative property. Profiles where no
/// alternative has the property get an all-zero row, so every outcome is
/// deficit-free there.
inline DesideratumFn build_binary(const ProfileSpace& space, BinaryProperty prop) {
    const int n = space.setting().n, m = space.setting().m;
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(m, Rat(0)));
    for (int p = 0; p < space.size(); ++p) {
        const Profile& prof = space.profile(p);
        switch (prop) {
            case BinaryProperty::UnanimityWinner:
                for (int j = 0; j < m; ++j)
                    if (detail::is_unanimity_winner(prof, j, m)) values[p][j] = 1;
                break;
            case BinaryProperty::ParetoOptimal:
                for (int j = 0; j < m; ++j)
                    if (detail::is_pareto_optimal(prof, j, m)) values[p][j] = 1;
                break;
            case BinaryProperty::CondorcetWinner:
                for (int j = 0; j < m; ++j)
                    if (detail::is_condorcet_winner(prof, j, m)) values[p][j] = 1;
                break;
            case BinaryProperty::Egalitarian: {
                std::vector<int> worst(m, 0);
                for (int j = 0; j < m; ++j)
                    for (int i = 0; i < n; ++i)
                        worst[j] = std::max(worst[j], prof.orders[i].rank(j));
                const int best = *std::min_element(worst.begin(), worst.end());
                for (int j = 0; j < m; ++j)
                    if (worst[j] == best) values[p][j] = 1;
                break;
            }
        }
    }
    return DesideratumFn(space, std::move(values));
}

/// Target correspondence: indicator of the selected set per profile.
inline DesideratumFn build_target_correspondence(
    const ProfileSpace& space, const std::vector<std::vector<int>>& selected) {
    const int m = space.setting().m;
    if (static_cast<int>(selected.size()) != space.size())
        throw SpaceMismatchError("target correspondence size mismatch");
    std::vector<std::vector<Rat>> values(space.size(), std::vector<Rat>(m, Rat(0)));
    for (int p = 0; p < space.size(); ++p)
        for (int j : selected[p]) values[p][j] = 1;
    return DesideratumFn(space, std::move(values));
}

enum class CombineMode { Min, Max };

inline DesideratumFn combine(const DesideratumFn& d1, const DesideratumFn& d2, CombineMode mode) {
    if (&d1.space() != &d2.space()) throw SpaceMismatchError("combine requires a shared space");
    const int m = d1.space().setting().m;
    std::vector<std::vector<Rat>> values(d1.space().size(), std::vector<Rat>(m));
    for (int p = 0; p < d1.space().size(); ++p)
        for (int j = 0; j < m; ++j)
            values[p][j] = (mode == CombineMode::Min) ? std::min(d1.value(p, j), d2.value(p, j))
                                                      : std::max(d1.value(p, j), d2.value(p, j));
    return DesideratumFn(d1.space(), std::move(values));
}

/// Min-max rescales each row so that the absolute deficit of the result equals
/// the relative deficit under d. Rows with zero margin become all-zero.
inline DesideratumFn relative_transform(const DesideratumFn& d) {
    const int m = d.space().setting().m;
    std::vector<std::vector<Rat>> values(d.space().size(), std::vector<Rat>(m, Rat(0)));
    for (int p = 0; p < d.space().size(); ++p) {
        const Rat mx = d.row_max(p), mn = d.row_min(p);
        if (mx > mn)
            for (int j = 0; j < m; ++j) values[p][j] = (d.value(p, j) - mn) / (mx - mn);
    }
    return DesideratumFn(d.space(), std::move(values));
}

/// d(x,P) = sum_j x_j d(j,P).
inline Rat expected_value(const DesideratumFn& d, const Outcome& x, int profile_idx) {
    if (x.size() != d.space().setting().m) throw SpaceMismatchError("outcome dimension mismatch");
    Rat sum(0);
    for (int j = 0; j < x.size(); ++j) sum += x.probs[j] * d.value(profile_idx, j);
    return sum;
}

/// delta_d(x,P) = max_j d(j,P) - d(x,P).
inline Rat outcome_deficit(const DesideratumFn& d, const Outcome& x, int profile_idx) {
    return d.row_max(profile_idx) - expected_value(d, x, profile_idx);
}

inline Rat relative_outcome_deficit(const DesideratumFn& d, const Outcome& x, int profile_idx) {
    const Rat margin = d.row_max(profile_idx) - d.row_min(profile_idx);
    if (margin == 0) return Rat(0);
    return outcome_deficit(d, x, profile_idx) / margin;
}

}  // namespace mechfront
