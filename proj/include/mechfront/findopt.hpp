#pragma once

#include <utility>
#include <vector>

#include "mechfront/mechanisms.hpp"
#include "mechfront/ratlp.hpp"

namespace mechfront {

struct LPStats {
    long constraints = 0;
    long pivots = 0;
};

struct FindOptResult {
    Mechanism mechanism;
    Rat deficit;
    LPStats lp_stats;
};

namespace findopt_detail {

/// Variable layout of the FindOpt LP: f-variables profile-major in canonical
/// profile order, the scalar d (or t) last. In the reduced form (used for
/// solving) the last outcome coordinate of every profile is substituted out
/// via f_{m-1}(P) = 1 - sum_{j<m-1} f_j(P), so a profile occupies m-1
/// variables and the probability equality becomes sum_{j<m-1} f_j(P) <= 1.
struct Layout {
    int m;
    int num_profiles;
    bool reduced;
    int width() const { return reduced ? m - 1 : m; }
    int base(int profile_idx) const { return profile_idx * width(); }
    int scalar() const { return num_profiles * width(); }
    int num_vars() const { return scalar() + 1; }

    /// Adds coef * f_j(P) to the expression (applying the substitution).
    void add_f(LinExpr& e, int profile_idx, int alt, const Rat& coef) const {
        if (!reduced || alt < m - 1) {
            e.add(base(profile_idx) + alt, coef);
            return;
        }
        e.constant += coef;
        for (int k = 0; k < m - 1; ++k) e.add(base(profile_idx) + k, -coef);
    }
};

struct TaggedLP {
    LPProblem lp;
    Layout layout;
    std::vector<int> sp_constraints;  // constraint indices whose rhs is eps
    std::vector<char> pinned;         // f_j(P) already forced to zero

    TaggedLP(const ProfileSpace& space, bool reduced)
        : lp(Layout{space.setting().m, space.size(), reduced}.num_vars()),
          layout{space.setting().m, space.size(), reduced},
          pinned(space.size() * space.setting().m, 0) {}

    void push_row(LinExpr e, Rel rel, Rat rhs) {
        if (e.terms.empty()) {
            const bool ok = rel == Rel::LE   ? e.constant <= rhs
                            : rel == Rel::GE ? e.constant >= rhs
                                             : e.constant == rhs;
            if (!ok) throw InternalConsistencyError("vacuously false FindOpt row");
            return;
        }
        lp.constraints.push_back({std::move(e), rel, std::move(rhs)});
    }

    /// Forces f_j(P) = 0: a [0,0] box for a kept variable, an equality row
    /// sum_{k<m-1} f_k(P) = 1 for the substituted coordinate.
    void pin_zero(int profile_idx, int alt) {
        char& seen = pinned[profile_idx * layout.m + alt];
        if (seen) return;
        seen = 1;
        if (!layout.reduced || alt < layout.m - 1) {
            lp.bounds[layout.base(profile_idx) + alt] = {Rat(0), Rat(0)};
            return;
        }
        LinExpr e;
        for (int k = 0; k < layout.m - 1; ++k) e.add(layout.base(profile_idx) + k, Rat(1));
        push_row(std::move(e), Rel::EQ, Rat(1));
    }
};

inline void check_problem(const ProblemSpec& problem) {
    if (!closed_under_deviations(*problem.space))
        throw InvalidSettingError("restriction is not closed under unilateral deviations");
}

/// eps-approximate-SP rows: for each profile, agent, admissible misreport and
/// upper-contour level k, sum_{rank<=k} (f_j(P') - f_j(P)) <= eps. Identity
/// misreports and the top-level k = max rank (LHS identically 0) are dropped.
inline void add_sp_rows(TaggedLP& t, const ProfileSpace& space, const Rat& eps) {
    const int n = space.setting().n;
    for (int p = 0; p < space.size(); ++p) {
        const auto& ids = space.profile_order_ids(p);
        for (int i = 0; i < n; ++i) {
            const PrefOrder& truth = space.orders()[ids[i]];
            const auto levels = truth.rank_levels();
            for (int alt = 0; alt < space.num_orders(); ++alt) {
                if (alt == ids[i]) continue;
                const int q = space.deviation_index(p, i, alt);
                if (q < 0) continue;
                for (size_t li = 0; li + 1 < levels.size(); ++li) {
                    LinExpr e;
                    for (int j = 0; j < t.layout.m; ++j)
                        if (truth.rank(j) <= levels[li]) {
                            t.layout.add_f(e, q, j, Rat(1));
                            t.layout.add_f(e, p, j, Rat(-1));
                        }
                    t.sp_constraints.push_back(static_cast<int>(t.lp.constraints.size()));
                    t.lp.constraints.push_back({std::move(e), Rel::LE, eps});
                }
            }
        }
    }
}

/// Probability constraints: sum_j f_j(P) = 1 in the full layout; under the
/// substitution only the residual f_{m-1}(P) >= 0 remains (upper bounds on
/// the kept coordinates are implied and not stated).
inline void add_probability_rows(TaggedLP& t, const ProfileSpace& space) {
    if (t.layout.reduced && t.layout.m < 2) return;
    for (int p = 0; p < space.size(); ++p) {
        LinExpr e;
        for (int j = 0; j < t.layout.width(); ++j) e.add(t.layout.base(p) + j, Rat(1));
        if (t.layout.reduced)
            t.push_row(std::move(e), Rel::LE, Rat(1));
        else
            t.push_row(std::move(e), Rel::EQ, Rat(1));
    }
}

inline void add_deficit_rows(TaggedLP& t, const ProblemSpec& problem) {
    const ProfileSpace& space = *problem.space;
    if (problem.deficit_kind == DeficitKind::WorstCase) {
        for (int p = 0; p < space.size(); ++p) {
            LinExpr e;
            e.add(t.layout.scalar(), Rat(1));
            for (int j = 0; j < t.layout.m; ++j) t.layout.add_f(e, p, j, problem.d.value(p, j));
            t.push_row(std::move(e), Rel::GE, problem.d.row_max(p));
        }
    } else {
        LinExpr e;
        e.add(t.layout.scalar(), Rat(1));
        Rat rhs(0);
        for (int p = 0; p < space.size(); ++p) {
            const Rat& w = problem.distribution->weights[p];
            if (w == 0) continue;
            for (int j = 0; j < t.layout.m; ++j)
                t.layout.add_f(e, p, j, Rat(w * problem.d.value(p, j)));
            rhs += w * problem.d.row_max(p);
        }
        t.push_row(std::move(e), Rel::GE, std::move(rhs));
    }
}

/// Anonymity/neutrality equalities for the adjacent-transposition generators
/// of the symmetric groups; equality under generators implies the full group.
inline void add_symmetry_rows(TaggedLP& t, const ProblemSpec& problem) {
    const ProfileSpace& space = *problem.space;
    const int n = space.setting().n, m = space.setting().m;
    if (problem.axioms.anonymity) {
        for (int tr = 0; tr + 1 < n; ++tr) {
            const auto pi = AgentPermutation::transposition(n, tr, tr + 1);
            for (int p = 0; p < space.size(); ++p) {
                const int q = space.index_of(apply_agent_permutation(space.profile(p), pi));
                if (q < 0) throw InvalidSettingError("space not closed under agent renaming");
                if (q <= p) continue;
                for (int j = 0; j + 1 < m; ++j) {  // the last coordinate follows
                    LinExpr e;
                    t.layout.add_f(e, p, j, Rat(1));
                    t.layout.add_f(e, q, j, Rat(-1));
                    t.push_row(std::move(e), Rel::EQ, Rat(0));
                }
            }
        }
    }
    if (problem.axioms.neutrality) {
        for (int tr = 0; tr + 1 < m; ++tr) {
            const auto w = AltPermutation::transposition(m, tr, tr + 1);
            for (int p = 0; p < space.size(); ++p) {
                const int q = space.index_of(apply_alternative_permutation(space.profile(p), w));
                if (q < 0) throw InvalidSettingError("space not closed under alternative renaming");
                if (q < p) continue;
                for (int j = 0; j < m; ++j) {
                    if (q == p && w.map[j] <= j) continue;
                    LinExpr e;
                    t.layout.add_f(e, p, j, Rat(1));
                    t.layout.add_f(e, q, w.map[j], Rat(-1));
                    t.push_row(std::move(e), Rel::EQ, Rat(0));
                }
            }
        }
    }
}

/// Unanimity/Pareto/Condorcet axioms pin f_j(P) = 0 for excluded winners.
inline void add_zero_boxes(TaggedLP& t, const ProblemSpec& problem) {
    const ProfileSpace& space = *problem.space;
    const int m = space.setting().m;
    for (int p = 0; p < space.size(); ++p) {
        const Profile& prof = space.profile(p);
        if (problem.axioms.unanimity) {
            bool any = false;
            for (int j = 0; j < m; ++j) any = any || detail::is_unanimity_winner(prof, j, m);
            if (any)
                for (int j = 0; j < m; ++j)
                    if (!detail::is_unanimity_winner(prof, j, m)) t.pin_zero(p, j);
        }
        if (problem.axioms.pareto)
            for (int j = 0; j < m; ++j)
                if (!detail::is_pareto_optimal(prof, j, m)) t.pin_zero(p, j);
        if (problem.axioms.condorcet) {
            bool any = false;
            for (int j = 0; j < m; ++j) any = any || detail::is_condorcet_winner(prof, j, m);
            if (any)
                for (int j = 0; j < m; ++j)
                    if (!detail::is_condorcet_winner(prof, j, m)) t.pin_zero(p, j);
        }
    }
}

inline TaggedLP build_tagged_lp(const ProblemSpec& problem, const Rat& eps, bool reduced) {
    if (eps < 0 || eps > 1) throw InvalidSettingError("eps must lie in [0,1]");
    check_problem(problem);
    const ProfileSpace& space = *problem.space;
    TaggedLP t(space, reduced);
    if (!reduced)
        for (int v = 0; v < t.lp.num_vars; ++v) t.lp.bounds[v] = {Rat(0), Rat(1)};
    t.lp.objective.add(t.layout.scalar(), Rat(1));
    add_sp_rows(t, space, eps);
    add_deficit_rows(t, problem);
    add_probability_rows(t, space);
    add_symmetry_rows(t, problem);
    add_zero_boxes(t, problem);
    return t;
}

/// Variant for bar-epsilon: minimize t with SP rows "LHS - t <= 0", the
/// probability rows, and f pinned to 0 outside the argmax set of d(., P).
inline TaggedLP build_bar_lp(const ProblemSpec& problem) {
    check_problem(problem);
    const ProfileSpace& space = *problem.space;
    TaggedLP t(space, /*reduced=*/true);
    t.lp.objective.add(t.layout.scalar(), Rat(1));
    add_sp_rows(t, space, Rat(0));
    for (int ci : t.sp_constraints) t.lp.constraints[ci].expr.add(t.layout.scalar(), Rat(-1));
    t.sp_constraints.clear();  // rhs stays 0; eps is the variable here
    add_probability_rows(t, space);
    add_symmetry_rows(t, problem);
    add_zero_boxes(t, problem);
    for (int p = 0; p < space.size(); ++p) {
        const Rat mx = problem.d.row_max(p);
        for (int j = 0; j < space.setting().m; ++j)
            if (problem.d.value(p, j) != mx) t.pin_zero(p, j);
    }
    return t;
}

inline Mechanism decode(const ProblemSpec& problem, const Layout& layout,
                        const std::vector<Rat>& x) {
    std::vector<Outcome> table;
    table.reserve(layout.num_profiles);
    for (int p = 0; p < layout.num_profiles; ++p) {
        std::vector<Rat> row(layout.m);
        if (layout.reduced) {
            Rat rest(1);
            for (int j = 0; j + 1 < layout.m; ++j) {
                row[j] = x[layout.base(p) + j];
                rest -= row[j];
            }
            row[layout.m - 1] = rest;
        } else {
            for (int j = 0; j < layout.m; ++j) row[j] = x[layout.base(p) + j];
        }
        table.push_back(Outcome(std::move(row)));
    }
    return Mechanism(*problem.space, std::move(table));
}

inline FindOptResult make_result(const ProblemSpec& problem, const Layout& layout,
                                 const std::vector<Rat>& x, const Rat& objective, const Rat& eps,
                                 LPStats stats) {
    Mechanism mech = decode(problem, layout, x);
    if (manipulability(mech) > eps)
        throw InternalConsistencyError("decoded mechanism exceeds the manipulability bound");
    if (deficit_of(mech, problem) != objective)
        throw InternalConsistencyError("decoded deficit differs from the LP objective");
    return {std::move(mech), objective, stats};
}

}  // namespace findopt_detail

/// The documented external layout: f_j(P) at p*m + j, d last, probability
/// equalities, [0,1] boxes. Solving goes through the reduced internal form.
inline LPProblem build_lp(const ProblemSpec& problem, const Rat& eps) {
    return findopt_detail::build_tagged_lp(problem, eps, /*reduced=*/false).lp;
}

/// Keeps the dual simplex basis across calls at different eps: only the SP
/// right-hand sides move, which is a pure cost change for the dualized LP, so
/// each new eps resumes phase 2 from the previous optimal basis.
class FindOptSession {
  public:
    explicit FindOptSession(const ProblemSpec& problem,
                            PivotRule rule = PivotRule::DantzigLex)
        : problem_(&problem), rule_(rule),
          tagged_(findopt_detail::build_tagged_lp(problem, Rat(0), /*reduced=*/true)) {
        nlp_ = lp_detail::normalize(tagged_.lp);
        for (int ci : tagged_.sp_constraints)
            for (auto [row, sign] : nlp_.constraint_rows[ci]) sp_rows_.push_back({row, sign});
        auto ds = lp_detail::make_dual_standard(nlp_);
        base_cost_ = ds.cost;  // dual costs at eps = 0; eps enters additively
        engine_.emplace(nlp_.nvars, std::move(ds.cols), std::move(ds.b), std::move(ds.cost));
        if (engine_->solve_from_basis(ds.slack_basis, rule_) != LPStatus::Optimal)
            throw InternalConsistencyError("FindOpt LP unsolvable at eps = 0");
        ++lp_calls_;
    }

    FindOptResult solve(const Rat& eps) {
        if (eps < 0 || eps > 1) throw InvalidSettingError("eps must lie in [0,1]");
        if (eps != current_eps_) {
            std::vector<Rat> cost = base_cost_;
            for (auto [row, sign] : sp_rows_) cost[row] -= sign * eps;
            if (engine_->reoptimize(std::move(cost), rule_) != LPStatus::Optimal)
                throw InternalConsistencyError("FindOpt LP unsolvable on warm start");
            current_eps_ = eps;
            ++lp_calls_;
        }
        std::vector<Rat> pi = engine_->multipliers();
        std::vector<Rat> xn(nlp_.nvars);
        for (int j = 0; j < nlp_.nvars; ++j) xn[j] = -pi[j];
        std::vector<Rat> x = nlp_.recover(xn);
        Rat obj = nlp_.c0;
        for (int j = 0; j < nlp_.nvars; ++j)
            if (nlp_.c[j] != 0) obj += nlp_.c[j] * xn[j];
        if (obj != -engine_->objective())
            throw InternalConsistencyError("duality gap in recovered FindOpt solution");
        // exact feasibility check against the primal at this eps
        for (int ci : tagged_.sp_constraints) tagged_.lp.constraints[ci].rhs = eps;
        lp_detail::verify_solution(tagged_.lp, x, obj);
        return findopt_detail::make_result(
            *problem_, tagged_.layout, x, obj, eps,
            {static_cast<long>(tagged_.lp.constraints.size()), engine_->pivots()});
    }

    int lp_calls() const { return lp_calls_; }
    long pivots() const { return engine_->pivots(); }

  private:
    const ProblemSpec* problem_;
    PivotRule rule_;
    findopt_detail::TaggedLP tagged_;
    lp_detail::NormalizedLP nlp_;
    std::vector<Rat> base_cost_;
    std::vector<std::pair<int, int>> sp_rows_;  // (normalized row, sign)
    std::optional<lp_detail::StandardSimplex> engine_;
    Rat current_eps_ = Rat(0);
    int lp_calls_ = 0;
};

inline FindOptResult find_opt(const ProblemSpec& problem, const Rat& eps) {
    FindOptSession session(problem);
    return session.solve(eps);
}

struct BarEpsilonResult {
    Rat value;
    Mechanism representative;  // d-maximizing with manipulability exactly `value`
};

inline BarEpsilonResult bar_epsilon(const ProblemSpec& problem) {
    using namespace findopt_detail;
    TaggedLP t = build_bar_lp(problem);
    LPResult res = solve(t.lp, PivotRule::DantzigLex);
    if (res.status != LPStatus::Optimal)
        throw InternalConsistencyError("bar-epsilon LP unsolvable");
    Mechanism mech = decode(problem, t.layout, res.solution);
    if (manipulability(mech) != res.objective_value)
        throw InternalConsistencyError("bar-epsilon representative has wrong manipulability");
    if (deficit_of(mech, problem) != 0)
        throw InternalConsistencyError("bar-epsilon representative is not deficit-free");
    return {res.objective_value, std::move(mech)};
}

inline Rat compute_bar_epsilon(const ProblemSpec& problem) { return bar_epsilon(problem).value; }

}  // namespace mechfront
