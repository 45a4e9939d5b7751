#pragma once

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mechfront/errors.hpp"
#include "mechfront/rational.hpp"

namespace mechfront {

/// Sparse linear expression: sum of coef * x_var plus a constant.
struct LinExpr {
    std::map<int, Rat> terms;  // no zero coefficients stored
    Rat constant = Rat(0);

    void add(int var, const Rat& coef) {
        if (coef == 0) return;
        auto [it, inserted] = terms.emplace(var, coef);
        if (!inserted) {
            it->second += coef;
            if (it->second == 0) terms.erase(it);
        }
    }

    Rat eval(const std::vector<Rat>& x) const {
        Rat v = constant;
        for (const auto& [var, coef] : terms) v += coef * x.at(var);
        return v;
    }
};

enum class Rel { LE, EQ, GE };

struct Constraint {
    LinExpr expr;
    Rel rel;
    Rat rhs;
};

/// Variable bounds; an empty optional means unbounded on that side.
struct VarBounds {
    std::optional<Rat> lo = Rat(0);
    std::optional<Rat> hi = std::nullopt;
};

/// Exact-rational LP: minimize objective subject to constraints and bounds.
struct LPProblem {
    int num_vars = 0;
    LinExpr objective;
    std::vector<Constraint> constraints;
    std::vector<VarBounds> bounds;  // one per variable

    explicit LPProblem(int nv) : num_vars(nv), bounds(nv) {}

    void validate() const {
        if (num_vars < 0) throw InvalidSettingError("negative variable count");
        if (static_cast<int>(bounds.size()) != num_vars)
            throw InvalidSettingError("bounds size must equal num_vars");
        auto check_expr = [&](const LinExpr& e) {
            for (const auto& [var, coef] : e.terms) {
                if (var < 0 || var >= num_vars) throw InvalidSettingError("variable id out of range");
                if (coef == 0) throw InvalidSettingError("stored zero coefficient");
            }
        };
        check_expr(objective);
        for (const auto& c : constraints) check_expr(c.expr);
        for (const auto& b : bounds)
            if (b.lo && b.hi && *b.lo > *b.hi) throw InvalidSettingError("lo > hi bound");
    }

    /// CPLEX-LP-format text dump for cross-checking with external solvers.
    std::string dump_lp_format() const {
        std::ostringstream os;
        auto expr = [&](const LinExpr& e) {
            bool first = true;
            for (const auto& [var, coef] : e.terms) {
                if (coef >= 0 && !first) os << " + ";
                if (coef < 0) os << (first ? "- " : " - ");
                Rat a = abs(coef);
                os << rat_str(a) << " x" << var;
                first = false;
            }
            if (first) os << "0 x0";
        };
        os << "Minimize\n obj: ";
        expr(objective);
        os << "\nSubject To\n";
        for (size_t i = 0; i < constraints.size(); ++i) {
            os << " c" << i << ": ";
            expr(constraints[i].expr);
            const char* rel = constraints[i].rel == Rel::LE ? "<=" : constraints[i].rel == Rel::GE ? ">=" : "=";
            Rat rhs = constraints[i].rhs - constraints[i].expr.constant;
            os << " " << rel << " " << rat_str(rhs) << "\n";
        }
        os << "Bounds\n";
        for (int v = 0; v < num_vars; ++v) {
            os << " ";
            if (bounds[v].lo)
                os << rat_str(*bounds[v].lo);
            else
                os << "-inf";
            os << " <= x" << v << " <= ";
            if (bounds[v].hi)
                os << rat_str(*bounds[v].hi);
            else
                os << "+inf";
            os << "\n";
        }
        os << "End\n";
        return os.str();
    }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
    LPStatus status;
    std::vector<Rat> solution;  // per original variable, when optimal
    Rat objective_value = Rat(0);
    long pivots = 0;
};

enum class PivotRule {
    Bland,         // smallest-index entering/leaving; guarantees termination
    DantzigBland,  // most-negative reduced cost, Bland fallback after a degenerate stall
    DantzigLex,    // most-negative reduced cost with a lexicographic ratio test;
                   // terminating and plateau-robust, for artificial-free starts
};

namespace lp_detail {

using SparseCol = std::vector<std::pair<int, Rat>>;  // (row, coefficient)

/// Revised primal simplex on standard form: min c'x, A x = b, x >= 0, with an
/// explicit dense basis inverse. Artificial columns live at ids >= art_begin.
class StandardSimplex {
  public:
    StandardSimplex(int rows, std::vector<SparseCol> cols, std::vector<Rat> b, std::vector<Rat> cost)
        : rows_(rows), cols_(std::move(cols)), b_(std::move(b)), cost_(std::move(cost)) {
        art_begin_ = static_cast<int>(cols_.size());
    }

    int rows() const { return rows_; }
    int num_cols() const { return static_cast<int>(cols_.size()); }
    long pivots() const { return pivots_; }
    const std::vector<int>& basis() const { return basis_; }

    /// Phase 1 from an all-artificial basis, then phase 2. Artificials that
    /// remain basic are pinned at zero by the ratio test.
    LPStatus solve_two_phase(PivotRule rule) {
        const int n_real = static_cast<int>(cols_.size());
        art_begin_ = n_real;
        // b must be nonnegative for the artificial start
        for (int i = 0; i < rows_; ++i)
            if (b_[i] < 0) {
                b_[i] = -b_[i];
                for (auto& col : cols_)
                    for (auto& [r, a] : col)
                        if (r == i) a = -a;
            }
        for (int i = 0; i < rows_; ++i) cols_.push_back({{i, Rat(1)}});
        basis_.assign(rows_, 0);
        in_basis_.assign(cols_.size(), 0);
        binv_.assign(rows_, std::vector<Rat>(rows_, Rat(0)));
        xb_ = b_;
        for (int i = 0; i < rows_; ++i) {
            basis_[i] = art_begin_ + i;
            in_basis_[art_begin_ + i] = 1;
            binv_[i][i] = 1;
        }
        std::vector<Rat> phase1_cost(cols_.size(), Rat(0));
        for (int i = 0; i < rows_; ++i) phase1_cost[art_begin_ + i] = 1;
        if (iterate(phase1_cost, rule, /*forbid_artificial_entering=*/false) == LPStatus::Unbounded)
            throw InternalConsistencyError("phase-1 LP unbounded");
        if (objective_of(phase1_cost) != 0) return LPStatus::Infeasible;
        std::vector<Rat> full_cost = cost_;
        full_cost.resize(cols_.size(), Rat(0));
        return iterate(full_cost, rule, /*forbid_artificial_entering=*/true);
    }

    /// Starts phase 2 directly from the slack basis `slack_cols` (requires the
    /// corresponding columns to form the identity and b >= 0).
    LPStatus solve_from_basis(const std::vector<int>& slack_cols, PivotRule rule) {
        basis_ = slack_cols;
        in_basis_.assign(cols_.size(), 0);
        binv_.assign(rows_, std::vector<Rat>(rows_, Rat(0)));
        for (int i = 0; i < rows_; ++i) {
            in_basis_[basis_[i]] = 1;
            binv_[i][i] = 1;
        }
        xb_ = b_;
        return iterate(cost_, rule, true);
    }

    /// Re-optimizes after a cost change, keeping the current (still feasible)
    /// basis. Used for warm starts where only the objective moved.
    LPStatus reoptimize(std::vector<Rat> new_cost, PivotRule rule) {
        cost_ = std::move(new_cost);
        return iterate(cost_, rule, true);
    }

    Rat objective() const { return objective_of(cost_); }

    /// Solution indexed by column id (artificials excluded by the caller).
    std::vector<Rat> solution() const {
        std::vector<Rat> x(art_begin_, Rat(0));
        for (int i = 0; i < rows_; ++i)
            if (basis_[i] < art_begin_) x[basis_[i]] = xb_[i];
        return x;
    }

    /// Simplex multipliers pi = c_B' B^{-1} for the current cost vector.
    std::vector<Rat> multipliers() const {
        std::vector<Rat> pi(rows_, Rat(0));
        for (int k = 0; k < rows_; ++k) {
            const Rat& ck = cost_at(basis_[k]);
            if (ck == 0) continue;
            for (int i = 0; i < rows_; ++i) pi[i] += ck * binv_[k][i];
        }
        return pi;
    }

  private:
    const Rat& cost_at(int col) const {
        static const Rat zero(0);
        return col < static_cast<int>(cost_.size()) ? cost_[col] : zero;
    }

    Rat objective_of(const std::vector<Rat>& cost) const {
        Rat v(0);
        for (int i = 0; i < rows_; ++i) {
            const int c = basis_[i];
            if (c < static_cast<int>(cost.size()) && cost[c] != 0) v += cost[c] * xb_[i];
        }
        return v;
    }

    // u = B^{-1} A_j for a sparse column
    void ftran(const SparseCol& col, std::vector<Rat>& u) const {
        u.assign(rows_, Rat(0));
        for (const auto& [r, a] : col)
            for (int k = 0; k < rows_; ++k)
                if (binv_[k][r] != 0) u[k] += a * binv_[k][r];
    }

    LPStatus iterate(const std::vector<Rat>& cost, PivotRule rule, bool forbid_artificial_entering) {
        const int ncols = static_cast<int>(cols_.size());
        int degenerate_streak = 0;
        bool bland_mode = (rule == PivotRule::Bland);
        std::vector<Rat> u;
        // pi = c_B' B^{-1} computed once, then maintained across pivots:
        // entering q with reduced cost d_q at leaving row r gives
        // pi' = pi + d_q * (row r of the updated B^{-1})
        std::vector<Rat> pi(rows_, Rat(0));
        for (int k = 0; k < rows_; ++k) {
            const int bc = basis_[k];
            if (bc < static_cast<int>(cost.size()) && cost[bc] != 0)
                for (int i = 0; i < rows_; ++i)
                    if (binv_[k][i] != 0) pi[i] += cost[bc] * binv_[k][i];
        }
        for (;;) {
            int entering = -1;
            Rat best_rc(0);
            for (int j = 0; j < ncols; ++j) {
                if (in_basis_[j]) continue;
                if (forbid_artificial_entering && j >= art_begin_) continue;
                Rat rc = j < static_cast<int>(cost.size()) ? cost[j] : Rat(0);
                for (const auto& [r, a] : cols_[j])
                    if (pi[r] != 0) rc -= pi[r] * a;
                if (rc < 0) {
                    if (bland_mode) {
                        entering = j;
                        best_rc = rc;
                        break;
                    }
                    if (entering < 0 || rc < best_rc) {
                        entering = j;
                        best_rc = rc;
                    }
                }
            }
            if (entering < 0) return LPStatus::Optimal;

            ftran(cols_[entering], u);
            // ratio test; in phase 2, artificials basic at 0 must not rise, so
            // a negative direction component on an artificial row blocks at 0
            int leave = -1;
            Rat best_t(0);
            if (rule == PivotRule::DantzigLex) {
                leave = lex_ratio_test(u);
                if (leave >= 0) best_t = xb_[leave] / u[leave];
            } else {
                for (int k = 0; k < rows_; ++k) {
                    bool blocking = u[k] > 0 || (forbid_artificial_entering && u[k] < 0 &&
                                                 basis_[k] >= art_begin_);
                    if (!blocking) continue;
                    Rat t = u[k] > 0 ? Rat(xb_[k] / u[k]) : Rat(0);
                    if (leave < 0 || t < best_t || (t == best_t && basis_[k] < basis_[leave])) {
                        leave = k;
                        best_t = t;
                    }
                }
            }
            if (leave < 0) return LPStatus::Unbounded;

            if (best_t == 0) {
                if (rule == PivotRule::DantzigBland && !bland_mode &&
                    ++degenerate_streak > kStallThreshold)
                    bland_mode = true;
            } else {
                degenerate_streak = 0;
                if (rule == PivotRule::DantzigBland) bland_mode = false;
            }
            pivot(entering, leave, u);
            if (best_rc != 0) {
                const auto& brow = binv_[leave];
                for (int i = 0; i < rows_; ++i)
                    if (brow[i] != 0) pi[i] += best_rc * brow[i];
            }
            if (trace_enabled() && pivots_ % 100 == 0)
                std::fprintf(stderr, "[lp] pivots=%ld degenerate_streak=%d\n", pivots_,
                             degenerate_streak);
        }
    }

    /// Lexicographic ratio test over [xB | B^{-1}]: guarantees termination
    /// for any entering rule when all rows start lexicographically positive
    /// (true for the identity start). Returns -1 when unbounded.
    /// Ratios a/u_k are compared by cross-multiplication (u_k > 0 throughout).
    int lex_ratio_test(const std::vector<Rat>& u) const {
        std::vector<int> cands;
        for (int k = 0; k < rows_; ++k) {
            if (u[k] <= 0) continue;
            if (cands.empty()) {
                cands.push_back(k);
                continue;
            }
            const int c = cands.front();
            const int cmp = ::cmp(xb_[k] * u[c], xb_[c] * u[k]);
            if (cmp < 0)
                cands.assign(1, k);
            else if (cmp == 0)
                cands.push_back(k);
        }
        if (cands.empty()) return -1;
        for (int col = 0; col < rows_ && cands.size() > 1; ++col) {
            // champion scan; most ties are 0-vs-0 and resolved cheaply
            size_t keep = 1;
            for (size_t i = 1; i < cands.size(); ++i) {
                const int c = cands[0], k = cands[i];
                const Rat &bc = binv_[c][col], &bk = binv_[k][col];
                int cmp;
                if (bc == 0 && bk == 0)
                    cmp = 0;
                else
                    cmp = ::cmp(bk * u[c], bc * u[k]);
                if (cmp < 0) {
                    cands[0] = k;
                    keep = 1;
                } else if (cmp == 0) {
                    cands[keep++] = k;
                }
            }
            cands.resize(keep);
        }
        return cands.front();
    }

    void pivot(int entering, int leave, const std::vector<Rat>& u) {
        const Rat piv = u[leave];
        auto& brow = binv_[leave];
        for (auto& v : brow)
            if (v != 0) v /= piv;
        xb_[leave] /= piv;
        for (int k = 0; k < rows_; ++k) {
            if (k == leave || u[k] == 0) continue;
            const Rat f = u[k];
            for (int i = 0; i < rows_; ++i)
                if (brow[i] != 0) binv_[k][i] -= f * brow[i];
            xb_[k] -= f * xb_[leave];
        }
        in_basis_[basis_[leave]] = 0;
        in_basis_[entering] = 1;
        basis_[leave] = entering;
        ++pivots_;
    }

    static bool trace_enabled() {
        static const bool on = std::getenv("MECHFRONT_LP_TRACE") != nullptr;
        return on;
    }

    static constexpr int kStallThreshold = 40;

    int rows_;
    std::vector<SparseCol> cols_;
    std::vector<Rat> b_;
    std::vector<Rat> cost_;
    int art_begin_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    std::vector<std::vector<Rat>> binv_;
    std::vector<Rat> xb_;
    long pivots_ = 0;
};

/// Inequality form min c'x, A x >= b, x >= 0, obtained from an LPProblem by
/// shifting finite lower bounds, splitting free variables, turning finite
/// upper bounds into rows, flipping <= rows, and splitting equalities.
struct NormalizedLP {
    int nvars = 0;
    std::vector<Rat> c;
    Rat c0 = Rat(0);  // objective offset from substitutions/shifts
    std::vector<std::vector<std::pair<int, Rat>>> rows;  // (var, coef)
    std::vector<Rat> rhs;

    struct VarMap {
        int pos = -1;  // -1: variable fixed at `shift`
        int neg = -1;  // >= 0 only for free variables (x = shift + pos - neg)
        Rat shift = Rat(0);
    };
    std::vector<VarMap> vmap;

    /// Normalized row indices produced by each source constraint, with the
    /// sign applied to that row (+1 kept, -1 flipped). Equalities yield two.
    std::vector<std::vector<std::pair<int, int>>> constraint_rows;

    std::vector<Rat> recover(const std::vector<Rat>& x) const {
        std::vector<Rat> out(vmap.size());
        for (size_t v = 0; v < vmap.size(); ++v) {
            out[v] = vmap[v].shift;
            if (vmap[v].pos >= 0) out[v] += x[vmap[v].pos];
            if (vmap[v].neg >= 0) out[v] -= x[vmap[v].neg];
        }
        return out;
    }
};

inline NormalizedLP normalize(const LPProblem& lp) {
    lp.validate();
    NormalizedLP out;
    out.vmap.resize(lp.num_vars);
    for (int v = 0; v < lp.num_vars; ++v) {
        const auto& bd = lp.bounds[v];
        auto& vm = out.vmap[v];
        if (bd.lo && bd.hi && *bd.lo == *bd.hi) {
            vm.shift = *bd.lo;
        } else if (bd.lo) {
            vm.pos = out.nvars++;
            vm.shift = *bd.lo;
        } else {
            vm.pos = out.nvars++;
            vm.neg = out.nvars++;
        }
    }
    out.c.assign(out.nvars, Rat(0));
    out.c0 = lp.objective.constant;
    for (const auto& [v, coef] : lp.objective.terms) {
        const auto& vm = out.vmap[v];
        out.c0 += coef * vm.shift;
        if (vm.pos >= 0) out.c[vm.pos] += coef;
        if (vm.neg >= 0) out.c[vm.neg] -= coef;
    }
    // finite upper bounds become rows: -(x - shift) >= -(hi - shift)
    for (int v = 0; v < lp.num_vars; ++v) {
        const auto& bd = lp.bounds[v];
        const auto& vm = out.vmap[v];
        if (!bd.hi || vm.pos < 0) continue;
        std::vector<std::pair<int, Rat>> row{{vm.pos, Rat(-1)}};
        if (vm.neg >= 0) row.push_back({vm.neg, Rat(1)});
        out.rows.push_back(std::move(row));
        out.rhs.push_back(Rat(vm.shift - *bd.hi));
    }
    auto emit = [&](const Constraint& con, bool negate) -> int {
        std::map<int, Rat> coefs;
        Rat rhs = con.rhs - con.expr.constant;
        for (const auto& [v, coef] : con.expr.terms) {
            const auto& vm = out.vmap[v];
            rhs -= coef * vm.shift;
            if (vm.pos >= 0) coefs[vm.pos] += coef;
            if (vm.neg >= 0) coefs[vm.neg] -= coef;
        }
        std::vector<std::pair<int, Rat>> row;
        for (auto& [v, coef] : coefs)
            if (coef != 0) row.push_back({v, negate ? Rat(-coef) : coef});
        out.rows.push_back(std::move(row));
        out.rhs.push_back(negate ? Rat(-rhs) : rhs);
        return static_cast<int>(out.rows.size()) - 1;
    };
    out.constraint_rows.resize(lp.constraints.size());
    for (size_t ci = 0; ci < lp.constraints.size(); ++ci) {
        const auto& con = lp.constraints[ci];
        if (con.rel == Rel::GE || con.rel == Rel::EQ)
            out.constraint_rows[ci].push_back({emit(con, false), 1});
        if (con.rel == Rel::LE || con.rel == Rel::EQ)
            out.constraint_rows[ci].push_back({emit(con, true), -1});
    }
    return out;
}

/// Standard form of the dual of a NormalizedLP: min (-b)'y s.t. A'y + s = c,
/// y, s >= 0. Valid as a phase-2 start iff c >= 0 (slack basis feasible).
struct DualStandard {
    std::vector<SparseCol> cols;  // y columns (one per primal row), then slacks
    std::vector<Rat> b;           // = primal c
    std::vector<Rat> cost;        // = (-primal b, 0)
    std::vector<int> slack_basis;
    int num_y = 0;
};

inline DualStandard make_dual_standard(const NormalizedLP& nlp) {
    DualStandard d;
    d.num_y = static_cast<int>(nlp.rows.size());
    d.cols.reserve(d.num_y + nlp.nvars);
    for (int i = 0; i < d.num_y; ++i) {
        SparseCol col;
        col.reserve(nlp.rows[i].size());
        for (const auto& [v, a] : nlp.rows[i]) col.push_back({v, a});
        d.cols.push_back(std::move(col));
    }
    for (int j = 0; j < nlp.nvars; ++j) {
        d.cols.push_back({{j, Rat(1)}});
        d.slack_basis.push_back(d.num_y + j);
    }
    d.b = nlp.c;
    d.cost.assign(d.num_y, Rat(0));
    for (int i = 0; i < d.num_y; ++i) d.cost[i] = -nlp.rhs[i];
    d.cost.resize(d.num_y + nlp.nvars, Rat(0));
    return d;
}

inline void verify_solution(const LPProblem& lp, const std::vector<Rat>& x, const Rat& objective) {
    for (int v = 0; v < lp.num_vars; ++v) {
        if (lp.bounds[v].lo && x[v] < *lp.bounds[v].lo)
            throw InternalConsistencyError("LP solution violates a lower bound");
        if (lp.bounds[v].hi && x[v] > *lp.bounds[v].hi)
            throw InternalConsistencyError("LP solution violates an upper bound");
    }
    for (const auto& con : lp.constraints) {
        const Rat lhs = con.expr.eval(x);
        const bool ok = con.rel == Rel::LE ? lhs <= con.rhs
                        : con.rel == Rel::GE ? lhs >= con.rhs
                                             : lhs == con.rhs;
        if (!ok) throw InternalConsistencyError("LP solution violates a constraint");
    }
    if (lp.objective.eval(x) != objective)
        throw InternalConsistencyError("LP objective mismatch at solution");
}

}  // namespace lp_detail

/// Exact two-phase simplex. Deterministic; anti-cycling by Bland's rule.
/// When the LP is much taller than wide and the normalized costs are
/// nonnegative, the dual is solved instead (basis sized by the variable
/// count) and the primal solution is recovered from the multipliers.
inline LPResult solve(const LPProblem& lp, PivotRule rule = PivotRule::Bland) {
    using namespace lp_detail;
    NormalizedLP nlp = normalize(lp);
    const int nrows = static_cast<int>(nlp.rows.size());

    LPResult res;
    std::vector<Rat> xn;  // normalized-space solution
    bool have = false;

    bool c_nonneg = true;
    for (const auto& cj : nlp.c)
        if (cj < 0) {
            c_nonneg = false;
            break;
        }
    if (c_nonneg && nlp.nvars > 0 && nrows > 2 * nlp.nvars) {
        DualStandard ds = make_dual_standard(nlp);
        StandardSimplex sx(nlp.nvars, std::move(ds.cols), std::move(ds.b), std::move(ds.cost));
        const LPStatus st = sx.solve_from_basis(ds.slack_basis, rule);
        res.pivots = sx.pivots();
        if (st == LPStatus::Unbounded) {
            res.status = LPStatus::Infeasible;  // dual unbounded => primal infeasible
            return res;
        }
        std::vector<Rat> pi = sx.multipliers();
        xn.resize(nlp.nvars);
        for (int j = 0; j < nlp.nvars; ++j) xn[j] = -pi[j];
        Rat primal_obj(0);
        for (int j = 0; j < nlp.nvars; ++j)
            if (nlp.c[j] != 0) primal_obj += nlp.c[j] * xn[j];
        if (primal_obj != -sx.objective())
            throw InternalConsistencyError("duality gap in recovered LP solution");
        have = true;
    }

    if (!have) {
        // direct: A x - s = b over the normalized inequality form
        std::vector<SparseCol> cols(nlp.nvars);
        for (int i = 0; i < nrows; ++i)
            for (const auto& [v, a] : nlp.rows[i]) cols[v].push_back({i, a});
        for (int i = 0; i < nrows; ++i) cols.push_back({{i, Rat(-1)}});
        std::vector<Rat> cost = nlp.c;
        cost.resize(cols.size(), Rat(0));
        StandardSimplex sx(nrows, std::move(cols), nlp.rhs, std::move(cost));
        const LPStatus st = sx.solve_two_phase(rule);
        res.pivots = sx.pivots();
        if (st != LPStatus::Optimal) {
            res.status = st;
            return res;
        }
        std::vector<Rat> full = sx.solution();
        xn.assign(full.begin(), full.begin() + nlp.nvars);
    }

    res.status = LPStatus::Optimal;
    res.solution = nlp.recover(xn);
    Rat obj = nlp.c0;
    for (int j = 0; j < nlp.nvars; ++j)
        if (nlp.c[j] != 0) obj += nlp.c[j] * xn[j];
    res.objective_value = obj;
    verify_solution(lp, res.solution, res.objective_value);
    return res;
}

}  // namespace mechfront
