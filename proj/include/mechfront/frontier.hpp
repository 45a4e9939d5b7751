#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <vector>

#include "mechfront/findopt.hpp"

namespace mechfront {

struct FrontierPoint {
    Rat eps;
    Rat deficit;
    Mechanism representative;
};

/// The Pareto frontier as its supporting manipulability bounds: eps strictly
/// increasing from 0 to bar-epsilon, deficits strictly decreasing to 0, and
/// slopes strictly increasing (piecewise-linear convex with genuine kinks).
struct ParetoFrontier {
    std::vector<FrontierPoint> points;
    int lp_calls = 0;
};

/// Raised when delta(0) = 0: the frontier degenerates to the point (0, 0).
struct DegenerateFrontierSignal : std::runtime_error {
    DegenerateFrontierSignal() : std::runtime_error("delta(0) = 0: single-point frontier") {}
};

struct SignaturePoint {
    Rat eps;
    Rat deficit;
};

namespace frontier_detail {

/// delta(eps) via one FindOpt solve; eps >= bar-epsilon clamps to 0 without
/// solving. Shared session so successive eps values warm-start.
class Evaluator {
  public:
    Evaluator(const ProblemSpec& problem, Rat bar) : session_(problem), bar_(std::move(bar)) {}

    SignaturePoint signature_at(const Rat& eps) {
        if (eps >= bar_) return {eps, Rat(0)};
        return {eps, session_.solve(eps).deficit};
    }

    FindOptResult solve(const Rat& eps) { return session_.solve(eps); }
    int lp_calls() const { return session_.lp_calls(); }

  private:
    FindOptSession session_;
    Rat bar_;
};

inline bool collinear(const SignaturePoint& a, const SignaturePoint& b, const SignaturePoint& c) {
    return (b.eps - a.eps) * (c.deficit - a.deficit) == (c.eps - a.eps) * (b.deficit - a.deficit);
}

inline Rat find_lower_impl(Evaluator& eval) {
    const SignaturePoint origin = eval.signature_at(Rat(0));
    if (origin.deficit == 0) throw DegenerateFrontierSignal();
    SignaturePoint prev = eval.signature_at(Rat(1));
    Rat eps = make_rat(1, 2);
    for (int iter = 0; iter < 64; ++iter) {
        const SignaturePoint cur = eval.signature_at(eps);
        if (collinear(origin, cur, prev)) return eps;
        prev = cur;
        eps /= 2;
    }
    throw InternalConsistencyError("find_lower failed to certify linearity after 64 halvings");
}

}  // namespace frontier_detail

inline SignaturePoint signature_at(const ProblemSpec& problem, const Rat& eps) {
    if (eps < 0) throw InvalidSettingError("eps must be nonnegative");
    const Rat bar = compute_bar_epsilon(problem);
    if (eps >= bar) return {eps, Rat(0)};
    return {eps, find_opt(problem, eps).deficit};
}

/// Halves eps from 1/2 until (0, delta(0)), (eps, delta(eps)) and the previous
/// iterate are exactly collinear; the certified eps lies in (0, eps_1].
inline Rat find_lower(const ProblemSpec& problem) {
    frontier_detail::Evaluator eval(problem, compute_bar_epsilon(problem));
    return frontier_detail::find_lower_impl(eval);
}

namespace frontier_detail {

struct Known {
    SignaturePoint sig;
    std::optional<Mechanism> rep;  // absent only for synthetic outer points
};

/// FindBounds state: a sorted list of known frontier points plus the set of
/// verified adjacent segments. The two outer segments (left: the certified
/// linear start; right: the horizontal half-line past bar-epsilon) are seeded
/// verified and only ever used for hull intersections.
class Bounds {
  public:
    std::vector<Known> pts;
    std::vector<bool> seg_verified;  // segment i joins pts[i] and pts[i+1]

    int insert(Known k) {
        int i = 0;
        while (i < static_cast<int>(pts.size()) && pts[i].sig.eps < k.sig.eps) ++i;
        pts.insert(pts.begin() + i, std::move(k));
        // the split segment becomes two unverified halves
        seg_verified.insert(seg_verified.begin() + std::max(i - 1, 0), false);
        if (i - 1 >= 0 && i - 1 < static_cast<int>(seg_verified.size())) seg_verified[i - 1] = false;
        if (i < static_cast<int>(seg_verified.size())) seg_verified[i] = false;
        return i;
    }

    int first_unverified() const {
        for (int i = 0; i < static_cast<int>(seg_verified.size()); ++i)
            if (!seg_verified[i]) return i;
        return -1;
    }
};

/// eps-coordinate of the intersection of lines (a1,a2) and (b1,b2); empty when
/// parallel.
inline std::optional<Rat> hull_intersection_eps(const SignaturePoint& a1, const SignaturePoint& a2,
                                                const SignaturePoint& b1, const SignaturePoint& b2) {
    const Rat da_e = a2.eps - a1.eps, da_d = a2.deficit - a1.deficit;
    const Rat db_e = b2.eps - b1.eps, db_d = b2.deficit - b1.deficit;
    const Rat denom = da_d * db_e - db_d * da_e;
    if (denom == 0) return std::nullopt;
    // solve a1 + s*(a2-a1) = b1 + t*(b2-b1) for the eps coordinate
    const Rat num = (b1.deficit - a1.deficit) * db_e * da_e + a1.eps * da_d * db_e -
                    b1.eps * db_d * da_e;
    return Rat(num / denom);
}

inline bool on_line(const SignaturePoint& p, const SignaturePoint& a, const SignaturePoint& b) {
    return collinear(a, p, b);
}

/// Core of FindBounds: recovers every supporting manipulability bound by
/// interpolating neighbor hulls and verifying segments, starting from the
/// certified linear left end at eps_under and the exact right end
/// (bar-epsilon, 0). The caller fills lp_calls.
inline ParetoFrontier find_bounds_impl(Evaluator& eval, const BarEpsilonResult& bar,
                                       const Rat& eps_under) {
    if (eps_under <= 0) throw InvalidSettingError("eps_under must be positive");

    auto solve_known = [&](const Rat& eps) -> Known {
        FindOptResult r = eval.solve(eps);
        return {{eps, r.deficit}, std::move(r.mechanism)};
    };

    Known origin = solve_known(Rat(0));
    if (origin.sig.deficit == 0) throw DegenerateFrontierSignal();
    if (eps_under >= bar.value)
        throw InvalidSettingError("eps_under must lie strictly below bar-epsilon");

    Bounds st;
    st.pts.push_back(std::move(origin));
    Known under = solve_known(eps_under);
    st.pts.push_back(std::move(under));
    st.pts.push_back({{bar.value, Rat(0)}, bar.representative});
    st.seg_verified = {true, false};  // [0, eps_under] certified by find_lower

    // outer hull segments used when an end segment needs a neighbor
    const SignaturePoint left_outer_a = st.pts[0].sig, left_outer_b = st.pts[1].sig;
    const SignaturePoint right_outer_a{bar.value, Rat(0)}, right_outer_b{Rat(1), Rat(0)};

    auto neighbor_hull = [&](int seg, int dir) -> std::pair<SignaturePoint, SignaturePoint> {
        // dir -1: hull left of segment seg; dir +1: hull right of it
        const int a = seg + (dir < 0 ? -1 : 1);
        if (dir < 0) return a < 0 ? std::make_pair(left_outer_a, left_outer_b)
                                  : std::make_pair(st.pts[a].sig, st.pts[a + 1].sig);
        return a + 1 >= static_cast<int>(st.pts.size())
                   ? std::make_pair(right_outer_a, right_outer_b)
                   : std::make_pair(st.pts[a].sig, st.pts[a + 1].sig);
    };

    while (true) {
        const int seg = st.first_unverified();
        if (seg < 0) break;
        const SignaturePoint lo = st.pts[seg].sig, hi = st.pts[seg + 1].sig;
        auto [la, lb] = neighbor_hull(seg, -1);
        auto [ra, rb] = neighbor_hull(seg, +1);
        auto cut = hull_intersection_eps(la, lb, ra, rb);
        if (!cut) {
            // parallel neighbor hulls: no kink can separate them
            st.seg_verified[seg] = true;
            continue;
        }
        Rat eps_c = *cut;
        if (eps_c <= lo.eps || eps_c >= hi.eps) eps_c = (lo.eps + hi.eps) / 2;
        Known probe = solve_known(eps_c);
        const SignaturePoint sig = probe.sig;
        const bool on_left = on_line(sig, la, lb);
        const bool on_right = on_line(sig, ra, rb);
        const bool on_chord = on_line(sig, lo, hi);
        const int at = st.insert(std::move(probe));
        if (on_left && on_right) {
            // supporting bound: both adjacent segments now verified linear
            st.seg_verified[at - 1] = true;
            st.seg_verified[at] = true;
        } else if (on_chord) {
            st.seg_verified[at - 1] = true;
            st.seg_verified[at] = true;
        }
        // otherwise both halves stay unverified and are refined further
    }

    // drop non-kink interior points: merge exactly collinear adjacent segments
    ParetoFrontier out;
    for (int i = 0; i < static_cast<int>(st.pts.size()); ++i) {
        if (i > 0 && i + 1 < static_cast<int>(st.pts.size()) &&
            frontier_detail::collinear(st.pts[i - 1].sig, st.pts[i].sig, st.pts[i + 1].sig))
            continue;
        out.points.push_back(
            {st.pts[i].sig.eps, st.pts[i].sig.deficit, std::move(*st.pts[i].rep)});
    }

    // consistency: strictly decreasing deficits, strictly increasing slopes
    for (size_t i = 0; i + 1 < out.points.size(); ++i) {
        if (!(out.points[i].deficit > out.points[i + 1].deficit))
            throw InternalConsistencyError("frontier deficits not strictly decreasing");
        if (i + 2 < out.points.size()) {
            const auto& a = out.points[i];
            const auto& b = out.points[i + 1];
            const auto& c = out.points[i + 2];
            // slope(a,b) < slope(b,c) <=> cross product test
            if (!((b.deficit - a.deficit) * (c.eps - b.eps) <
                  (c.deficit - b.deficit) * (b.eps - a.eps)))
                throw InternalConsistencyError("frontier slopes not strictly increasing");
        }
    }
    if (out.points.empty() || out.points.front().eps != 0 ||
        out.points.back().deficit != 0)
        throw InternalConsistencyError("frontier endpoints malformed");
    return out;
}

}  // namespace frontier_detail

inline ParetoFrontier find_bounds(const ProblemSpec& problem, const Rat& eps_under) {
    BarEpsilonResult bar = bar_epsilon(problem);
    frontier_detail::Evaluator eval(problem, bar.value);
    ParetoFrontier out = frontier_detail::find_bounds_impl(eval, bar, eps_under);
    out.lp_calls = eval.lp_calls() + 1;  // + the bar-epsilon LP
    return out;
}

/// Full pipeline: find_lower then find_bounds over one shared warm-started
/// session; a degenerate problem yields the single point (0, 0) without
/// running FindBounds.
inline ParetoFrontier compute_frontier(const ProblemSpec& problem) {
    BarEpsilonResult bar = bar_epsilon(problem);
    frontier_detail::Evaluator eval(problem, bar.value);
    try {
        const Rat eps_under = frontier_detail::find_lower_impl(eval);
        ParetoFrontier out = frontier_detail::find_bounds_impl(eval, bar, eps_under);
        out.lp_calls = eval.lp_calls() + 1;
        return out;
    } catch (const DegenerateFrontierSignal&) {
        ParetoFrontier out;
        out.points.push_back({Rat(0), Rat(0), std::move(eval.solve(Rat(0)).mechanism)});
        out.lp_calls = eval.lp_calls() + 1;
        return out;
    }
}

inline Rat delta_at(const ParetoFrontier& frontier, const Rat& eps) {
    if (eps < 0 || eps > 1) throw InvalidSettingError("eps must lie in [0,1]");
    const auto& pts = frontier.points;
    if (eps >= pts.back().eps) return Rat(0);
    if (eps <= pts.front().eps) return pts.front().deficit;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (eps > pts[i + 1].eps) continue;
        const Rat t = (eps - pts[i].eps) / (pts[i + 1].eps - pts[i].eps);
        return pts[i].deficit + t * (pts[i + 1].deficit - pts[i].deficit);
    }
    return Rat(0);
}

/// Optimal mechanism at eps: stored representative at bounds, the hybrid of
/// the adjacent representatives in between; eps past the right end clamps.
inline Mechanism mechanism_at(const ParetoFrontier& frontier, const Rat& eps) {
    if (eps < 0) throw InvalidSettingError("eps must be nonnegative");
    const auto& pts = frontier.points;
    if (eps >= pts.back().eps) return pts.back().representative;
    for (size_t i = 0;; ++i) {
        if (eps == pts[i].eps) return pts[i].representative;
        if (eps < pts[i + 1].eps) {
            const Rat beta = (eps - pts[i].eps) / (pts[i + 1].eps - pts[i].eps);
            return make_hybrid(pts[i].representative, pts[i + 1].representative, beta);
        }
    }
}

struct ValidationIssue {
    Rat eps;
    std::string what;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    int midpoint_solves = 0;
    bool ok() const { return issues.empty(); }
};

/// Independent checks of a computed frontier: monotonicity, convexity, a zero
/// right endpoint, representative signatures, and the exact midpoint equality
/// delta((e_k + e_{k+1})/2) = (d_k + d_{k+1})/2 via fresh LP solves.
inline ValidationReport validate(const ParetoFrontier& frontier, const ProblemSpec& problem) {
    ValidationReport rep;
    const auto& pts = frontier.points;
    auto flag = [&](const Rat& eps, std::string what) { rep.issues.push_back({eps, std::move(what)}); };

    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (!(pts[i].eps < pts[i + 1].eps)) flag(pts[i].eps, "eps not strictly increasing");
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (!(pts[i].deficit > pts[i + 1].deficit)) flag(pts[i].eps, "deficit not strictly decreasing");
    for (size_t i = 0; i + 2 < pts.size(); ++i) {
        const auto &a = pts[i], &b = pts[i + 1], &c = pts[i + 2];
        if (!((b.deficit - a.deficit) * (c.eps - b.eps) < (c.deficit - b.deficit) * (b.eps - a.eps)))
            flag(b.eps, "slopes not strictly increasing at interior bound");
    }
    if (pts.back().deficit != 0) flag(pts.back().eps, "right endpoint deficit nonzero");
    for (const auto& pt : pts) {
        const Signature s = signature(pt.representative, problem);
        if (s.eps > pt.eps) flag(pt.eps, "representative exceeds its manipulability bound");
        if (s.def != pt.deficit) flag(pt.eps, "representative deficit mismatch");
    }
    if (pts.size() >= 2) {
        FindOptSession session(problem);
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            const Rat mid = (pts[i].eps + pts[i + 1].eps) / 2;
            const Rat expected = (pts[i].deficit + pts[i + 1].deficit) / 2;
            ++rep.midpoint_solves;
            if (session.solve(mid).deficit != expected)
                flag(mid, "midpoint deficit differs from interpolation");
        }
    }
    return rep;
}

}  // namespace mechfront
