#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "mechfront/errors.hpp"

namespace mechfront {

struct Setting {
    int n;  // agents
    int m;  // alternatives

    Setting(int n_, int m_) : n(n_), m(m_) {
        if (n < 1) throw InvalidSettingError("need at least one agent");
        if (m < 2) throw InvalidSettingError("need at least two alternatives");
    }
    bool operator==(const Setting&) const = default;
};

enum class OrderKind { Strict, Weak };

/// A weak preference order over alternatives 0..m-1, stored as indifference
/// classes, best first. Strict orders are the special case of all-singleton
/// classes.
class PrefOrder {
  public:
    PrefOrder(std::vector<std::vector<int>> classes, int m)
        : classes_(std::move(classes)), ranks_(m, -1) {
        int seen = 0;
        int r = 1;
        for (auto& cls : classes_) {
            if (cls.empty()) throw InvalidSettingError("empty indifference class");
            std::sort(cls.begin(), cls.end());
            for (int j : cls) {
                if (j < 0 || j >= m || ranks_[j] != -1)
                    throw InvalidSettingError("classes do not partition the alternatives");
                ranks_[j] = r;
                ++seen;
            }
            r += static_cast<int>(cls.size());
        }
        if (seen != m) throw InvalidSettingError("classes do not cover all alternatives");
    }

    /// Strict order from a best-to-worst sequence.
    static PrefOrder strict(const std::vector<int>& best_to_worst) {
        std::vector<std::vector<int>> cls;
        cls.reserve(best_to_worst.size());
        for (int j : best_to_worst) cls.push_back({j});
        return PrefOrder(std::move(cls), static_cast<int>(best_to_worst.size()));
    }

    int num_alternatives() const { return static_cast<int>(ranks_.size()); }

    /// Number of alternatives strictly preferred to j, plus 1.
    int rank(int j) const { return ranks_.at(j); }

    const std::vector<int>& ranks() const { return ranks_; }
    const std::vector<std::vector<int>>& classes() const { return classes_; }

    bool is_strict() const {
        for (const auto& cls : classes_)
            if (cls.size() != 1) return false;
        return true;
    }

    int max_rank() const { return *std::max_element(ranks_.begin(), ranks_.end()); }

    /// Distinct rank values present, ascending. For strict orders this is 1..m.
    std::vector<int> rank_levels() const {
        std::vector<int> lv = ranks_;
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        return lv;
    }

    /// Alternatives with rank <= k (the upper-contour set at level k).
    std::vector<int> top_set(int k) const {
        std::vector<int> out;
        for (int j = 0; j < num_alternatives(); ++j)
            if (ranks_[j] <= k) out.push_back(j);
        return out;
    }

    bool weakly_prefers(int a, int b) const { return rank(a) <= rank(b); }
    bool strictly_prefers(int a, int b) const { return rank(a) < rank(b); }

    bool operator==(const PrefOrder& o) const { return ranks_ == o.ranks_; }
    /// Canonical order: lexicographic on the rank vector.
    bool operator<(const PrefOrder& o) const { return ranks_ < o.ranks_; }

  private:
    std::vector<std::vector<int>> classes_;
    std::vector<int> ranks_;
};

struct Profile {
    std::vector<PrefOrder> orders;

    int num_agents() const { return static_cast<int>(orders.size()); }
    bool operator==(const Profile& o) const { return orders == o.orders; }
};

struct AgentPermutation {
    std::vector<int> map;  // agent i -> map[i]

    explicit AgentPermutation(std::vector<int> m_) : map(std::move(m_)) { validate(); }
    static AgentPermutation identity(int n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return AgentPermutation(std::move(v));
    }
    static AgentPermutation transposition(int n, int a, int b) {
        auto p = identity(n);
        std::swap(p.map[a], p.map[b]);
        return p;
    }
    AgentPermutation inverse() const {
        std::vector<int> inv(map.size());
        for (size_t i = 0; i < map.size(); ++i) inv[map[i]] = static_cast<int>(i);
        return AgentPermutation(std::move(inv));
    }

  private:
    void validate() const {
        std::vector<bool> seen(map.size(), false);
        for (int v : map) {
            if (v < 0 || v >= static_cast<int>(map.size()) || seen[v])
                throw InvalidSettingError("not a bijection");
            seen[v] = true;
        }
    }
};

struct AltPermutation {
    std::vector<int> map;  // alternative j -> map[j]

    explicit AltPermutation(std::vector<int> m_) : map(std::move(m_)) { validate(); }
    static AltPermutation identity(int m) {
        std::vector<int> v(m);
        std::iota(v.begin(), v.end(), 0);
        return AltPermutation(std::move(v));
    }
    static AltPermutation transposition(int m, int a, int b) {
        auto p = identity(m);
        std::swap(p.map[a], p.map[b]);
        return p;
    }
    AltPermutation inverse() const {
        std::vector<int> inv(map.size());
        for (size_t j = 0; j < map.size(); ++j) inv[map[j]] = static_cast<int>(j);
        return AltPermutation(std::move(inv));
    }

  private:
    void validate() const {
        std::vector<bool> seen(map.size(), false);
        for (int v : map) {
            if (v < 0 || v >= static_cast<int>(map.size()) || seen[v])
                throw InvalidSettingError("not a bijection");
            seen[v] = true;
        }
    }
};

/// P^w: w(j) is weakly preferred to w(j') whenever P prefers j to j'.
inline PrefOrder apply_alternative_permutation(const PrefOrder& order, const AltPermutation& w) {
    std::vector<std::vector<int>> cls;
    cls.reserve(order.classes().size());
    for (const auto& c : order.classes()) {
        std::vector<int> nc;
        nc.reserve(c.size());
        for (int j : c) nc.push_back(w.map[j]);
        cls.push_back(std::move(nc));
    }
    return PrefOrder(std::move(cls), order.num_alternatives());
}

/// P^pi: agent i reports the order held by agent pi(i) in p.
inline Profile apply_agent_permutation(const Profile& p, const AgentPermutation& pi) {
    if (pi.map.size() != p.orders.size()) throw SpaceMismatchError("permutation size mismatch");
    Profile out;
    out.orders.reserve(p.orders.size());
    for (size_t i = 0; i < p.orders.size(); ++i) out.orders.push_back(p.orders[pi.map[i]]);
    return out;
}

inline Profile apply_alternative_permutation(const Profile& p, const AltPermutation& w) {
    Profile out;
    out.orders.reserve(p.orders.size());
    for (const auto& o : p.orders) out.orders.push_back(apply_alternative_permutation(o, w));
    return out;
}

/// All preference orders over m alternatives, canonically sorted by rank
/// vector. Strict: m! permutations. Weak: ordered set partitions (Fubini).
inline std::vector<PrefOrder> enumerate_orders(int m, OrderKind kind) {
    if (m < 2) throw InvalidSettingError("need at least two alternatives");
    std::vector<PrefOrder> out;
    if (kind == OrderKind::Strict) {
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            out.push_back(PrefOrder::strict(perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<std::vector<int>> classes;
        std::vector<int> rest(m);
        std::iota(rest.begin(), rest.end(), 0);
        // Pick the top class among the remaining alternatives, recurse.
        auto rec = [&](auto&& self, const std::vector<int>& remaining) -> void {
            if (remaining.empty()) {
                out.push_back(PrefOrder(classes, m));
                return;
            }
            const int k = static_cast<int>(remaining.size());
            for (unsigned mask = 1; mask < (1u << k); ++mask) {
                std::vector<int> cls, left;
                for (int t = 0; t < k; ++t)
                    (mask >> t & 1u ? cls : left).push_back(remaining[t]);
                classes.push_back(std::move(cls));
                self(self, left);
                classes.pop_back();
            }
        };
        rec(rec, rest);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

enum class SpaceKind { Strict, Weak, ExplicitList };

/// The admissible preference profiles of a problem, canonically indexed.
/// Full spaces are the Cartesian power of enumerate_orders; explicit-list
/// spaces are subsets of the weak space.
class ProfileSpace {
  public:
    static constexpr long kDefaultCap = 1'000'000;  // cap on |profiles| * m

    ProfileSpace(Setting setting, OrderKind kind, long cap = kDefaultCap)
        : setting_(setting),
          kind_(kind == OrderKind::Strict ? SpaceKind::Strict : SpaceKind::Weak),
          orders_(enumerate_orders(setting.m, kind)) {
        index_orders();
        const long num_orders = static_cast<long>(orders_.size());
        long count = 1;
        for (int i = 0; i < setting_.n; ++i) {
            if (count > cap / num_orders + 1) throw DomainTooLargeError("profile space exceeds cap");
            count *= num_orders;
        }
        if (count * setting_.m > cap)
            throw DomainTooLargeError("profile space exceeds cap (" +
                                      std::to_string(count * setting_.m) + " profile-variables)");
        std::vector<int> ids(setting_.n, 0);
        for (long idx = 0; idx < count; ++idx) {
            Profile p;
            p.orders.reserve(setting_.n);
            for (int i = 0; i < setting_.n; ++i) p.orders.push_back(orders_[ids[i]]);
            profiles_.push_back(std::move(p));
            order_ids_.push_back(ids);
            // lexicographic in (agent, order-id): agent 0 most significant
            for (int i = setting_.n - 1; i >= 0; --i) {
                if (++ids[i] < num_orders) break;
                ids[i] = 0;
            }
        }
    }

    /// Explicit-list restriction. Profiles must use orders of the weak space.
    ProfileSpace(Setting setting, const std::vector<Profile>& listed)
        : setting_(setting), kind_(SpaceKind::ExplicitList), orders_(enumerate_orders(setting.m, OrderKind::Weak)) {
        index_orders();
        for (const auto& p : listed) {
            if (p.num_agents() != setting_.n) throw InvalidSettingError("profile has wrong agent count");
            std::vector<int> ids;
            for (const auto& o : p.orders) ids.push_back(order_id(o));
            if (explicit_index_.count(ids)) throw InvalidSettingError("duplicate profile in restriction");
            explicit_index_[ids] = static_cast<int>(profiles_.size());
            profiles_.push_back(p);
            order_ids_.push_back(std::move(ids));
        }
    }

    const Setting& setting() const { return setting_; }
    SpaceKind kind() const { return kind_; }
    int size() const { return static_cast<int>(profiles_.size()); }
    int num_orders() const { return static_cast<int>(orders_.size()); }
    const std::vector<PrefOrder>& orders() const { return orders_; }
    const Profile& profile(int idx) const { return profiles_.at(idx); }
    const std::vector<int>& profile_order_ids(int idx) const { return order_ids_.at(idx); }

    int order_id(const PrefOrder& o) const {
        auto it = order_index_.find(o.ranks());
        if (it == order_index_.end()) throw NotInDomainError("order not in space");
        return it->second;
    }

    /// Position of a profile in canonical order, or -1 if not admitted.
    int index_of_ids(const std::vector<int>& ids) const {
        if (kind_ == SpaceKind::ExplicitList) {
            auto it = explicit_index_.find(ids);
            return it == explicit_index_.end() ? -1 : it->second;
        }
        long idx = 0;
        for (int i = 0; i < setting_.n; ++i) idx = idx * num_orders() + ids[i];
        return static_cast<int>(idx);
    }

    int index_of(const Profile& p) const {
        if (p.num_agents() != setting_.n) throw SpaceMismatchError("wrong agent count");
        std::vector<int> ids;
        ids.reserve(setting_.n);
        for (const auto& o : p.orders) {
            auto it = order_index_.find(o.ranks());
            if (it == order_index_.end()) return -1;
            ids.push_back(it->second);
        }
        return index_of_ids(ids);
    }

    /// Index of the profile obtained from profile `idx` by agent `agent`
    /// unilaterally reporting order `new_order_id`; -1 when outside the space.
    int deviation_index(int idx, int agent, int new_order_id) const {
        std::vector<int> ids = order_ids_[idx];
        ids[agent] = new_order_id;
        return index_of_ids(ids);
    }

    bool contains(const Profile& p) const { return index_of(p) >= 0; }

  private:
    void index_orders() {
        for (size_t i = 0; i < orders_.size(); ++i)
            order_index_[orders_[i].ranks()] = static_cast<int>(i);
    }

    struct VecHash {
        size_t operator()(const std::vector<int>& v) const {
            size_t h = 1469598103934665603ull;
            for (int x : v) h = (h ^ static_cast<size_t>(x)) * 1099511628211ull;
            return h;
        }
    };

    Setting setting_;
    SpaceKind kind_;
    std::vector<PrefOrder> orders_;
    std::map<std::vector<int>, int> order_index_;  // rank vector -> order id
    std::vector<Profile> profiles_;
    std::vector<std::vector<int>> order_ids_;
    std::unordered_map<std::vector<int>, int, VecHash> explicit_index_;
};

/// True when every unilateral deviation within the space's order set stays in
/// the space. Full spaces trivially qualify; explicit lists must be checked
/// before SP-constraint generation.
inline bool closed_under_deviations(const ProfileSpace& space) {
    if (space.kind() != SpaceKind::ExplicitList) return true;
    // An explicit list is deviation-closed when, for each agent slot, every
    // order that appears in that slot somewhere in the list is an admissible
    // unilateral deviation from every listed profile.
    const int n = space.setting().n;
    std::vector<std::vector<bool>> used(n, std::vector<bool>(space.num_orders(), false));
    for (int p = 0; p < space.size(); ++p) {
        const auto& ids = space.profile_order_ids(p);
        for (int i = 0; i < n; ++i) used[i][ids[i]] = true;
    }
    for (int p = 0; p < space.size(); ++p)
        for (int agent = 0; agent < n; ++agent)
            for (int id = 0; id < space.num_orders(); ++id) {
                if (!used[agent][id]) continue;
                if (space.deviation_index(p, agent, id) < 0) return false;
            }
    return true;
}

}  // namespace mechfront
