#ifndef ALGCON_TRANSFORM_HPP
#define ALGCON_TRANSFORM_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/constraint.hpp"
#include "algcon/fingerprint.hpp"

namespace algcon {

/// A rewrite site: central node R with two same-part neighbours left and
/// right such that every subtree at right (away from R) has an identical
/// copy at left, and the weight of the R--left edge equals |A| where
/// A = label(left) \ label(right).
struct TransformCandidate {
    std::string central, left, right;
    std::vector<std::string> only_left;  // A
    std::vector<std::string> only_right; // B
    std::vector<std::string> shared;     // X
};

namespace detail {

inline std::string rooted_encoding(const GraphicalConstraint& gc, const std::string& node,
                                   const std::string& parent) {
    std::vector<std::string> kids;
    for (const auto& nb : gc.neighbors(node))
        if (nb != parent) kids.push_back(rooted_encoding(gc, nb, node));
    std::sort(kids.begin(), kids.end());
    std::string s = "[" + label_key(gc.node(node).label);
    for (const auto& k : kids) s += k;
    return s + "]";
}

/// Every element of `needle` (with multiplicity) matched injectively in
/// `haystack`.
inline bool sub_multiset(std::vector<std::string> needle, std::vector<std::string> haystack) {
    std::sort(needle.begin(), needle.end());
    std::sort(haystack.begin(), haystack.end());
    return std::includes(haystack.begin(), haystack.end(), needle.begin(), needle.end());
}

inline bool candidate_applies(const GraphicalConstraint& gc, const TransformCandidate& c) {
    if (!gc.adjacent(c.central, c.left) || !gc.adjacent(c.central, c.right)) return false;
    if (c.left == c.right) return false;
    if (gc.in_part_a(c.left) != gc.in_part_a(c.right)) return false;
    if (gc.in_part_a(c.left) == gc.in_part_a(c.central)) return false;
    const auto& ll = gc.node(c.left).label;
    const auto& rl = gc.node(c.right).label;
    std::vector<std::string> a_only, b_only, shared;
    std::set_difference(ll.begin(), ll.end(), rl.begin(), rl.end(), std::back_inserter(a_only));
    std::set_difference(rl.begin(), rl.end(), ll.begin(), ll.end(), std::back_inserter(b_only));
    std::set_intersection(ll.begin(), ll.end(), rl.begin(), rl.end(), std::back_inserter(shared));
    if (shared.empty()) return false; // left would end up with an empty label
    if (a_only != c.only_left || b_only != c.only_right || shared != c.shared) return false;
    std::vector<std::string> right_subs, left_subs;
    for (const auto& nb : gc.neighbors(c.right))
        if (nb != c.central) right_subs.push_back(rooted_encoding(gc, nb, c.right));
    for (const auto& nb : gc.neighbors(c.left))
        if (nb != c.central) left_subs.push_back(rooted_encoding(gc, nb, c.left));
    if (!sub_multiset(right_subs, left_subs)) return false;
    int w = edge_weight(gc, {c.central, c.left});
    return w == static_cast<int>(c.only_left.size());
}

} // namespace detail

/// All applicable (central, left, right) rewrite sites, sorted.
inline std::vector<TransformCandidate> find_transformations(const GraphicalConstraint& gc) {
    if (!gc.is_tree()) throw Error("find_transformations: constraint is not a tree");
    if (!gc.is_square()) throw Error("find_transformations: constraint is not square");
    std::vector<TransformCandidate> out;
    std::vector<std::string> all_ids;
    for (const auto& n : gc.part_a()) all_ids.push_back(n.id);
    for (const auto& n : gc.part_b()) all_ids.push_back(n.id);
    std::sort(all_ids.begin(), all_ids.end(), id_less);
    for (const auto& central : all_ids) {
        auto nbs = gc.neighbors(central);
        for (const auto& left : nbs)
            for (const auto& right : nbs) {
                if (left == right) continue;
                TransformCandidate c;
                c.central = central;
                c.left = left;
                c.right = right;
                const auto& ll = gc.node(left).label;
                const auto& rl = gc.node(right).label;
                std::set_difference(ll.begin(), ll.end(), rl.begin(), rl.end(),
                                    std::back_inserter(c.only_left));
                std::set_difference(rl.begin(), rl.end(), ll.begin(), ll.end(),
                                    std::back_inserter(c.only_right));
                std::set_intersection(ll.begin(), ll.end(), rl.begin(), rl.end(),
                                      std::back_inserter(c.shared));
                if (detail::candidate_applies(gc, c)) out.push_back(std::move(c));
            }
    }
    return out;
}

/// apply_transformation with the bookkeeping needed to follow slots through
/// the rewrite: which labels moved from left to right, and how normal-form
/// merges renamed nodes.
struct TransformApplication {
    GraphicalConstraint whole; // normalized; disconnected after the rewrite
    std::string left_id, right_id;
    std::vector<std::string> moved;                  // sorted
    std::map<std::string, std::string> id_remap;

    std::pair<std::string, std::string> map_slot(std::pair<std::string, std::string> s) const {
        if (s.first == left_id && std::binary_search(moved.begin(), moved.end(), s.second))
            s.first = right_id;
        auto it = id_remap.find(s.first);
        if (it != id_remap.end()) s.first = it->second;
        return s;
    }
};

inline TransformApplication apply_transformation_ex(const GraphicalConstraint& gc,
                                                    const TransformCandidate& c) {
    if (!gc.is_tree()) throw Error("apply_transformation: constraint is not a tree");
    if (!detail::candidate_applies(gc, c)) throw Error("apply_transformation: invalid triple");

    std::vector<ConstraintNode> pa = gc.part_a(), pb = gc.part_b();
    auto relabel = [&](std::vector<ConstraintNode>& part) {
        for (auto& n : part) {
            if (n.id == c.left) {
                n.label = c.shared;
            } else if (n.id == c.right) {
                std::vector<std::string> u;
                std::set_union(c.shared.begin(), c.shared.end(), c.only_left.begin(),
                               c.only_left.end(), std::back_inserter(u));
                std::vector<std::string> u2;
                std::set_union(u.begin(), u.end(), c.only_right.begin(), c.only_right.end(),
                               std::back_inserter(u2));
                n.label = u2;
            }
        }
    };
    relabel(pa);
    relabel(pb);
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [x, y] : gc.edges()) {
        if ((x == c.central && y == c.left) || (x == c.left && y == c.central)) continue;
        edges.push_back({x, y});
    }
    GraphicalConstraint rewritten(std::move(pa), std::move(pb), std::move(edges));
    TransformApplication app;
    app.left_id = c.left;
    app.right_id = c.right;
    app.moved = c.only_left;
    app.whole = rewritten.normal_form_with_map(app.id_remap);
    for (const auto& comp : app.whole.components())
        if (!comp.is_square())
            throw Error("apply_transformation: rewrite produced a non-square component");
    return app;
}

/// The rewrite: deletes the central--left edge, shrinks left's label to
/// the shared part and grows right's label by both exclusive parts. The
/// represented polynomial is preserved up to sign (as the product of the
/// resulting components' polynomials).
inline GraphicalConstraint apply_transformation(const GraphicalConstraint& gc,
                                                const TransformCandidate& c) {
    return apply_transformation_ex(gc, c).whole;
}

using SeedSlots = std::pair<std::pair<std::string, std::string>, std::pair<std::string, std::string>>;

struct SimplifyResult {
    GraphicalConstraint core;
    std::vector<GraphicalConstraint> factors;
    int steps = 0;
    bool fingerprint_verified = true; // every applied step passed the product check
};

namespace detail {

inline int matrix_dim(const GraphicalConstraint& gc) { return gc.slots_a(); }

} // namespace detail

inline bool transformation_product_preserved(const GraphicalConstraint& before,
                                             const std::vector<GraphicalConstraint>& comps) {
    for (std::uint64_t seed : {0x5eedf00dULL, 0xfeedbeefULL}) {
        Fingerprint lhs = fingerprint(before.build_matrix(), seed);
        Fingerprint rhs;
        rhs.seed = seed;
        rhs.values.assign(lhs.values.size(), 1);
        for (const auto& comp : comps) rhs = pointwise_product(rhs, fingerprint(comp.build_matrix(), seed));
        if (!equal_up_to_sign(lhs, rhs)) return false;
    }
    return true;
}

/// Applies transformations greedily to a fixpoint. The core is the component
/// holding both seed slots when they are known (falling back to the largest
/// component); everything split off is returned as stripped factors. The
/// product of all returned polynomials equals the input up to sign, and
/// every step is re-verified by fingerprints.
inline SimplifyResult simplify(const GraphicalConstraint& gc,
                               std::optional<SeedSlots> seeds = std::nullopt) {
    SimplifyResult res;
    res.core = gc;
    std::optional<SeedSlots> cur_seeds = seeds;
    for (;;) {
        auto cands = find_transformations(res.core);
        bool applied = false;
        for (const auto& c : cands) {
            TransformApplication app;
            try {
                app = apply_transformation_ex(res.core, c);
            } catch (const Error&) {
                continue;
            }
            auto comps = app.whole.components();
            if (!transformation_product_preserved(res.core, comps)) {
                res.fingerprint_verified = false;
                continue;
            }
            // locate the core component
            std::size_t core_idx = 0;
            bool found = false;
            if (cur_seeds) {
                auto s1 = app.map_slot(cur_seeds->first);
                auto s2 = app.map_slot(cur_seeds->second);
                for (std::size_t i = 0; i < comps.size(); ++i) {
                    bool has1 = false, has2 = false;
                    for (const auto& n : comps[i].part_a()) {
                        if (n.id == s1.first) has1 = true;
                        if (n.id == s2.first) has2 = true;
                    }
                    for (const auto& n : comps[i].part_b()) {
                        if (n.id == s1.first) has1 = true;
                        if (n.id == s2.first) has2 = true;
                    }
                    if (has1 && has2) {
                        core_idx = i;
                        found = true;
                        break;
                    }
                }
                if (found) cur_seeds = SeedSlots{s1, s2};
            }
            if (!found) {
                // largest component (ties: first in deterministic order)
                int best = -1;
                for (std::size_t i = 0; i < comps.size(); ++i)
                    if (detail::matrix_dim(comps[i]) > best) {
                        best = detail::matrix_dim(comps[i]);
                        core_idx = i;
                    }
                cur_seeds.reset();
            }
            for (std::size_t i = 0; i < comps.size(); ++i)
                if (i != core_idx) res.factors.push_back(comps[i]);
            res.core = comps[core_idx];
            ++res.steps;
            applied = true;
            break;
        }
        if (!applied) break;
    }
    return res;
}

/// Explores all candidate orders (bounded) and returns the distinct
/// fixpoints, smallest core first. The greedy order is not known to be
/// confluent, so censuses retry through this when the greedy result fails
/// certification.
inline std::vector<SimplifyResult> simplify_all_orders(const GraphicalConstraint& gc,
                                                       std::optional<SeedSlots> seeds = std::nullopt,
                                                       std::size_t budget = 200) {
    std::vector<SimplifyResult> results;
    std::set<std::string> seen_states, seen_results;
    std::size_t explored = 0;

    struct State {
        GraphicalConstraint core;
        std::vector<GraphicalConstraint> factors;
        std::optional<SeedSlots> seeds;
        int steps;
        bool verified;
    };
    std::vector<State> stack{{gc, {}, seeds, 0, true}};
    while (!stack.empty() && explored < budget) {
        State st = std::move(stack.back());
        stack.pop_back();
        ++explored;
        auto cands = find_transformations(st.core);
        bool any = false;
        for (const auto& c : cands) {
            TransformApplication app;
            try {
                app = apply_transformation_ex(st.core, c);
            } catch (const Error&) {
                continue;
            }
            auto comps = app.whole.components();
            bool ok = transformation_product_preserved(st.core, comps);
            State next = st;
            next.verified = st.verified && ok;
            if (!ok) continue;
            std::size_t core_idx = 0;
            bool found = false;
            if (next.seeds) {
                auto s1 = app.map_slot(next.seeds->first);
                auto s2 = app.map_slot(next.seeds->second);
                for (std::size_t i = 0; i < comps.size(); ++i) {
                    bool h1 = false, h2 = false;
                    for (const auto& n : comps[i].part_a()) {
                        h1 |= n.id == s1.first;
                        h2 |= n.id == s2.first;
                    }
                    for (const auto& n : comps[i].part_b()) {
                        h1 |= n.id == s1.first;
                        h2 |= n.id == s2.first;
                    }
                    if (h1 && h2) {
                        core_idx = i;
                        found = true;
                        break;
                    }
                }
                if (found)
                    next.seeds = SeedSlots{s1, s2};
                else
                    next.seeds.reset();
            }
            if (!found) {
                int best = -1;
                for (std::size_t i = 0; i < comps.size(); ++i)
                    if (detail::matrix_dim(comps[i]) > best) {
                        best = detail::matrix_dim(comps[i]);
                        core_idx = i;
                    }
            }
            for (std::size_t i = 0; i < comps.size(); ++i)
                if (i != core_idx) next.factors.push_back(comps[i]);
            next.core = comps[core_idx];
            ++next.steps;
            std::string key = next.core.canonical_encoding();
            if (seen_states.insert(key + "#" + std::to_string(next.factors.size())).second)
                stack.push_back(std::move(next));
            any = true;
        }
        if (!any) {
            std::string key = st.core.canonical_encoding();
            if (seen_results.insert(key).second)
                results.push_back({st.core, st.factors, st.steps, st.verified});
        }
    }
    std::sort(results.begin(), results.end(), [](const SimplifyResult& a, const SimplifyResult& b) {
        int da = detail::matrix_dim(a.core), db = detail::matrix_dim(b.core);
        if (da != db) return da < db;
        return a.core.canonical_encoding() < b.core.canonical_encoding();
    });
    return results;
}

} // namespace algcon

#endif // ALGCON_TRANSFORM_HPP
