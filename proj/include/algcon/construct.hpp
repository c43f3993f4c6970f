#ifndef ALGCON_CONSTRUCT_HPP
#define ALGCON_CONSTRUCT_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/constraint.hpp"
#include "algcon/graph.hpp"
#include "algcon/htc.hpp"

namespace algcon {

class CycleInIdentificationError : public Error {
public:
    explicit CycleInIdentificationError(const std::string& msg) : Error(msg) {}
};

/// Output of the HTC-based construction for one pair, with the bookkeeping
/// the classifiers need: which model nodes were expanded (each expansion
/// multiplies the represented polynomial by the corresponding |A^(v)|) and
/// where the two seed slots ended up after normalization.
struct DerivedConstraint {
    GraphicalConstraint gc;
    std::pair<std::string, std::string> pair;                // {v, w}, v < w
    std::vector<std::string> expanded;                       // expansion multiset, in order
    std::pair<std::pair<std::string, std::string>,           // ((node id, v), (node id, w))
              std::pair<std::string, std::string>> seed_slots;
};

namespace detail {

struct Builder {
    const MixedGraph& g;
    const IdentifyingFamily& fam;
    std::map<std::string, std::size_t> order_pos;
    std::vector<ConstraintNode> part_a, part_b;
    std::vector<std::pair<std::string, std::string>> edges; // (a-side id, b-side id)
    std::vector<std::string> expanded;
    int next_id = 1;

    Builder(const MixedGraph& graph, const IdentifyingFamily& family) : g(graph), fam(family) {
        for (std::size_t i = 0; i < fam.order.size(); ++i) order_pos[fam.order[i]] = i;
    }

    std::string fresh_id() { return "t" + std::to_string(next_id++); }

    std::string add_node(bool side_a, const std::string& var) {
        std::string id = fresh_id();
        (side_a ? part_a : part_b).push_back({id, {var}});
        return id;
    }

    ConstraintNode& node_ref(bool side_a, const std::string& id) {
        for (auto& n : (side_a ? part_a : part_b))
            if (n.id == id) return n;
        throw Error("internal: lost constraint node " + id);
    }

    /// expand(t) of the construction: the node's label {v} grows to
    /// {v} u pa(v); each y in Y_v becomes a fresh neighbour; those y that
    /// are half-trek reachable from v are expanded recursively. Recursion
    /// always descends in the identification order, which bounds it; a
    /// violation means the family was invalid.
    void expand(bool side_a, const std::string& id, const std::string& v, int depth) {
        if (depth > g.size())
            throw CycleInIdentificationError("expansion depth exceeded node count at '" + v + "'");
        expanded.push_back(v);
        auto& n = node_ref(side_a, id);
        for (const auto& p : g.parents(v)) {
            if (!std::binary_search(n.label.begin(), n.label.end(), p))
                n.label.insert(std::upper_bound(n.label.begin(), n.label.end(), p), p);
        }
        auto htr = g.half_trek_mask(g.index_of(v));
        std::vector<std::pair<std::string, std::string>> to_expand; // (child id, y)
        for (const auto& y : fam.set_for(v)) {
            std::string child = add_node(!side_a, y);
            if (side_a)
                edges.push_back({id, child});
            else
                edges.push_back({child, id});
            if (htr[static_cast<std::size_t>(g.index_of(y))]) to_expand.push_back({child, y});
        }
        for (const auto& [child, y] : to_expand) {
            if (order_pos.at(y) >= order_pos.at(v))
                throw CycleInIdentificationError(
                    "expansion of '" + y + "' under '" + v +
                    "' violates the identification order; family is invalid");
            expand(!side_a, child, y, depth + 1);
        }
    }
};

} // namespace detail

/// HTC-based graphical constraint construction for one constraint pair.
/// Seeds for {v, w} start as two joined singleton nodes; the smaller node
/// expands first; the result is brought into normal form.
inline DerivedConstraint derive_constraint(const MixedGraph& g, const IdentifyingFamily& fam,
                                           std::pair<std::string, std::string> pair) {
    if (pair.second < pair.first) std::swap(pair.first, pair.second);
    if (!validate_family(g, fam)) throw Error("derive_constraint: family is not valid");
    {
        auto pairs = constraint_pairs(g, fam);
        if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end())
            throw Error("derive_constraint: {" + pair.first + "," + pair.second +
                        "} is not a constraint pair for this family");
    }
    detail::Builder b(g, fam);
    std::string t1 = b.add_node(true, pair.first);
    std::string t2 = b.add_node(false, pair.second);
    b.edges.push_back({t1, t2});
    b.expand(true, t1, pair.first, 0);
    b.expand(false, t2, pair.second, 0);

    GraphicalConstraint raw(std::move(b.part_a), std::move(b.part_b), std::move(b.edges));
    std::map<std::string, std::string> remap;
    GraphicalConstraint norm = raw.normal_form_with_map(remap);
    if (!norm.is_square())
        throw Error("internal: derived constraint is not square"); // cannot happen
    DerivedConstraint out;
    out.gc = std::move(norm);
    out.pair = pair;
    out.expanded = std::move(b.expanded);
    out.seed_slots = {{remap.at(t1), pair.first}, {remap.at(t2), pair.second}};
    return out;
}

/// One constraint per element of constraint_pairs, in sorted pair order.
inline std::vector<DerivedConstraint> derive_all(const MixedGraph& g,
                                                 const IdentifyingFamily& fam) {
    std::vector<DerivedConstraint> out;
    for (const auto& p : constraint_pairs(g, fam)) out.push_back(derive_constraint(g, fam, p));
    return out;
}

/// The graphical constraint representing |A^(v)|: a single node with label
/// {v} is expanded, then v is removed from the starting node's label.
/// Empty when pa(v) is empty (the factor is the constant 1).
inline std::optional<GraphicalConstraint> a_minor_constraint(const MixedGraph& g,
                                                             const IdentifyingFamily& fam,
                                                             const std::string& v) {
    if (!validate_family(g, fam)) throw Error("a_minor_constraint: family is not valid");
    if (g.parents(g.index_of(v)).empty()) return std::nullopt;
    detail::Builder b(g, fam);
    std::string t1 = b.add_node(true, v);
    b.expand(true, t1, v, 0);
    // remove the seed label element v
    auto& n = b.node_ref(true, t1);
    n.label.erase(std::find(n.label.begin(), n.label.end(), v));
    GraphicalConstraint raw(std::move(b.part_a), std::move(b.part_b), std::move(b.edges));
    GraphicalConstraint norm = raw.normal_form();
    if (!norm.is_square()) throw Error("internal: |A^(v)| constraint is not square");
    return norm;
}

} // namespace algcon

#endif // ALGCON_CONSTRUCT_HPP
