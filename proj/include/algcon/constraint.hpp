#ifndef ALGCON_CONSTRAINT_HPP
#define ALGCON_CONSTRAINT_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/fingerprint.hpp"
#include "algcon/linalg.hpp"
#include "algcon/poly.hpp"

namespace algcon {

struct ConstraintNode {
    std::string id;
    std::vector<std::string> label; // nonempty, sorted, unique

    bool operator==(const ConstraintNode& o) const { return id == o.id && label == o.label; }
};

/// Orders node ids by length first, then lexicographically, so t2 < t10.
inline bool id_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

/// An undirected bipartite labelled graph (usually a tree) representing a
/// polynomial up to sign: the determinant of the pattern matrix whose rows
/// are the (node, label element) slots of part A, columns those of part B,
/// with entry sigma_{v,w} where the two nodes are adjacent and 0 elsewhere.
class GraphicalConstraint {
public:
    GraphicalConstraint() = default;

    GraphicalConstraint(std::vector<ConstraintNode> part_a, std::vector<ConstraintNode> part_b,
                        std::vector<std::pair<std::string, std::string>> edges)
        : part_a_(std::move(part_a)), part_b_(std::move(part_b)) {
        for (auto& n : part_a_) normalize_node(n);
        for (auto& n : part_b_) normalize_node(n);
        std::set<std::string> ids;
        for (const auto& n : part_a_)
            if (!ids.insert(n.id).second) throw Error("duplicate constraint node id '" + n.id + "'");
        for (const auto& n : part_b_)
            if (!ids.insert(n.id).second) throw Error("duplicate constraint node id '" + n.id + "'");
        for (auto& [a, b] : edges) {
            if (!find_in(part_a_, a)) {
                // tolerate swapped endpoint order in input
                if (find_in(part_a_, b) && find_in(part_b_, a)) std::swap(a, b);
            }
            if (!find_in(part_a_, a) || !find_in(part_b_, b))
                throw Error("edge (" + a + "," + b + ") does not cross the two parts");
            edges_.insert({a, b});
        }
    }

    const std::vector<ConstraintNode>& part_a() const { return part_a_; }
    const std::vector<ConstraintNode>& part_b() const { return part_b_; }
    const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }

    std::size_t node_count() const { return part_a_.size() + part_b_.size(); }

    int slots_a() const { return slot_count(part_a_); }
    int slots_b() const { return slot_count(part_b_); }
    bool is_square() const { return slots_a() == slots_b(); }

    const ConstraintNode& node(const std::string& id) const {
        if (const auto* n = find_in(part_a_, id)) return *n;
        if (const auto* n = find_in(part_b_, id)) return *n;
        throw Error("no constraint node '" + id + "'");
    }

    bool in_part_a(const std::string& id) const { return find_in(part_a_, id) != nullptr; }

    bool adjacent(const std::string& a, const std::string& b) const {
        return edges_.count({a, b}) > 0 || edges_.count({b, a}) > 0;
    }

    std::vector<std::string> neighbors(const std::string& id) const {
        std::vector<std::string> out;
        for (const auto& [a, b] : edges_) {
            if (a == id) out.push_back(b);
            if (b == id) out.push_back(a);
        }
        std::sort(out.begin(), out.end(), id_less);
        return out;
    }

    bool is_connected() const {
        if (node_count() == 0) return true;
        std::set<std::string> seen;
        std::vector<std::string> stack{part_a_.empty() ? part_b_.front().id : part_a_.front().id};
        seen.insert(stack.front());
        while (!stack.empty()) {
            std::string u = stack.back();
            stack.pop_back();
            for (const auto& v : neighbors(u))
                if (seen.insert(v).second) stack.push_back(v);
        }
        return seen.size() == node_count();
    }

    bool is_tree() const {
        return is_connected() && edges_.size() + 1 == node_count();
    }

    /// Model variables appearing in any label.
    std::vector<std::string> variables() const {
        std::set<std::string> vars;
        for (const auto& n : part_a_) vars.insert(n.label.begin(), n.label.end());
        for (const auto& n : part_b_) vars.insert(n.label.begin(), n.label.end());
        return {vars.begin(), vars.end()};
    }

    /// Compiles the pattern matrix: rows from part A, columns from part B,
    /// nodes in id order and label elements sorted within each node.
    PatternMatrix build_matrix() const {
        if (!is_square())
            throw Error("constraint is not square: " + std::to_string(slots_a()) + " row slots vs " +
                        std::to_string(slots_b()) + " column slots");
        PatternMatrix m;
        for (const auto& n : sorted_nodes(part_a_))
            for (const auto& v : n->label) m.rows.push_back({n->id, v});
        for (const auto& n : sorted_nodes(part_b_))
            for (const auto& w : n->label) m.cols.push_back({n->id, w});
        m.entry.assign(m.rows.size(), std::vector<std::optional<SigmaVar>>(m.cols.size()));
        for (std::size_t i = 0; i < m.rows.size(); ++i)
            for (std::size_t j = 0; j < m.cols.size(); ++j)
                if (adjacent(m.rows[i].first, m.cols[j].first))
                    m.entry[i][j] = SigmaVar::make(m.rows[i].second, m.cols[j].second);
        return m;
    }

    /// Merges nodes with identical neighbour sets (within a part) until none
    /// remain. Merging nodes with overlapping labels would mean the matrix
    /// had two identical rows or columns, i.e. an identically-zero
    /// determinant; that case is rejected.
    GraphicalConstraint normal_form() const {
        std::map<std::string, std::string> remap;
        return normal_form_with_map(remap);
    }

    GraphicalConstraint normal_form_with_map(std::map<std::string, std::string>& remap) const {
        GraphicalConstraint g = *this;
        remap.clear();
        for (const auto& n : part_a_) remap[n.id] = n.id;
        for (const auto& n : part_b_) remap[n.id] = n.id;
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto* part : {&g.part_a_, &g.part_b_}) {
                for (std::size_t i = 0; i < part->size() && !changed; ++i)
                    for (std::size_t j = i + 1; j < part->size() && !changed; ++j) {
                        const std::string& id_i = (*part)[i].id;
                        const std::string& id_j = (*part)[j].id;
                        if (g.neighbors(id_i) != g.neighbors(id_j)) continue;
                        // keep the smaller id
                        std::size_t keep = id_less(id_i, id_j) ? i : j;
                        std::size_t drop = keep == i ? j : i;
                        auto& kn = (*part)[keep];
                        auto& dn = (*part)[drop];
                        for (const auto& v : dn.label) {
                            if (std::binary_search(kn.label.begin(), kn.label.end(), v))
                                throw DegenerateConstraintError(
                                    "normal form merge of '" + kn.id + "' and '" + dn.id +
                                    "' would collapse duplicate slots (determinant is zero)");
                            kn.label.insert(
                                std::upper_bound(kn.label.begin(), kn.label.end(), v), v);
                        }
                        std::string dropped = dn.id, kept = kn.id;
                        std::set<std::pair<std::string, std::string>> new_edges;
                        for (auto [a, b] : g.edges_) {
                            if (a == dropped) a = kept;
                            if (b == dropped) b = kept;
                            new_edges.insert({a, b});
                        }
                        g.edges_ = std::move(new_edges);
                        part->erase(part->begin() + static_cast<std::ptrdiff_t>(drop));
                        for (auto& [from, to] : remap)
                            if (to == dropped) to = kept;
                        changed = true;
                    }
            }
        }
        return g;
    }

    bool is_normal_form() const {
        for (const auto* part : {&part_a_, &part_b_})
            for (std::size_t i = 0; i < part->size(); ++i)
                for (std::size_t j = i + 1; j < part->size(); ++j)
                    if (neighbors((*part)[i].id) == neighbors((*part)[j].id)) return false;
        return true;
    }

    /// Parts exchanged; represents the same polynomial (transposed matrix).
    GraphicalConstraint swapped() const {
        std::vector<std::pair<std::string, std::string>> es;
        for (const auto& [a, b] : edges_) es.push_back({b, a});
        return GraphicalConstraint(part_b_, part_a_, std::move(es));
    }

    /// Renames model variables inside labels (not node ids).
    GraphicalConstraint renamed_vars(const std::map<std::string, std::string>& mapping) const {
        auto ren_part = [&](std::vector<ConstraintNode> part) {
            for (auto& n : part) {
                for (auto& v : n.label) {
                    auto it = mapping.find(v);
                    if (it != mapping.end()) v = it->second;
                }
                std::sort(n.label.begin(), n.label.end());
            }
            return part;
        };
        std::vector<std::pair<std::string, std::string>> es(edges_.begin(), edges_.end());
        return GraphicalConstraint(ren_part(part_a_), ren_part(part_b_), std::move(es));
    }

    /// Connected components, each a constraint with the induced parts/edges.
    std::vector<GraphicalConstraint> components() const {
        std::vector<GraphicalConstraint> out;
        std::set<std::string> seen;
        auto all_ids = [&]() {
            std::vector<std::string> ids;
            for (const auto& n : part_a_) ids.push_back(n.id);
            for (const auto& n : part_b_) ids.push_back(n.id);
            return ids;
        }();
        for (const auto& start : all_ids) {
            if (seen.count(start)) continue;
            std::set<std::string> comp;
            std::vector<std::string> stack{start};
            comp.insert(start);
            while (!stack.empty()) {
                std::string u = stack.back();
                stack.pop_back();
                for (const auto& v : neighbors(u))
                    if (comp.insert(v).second) stack.push_back(v);
            }
            seen.insert(comp.begin(), comp.end());
            std::vector<ConstraintNode> pa, pb;
            std::vector<std::pair<std::string, std::string>> es;
            for (const auto& n : part_a_)
                if (comp.count(n.id)) pa.push_back(n);
            for (const auto& n : part_b_)
                if (comp.count(n.id)) pb.push_back(n);
            for (const auto& [a, b] : edges_)
                if (comp.count(a)) es.push_back({a, b});
            out.emplace_back(std::move(pa), std::move(pb), std::move(es));
        }
        return out;
    }

    /// Canonical string: invariant under node-id renaming within parts and
    /// under the part swap. Iterative refinement narrows the candidate
    /// orderings; ties are broken by explicit minimization.
    std::string canonical_encoding() const {
        std::string direct = canonical_encoding_oriented();
        std::string swapped_enc = swapped().canonical_encoding_oriented();
        return std::min(direct, swapped_enc);
    }

    bool operator==(const GraphicalConstraint& o) const {
        return part_a_ == o.part_a_ && part_b_ == o.part_b_ && edges_ == o.edges_;
    }

private:
    static void normalize_node(ConstraintNode& n) {
        if (n.id.empty()) throw Error("empty constraint node id");
        std::sort(n.label.begin(), n.label.end());
        n.label.erase(std::unique(n.label.begin(), n.label.end()), n.label.end());
        if (n.label.empty()) throw Error("constraint node '" + n.id + "' has empty label");
    }

    static const ConstraintNode* find_in(const std::vector<ConstraintNode>& part,
                                         const std::string& id) {
        for (const auto& n : part)
            if (n.id == id) return &n;
        return nullptr;
    }

    static int slot_count(const std::vector<ConstraintNode>& part) {
        int s = 0;
        for (const auto& n : part) s += static_cast<int>(n.label.size());
        return s;
    }

    static std::vector<const ConstraintNode*> sorted_nodes(const std::vector<ConstraintNode>& part) {
        std::vector<const ConstraintNode*> out;
        for (const auto& n : part) out.push_back(&n);
        std::sort(out.begin(), out.end(),
                  [](const ConstraintNode* x, const ConstraintNode* y) { return id_less(x->id, y->id); });
        return out;
    }

    std::string canonical_encoding_oriented() const;

    std::vector<ConstraintNode> part_a_, part_b_;
    std::set<std::pair<std::string, std::string>> edges_;
};

namespace detail {

inline std::string label_key(const std::vector<std::string>& label) {
    std::string s = "{";
    for (const auto& v : label) {
        s += v;
        s += ',';
    }
    s += '}';
    return s;
}

} // namespace detail

inline std::string GraphicalConstraint::canonical_encoding_oriented() const {
    // color refinement on (part, label, neighbour colors), then brute-force
    // minimization within the remaining color classes
    struct NodeRef {
        const ConstraintNode* n;
        bool in_a;
    };
    std::vector<NodeRef> nodes;
    for (const auto& n : part_a_) nodes.push_back({&n, true});
    for (const auto& n : part_b_) nodes.push_back({&n, false});
    const std::size_t total = nodes.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < total; ++i) index[nodes[i].n->id] = i;

    std::vector<std::string> color(total);
    for (std::size_t i = 0; i < total; ++i)
        color[i] = (nodes[i].in_a ? "A" : "B") + detail::label_key(nodes[i].n->label);
    for (std::size_t round = 0; round < total; ++round) {
        std::vector<std::string> next(total);
        for (std::size_t i = 0; i < total; ++i) {
            std::vector<std::string> nb;
            for (const auto& v : neighbors(nodes[i].n->id)) nb.push_back(color[index[v]]);
            std::sort(nb.begin(), nb.end());
            next[i] = color[i] + "(";
            for (auto& s : nb) next[i] += s + ";";
            next[i] += ")";
        }
        if (next == color) break;
        color = std::move(next);
    }

    // group nodes per part by color; orderings permute within groups only
    auto side_order = [&](bool want_a) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < total; ++i)
            if (nodes[i].in_a == want_a) idx.push_back(i);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            return color[x] < color[y];
        });
        return idx;
    };
    std::vector<std::size_t> order_a = side_order(true), order_b = side_order(false);

    auto encode = [&](const std::vector<std::size_t>& oa, const std::vector<std::size_t>& ob) {
        std::map<std::string, int> pos;
        std::string s = "A:";
        for (std::size_t k = 0; k < oa.size(); ++k) {
            pos[nodes[oa[k]].n->id] = static_cast<int>(k);
            s += detail::label_key(nodes[oa[k]].n->label);
        }
        s += "|B:";
        for (std::size_t k = 0; k < ob.size(); ++k) {
            pos[nodes[ob[k]].n->id] = static_cast<int>(k);
            s += detail::label_key(nodes[ob[k]].n->label);
        }
        std::set<std::pair<int, int>> es;
        for (const auto& [a, b] : edges_) es.insert({pos[a], pos[b]});
        s += "|E:";
        for (const auto& [a, b] : es) s += std::to_string(a) + "-" + std::to_string(b) + ";";
        return s;
    };

    // permute within equal-color runs of each side, minimizing the encoding
    auto color_runs = [&](const std::vector<std::size_t>& order) {
        std::vector<std::pair<std::size_t, std::size_t>> runs;
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j < order.size() && color[order[j]] == color[order[i]]) ++j;
            if (j - i > 1) runs.push_back({i, j});
            i = j;
        }
        return runs;
    };
    auto enumerate_orders = [&](const std::vector<std::size_t>& base,
                                const std::function<void(const std::vector<std::size_t>&)>& fn) {
        auto runs = color_runs(base);
        std::vector<std::size_t> ord = base;
        std::function<void(std::size_t)> rec = [&](std::size_t ri) {
            if (ri >= runs.size()) {
                fn(ord);
                return;
            }
            auto [lo, hi] = runs[ri];
            std::vector<std::size_t> run(ord.begin() + static_cast<std::ptrdiff_t>(lo),
                                         ord.begin() + static_cast<std::ptrdiff_t>(hi));
            std::sort(run.begin(), run.end());
            do {
                std::copy(run.begin(), run.end(), ord.begin() + static_cast<std::ptrdiff_t>(lo));
                rec(ri + 1);
            } while (std::next_permutation(run.begin(), run.end()));
        };
        rec(0);
    };

    std::string best = encode(order_a, order_b);
    enumerate_orders(order_a, [&](const std::vector<std::size_t>& oa) {
        enumerate_orders(order_b, [&](const std::vector<std::size_t>& ob) {
            std::string enc = encode(oa, ob);
            if (enc < best) best = enc;
        });
    });
    return best;
}

/// Symmetric matrix of exact rationals indexed by model variables.
class CovarianceMatrix {
public:
    CovarianceMatrix() = default;

    CovarianceMatrix(std::vector<std::string> vars, RatMatrix m)
        : vars_(std::move(vars)), m_(std::move(m)) {
        if (m_.rows() != vars_.size() || m_.cols() != vars_.size())
            throw Error("covariance shape mismatch");
        if (!m_.is_symmetric()) throw Error("covariance matrix not symmetric");
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (m_(i, i) <= 0) throw Error("covariance diagonal entry not positive");
    }

    const std::vector<std::string>& variables() const { return vars_; }
    const RatMatrix& matrix() const { return m_; }

    bool has(const std::string& v) const {
        return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
    }

    const Rat& at(const std::string& v, const std::string& w) const {
        return m_(index(v), index(w));
    }

    bool is_positive_definite() const { return algcon::is_positive_definite(m_); }

    /// Text format: header row of variable names, then the square matrix of
    /// rationals written as p/q (or plain integers), whitespace separated.
    std::string to_text() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < vars_.size(); ++i) out << (i ? " " : "") << vars_[i];
        out << '\n';
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            for (std::size_t j = 0; j < vars_.size(); ++j)
                out << (j ? " " : "") << m_(i, j).get_str();
            out << '\n';
        }
        return out.str();
    }

    static CovarianceMatrix parse(const std::string& text) {
        std::istringstream in(text);
        std::string header;
        while (std::getline(in, header)) {
            if (header.find_first_not_of(" \t\r") != std::string::npos) break;
        }
        std::istringstream hs(header);
        std::vector<std::string> vars;
        std::string v;
        while (hs >> v) vars.push_back(v);
        if (vars.empty()) throw Error("covariance file: empty header row");
        RatMatrix m(vars.size(), vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t j = 0; j < vars.size(); ++j) {
                std::string tok;
                if (!(in >> tok)) throw Error("covariance file: too few entries");
                m(i, j) = rat_parse(tok);
            }
        return CovarianceMatrix(std::move(vars), std::move(m));
    }

private:
    std::size_t index(const std::string& v) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) throw UnknownNodeError(v);
        return static_cast<std::size_t>(it - vars_.begin());
    }

    std::vector<std::string> vars_;
    RatMatrix m_;
};

/// Exact satisfaction test: the determinant of the compiled matrix,
/// instantiated at sigma, equals 0. No tolerance.
inline bool satisfies(const GraphicalConstraint& gc, const CovarianceMatrix& sigma) {
    for (const auto& v : gc.variables())
        if (!sigma.has(v)) throw UnknownNodeError(v);
    PatternMatrix m = gc.build_matrix();
    Rat d = det_at(m, [&](const std::string& v, const std::string& w) -> Rat {
        return sigma.at(v, w);
    });
    return d == 0;
}

/// Weight of a tree edge: how many matrix entries each determinant term
/// draws from the block of the edge's endpoints. Computed combinatorially as
/// the row-slot surplus of the component on the part-A side after deleting
/// the edge; a negative surplus means the determinant is identically zero.
inline int edge_weight(const GraphicalConstraint& gc,
                       const std::pair<std::string, std::string>& edge) {
    if (!gc.is_tree()) throw Error("edge_weight: constraint is not a tree");
    if (!gc.is_square()) throw Error("edge_weight: constraint is not square");
    std::string a = edge.first, b = edge.second;
    if (!gc.in_part_a(a)) std::swap(a, b);
    if (!gc.adjacent(a, b)) throw Error("edge_weight: no such edge");

    // component containing a after deleting {a,b}
    std::set<std::string> comp{a};
    std::vector<std::string> stack{a};
    while (!stack.empty()) {
        std::string u = stack.back();
        stack.pop_back();
        for (const auto& v : gc.neighbors(u)) {
            if (u == a && v == b) continue;
            if (v == a && u == b) continue;
            if (comp.insert(v).second) stack.push_back(v);
        }
    }
    int row_slots = 0, col_slots = 0;
    for (const auto& n : gc.part_a())
        if (comp.count(n.id)) row_slots += static_cast<int>(n.label.size());
    for (const auto& n : gc.part_b())
        if (comp.count(n.id)) col_slots += static_cast<int>(n.label.size());
    int w = row_slots - col_slots;
    if (w < 0)
        throw DegenerateConstraintError(
            "edge weight is negative; the represented determinant is identically zero");
    return w;
}

/// Degeneracy check: identically-zero determinant. Uses exact expansion when
/// the dimension allows, otherwise fingerprints at two independent seeds.
inline bool is_degenerate(const GraphicalConstraint& gc, int cap = kDefaultExpansionCap) {
    if (!gc.is_square()) throw Error("degeneracy check on non-square constraint");
    PatternMatrix m = gc.build_matrix();
    if (m.dim() <= cap) return det_expand(m, cap).is_zero();
    return fingerprint(m, 0x51ab5eedULL).is_zero() && fingerprint(m, 0xc0ffeeULL).is_zero();
}

/// Best-effort zig-zag rendering for human inspection; not a contract.
inline std::string render_zigzag(const GraphicalConstraint& gc) {
    std::ostringstream out;
    auto label_str = [](const ConstraintNode& n) {
        std::string s = n.id + "{";
        for (std::size_t i = 0; i < n.label.size(); ++i) s += (i ? "," : "") + n.label[i];
        return s + "}";
    };
    out << "part A: ";
    for (const auto& n : gc.part_a()) out << "  " << label_str(n);
    out << "\npart B: ";
    for (const auto& n : gc.part_b()) out << "  " << label_str(n);
    out << "\nedges:";
    for (const auto& [a, b] : gc.edges()) out << "  " << a << "--" << b;
    out << '\n';
    return out.str();
}

} // namespace algcon

#endif // ALGCON_CONSTRAINT_HPP
