#ifndef ALGCON_HTC_HPP
#define ALGCON_HTC_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/graph.hpp"

namespace algcon {

/// The family Y = (Y_v)_v of HTC-identifying sets together with a valid
/// identification order. Whenever y in Y_v is half-trek reachable from v,
/// y must precede v in the order, so that v's identification system can use
/// the already-identified column of Lambda for y.
struct IdentifyingFamily {
    std::map<std::string, std::vector<std::string>> sets; // each sorted
    std::vector<std::string> order;

    const std::vector<std::string>& set_for(const std::string& v) const {
        auto it = sets.find(v);
        if (it == sets.end()) throw UnknownNodeError(v);
        return it->second;
    }
};

namespace detail {

/// Max-flow decision for the half-trek system condition: a system of
/// half-treks from Y to pa(v) with no sided intersection exists iff the unit
/// flow below saturates all of pa(v). Left sides of half-treks are single
/// nodes, so only the right sides need vertex capacities.
inline bool half_trek_system_exists(const MixedGraph& g, int v, const std::vector<int>& ys) {
    const int n = g.size();
    const auto pa = g.parents(v);
    if (pa.empty()) return true;
    // network nodes: 0 = source, 1 = sink, 2+i = L(y_i),
    // 2+k+u = R_in(u), 2+k+n+u = R_out(u)
    const int k = static_cast<int>(ys.size());
    const int nodes = 2 + k + 2 * n;
    std::vector<std::vector<int>> cap(static_cast<std::size_t>(nodes),
                                      std::vector<int>(static_cast<std::size_t>(nodes), 0));
    auto L = [&](int i) { return 2 + i; };
    auto Rin = [&](int u) { return 2 + k + u; };
    auto Rout = [&](int u) { return 2 + k + n + u; };
    for (int i = 0; i < k; ++i) {
        cap[0][static_cast<std::size_t>(L(i))] = 1;
        int y = ys[static_cast<std::size_t>(i)];
        // start with a directed move (right side includes y itself)
        cap[static_cast<std::size_t>(L(i))][static_cast<std::size_t>(Rin(y))] = 1;
        // or enter through a bidirected first edge (right side skips y)
        for (int z : g.siblings(y))
            cap[static_cast<std::size_t>(L(i))][static_cast<std::size_t>(Rin(z))] = 1;
    }
    for (int u = 0; u < n; ++u) cap[static_cast<std::size_t>(Rin(u))][static_cast<std::size_t>(Rout(u))] = 1;
    for (const auto& [t, h] : g.directed())
        cap[static_cast<std::size_t>(Rout(t))][static_cast<std::size_t>(Rin(h))] = 1;
    for (int p : pa) cap[static_cast<std::size_t>(Rout(p))][1] = 1;

    int flow = 0;
    const int want = static_cast<int>(pa.size());
    while (flow < want) {
        // BFS augmenting path
        std::vector<int> prev(static_cast<std::size_t>(nodes), -1);
        std::vector<int> queue{0};
        prev[0] = 0;
        for (std::size_t qi = 0; qi < queue.size() && prev[1] == -1; ++qi) {
            int u = queue[qi];
            for (int w = 0; w < nodes; ++w)
                if (prev[static_cast<std::size_t>(w)] == -1 &&
                    cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] > 0) {
                    prev[static_cast<std::size_t>(w)] = u;
                    queue.push_back(w);
                }
        }
        if (prev[1] == -1) break;
        for (int w = 1; w != 0; w = prev[static_cast<std::size_t>(w)]) {
            int u = prev[static_cast<std::size_t>(w)];
            --cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)];
            ++cap[static_cast<std::size_t>(w)][static_cast<std::size_t>(u)];
        }
        ++flow;
    }
    return flow == want;
}

} // namespace detail

/// Admissibility of a single candidate set Y for node v: correct size,
/// avoids v and its bidirected siblings, and the half-trek system condition
/// holds.
inline bool htc_set_admissible(const MixedGraph& g, int v, const std::vector<int>& ys) {
    auto pa = g.parents(v);
    if (ys.size() != pa.size()) return false;
    auto sib = g.siblings(v);
    for (int y : ys) {
        if (y == v) return false;
        if (std::binary_search(sib.begin(), sib.end(), y)) return false;
    }
    std::set<int> uniq(ys.begin(), ys.end());
    if (uniq.size() != ys.size()) return false;
    return detail::half_trek_system_exists(g, v, ys);
}

inline bool htc_set_admissible(const MixedGraph& g, const std::string& v,
                               const std::vector<std::string>& ys) {
    std::vector<int> idx;
    for (const auto& y : ys) idx.push_back(g.index_of(y));
    return htc_set_admissible(g, g.index_of(v), idx);
}

/// Checks all four family invariants. Throws when the family's keys do not
/// match the graph's node set; plain violations return false.
inline bool validate_family(const MixedGraph& g, const IdentifyingFamily& fam) {
    if (fam.sets.size() != static_cast<std::size_t>(g.size()))
        throw Error("family keys do not match graph nodes");
    for (const auto& n : g.nodes())
        if (!fam.sets.count(n)) throw Error("family missing set for node '" + n + "'");
    if (fam.order.size() != static_cast<std::size_t>(g.size()))
        throw Error("identification order must list every node exactly once");
    {
        std::set<std::string> o(fam.order.begin(), fam.order.end());
        if (o.size() != fam.order.size()) throw Error("identification order has duplicates");
        for (const auto& n : fam.order)
            if (!g.has_node(n)) throw UnknownNodeError(n);
    }
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < fam.order.size(); ++i) pos[fam.order[i]] = i;

    for (const auto& [v, ys] : fam.sets) {
        int vi = g.index_of(v);
        std::vector<int> yidx;
        for (const auto& y : ys) yidx.push_back(g.index_of(y));
        if (!htc_set_admissible(g, vi, yidx)) return false;
        auto htr = g.half_trek_mask(vi);
        for (const auto& y : ys)
            if (htr[static_cast<std::size_t>(g.index_of(y))] && pos[y] >= pos[v]) return false;
    }
    return true;
}

namespace detail {

/// Candidate Y sets for one node in deterministic (lexicographic) order:
/// pa(v) first when admissible, then all other admissible subsets.
inline std::vector<std::vector<int>> admissible_sets(const MixedGraph& g, int v,
                                                     std::size_t cap = 256) {
    const auto pa = g.parents(v);
    std::vector<std::vector<int>> out;
    if (pa.empty()) {
        out.push_back({});
        return out;
    }
    std::vector<int> allowed;
    auto sib = g.siblings(v);
    for (int u = 0; u < g.size(); ++u) {
        if (u == v) continue;
        if (std::binary_search(sib.begin(), sib.end(), u)) continue;
        allowed.push_back(u);
    }
    const std::size_t want = pa.size();
    if (allowed.size() < want) return out;
    std::vector<int> idx(want);
    for (std::size_t i = 0; i < want; ++i) idx[i] = static_cast<int>(i);
    bool pa_admissible = htc_set_admissible(g, v, pa);
    if (pa_admissible) out.push_back(pa);
    for (;;) {
        std::vector<int> ys;
        for (std::size_t i = 0; i < want; ++i) ys.push_back(allowed[static_cast<std::size_t>(idx[i])]);
        if (!(pa_admissible && ys == pa) && htc_set_admissible(g, v, ys)) out.push_back(ys);
        if (out.size() >= cap) break;
        // next combination
        int i = static_cast<int>(want) - 1;
        while (i >= 0 &&
               idx[static_cast<std::size_t>(i)] ==
                   static_cast<int>(allowed.size() - want) + i)
            --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < want; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return out;
}

} // namespace detail

/// Greedy search for an identifying family. Nodes become solvable once all
/// their htr-dependencies are already solved; the monotone fixpoint finds a
/// family whenever one exists. Prefers Y_v = pa(v), then the lexicographic
/// smallest admissible set whose dependencies are met.
inline std::optional<IdentifyingFamily> find_identifying_family(const MixedGraph& g) {
    const int n = g.size();
    std::vector<bool> solved(static_cast<std::size_t>(n), false);
    IdentifyingFamily fam;
    int done = 0;
    while (done < n) {
        bool progress = false;
        for (int v = 0; v < n && !progress; ++v) {
            if (solved[static_cast<std::size_t>(v)]) continue;
            auto htr = g.half_trek_mask(v);
            auto deps_met = [&](const std::vector<int>& ys) {
                for (int y : ys)
                    if (htr[static_cast<std::size_t>(y)] && !solved[static_cast<std::size_t>(y)])
                        return false;
                return true;
            };
            for (const auto& ys : detail::admissible_sets(g, v)) {
                if (!deps_met(ys)) continue;
                std::vector<std::string> names;
                for (int y : ys) names.push_back(g.name(y));
                std::sort(names.begin(), names.end());
                fam.sets[g.name(v)] = std::move(names);
                fam.order.push_back(g.name(v));
                solved[static_cast<std::size_t>(v)] = true;
                ++done;
                progress = true;
                break;
            }
        }
        if (!progress) return std::nullopt;
    }
    return fam;
}

/// All distinct valid families in deterministic order, at most `limit`.
/// Per-node candidate sets are capped (the limit parameter is the contract;
/// the cap guards against combinatorial explosion at larger n).
inline std::vector<IdentifyingFamily> enumerate_identifying_families(const MixedGraph& g,
                                                                     std::size_t limit) {
    if (limit < 1) throw Error("enumerate_identifying_families: limit must be >= 1");
    const int n = g.size();
    std::vector<std::vector<std::vector<int>>> cand;
    for (int v = 0; v < n; ++v) {
        cand.push_back(detail::admissible_sets(g, v));
        if (cand.back().empty()) return {};
    }
    std::vector<IdentifyingFamily> out;
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    for (;;) {
        // dependency digraph: y -> v when y in Y_v and y in htr(v)
        std::vector<std::vector<int>> deps(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) {
            auto htr = g.half_trek_mask(v);
            for (int y : cand[static_cast<std::size_t>(v)][pick[static_cast<std::size_t>(v)]])
                if (htr[static_cast<std::size_t>(y)]) deps[static_cast<std::size_t>(v)].push_back(y);
        }
        // greedy smallest-first topological order
        std::vector<bool> placed(static_cast<std::size_t>(n), false);
        std::vector<std::string> order;
        for (int step = 0; step < n; ++step) {
            int chosen = -1;
            for (int v = 0; v < n; ++v) {
                if (placed[static_cast<std::size_t>(v)]) continue;
                bool ok = true;
                for (int y : deps[static_cast<std::size_t>(v)])
                    if (!placed[static_cast<std::size_t>(y)]) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    chosen = v;
                    break;
                }
            }
            if (chosen < 0) break;
            placed[static_cast<std::size_t>(chosen)] = true;
            order.push_back(g.name(chosen));
        }
        if (order.size() == static_cast<std::size_t>(n)) {
            IdentifyingFamily fam;
            fam.order = std::move(order);
            for (int v = 0; v < n; ++v) {
                std::vector<std::string> names;
                for (int y : cand[static_cast<std::size_t>(v)][pick[static_cast<std::size_t>(v)]])
                    names.push_back(g.name(y));
                std::sort(names.begin(), names.end());
                fam.sets[g.name(v)] = std::move(names);
            }
            out.push_back(std::move(fam));
            if (out.size() >= limit) return out;
        }
        // odometer
        int v = n - 1;
        while (v >= 0 && pick[static_cast<std::size_t>(v)] + 1 >= cand[static_cast<std::size_t>(v)].size()) {
            pick[static_cast<std::size_t>(v)] = 0;
            --v;
        }
        if (v < 0) break;
        ++pick[static_cast<std::size_t>(v)];
    }
    return out;
}

/// The constraint-bearing pairs: v != w with no bidirected edge, v not in
/// Y_w and w not in Y_v. Sorted.
inline std::vector<std::pair<std::string, std::string>> constraint_pairs(
    const MixedGraph& g, const IdentifyingFamily& fam) {
    if (!validate_family(g, fam)) throw Error("constraint_pairs: family is not valid");
    std::vector<std::pair<std::string, std::string>> out;
    const auto& ns = g.nodes();
    for (std::size_t i = 0; i < ns.size(); ++i)
        for (std::size_t j = i + 1; j < ns.size(); ++j) {
            const std::string& v = ns[i];
            const std::string& w = ns[j];
            if (g.has_bidirected(g.index_of(v), g.index_of(w))) continue;
            const auto& yw = fam.set_for(w);
            const auto& yv = fam.set_for(v);
            if (std::binary_search(yw.begin(), yw.end(), v)) continue;
            if (std::binary_search(yv.begin(), yv.end(), w)) continue;
            out.push_back({v, w});
        }
    return out;
}

} // namespace algcon

#endif // ALGCON_HTC_HPP
