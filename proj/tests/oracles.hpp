// Independent test oracles: deliberately naive re-implementations used to
// cross-check the library's faster paths. Nothing here may call the code
// path it checks.
#ifndef ALGCON_TEST_ORACLES_HPP
#define ALGCON_TEST_ORACLES_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "algcon/graph.hpp"
#include "algcon/htc.hpp"
#include "algcon/poly.hpp"
#include "algcon/prng.hpp"

namespace oracles {

using namespace algcon;

/// Recursive cofactor expansion along the first row; no memoization.
inline Polynomial cofactor_det(const PatternMatrix& m, std::vector<int> rows,
                               std::vector<int> cols) {
    if (rows.empty()) return Polynomial::constant(1);
    Polynomial acc;
    int r = rows.front();
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& e = m.entry[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols[j])];
        if (!e) continue;
        std::vector<int> sub_cols;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (k != j) sub_cols.push_back(cols[k]);
        Polynomial minor = cofactor_det(m, sub_rows, sub_cols);
        Rat sign = (j % 2 == 0) ? 1 : -1;
        acc += minor * Polynomial::variable(*e) * sign;
    }
    return acc;
}

inline Polynomial cofactor_det(const PatternMatrix& m) {
    std::vector<int> rows, cols;
    for (int i = 0; i < m.dim(); ++i) {
        rows.push_back(i);
        cols.push_back(i);
    }
    return cofactor_det(m, rows, cols);
}

/// Walks every permutation with a nonzero product and counts, per term, the
/// entries drawn from the block rows(node a) x cols(node b). Returns the
/// common count, or -1 when the terms disagree, or -2 when the determinant
/// has no nonzero term.
inline int permutation_block_weight(const PatternMatrix& m, const std::string& a_node,
                                    const std::string& b_node) {
    const int n = m.dim();
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    int common = -2;
    do {
        bool nonzero = true;
        int in_block = 0;
        for (int i = 0; i < n && nonzero; ++i) {
            const auto& e = m.entry[static_cast<std::size_t>(i)]
                                   [static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
            if (!e) {
                nonzero = false;
                break;
            }
            if (m.rows[static_cast<std::size_t>(i)].first == a_node &&
                m.cols[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])].first == b_node)
                ++in_block;
        }
        if (!nonzero) continue;
        if (common == -2)
            common = in_block;
        else if (common != in_block)
            return -1;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return common;
}

/// Generate-and-filter graph enumeration: all slot bitmasks of the right
/// popcount, then the flag filters.
inline std::vector<MixedGraph> naive_enumerate(int n, int m, const EnumOptions& opts) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    struct Slot {
        bool bi;
        int a, b;
    };
    std::vector<Slot> slots;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) slots.push_back({false, a, b});
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) slots.push_back({true, a, b});
    std::vector<MixedGraph> out;
    const std::size_t s = slots.size();
    for (std::uint64_t mask = 0; mask < (1ULL << s); ++mask) {
        if (__builtin_popcountll(mask) != m) continue;
        MixedGraph g{std::vector<std::string>(names)};
        for (std::size_t i = 0; i < s; ++i) {
            if (!(mask & (1ULL << i))) continue;
            if (slots[i].bi)
                g.add_bidirected(slots[i].a, slots[i].b);
            else
                g.add_directed(slots[i].a, slots[i].b);
        }
        if (!opts.allow_bows && !g.is_bow_free()) continue;
        if (!opts.allow_cycles && !g.is_acyclic()) continue;
        out.push_back(std::move(g));
    }
    return out;
}

/// A half-trek as an explicit node sequence with its sides.
struct Trek {
    std::vector<int> right; // right side nodes (includes the target)
    int left;               // the source (left side is always the singleton)
};

/// All simple half-treks from y to target (directed paths from y, or a
/// bidirected step then a directed path; the trivial trek when y == target).
inline std::vector<Trek> all_half_treks(const MixedGraph& g, int y, int target) {
    std::vector<Trek> out;
    if (y == target) out.push_back({{y}, y}); // trivial trek; right side {y}
    // directed paths starting at y: right side includes y
    std::vector<std::vector<int>> stack;
    stack.push_back({y});
    while (!stack.empty()) {
        auto path = stack.back();
        stack.pop_back();
        int last = path.back();
        for (int c : g.children(last)) {
            if (std::find(path.begin(), path.end(), c) != path.end()) continue;
            auto np = path;
            np.push_back(c);
            if (c == target) out.push_back({np, y});
            stack.push_back(np);
        }
    }
    // bidirected first step: right side starts at the sibling
    for (int z : g.siblings(y)) {
        if (z == target) out.push_back({{z}, y});
        std::vector<std::vector<int>> st;
        st.push_back({z});
        while (!st.empty()) {
            auto path = st.back();
            st.pop_back();
            int last = path.back();
            for (int c : g.children(last)) {
                if (std::find(path.begin(), path.end(), c) != path.end()) continue;
                auto np = path;
                np.push_back(c);
                if (c == target) out.push_back({np, y});
                st.push_back(np);
            }
        }
    }
    return out;
}

/// Brute-force check of the half-trek system condition: pick one half-trek
/// from each y to a distinct parent so that left sides and right sides are
/// pairwise disjoint. Exponential; independent of the max-flow encoding.
inline bool brute_force_system(const MixedGraph& g, int v, const std::vector<int>& ys) {
    auto pa = g.parents(v);
    if (ys.size() != pa.size()) return false;
    if (pa.empty()) return true;
    // treks[i][j]: half-treks from ys[i] to pa[j]
    std::vector<std::vector<std::vector<Trek>>> treks(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        treks[i].resize(pa.size());
        for (std::size_t j = 0; j < pa.size(); ++j)
            treks[i][j] = all_half_treks(g, ys[i], pa[j]);
    }
    std::vector<bool> used_parent(pa.size(), false);
    std::set<int> used_right;
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == ys.size()) return true;
        for (std::size_t j = 0; j < pa.size(); ++j) {
            if (used_parent[j]) continue;
            for (const auto& t : treks[i][j]) {
                bool clash = false;
                for (int u : t.right)
                    if (used_right.count(u)) {
                        clash = true;
                        break;
                    }
                if (clash) continue;
                used_parent[j] = true;
                for (int u : t.right) used_right.insert(u);
                if (rec(i + 1)) return true;
                used_parent[j] = false;
                for (int u : t.right) used_right.erase(u);
            }
        }
        return false;
    };
    return rec(0);
}

/// Exhaustive identifying-family search with the brute-force system check:
/// every assignment of candidate sets and every processing order. Viable
/// only for tiny n; used to certify non-identifiability witnesses.
inline bool any_family_exists_brute_force(const MixedGraph& g) {
    const int n = g.size();
    std::vector<std::vector<std::vector<int>>> cands(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        auto pa = g.parents(v);
        auto sib = g.siblings(v);
        std::vector<int> allowed;
        for (int u = 0; u < n; ++u) {
            if (u == v) continue;
            if (std::binary_search(sib.begin(), sib.end(), u)) continue;
            allowed.push_back(u);
        }
        // all subsets of `allowed` of size |pa|
        const std::size_t want = pa.size();
        std::function<void(std::size_t, std::vector<int>&)> rec = [&](std::size_t start,
                                                                      std::vector<int>& cur) {
            if (cur.size() == want) {
                if (brute_force_system(g, v, cur)) cands[static_cast<std::size_t>(v)].push_back(cur);
                return;
            }
            for (std::size_t i = start; i < allowed.size(); ++i) {
                cur.push_back(allowed[i]);
                rec(i + 1, cur);
                cur.pop_back();
            }
        };
        std::vector<int> cur;
        rec(0, cur);
        if (cands[static_cast<std::size_t>(v)].empty()) return false;
    }
    // some combination must admit an order: y in Y_v and htr-reachable => y before v
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    for (;;) {
        std::vector<std::vector<int>> deps(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) {
            auto htr = g.half_trek_mask(v);
            for (int y : cands[static_cast<std::size_t>(v)][pick[static_cast<std::size_t>(v)]])
                if (htr[static_cast<std::size_t>(y)]) deps[static_cast<std::size_t>(v)].push_back(y);
        }
        std::vector<bool> placed(static_cast<std::size_t>(n), false);
        int placed_count = 0;
        bool progress = true;
        while (progress) {
            progress = false;
            for (int v = 0; v < n; ++v) {
                if (placed[static_cast<std::size_t>(v)]) continue;
                bool ok = true;
                for (int y : deps[static_cast<std::size_t>(v)])
                    if (!placed[static_cast<std::size_t>(y)]) ok = false;
                if (ok) {
                    placed[static_cast<std::size_t>(v)] = true;
                    ++placed_count;
                    progress = true;
                }
            }
        }
        if (placed_count == n) return true;
        int v = n - 1;
        while (v >= 0 &&
               pick[static_cast<std::size_t>(v)] + 1 >= cands[static_cast<std::size_t>(v)].size()) {
            pick[static_cast<std::size_t>(v)] = 0;
            --v;
        }
        if (v < 0) return false;
        ++pick[static_cast<std::size_t>(v)];
    }
}

/// Random small polynomial over the given variables.
inline Polynomial random_polynomial(SplitMix64& rng, const std::vector<std::string>& vars,
                                    int max_terms, int max_deg) {
    Polynomial p;
    int terms = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_terms)));
    for (int t = 0; t < terms; ++t) {
        Monomial m;
        int deg = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_deg + 1)));
        for (int d = 0; d < deg; ++d) {
            const std::string& x = vars[rng.next_below(vars.size())];
            const std::string& y = vars[rng.next_below(vars.size())];
            m.push_back(SigmaVar::make(x, y));
        }
        Rat c(static_cast<long>(rng.next_in(-5, 5)), 1 + static_cast<long>(rng.next_below(4)));
        c.canonicalize();
        p.add_term(std::move(m), c);
    }
    return p;
}

} // namespace oracles

#endif // ALGCON_TEST_ORACLES_HPP
