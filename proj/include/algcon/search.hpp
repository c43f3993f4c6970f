#ifndef ALGCON_SEARCH_HPP
#define ALGCON_SEARCH_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/constraint.hpp"
#include "algcon/fingerprint.hpp"
#include "algcon/poly.hpp"

namespace algcon {

/// Search bounds. The matrix dimension (slot count per part) drives the
/// cost; nodes per part are capped separately so the structure space stays
/// enumerable. Completeness claims are always relative to these bounds.
struct SearchBounds {
    int max_nodes = 4; // per part
    int max_slots = 6; // matrix dimension
    bool trees_only = false;
};

namespace detail {

/// Connected bipartite edge structures on (p, q) nodes, every node with
/// degree >= 1, canonical under row/column permutations. Bit (i*q + j) is
/// the edge between A-node i and B-node j.
inline const std::vector<std::uint32_t>& bipartite_structures(int p, int q) {
    if (p * q > 16)
        throw Error("search bounds: structure space for " + std::to_string(p) + "x" +
                    std::to_string(q) + " parts is above the enumerable budget (4x4)");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<std::uint32_t>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, q});
    if (it != cache.end()) return it->second;

    std::vector<int> perm_a(static_cast<std::size_t>(p)), perm_b(static_cast<std::size_t>(q));
    std::vector<std::uint32_t> out;
    const std::uint32_t total = 1u << (p * q);
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        // degrees >= 1
        bool ok = true;
        for (int i = 0; i < p && ok; ++i) {
            std::uint32_t row = (mask >> (i * q)) & ((1u << q) - 1);
            if (row == 0) ok = false;
        }
        for (int j = 0; j < q && ok; ++j) {
            bool any = false;
            for (int i = 0; i < p; ++i)
                if (mask & (1u << (i * q + j))) {
                    any = true;
                    break;
                }
            if (!any) ok = false;
        }
        if (!ok) continue;
        // connectivity over p + q nodes
        {
            std::uint32_t seen_a = 1, seen_b = 0;
            bool grew = true;
            while (grew) {
                grew = false;
                for (int i = 0; i < p; ++i) {
                    if (!(seen_a & (1u << i))) continue;
                    for (int j = 0; j < q; ++j)
                        if ((mask & (1u << (i * q + j))) && !(seen_b & (1u << j))) {
                            seen_b |= 1u << j;
                            grew = true;
                        }
                }
                for (int j = 0; j < q; ++j) {
                    if (!(seen_b & (1u << j))) continue;
                    for (int i = 0; i < p; ++i)
                        if ((mask & (1u << (i * q + j))) && !(seen_a & (1u << i))) {
                            seen_a |= 1u << i;
                            grew = true;
                        }
                }
            }
            if (seen_a != (1u << p) - 1 || seen_b != (1u << q) - 1) continue;
        }
        // canonical under permutations of each side
        std::uint32_t best = mask;
        for (int i = 0; i < p; ++i) perm_a[static_cast<std::size_t>(i)] = i;
        bool is_canon = true;
        do {
            for (int j = 0; j < q; ++j) perm_b[static_cast<std::size_t>(j)] = j;
            do {
                std::uint32_t m2 = 0;
                for (int i = 0; i < p && m2 <= best; ++i)
                    for (int j = 0; j < q; ++j)
                        if (mask & (1u << (perm_a[static_cast<std::size_t>(i)] * q +
                                           perm_b[static_cast<std::size_t>(j)])))
                            m2 |= 1u << (i * q + j);
                if (m2 < best) {
                    is_canon = false;
                    break;
                }
            } while (std::next_permutation(perm_b.begin(), perm_b.end()));
            if (!is_canon) break;
        } while (std::next_permutation(perm_a.begin(), perm_a.end()));
        if (is_canon) out.push_back(mask);
    }
    return cache.emplace(std::make_pair(p, q), std::move(out)).first->second;
}

inline int popcount32(std::uint32_t x) { return __builtin_popcount(x); }

/// All sequences of `count` nonempty variable subsets with slot total k,
/// optionally restricted to a per-variable slot budget.
inline void enumerate_label_assignments(
    const std::vector<std::vector<std::string>>& subsets, int count, int k,
    const std::map<std::string, int>* budget,
    const std::function<void(const std::vector<int>&)>& emit) {
    std::vector<int> choice(static_cast<std::size_t>(count), -1);
    std::map<std::string, int> used;
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == count) {
            if (remaining == 0) emit(choice);
            return;
        }
        int min_left = count - pos - 1; // each later node needs >= 1 slot
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            int sz = static_cast<int>(subsets[si].size());
            if (sz > remaining - min_left) continue;
            if (budget) {
                bool fits = true;
                for (const auto& v : subsets[si]) {
                    auto it = budget->find(v);
                    if (it == budget->end() || used[v] + 1 > it->second) {
                        fits = false;
                        break;
                    }
                }
                if (!fits) continue;
                for (const auto& v : subsets[si]) ++used[v];
            }
            choice[static_cast<std::size_t>(pos)] = static_cast<int>(si);
            rec(pos + 1, remaining - sz);
            if (budget)
                for (const auto& v : subsets[si]) --used[v];
        }
    };
    rec(0, k);
}

inline std::vector<std::vector<std::string>> nonempty_subsets(std::vector<std::string> vars,
                                                              int max_size) {
    std::sort(vars.begin(), vars.end());
    std::vector<std::vector<std::string>> out;
    const std::size_t n = vars.size();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (popcount32(mask) > max_size) continue;
        std::vector<std::string> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(vars[i]);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

} // namespace detail

/// Streams every normal-form, square, connected bipartite constraint over
/// `vars` within the bounds, once per isomorphism class (node renaming and
/// part swap), trees first and non-trees second. Deterministic order.
/// `row_budget`/`col_budget`, when given, restrict per-variable slot counts
/// on each side (used to prune target-driven searches by V-homogeneity).
inline void enumerate_candidates(const std::vector<std::string>& vars, const SearchBounds& bounds,
                                 const std::function<void(const GraphicalConstraint&)>& emit,
                                 const std::map<std::string, int>* row_budget = nullptr,
                                 const std::map<std::string, int>* col_budget = nullptr) {
    if (bounds.max_nodes < 1 || bounds.max_slots < 1) throw Error("search bounds must be positive");
    if (bounds.max_nodes > 4)
        throw Error("search bounds: more than 4 nodes per part is above the enumerable budget");
    auto subsets = detail::nonempty_subsets(vars, bounds.max_slots);
    std::set<std::string> seen;

    auto run_pass = [&](bool want_trees) {
        for (int k = 1; k <= bounds.max_slots; ++k) {
            for (int p = 1; p <= std::min(bounds.max_nodes, k); ++p) {
                for (int q = 1; q <= std::min(bounds.max_nodes, k); ++q) {
                    for (std::uint32_t mask : detail::bipartite_structures(p, q)) {
                        bool is_tree = detail::popcount32(mask) == p + q - 1;
                        if (is_tree != want_trees) continue;
                        // collect row assignments first; skip structure when none
                        std::vector<std::vector<int>> rows;
                        detail::enumerate_label_assignments(
                            subsets, p, k, row_budget,
                            [&](const std::vector<int>& c) { rows.push_back(c); });
                        if (rows.empty()) continue;
                        std::vector<std::vector<int>> cols;
                        detail::enumerate_label_assignments(
                            subsets, q, k, col_budget,
                            [&](const std::vector<int>& c) { cols.push_back(c); });
                        for (const auto& ra : rows)
                            for (const auto& ca : cols) {
                                std::vector<ConstraintNode> pa, pb;
                                for (int i = 0; i < p; ++i)
                                    pa.push_back({"a" + std::to_string(i + 1),
                                                  subsets[static_cast<std::size_t>(
                                                      ra[static_cast<std::size_t>(i)])]});
                                for (int j = 0; j < q; ++j)
                                    pb.push_back({"b" + std::to_string(j + 1),
                                                  subsets[static_cast<std::size_t>(
                                                      ca[static_cast<std::size_t>(j)])]});
                                std::vector<std::pair<std::string, std::string>> edges;
                                for (int i = 0; i < p; ++i)
                                    for (int j = 0; j < q; ++j)
                                        if (mask & (1u << (i * q + j)))
                                            edges.push_back({pa[static_cast<std::size_t>(i)].id,
                                                             pb[static_cast<std::size_t>(j)].id});
                                GraphicalConstraint gc(pa, pb, edges);
                                if (!gc.is_normal_form()) continue;
                                std::string key = gc.canonical_encoding();
                                if (!seen.insert(std::move(key)).second) continue;
                                emit(gc);
                            }
                    }
                }
            }
        }
    };
    run_pass(true);
    if (!bounds.trees_only) run_pass(false);
}

enum class MatchMode { exact, up_to_scalar };

inline constexpr std::uint64_t kSearchSeed1 = 0x6a11e7c0de5ULL;
inline constexpr std::uint64_t kSearchSeed2 = 0x8e4d00b1e55ULL;

/// Fingerprint comparison for one candidate against the target at a given
/// seed; `exact` means equal up to sign (constraints carry no sign).
inline bool fingerprints_match(const Fingerprint& cand, const Fingerprint& target,
                               MatchMode mode) {
    return mode == MatchMode::exact ? equal_up_to_sign(cand, target)
                                    : equal_up_to_scalar(cand, target);
}

/// Brute-force search for graphical forms of a target polynomial. Matches
/// are confirmed at a second independent fingerprint seed before being
/// reported; identically-zero candidates are skipped. Any match's slot
/// counts must reproduce the target's V-homogeneity signature, so the
/// enumeration only walks assignments consistent with it.
inline std::vector<GraphicalConstraint> match_target(const Polynomial& target,
                                                     const std::vector<std::string>& vars,
                                                     const SearchBounds& bounds,
                                                     MatchMode mode = MatchMode::exact) {
    if (target.is_zero()) throw Error("match_target: zero target");
    Fingerprint t1 = fingerprint(target, kSearchSeed1);
    Fingerprint t2 = fingerprint(target, kSearchSeed2);

    // per-variable slot budget: rows_v + cols_v = signature_v, so each side
    // is bounded by the signature itself
    std::map<std::string, int> budget;
    bool homogeneous = target.is_v_homogeneous();
    if (homogeneous)
        for (const auto& [v, c] : target.homogeneity_signature()) budget[v] = c;

    std::vector<GraphicalConstraint> out;
    enumerate_candidates(
        vars, bounds,
        [&](const GraphicalConstraint& gc) {
            if (homogeneous) {
                // exact signature check: row slots + col slots per variable
                std::map<std::string, int> counts;
                for (const auto& n : gc.part_a())
                    for (const auto& v : n.label) ++counts[v];
                for (const auto& n : gc.part_b())
                    for (const auto& v : n.label) ++counts[v];
                for (const auto& [v, c] : budget) {
                    auto it = counts.find(v);
                    if ((it == counts.end() ? 0 : it->second) != c) return;
                }
                for (const auto& [v, c] : counts) {
                    (void)c;
                    if (!budget.count(v)) return;
                }
            }
            PatternMatrix m = gc.build_matrix();
            Fingerprint f1 = fingerprint(m, kSearchSeed1);
            if (f1.is_zero()) return; // identically-zero determinant
            if (!fingerprints_match(f1, t1, mode)) return;
            Fingerprint f2 = fingerprint(m, kSearchSeed2);
            if (f2.is_zero() || !fingerprints_match(f2, t2, mode)) return;
            out.push_back(gc);
        },
        homogeneous ? &budget : nullptr, homogeneous ? &budget : nullptr);
    return out;
}

/// Single-fingerprint variant (no second-seed confirmation possible when
/// only one evaluation vector is known).
inline std::vector<GraphicalConstraint> match_target(const Fingerprint& target,
                                                     const std::vector<std::string>& vars,
                                                     const SearchBounds& bounds,
                                                     MatchMode mode = MatchMode::exact) {
    std::vector<GraphicalConstraint> out;
    enumerate_candidates(vars, bounds, [&](const GraphicalConstraint& gc) {
        PatternMatrix m = gc.build_matrix();
        Fingerprint f = fingerprint(m, target.seed, static_cast<int>(target.values.size()));
        if (f.is_zero()) return;
        if (fingerprints_match(f, target, mode)) out.push_back(gc);
    });
    return out;
}

/// Candidates whose determinant vanishes exactly on every supplied
/// covariance sample, smallest matrix dimension first. Supports censuses
/// over graphs with no HTC-identifiable members, where no target polynomial
/// is available. Stops after max_results matches of the minimal dimension.
template <typename SigmaAt>
std::vector<GraphicalConstraint> find_vanishing_constraints(
    const std::vector<std::string>& vars, const SearchBounds& bounds, std::size_t sample_count,
    SigmaAt&& sigma_at, std::size_t max_results = 4) {
    std::vector<GraphicalConstraint> out;
    int found_dim = -1;
    enumerate_candidates(vars, bounds, [&](const GraphicalConstraint& gc) {
        if (!out.empty() && gc.slots_a() > found_dim) return;
        PatternMatrix m = gc.build_matrix();
        if (fingerprint(m, kSearchSeed1).is_zero() && fingerprint(m, kSearchSeed2).is_zero())
            return; // identically zero
        for (std::size_t s = 0; s < sample_count; ++s) {
            Rat d = det_at(m, [&](const std::string& v, const std::string& w) -> Rat {
                return sigma_at(s, v, w);
            });
            if (d != 0) return;
        }
        if (out.size() < max_results || gc.slots_a() < found_dim) {
            if (found_dim < 0 || gc.slots_a() < found_dim) found_dim = gc.slots_a();
            out.push_back(gc);
        }
    });
    return out;
}

} // namespace algcon

#endif // ALGCON_SEARCH_HPP
