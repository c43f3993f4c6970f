#ifndef ALGCON_CLASSIFY_HPP
#define ALGCON_CLASSIFY_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/constraint.hpp"
#include "algcon/construct.hpp"
#include "algcon/poly.hpp"

namespace algcon {

/// Two-node constraint whose matrix is the principal submatrix of Sigma on
/// `vars`; its determinant is the principal minor.
inline GraphicalConstraint principal_minor_constraint(const std::vector<std::string>& vars) {
    if (vars.empty()) throw Error("principal minor of empty variable set");
    return GraphicalConstraint({{"m1", vars}}, {{"m2", vars}}, {{"m1", "m2"}});
}

/// Expanded principal minor det(Sigma_{vars,vars}).
inline Polynomial principal_minor_poly(const std::vector<std::string>& vars,
                                       int cap = kDefaultExpansionCap) {
    if (static_cast<int>(vars.size()) > cap)
        throw ExpansionCapError(static_cast<int>(vars.size()), cap);
    return det_expand(principal_minor_constraint(vars).build_matrix(), cap);
}

struct PeelResult {
    Polynomial core;
    std::vector<std::pair<std::vector<std::string>, int>> peeled; // (minor vars, multiplicity)
};

/// Divides out every principal minor of Sigma over `vars` as often as it
/// exactly divides, until none does. Returns the residual core and the peel
/// log; core times the peeled minors reproduces the input exactly.
inline PeelResult peel_principal_minors(const Polynomial& p, const std::vector<std::string>& vars,
                                        int cap = kDefaultExpansionCap) {
    if (p.is_zero()) throw Error("peel_principal_minors: zero polynomial");
    // nonempty subsets, smallest first, lexicographic within a size
    std::vector<std::vector<std::string>> subsets;
    const std::size_t n = vars.size();
    std::vector<std::string> sorted_vars = vars;
    std::sort(sorted_vars.begin(), sorted_vars.end());
    for (std::size_t sz = 1; sz <= n && static_cast<int>(sz) <= cap; ++sz) {
        std::vector<std::size_t> idx(sz);
        for (std::size_t i = 0; i < sz; ++i) idx[i] = i;
        for (;;) {
            std::vector<std::string> s;
            for (auto i : idx) s.push_back(sorted_vars[i]);
            subsets.push_back(std::move(s));
            int i = static_cast<int>(sz) - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - sz + static_cast<std::size_t>(i)) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (std::size_t j = static_cast<std::size_t>(i) + 1; j < sz; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }
    PeelResult res;
    res.core = p;
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& s : subsets) {
            if (res.core.is_constant()) break;
            Polynomial minor = principal_minor_poly(s, cap);
            int mult = 0;
            for (;;) {
                auto q = res.core.divide_exact(minor);
                if (!q) break;
                res.core = std::move(*q);
                ++mult;
                progress = true;
            }
            if (mult > 0) {
                bool merged = false;
                for (auto& [vs, m] : res.peeled)
                    if (vs == s) {
                        m += mult;
                        merged = true;
                        break;
                    }
                if (!merged) res.peeled.push_back({s, mult});
            }
        }
    }
    return res;
}

enum class PdVerdict { certified, refuted_by_residual, unknown };

inline const char* to_string(PdVerdict v) {
    switch (v) {
        case PdVerdict::certified: return "certified";
        case PdVerdict::refuted_by_residual: return "refuted-by-residual";
        case PdVerdict::unknown: return "unknown";
    }
    return "?";
}

/// PD-primary certificate at the witness level: the raw constraint peels
/// down to the class's known core, so every spurious factor was a principal
/// minor (supported on the boundary of the PD cone only). A residual that
/// still properly contains the core shows a non-minor spurious factor.
inline PdVerdict pd_primary_certificate(const GraphicalConstraint& gc_raw,
                                        const Polynomial& core_ref,
                                        const std::vector<std::string>& vars,
                                        int cap = kDefaultExpansionCap) {
    PatternMatrix m = gc_raw.build_matrix();
    if (m.dim() > cap) return PdVerdict::unknown;
    Polynomial raw = det_expand(m, cap);
    if (raw.is_zero()) throw DegenerateConstraintError("pd certificate on degenerate constraint");
    PeelResult peel = peel_principal_minors(raw, vars, cap);
    if (peel.core.equals_up_to_scalar(core_ref)) return PdVerdict::certified;
    auto q = peel.core.divide_exact(core_ref);
    if (q && !q->is_constant()) return PdVerdict::refuted_by_residual;
    return PdVerdict::unknown;
}

enum class IVerdict { certified, unknown };

inline const char* to_string(IVerdict v) {
    return v == IVerdict::certified ? "certified" : "unknown";
}

/// I-primary certificate: every expansion performed by the construction
/// multiplies in an |A^(v)| factor, and the ideal's spurious components lie
/// inside those factors' zero sets. When each such factor's expansion has an
/// all-diagonal monomial, no diagonal positive definite Sigma can satisfy a
/// spurious component, which certifies I-primality.
inline IVerdict i_primary_certificate(const MixedGraph& g, const IdentifyingFamily& fam,
                                      const DerivedConstraint& derived,
                                      int cap = kDefaultExpansionCap) {
    std::vector<std::string> nodes = derived.expanded;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (const auto& v : nodes) {
        auto amc = a_minor_constraint(g, fam, v);
        if (!amc) continue; // trivial factor 1
        PatternMatrix m = amc->build_matrix();
        if (m.dim() > cap) return IVerdict::unknown;
        Polynomial p = det_expand(m, cap);
        if (p.is_zero()) return IVerdict::unknown;
        if (!p.is_v_homogeneous()) return IVerdict::unknown;
        if (!p.diagonal_monomial()) return IVerdict::unknown;
    }
    return IVerdict::certified;
}

} // namespace algcon

#endif // ALGCON_CLASSIFY_HPP
