#ifndef ALGCON_ORACLE_HPP
#define ALGCON_ORACLE_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/constraint.hpp"
#include "algcon/graph.hpp"
#include "algcon/htc.hpp"
#include "algcon/linalg.hpp"
#include "algcon/prng.hpp"
#include "algcon/rational.hpp"

namespace algcon {

/// Exact LSEM parameters for a mixed graph: lambda(i,j) is the coefficient
/// on the edge i -> j (zero off the directed support), omega the noise
/// covariance with support on the diagonal and the bidirected edges.
struct Parameters {
    std::vector<std::string> names;
    RatMatrix lambda;
    RatMatrix omega;
};

/// Draws generic rational parameters: lambda entries are small rationals on
/// the directed support; omega is symmetric with the bidirected support and
/// made positive definite by strict diagonal dominance. Resamples when
/// I - Lambda is singular (only possible with directed cycles).
inline Parameters sample_parameters(const MixedGraph& g, std::uint64_t seed,
                                    int resample_budget = 100) {
    const int n = g.size();
    SplitMix64 rng(derive_seed(seed, "params"));
    for (int attempt = 0; attempt < resample_budget; ++attempt) {
        Parameters p;
        p.names = g.nodes();
        p.lambda = RatMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        p.omega = RatMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (const auto& [t, h] : g.directed())
            p.lambda(static_cast<std::size_t>(t), static_cast<std::size_t>(h)) =
                random_small_rational(rng);
        for (const auto& [a, b] : g.bidirected()) {
            Rat w = random_small_rational(rng);
            p.omega(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = w;
            p.omega(static_cast<std::size_t>(b), static_cast<std::size_t>(a)) = w;
        }
        for (int v = 0; v < n; ++v) {
            Rat row_sum(0);
            for (int w = 0; w < n; ++w) {
                if (w == v) continue;
                Rat e = p.omega(static_cast<std::size_t>(v), static_cast<std::size_t>(w));
                row_sum += (e < 0 ? -e : e);
            }
            Rat jitter(static_cast<long>(rng.next_in(1, 16)), 8);
            jitter.canonicalize();
            p.omega(static_cast<std::size_t>(v), static_cast<std::size_t>(v)) = 1 + jitter + row_sum;
        }
        RatMatrix i_minus = RatMatrix::identity(static_cast<std::size_t>(n)) - p.lambda;
        if (det(i_minus) != 0) return p;
    }
    throw Error("sample_parameters: resampling budget exhausted (I - Lambda kept singular)");
}

/// Sigma = (I - Lambda)^-T Omega (I - Lambda)^-1, exactly.
inline CovarianceMatrix covariance(const Parameters& p) {
    const std::size_t n = p.names.size();
    RatMatrix i_minus = RatMatrix::identity(n) - p.lambda;
    auto inv = inverse(i_minus);
    if (!inv) throw Error("covariance: I - Lambda is singular");
    RatMatrix sigma = inv->transposed() * p.omega * *inv;
    return CovarianceMatrix(p.names, std::move(sigma));
}

/// Generic positive definite matrix off every proper subvariety:
/// R^T R + I for random small rational R.
inline CovarianceMatrix random_pd_covariance(const std::vector<std::string>& names,
                                             std::uint64_t seed) {
    const std::size_t n = names.size();
    SplitMix64 rng(derive_seed(seed, "offmodel"));
    RatMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = random_small_rational(rng);
    RatMatrix sigma = r.transposed() * r;
    for (std::size_t i = 0; i < n; ++i) sigma(i, i) += 1;
    return CovarianceMatrix(names, std::move(sigma));
}

/// Solves the HTC identification systems A^(v) x = b^(v) along the family's
/// order and returns Lambda_Y(Sigma). Rows for y half-trek reachable from v
/// use [(I - Lambda)^T Sigma] with the columns of Lambda identified so far;
/// other rows use Sigma directly.
inline RatMatrix identify_lambda(const MixedGraph& g, const IdentifyingFamily& fam,
                                 const CovarianceMatrix& sigma) {
    if (!validate_family(g, fam)) throw Error("identify_lambda: family is not valid");
    const int n = g.size();
    for (const auto& name : g.nodes())
        if (!sigma.has(name)) throw UnknownNodeError(name);
    RatMatrix lam(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    auto s = [&](int i, int j) -> Rat { return sigma.at(g.name(i), g.name(j)); };
    // [(I - Lambda)^T Sigma]_{y,u} with the current partial Lambda
    auto corrected = [&](int y, int u) -> Rat {
        Rat val = s(y, u);
        for (int w = 0; w < n; ++w) {
            const Rat& l = lam(static_cast<std::size_t>(w), static_cast<std::size_t>(y));
            if (l != 0) val -= l * s(w, u);
        }
        return val;
    };
    for (const auto& vname : fam.order) {
        int v = g.index_of(vname);
        auto pa = g.parents(v);
        if (pa.empty()) continue;
        const auto& ys = fam.set_for(vname);
        auto htr = g.half_trek_mask(v);
        const std::size_t k = pa.size();
        RatMatrix a(k, k);
        std::vector<Rat> b(k);
        for (std::size_t i = 0; i < k; ++i) {
            int y = g.index_of(ys[i]);
            bool corr = htr[static_cast<std::size_t>(y)];
            for (std::size_t j = 0; j < k; ++j)
                a(i, j) = corr ? corrected(y, pa[j]) : s(y, pa[j]);
            b[i] = corr ? corrected(y, v) : s(y, v);
        }
        auto x = solve(std::move(a), std::move(b));
        if (!x) throw IdentificationUndefined(vname);
        for (std::size_t j = 0; j < k; ++j)
            lam(static_cast<std::size_t>(pa[j]), static_cast<std::size_t>(v)) = (*x)[j];
    }
    return lam;
}

/// Determinant of the identification system A^(v) instantiated at sigma,
/// with the identified Lambda substituted into the half-trek-corrected rows.
/// The construction multiplies one such factor in per expansion, and a
/// singular A^(v) is exactly where the rational constraints are undefined.
inline Rat a_minor_value(const MixedGraph& g, const IdentifyingFamily& fam,
                         const CovarianceMatrix& sigma, const std::string& vname) {
    RatMatrix lam = identify_lambda(g, fam, sigma);
    const int n = g.size();
    int v = g.index_of(vname);
    auto pa = g.parents(v);
    if (pa.empty()) return Rat(1); // empty system, determinant of a 0x0 matrix
    const auto& ys = fam.set_for(vname);
    auto htr = g.half_trek_mask(v);
    auto s = [&](int i, int j) -> Rat { return sigma.at(g.name(i), g.name(j)); };
    const std::size_t k = pa.size();
    RatMatrix a(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        int y = g.index_of(ys[i]);
        bool corr = htr[static_cast<std::size_t>(y)];
        for (std::size_t j = 0; j < k; ++j) {
            if (!corr) {
                a(i, j) = s(y, pa[j]);
            } else {
                Rat val = s(y, pa[j]);
                for (int w = 0; w < n; ++w) {
                    const Rat& l = lam(static_cast<std::size_t>(w), static_cast<std::size_t>(y));
                    if (l != 0) val -= l * s(w, pa[j]);
                }
                a(i, j) = val;
            }
        }
    }
    return det(a);
}

/// The rational constraint value [(I - Lambda_Y(Sigma))^T Sigma
/// (I - Lambda_Y(Sigma))]_{v,w}, exactly.
inline Rat rational_constraint_value(const MixedGraph& g, const IdentifyingFamily& fam,
                                     const CovarianceMatrix& sigma,
                                     const std::pair<std::string, std::string>& pair) {
    RatMatrix lam = identify_lambda(g, fam, sigma);
    const std::size_t n = static_cast<std::size_t>(g.size());
    RatMatrix i_minus = RatMatrix::identity(n) - lam;
    RatMatrix sig(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sig(i, j) = sigma.at(g.name(static_cast<int>(i)), g.name(static_cast<int>(j)));
    RatMatrix m = i_minus.transposed() * sig * i_minus;
    return m(static_cast<std::size_t>(g.index_of(pair.first)),
             static_cast<std::size_t>(g.index_of(pair.second)));
}

/// Dimension of the algebraic model as the generic rank of the Jacobian of
/// the parameterization (Lambda, Omega) -> Sigma, evaluated exactly at
/// random rational parameter points (two draws, maximum rank). The
/// codimension n(n+1)/2 - dim counts the constraints the model imposes.
inline int model_codimension(const MixedGraph& g, std::uint64_t seed, int draws = 2) {
    const int n = g.size();
    const std::size_t rows = static_cast<std::size_t>(n * (n + 1) / 2);
    std::vector<std::pair<int, int>> dir(g.directed().begin(), g.directed().end());
    std::vector<std::pair<int, int>> bi(g.bidirected().begin(), g.bidirected().end());
    const std::size_t params = dir.size() + bi.size() + static_cast<std::size_t>(n);
    std::size_t best_rank = 0;
    for (int d = 0; d < draws; ++d) {
        Parameters p = sample_parameters(g, derive_seed(seed, "jacobian" + std::to_string(d)));
        RatMatrix i_minus = RatMatrix::identity(static_cast<std::size_t>(n)) - p.lambda;
        RatMatrix k = *inverse(i_minus);
        RatMatrix sigma = k.transposed() * p.omega * k;
        RatMatrix jac(rows, params);
        std::size_t col = 0;
        auto fill = [&](const RatMatrix& dsigma, std::size_t c) {
            std::size_t r = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    jac(r++, c) = dsigma(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        };
        // d sigma / d lambda_{u,v} = K^T E_{vu} Sigma + Sigma E_{uv} K
        for (const auto& [u, v] : dir) {
            RatMatrix ds(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ds(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                        k(static_cast<std::size_t>(v), static_cast<std::size_t>(i)) *
                            sigma(static_cast<std::size_t>(u), static_cast<std::size_t>(j)) +
                        sigma(static_cast<std::size_t>(i), static_cast<std::size_t>(u)) *
                            k(static_cast<std::size_t>(v), static_cast<std::size_t>(j));
            fill(ds, col++);
        }
        // d sigma / d omega_{uv} = K^T E^sym_{uv} K
        auto omega_deriv = [&](int u, int v) {
            RatMatrix ds(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Rat val = k(static_cast<std::size_t>(u), static_cast<std::size_t>(i)) *
                              k(static_cast<std::size_t>(v), static_cast<std::size_t>(j));
                    if (u != v)
                        val += k(static_cast<std::size_t>(v), static_cast<std::size_t>(i)) *
                               k(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
                    ds(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = val;
                }
            return ds;
        };
        for (const auto& [u, v] : bi) fill(omega_deriv(u, v), col++);
        for (int u = 0; u < n; ++u) fill(omega_deriv(u, u), col++);
        best_rank = std::max(best_rank, rank(jac));
    }
    return static_cast<int>(rows - best_rank);
}

struct BatteryReport {
    int trials = 0;
    int model_pass = 0;      // model-sampled Sigma satisfying the constraint
    int offmodel_reject = 0; // generic PD Sigma violating it
};

/// Vanishing battery: every model-generated covariance must satisfy the
/// constraint exactly; generic off-model matrices should reject it.
inline BatteryReport vanishing_battery(const GraphicalConstraint& gc, const MixedGraph& g,
                                       int trials, std::uint64_t seed) {
    BatteryReport rep;
    rep.trials = trials;
    for (int t = 0; t < trials; ++t) {
        auto params = sample_parameters(g, derive_seed(seed, 2 * static_cast<std::uint64_t>(t)));
        if (satisfies(gc, covariance(params))) ++rep.model_pass;
        auto off = random_pd_covariance(g.nodes(),
                                        derive_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1));
        if (!satisfies(gc, off)) ++rep.offmodel_reject;
    }
    return rep;
}

} // namespace algcon

#endif // ALGCON_ORACLE_HPP
