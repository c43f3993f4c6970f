#ifndef ALGCON_FINGERPRINT_HPP
#define ALGCON_FINGERPRINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "algcon/common.hpp"
#include "algcon/modular.hpp"
#include "algcon/poly.hpp"

namespace algcon {

inline constexpr int kFingerprintPoints = 16;

/// Evaluations of a polynomial at fixed pseudo-random points over a prime
/// field. Constraints of degree d collide with probability <= (d/p)^points,
/// so at 16 points over a 2^31-sized field a false match is negligible even
/// at the census's degree-14 extremes; false negatives cannot happen.
struct Fingerprint {
    std::uint64_t prime = kFingerprintPrime;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> values;

    void check_compatible(const Fingerprint& o) const {
        if (prime != o.prime || seed != o.seed || values.size() != o.values.size())
            throw Error("fingerprints from different seeds/primes are not comparable");
    }

    bool is_zero() const {
        for (auto v : values)
            if (v != 0) return false;
        return true;
    }
};

inline Fingerprint fingerprint(const Polynomial& p, std::uint64_t seed,
                               int points = kFingerprintPoints) {
    if (points < 8) throw Error("fingerprint needs at least 8 points");
    Fingerprint fp;
    fp.seed = seed;
    fp.values.assign(static_cast<std::size_t>(points), 0);
    for (int k = 0; k < points; ++k) {
        std::uint64_t acc = 0;
        for (const auto& [m, c] : p.terms()) {
            std::uint64_t t = rat_mod(c, fp.prime);
            for (const auto& v : m)
                t = mod_mul(t, sigma_point_value(seed, static_cast<std::uint64_t>(k), v.lo, v.hi),
                            fp.prime);
            acc = mod_add(acc, t, fp.prime);
        }
        fp.values[static_cast<std::size_t>(k)] = acc;
    }
    return fp;
}

/// Determinant of the pattern matrix evaluated numerically mod p, one value
/// per point, without symbolic expansion. Same function as fingerprinting
/// the expanded determinant.
inline Fingerprint fingerprint(const PatternMatrix& m, std::uint64_t seed,
                               int points = kFingerprintPoints) {
    if (m.rows.size() != m.cols.size()) throw Error("fingerprint: matrix not square");
    if (points < 8) throw Error("fingerprint needs at least 8 points");
    const std::size_t n = m.rows.size();
    Fingerprint fp;
    fp.seed = seed;
    fp.values.assign(static_cast<std::size_t>(points), 0);
    const std::uint64_t p = fp.prime;
    for (int k = 0; k < points; ++k) {
        std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (m.entry[i][j])
                    a[i][j] = sigma_point_value(seed, static_cast<std::uint64_t>(k),
                                                m.entry[i][j]->lo, m.entry[i][j]->hi);
        // Gaussian elimination over F_p
        std::uint64_t d = 1;
        bool zero = false;
        for (std::size_t col = 0; col < n && !zero; ++col) {
            std::size_t piv = col;
            while (piv < n && a[piv][col] == 0) ++piv;
            if (piv == n) {
                zero = true;
                break;
            }
            if (piv != col) {
                std::swap(a[col], a[piv]);
                d = p - d;
                if (d == p) d = 0;
            }
            d = mod_mul(d, a[col][col], p);
            std::uint64_t inv_piv = mod_inv(a[col][col], p);
            for (std::size_t i = col + 1; i < n; ++i) {
                if (a[i][col] == 0) continue;
                std::uint64_t f = mod_mul(a[i][col], inv_piv, p);
                for (std::size_t j = col; j < n; ++j)
                    a[i][j] = mod_sub(a[i][j], mod_mul(f, a[col][j], p), p);
            }
        }
        fp.values[static_cast<std::size_t>(k)] = zero ? 0 : d;
    }
    return fp;
}

/// True when f1 = c * f2 for a single field scalar c across all points.
inline bool equal_up_to_scalar(const Fingerprint& f1, const Fingerprint& f2) {
    f1.check_compatible(f2);
    std::uint64_t c = 0;
    bool have_c = false;
    for (std::size_t k = 0; k < f1.values.size(); ++k) {
        std::uint64_t a = f1.values[k], b = f2.values[k];
        if (a == 0 && b == 0) continue;
        if (a == 0 || b == 0) return false;
        std::uint64_t r = mod_mul(a, mod_inv(b, f1.prime), f1.prime);
        if (!have_c) {
            c = r;
            have_c = true;
        } else if (r != c) {
            return false;
        }
    }
    return true;
}

/// As above but the scalar must be +1 or -1 (polynomials up to sign).
inline bool equal_up_to_sign(const Fingerprint& f1, const Fingerprint& f2) {
    f1.check_compatible(f2);
    bool plus = true, minus = true;
    for (std::size_t k = 0; k < f1.values.size(); ++k) {
        std::uint64_t a = f1.values[k], b = f2.values[k];
        if (a != b) plus = false;
        if (a != (b == 0 ? 0 : f1.prime - b)) minus = false;
        if (!plus && !minus) return false;
    }
    return true;
}

/// Projective normal form: scale so the first nonzero value is 1. Two
/// fingerprints normalize identically exactly when they are equal up to a
/// scalar, which makes the result usable as a grouping key.
inline std::vector<std::uint64_t> normalized_values(const Fingerprint& f) {
    std::vector<std::uint64_t> out = f.values;
    for (auto v : out) {
        if (v != 0) {
            std::uint64_t inv = mod_inv(v, f.prime);
            for (auto& x : out) x = mod_mul(x, inv, f.prime);
            break;
        }
    }
    return out;
}

inline std::string normalized_key(const Fingerprint& f) {
    std::string s;
    for (auto v : normalized_values(f)) {
        s += std::to_string(v);
        s += ',';
    }
    return s;
}

inline Fingerprint pointwise_product(const Fingerprint& a, const Fingerprint& b) {
    a.check_compatible(b);
    Fingerprint out = a;
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = mod_mul(out.values[k], b.values[k], a.prime);
    return out;
}

} // namespace algcon

#endif // ALGCON_FINGERPRINT_HPP
