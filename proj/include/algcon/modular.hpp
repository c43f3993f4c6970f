#ifndef ALGCON_MODULAR_HPP
#define ALGCON_MODULAR_HPP

#include <cstdint>

#include "algcon/common.hpp"
#include "algcon/prng.hpp"
#include "algcon/rational.hpp"

namespace algcon {

/// Prime field used for polynomial fingerprinting. The modulus must exceed
/// 2^31 so that Schwartz-Zippel collision rates stay below deg/2^31 per
/// evaluation point (degrees here are <= ~14).
inline constexpr std::uint64_t kFingerprintPrime = 2147483659ULL; // 2^31 + 11

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t mod_add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;
    return s >= p ? s - p : s;
}

inline std::uint64_t mod_sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return a >= b ? a - b : a + p - b;
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) r = mod_mul(r, base, p);
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    return r;
}

inline std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
    if (a % p == 0) throw Error("mod_inv of zero");
    return mod_pow(a % p, p - 2, p);
}

/// Exact rational reduced mod p. Throws if the denominator vanishes mod p
/// (practically impossible for the rationals arising here).
inline std::uint64_t rat_mod(const Rat& q, std::uint64_t p) {
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    mpz_class pz(static_cast<unsigned long>(p));
    mpz_class nm = num % pz;
    if (nm < 0) nm += pz;
    mpz_class dm = den % pz;
    if (dm == 0) throw Error("denominator divisible by fingerprint prime");
    std::uint64_t n = nm.get_ui();
    std::uint64_t d = dm.get_ui();
    return mod_mul(n, mod_inv(d, p), p);
}

/// Evaluation point for the variable sigma_{x,y} at fingerprint point k.
/// Symmetric in (x, y); shared by the symbolic and matrix evaluation paths.
inline std::uint64_t sigma_point_value(std::uint64_t seed, std::uint64_t k,
                                       const std::string& x, const std::string& y) {
    const std::string& lo = (x <= y) ? x : y;
    const std::string& hi = (x <= y) ? y : x;
    std::uint64_t h = fnv1a64(lo);
    h = h * 0x100000001b3ULL ^ fnv1a64(hi);
    SplitMix64 rng(seed ^ (h + 0x9e3779b97f4a7c15ULL * (k + 1)));
    rng.next();
    return rng.next() % kFingerprintPrime;
}

} // namespace algcon

#endif // ALGCON_MODULAR_HPP
