#ifndef ALGCON_RATIONAL_HPP
#define ALGCON_RATIONAL_HPP

#include <gmpxx.h>

#include <string>

#include "algcon/common.hpp"
#include "algcon/prng.hpp"

namespace algcon {

/// Exact rational scalar. All verification paths in this library use exact
/// arithmetic; "vanishes" always means the value is literally 0.
using Rat = mpq_class;

inline Rat rat_parse(const std::string& text) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) throw Error("bad rational '" + text + "'");
    if (q.get_den() == 0) throw Error("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

/// Random nonzero rational k/8, k in [-16,16]\{0}: big enough for genericity,
/// small enough to keep exact-arithmetic growth bounded.
inline Rat random_small_rational(SplitMix64& rng) {
    std::int64_t k = 0;
    while (k == 0) k = rng.next_in(-16, 16);
    Rat q(static_cast<long>(k), 8);
    q.canonicalize();
    return q;
}

} // namespace algcon

#endif // ALGCON_RATIONAL_HPP
