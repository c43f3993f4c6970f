#ifndef ALGCON_PRNG_HPP
#define ALGCON_PRNG_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace algcon {

/// splitmix64; deterministic across platforms, cheap to seed per shard.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Unbiased value in [0, bound). bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) {
        // rejection sampling on the top range
        std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Signed value in [lo, hi], inclusive.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stable derived seed for (seed, stream-tag) pairs; replication of a trial
/// must not depend on scheduling, so every worker derives its own stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 rng(seed ^ (0x632be59bd9b4e019ULL + stream * 0x9e3779b97f4a7c15ULL));
    rng.next();
    return rng.next();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    return derive_seed(seed, fnv1a64(tag));
}

} // namespace algcon

#endif // ALGCON_PRNG_HPP
