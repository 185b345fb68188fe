#pragma once

#include <cstdint>

namespace grk {

// splitmix64: deterministic, platform-independent stream. Used everywhere a
// seed has to reproduce byte-identical output across builds, so we avoid the
// implementation-defined std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [lo, hi], inclusive. Rejection-free modulo bias is negligible
    // for the tiny ranges used here, but we reject anyway to keep draws exact.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        std::uint64_t limit = range * (UINT64_MAX / range);
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % range);
    }

    // Uniform real in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Stable way to derive independent substreams from one master seed.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
        Rng r(seed ^ (salt * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_str(const char* s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (; *s; ++s) { h ^= static_cast<unsigned char>(*s); h *= 0x100000001b3ULL; }
    return h;
}

}  // namespace grk
