#pragma once

// SplitMix64: the one deterministic randomness source used everywhere in this
// project (hash round constants, model init, shuffles, proof blinding in test
// mode). Keeps every party and every rerun bit-identical for a given seed.

#include <cmath>
#include <cstdint>
#include <random>

#include "zkdfl/ff.hpp"

namespace zkdfl {

class SplitMix64 {
public:
    explicit SplitMix64(u64 seed) : state_(seed) {}

    u64 next() {
        u64 z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return (double)(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n).
    u64 next_below(u64 n) { return n ? next() % n : 0; }

    // Standard normal via Box-Muller.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 == 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename Config>
    Fp<Config> next_field() {
        Limbs limbs{next(), next(), next(), next()};
        return Fp<Config>::from_u256_reduce(limbs);
    }

    Fr next_fr() { return next_field<FrConfig>(); }

    // Nonzero field element (resamples on zero).
    Fr next_fr_nonzero() {
        Fr x = next_fr();
        while (x.is_zero()) x = next_fr();
        return x;
    }

    static u64 os_seed() {
        std::random_device rd;
        return ((u64)rd() << 32) ^ rd();
    }

private:
    u64 state_;
};

} // namespace zkdfl
