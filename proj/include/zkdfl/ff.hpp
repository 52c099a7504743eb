#pragma once

// Prime-field arithmetic for the bn254 curve family: the scalar field Fr and
// the base field Fq. Elements are kept in 4x64-bit Montgomery form; all
// derived constants (R, R^2, -m^-1 mod 2^64) are computed at compile time
// from the modulus limbs.

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace zkdfl {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Limbs = std::array<u64, 4>;

namespace detail {

constexpr bool limbs_gte(const Limbs& a, const Limbs& b) {
    for (int i = 3; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return true;
}

constexpr Limbs limbs_sub(const Limbs& a, const Limbs& b) {
    Limbs r{};
    u64 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 d = (u128)a[i] - b[i] - borrow;
        r[i] = (u64)d;
        borrow = (u64)((d >> 64) & 1);
    }
    return r;
}

constexpr Limbs limbs_add(const Limbs& a, const Limbs& b, u64& carry_out) {
    Limbs r{};
    u64 carry = 0;
    for (int i = 0; i < 4; ++i) {
        u128 s = (u128)a[i] + b[i] + carry;
        r[i] = (u64)s;
        carry = (u64)(s >> 64);
    }
    carry_out = carry;
    return r;
}

// 2^k mod m, by repeated modular doubling. Used to derive R and R^2.
constexpr Limbs pow2_mod(const Limbs& m, int k) {
    Limbs x{1, 0, 0, 0};
    for (int i = 0; i < k; ++i) {
        u64 carry = 0;
        x = limbs_add(x, x, carry);
        if (carry || limbs_gte(x, m)) x = limbs_sub(x, m);
    }
    return x;
}

// -m^-1 mod 2^64 via Newton iteration.
constexpr u64 mont_inv64(u64 m0) {
    u64 inv = 1;
    for (int i = 0; i < 63; ++i) inv *= 2 - m0 * inv;
    return ~inv + 1;
}

} // namespace detail

struct FrConfig {
    // 21888242871839275222246405745257275088548364400416034343698204186575808495617
    static constexpr Limbs modulus{0x43E1F593F0000001ull, 0x2833E84879B97091ull,
                                   0xB85045B68181585Dull, 0x30644E72E131A029ull};
    static constexpr int two_adicity = 28;
    static constexpr u64 multiplicative_generator = 5;
};

struct FqConfig {
    // 21888242871839275222246405745257275088696311157297823662689037894645226208583
    static constexpr Limbs modulus{0x3C208C16D87CFD47ull, 0x97816A916871CA8Dull,
                                   0xB85045B68181585Dull, 0x30644E72E131A029ull};
    static constexpr int two_adicity = 1;
    static constexpr u64 multiplicative_generator = 3;
};

template <typename Config>
class Fp {
public:
    static constexpr Limbs MOD = Config::modulus;
    static constexpr u64 INV = detail::mont_inv64(MOD[0]);
    static constexpr Limbs R1 = detail::pow2_mod(MOD, 256);
    static constexpr Limbs R2 = detail::pow2_mod(MOD, 512);

    constexpr Fp() : v_{0, 0, 0, 0} {}

    static constexpr Fp zero() { return Fp(); }
    static constexpr Fp one() { return from_raw(R1); }

    static Fp from_u64(u64 x) {
        Fp r;
        r.v_ = mont_mul({x, 0, 0, 0}, R2);
        return r;
    }

    // Interprets four little-endian limbs as an integer and reduces mod m.
    static Fp from_u256_reduce(const Limbs& limbs) {
        Limbs t = limbs;
        while (detail::limbs_gte(t, MOD)) t = detail::limbs_sub(t, MOD);
        Fp r;
        r.v_ = mont_mul(t, R2);
        return r;
    }

    // Canonical 32-byte big-endian encoding; rejects non-canonical input.
    static std::optional<Fp> from_bytes_be(std::span<const std::uint8_t> bytes) {
        if (bytes.size() != 32) return std::nullopt;
        Limbs t{};
        for (int i = 0; i < 4; ++i) {
            u64 w = 0;
            for (int j = 0; j < 8; ++j) w = (w << 8) | bytes[(3 - i) * 8 + j];
            t[i] = w;
        }
        if (detail::limbs_gte(t, MOD)) return std::nullopt;
        Fp r;
        r.v_ = mont_mul(t, R2);
        return r;
    }

    std::array<std::uint8_t, 32> to_bytes_be() const {
        Limbs t = to_canonical();
        std::array<std::uint8_t, 32> out{};
        for (int i = 0; i < 4; ++i) {
            u64 w = t[i];
            for (int j = 7; j >= 0; --j) {
                out[(3 - i) * 8 + j] = (std::uint8_t)(w & 0xFF);
                w >>= 8;
            }
        }
        return out;
    }

    // Canonical representative as little-endian limbs (out of Montgomery form).
    Limbs to_canonical() const { return mont_mul(v_, {1, 0, 0, 0}); }

    u64 to_u64() const {
        Limbs t = to_canonical();
        return t[0];
    }

    bool is_zero() const { return v_ == Limbs{0, 0, 0, 0}; }

    friend bool operator==(const Fp& a, const Fp& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Fp& a, const Fp& b) { return a.v_ != b.v_; }

    Fp operator+(const Fp& o) const {
        u64 carry = 0;
        Limbs s = detail::limbs_add(v_, o.v_, carry);
        if (carry || detail::limbs_gte(s, MOD)) s = detail::limbs_sub(s, MOD);
        return from_raw(s);
    }

    Fp operator-(const Fp& o) const {
        if (detail::limbs_gte(v_, o.v_) && v_ != o.v_) return from_raw(detail::limbs_sub(v_, o.v_));
        if (v_ == o.v_) return zero();
        Limbs t = detail::limbs_sub(o.v_, v_);
        return from_raw(detail::limbs_sub(MOD, t));
    }

    Fp operator-() const {
        if (is_zero()) return *this;
        return from_raw(detail::limbs_sub(MOD, v_));
    }

    Fp operator*(const Fp& o) const { return from_raw(mont_mul(v_, o.v_)); }

    Fp& operator+=(const Fp& o) { return *this = *this + o; }
    Fp& operator-=(const Fp& o) { return *this = *this - o; }
    Fp& operator*=(const Fp& o) { return *this = *this * o; }

    Fp square() const { return *this * *this; }

    Fp dbl() const { return *this + *this; }

    // Exponent given as little-endian limbs.
    Fp pow(std::span<const u64> exp) const {
        Fp acc = one();
        bool started = false;
        for (int i = (int)exp.size() - 1; i >= 0; --i) {
            for (int b = 63; b >= 0; --b) {
                if (started) acc = acc.square();
                if ((exp[i] >> b) & 1) {
                    if (!started) {
                        acc = *this;
                        started = true;
                    } else {
                        acc = acc * *this;
                    }
                }
            }
        }
        return started ? acc : one();
    }

    Fp pow(u64 e) const {
        std::array<u64, 1> limb{e};
        return pow(std::span<const u64>(limb));
    }

    Fp inverse() const {
        if (is_zero()) throw std::domain_error("Fp::inverse: zero has no inverse");
        Limbs e = detail::limbs_sub(MOD, {2, 0, 0, 0});
        return pow(std::span<const u64>(e.data(), 4));
    }

    static constexpr Fp from_raw(const Limbs& raw) {
        Fp r;
        r.v_ = raw;
        return r;
    }
    const Limbs& raw() const { return v_; }

private:
    // CIOS Montgomery multiplication.
    static constexpr Limbs mont_mul(const Limbs& a, const Limbs& b) {
        u64 t[6] = {0, 0, 0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            u64 carry = 0;
            for (int j = 0; j < 4; ++j) {
                u128 cur = (u128)t[j] + (u128)a[j] * b[i] + carry;
                t[j] = (u64)cur;
                carry = (u64)(cur >> 64);
            }
            u128 cur = (u128)t[4] + carry;
            t[4] = (u64)cur;
            t[5] = (u64)(cur >> 64);

            u64 m = t[0] * INV;
            cur = (u128)t[0] + (u128)m * MOD[0];
            carry = (u64)(cur >> 64);
            for (int j = 1; j < 4; ++j) {
                cur = (u128)t[j] + (u128)m * MOD[j] + carry;
                t[j - 1] = (u64)cur;
                carry = (u64)(cur >> 64);
            }
            cur = (u128)t[4] + carry;
            t[3] = (u64)cur;
            t[4] = t[5] + (u64)(cur >> 64);
        }
        Limbs r{t[0], t[1], t[2], t[3]};
        if (t[4] || detail::limbs_gte(r, MOD)) r = detail::limbs_sub(r, MOD);
        return r;
    }

    Limbs v_;
};

using Fr = Fp<FrConfig>;
using Fq = Fp<FqConfig>;

// 2^k-th primitive root of unity in Fr, k <= two_adicity.
inline Fr fr_root_of_unity(int log2_size) {
    if (log2_size < 0 || log2_size > FrConfig::two_adicity)
        throw std::invalid_argument("fr_root_of_unity: size exceeds field two-adicity");
    Limbs e = detail::limbs_sub(Fr::MOD, {1, 0, 0, 0});
    // (r-1) / 2^k
    for (int i = 0; i < log2_size; ++i) {
        u64 carry = 0;
        for (int j = 3; j >= 0; --j) {
            u64 next_carry = e[j] & 1;
            e[j] = (e[j] >> 1) | (carry << 63);
            carry = next_carry;
        }
    }
    return Fr::from_u64(FrConfig::multiplicative_generator).pow(std::span<const u64>(e.data(), 4));
}

} // namespace zkdfl
