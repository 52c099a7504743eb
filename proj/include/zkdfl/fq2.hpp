#pragma once

// Quadratic extension Fq2 = Fq[u] / (u^2 + 1). Hosts the coordinates of G2.

#include "zkdfl/ff.hpp"

namespace zkdfl {

struct Fq2 {
    Fq c0, c1; // c0 + c1*u

    constexpr Fq2() = default;
    constexpr Fq2(const Fq& a, const Fq& b) : c0(a), c1(b) {}

    static constexpr Fq2 zero() { return {}; }
    static Fq2 one() { return {Fq::one(), Fq::zero()}; }
    static Fq2 from_u64(u64 a, u64 b) { return {Fq::from_u64(a), Fq::from_u64(b)}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    friend bool operator==(const Fq2& a, const Fq2& b) { return a.c0 == b.c0 && a.c1 == b.c1; }
    friend bool operator!=(const Fq2& a, const Fq2& b) { return !(a == b); }

    Fq2 operator+(const Fq2& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fq2 operator-(const Fq2& o) const { return {c0 - o.c0, c1 - o.c1}; }
    Fq2 operator-() const { return {-c0, -c1}; }

    Fq2 operator*(const Fq2& o) const {
        // Karatsuba with u^2 = -1.
        Fq v0 = c0 * o.c0;
        Fq v1 = c1 * o.c1;
        Fq sum = (c0 + c1) * (o.c0 + o.c1);
        return {v0 - v1, sum - v0 - v1};
    }

    Fq2& operator+=(const Fq2& o) { return *this = *this + o; }
    Fq2& operator-=(const Fq2& o) { return *this = *this - o; }
    Fq2& operator*=(const Fq2& o) { return *this = *this * o; }

    Fq2 square() const {
        Fq a = (c0 + c1) * (c0 - c1);
        Fq b = c0 * c1;
        return {a, b.dbl()};
    }

    Fq2 dbl() const { return {c0.dbl(), c1.dbl()}; }

    Fq2 scale(const Fq& s) const { return {c0 * s, c1 * s}; }

    Fq2 conjugate() const { return {c0, -c1}; }

    Fq2 inverse() const {
        // 1 / (c0 + c1 u) = (c0 - c1 u) / (c0^2 + c1^2)
        Fq norm = c0.square() + c1.square();
        Fq inv = norm.inverse();
        return {c0 * inv, (-c1) * inv};
    }

    Fq2 pow(std::span<const u64> exp) const {
        Fq2 acc = one();
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
};

// The sextic-twist shift 9 + u and the G2 curve constant 3 / (9 + u).
inline const Fq2& fq2_xi() {
    static const Fq2 xi = Fq2::from_u64(9, 1);
    return xi;
}

inline const Fq2& g2_coeff_b() {
    static const Fq2 b = Fq2{Fq::from_u64(3), Fq::zero()} * fq2_xi().inverse();
    return b;
}

} // namespace zkdfl
