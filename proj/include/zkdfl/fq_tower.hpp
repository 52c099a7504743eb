#pragma once

// Extension tower for pairing values: Fq6 = Fq2[v]/(v^3 - xi) with xi = 9+u,
// and Fq12 = Fq6[w]/(w^2 - v). Gt lives in Fq12.

#include "zkdfl/fq2.hpp"

namespace zkdfl {

inline Fq2 mul_by_xi(const Fq2& a) { return a * fq2_xi(); }

struct Fq6 {
    Fq2 c0, c1, c2; // c0 + c1*v + c2*v^2

    static Fq6 zero() { return {}; }
    static Fq6 one() { return {Fq2::one(), Fq2::zero(), Fq2::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    friend bool operator==(const Fq6& a, const Fq6& b) {
        return a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2;
    }
    friend bool operator!=(const Fq6& a, const Fq6& b) { return !(a == b); }

    Fq6 operator+(const Fq6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    Fq6 operator-(const Fq6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
    Fq6 operator-() const { return {-c0, -c1, -c2}; }

    Fq6 operator*(const Fq6& o) const {
        Fq2 v0 = c0 * o.c0;
        Fq2 v1 = c1 * o.c1;
        Fq2 v2 = c2 * o.c2;
        Fq2 t0 = v0 + mul_by_xi((c1 + c2) * (o.c1 + o.c2) - v1 - v2);
        Fq2 t1 = (c0 + c1) * (o.c0 + o.c1) - v0 - v1 + mul_by_xi(v2);
        Fq2 t2 = (c0 + c2) * (o.c0 + o.c2) - v0 - v2 + v1;
        return {t0, t1, t2};
    }

    Fq6 square() const { return *this * *this; }

    // Multiplication by v: (c0, c1, c2) -> (xi*c2, c0, c1).
    Fq6 mul_by_v() const { return {mul_by_xi(c2), c0, c1}; }

    Fq6 inverse() const {
        Fq2 a = c0.square() - mul_by_xi(c1 * c2);
        Fq2 b = mul_by_xi(c2.square()) - c0 * c1;
        Fq2 c = c1.square() - c0 * c2;
        Fq2 t = (c0 * a + mul_by_xi(c2 * b + c1 * c)).inverse();
        return {a * t, b * t, c * t};
    }
};

struct Fq12 {
    Fq6 c0, c1; // c0 + c1*w

    static Fq12 zero() { return {}; }
    static Fq12 one() { return {Fq6::one(), Fq6::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    friend bool operator==(const Fq12& a, const Fq12& b) { return a.c0 == b.c0 && a.c1 == b.c1; }
    friend bool operator!=(const Fq12& a, const Fq12& b) { return !(a == b); }

    Fq12 operator+(const Fq12& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fq12 operator-(const Fq12& o) const { return {c0 - o.c0, c1 - o.c1}; }

    Fq12 operator*(const Fq12& o) const {
        Fq6 v0 = c0 * o.c0;
        Fq6 v1 = c1 * o.c1;
        Fq6 t1 = (c0 + c1) * (o.c0 + o.c1) - v0 - v1;
        return {v0 + v1.mul_by_v(), t1};
    }

    Fq12& operator*=(const Fq12& o) { return *this = *this * o; }

    Fq12 square() const {
        Fq6 v0 = c0 * c1;
        Fq6 t0 = (c0 + c1) * (c0 + c1.mul_by_v());
        return {t0 - v0 - v0.mul_by_v(), v0 + v0};
    }

    // Conjugation over Fq6 = exponentiation by q^6 (the "unitary inverse").
    Fq12 conjugate() const { return {c0, -c1}; }

    Fq12 inverse() const {
        Fq6 t = (c0.square() - c1.square().mul_by_v()).inverse();
        return {c0 * t, -(c1 * t)};
    }

    Fq12 pow(std::span<const u64> exp) const {
        Fq12 acc = one();
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

} // namespace zkdfl
