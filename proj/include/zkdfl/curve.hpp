#pragma once

// Short-Weierstrass group arithmetic shared by G1 (over Fq) and G2 (over
// Fq2): Jacobian add/double, windowed-bucket multi-scalar multiplication,
// and fixed-base comb tables for the trusted-setup hot path.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "zkdfl/bytes.hpp"
#include "zkdfl/ff.hpp"
#include "zkdfl/fq2.hpp"
#include "zkdfl/parallel.hpp"

namespace zkdfl {

struct G1Curve {
    using Field = Fq;
    static Field coeff_b() { return Fq::from_u64(3); }
    static Field gen_x() { return Fq::from_u64(1); }
    static Field gen_y() { return Fq::from_u64(2); }
    static constexpr size_t coord_bytes = 32;
};

struct G2Curve {
    using Field = Fq2;
    static Field coeff_b() { return g2_coeff_b(); }
    static Field gen_x() {
        static const Fq2 x{
            *Fq::from_bytes_be(from_hex("1800deef121f1e76426a00665e5c4479674322d4f75edadd46debd5cd992f6ed")),
            *Fq::from_bytes_be(from_hex("198e9393920d483a7260bfb731fb5d25f1aa493335a9e71297e485b7aef312c2"))};
        return x;
    }
    static Field gen_y() {
        static const Fq2 y{
            *Fq::from_bytes_be(from_hex("12c85ea5db8c6deb4aab71808dcb408fe3d1e7690c43d37b4ce6cc0166fa7daa")),
            *Fq::from_bytes_be(from_hex("090689d0585ff075ec9e99ad690c3395bc4b313370b38ef355acdadcd122975b"))};
        return y;
    }
    static constexpr size_t coord_bytes = 64;
};

template <typename Curve>
struct Affine {
    using F = typename Curve::Field;
    F x, y;
    bool infinity = true;

    static Affine zero() { return {}; }
    static Affine make(const F& x, const F& y) { return {x, y, false}; }
    static Affine generator() { return make(Curve::gen_x(), Curve::gen_y()); }

    bool on_curve() const {
        if (infinity) return true;
        return y.square() == x.square() * x + Curve::coeff_b();
    }

    Affine negate() const {
        if (infinity) return *this;
        return make(x, -y);
    }

    friend bool operator==(const Affine& a, const Affine& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const Affine& a, const Affine& b) { return !(a == b); }
};

template <typename Curve>
struct Jacobian {
    using F = typename Curve::Field;
    F X, Y, Z; // Z == 0 encodes infinity

    static Jacobian zero() { return {F(), F(), F()}; }
    static Jacobian from_affine(const Affine<Curve>& p) {
        if (p.infinity) return zero();
        return {p.x, p.y, F::one()};
    }
    bool is_zero() const { return Z.is_zero(); }
};

template <typename Curve>
Jacobian<Curve> ec_dbl(const Jacobian<Curve>& p) {
    using F = typename Curve::Field;
    if (p.is_zero()) return p;
    F a = p.X.square();
    F b = p.Y.square();
    F c = b.square();
    F d = ((p.X + b).square() - a - c).dbl();
    F e = a + a + a;
    F f = e.square();
    F x3 = f - d.dbl();
    F y3 = e * (d - x3) - c.dbl().dbl().dbl();
    F z3 = (p.Y * p.Z).dbl();
    return {x3, y3, z3};
}

template <typename Curve>
Jacobian<Curve> ec_add(const Jacobian<Curve>& p, const Jacobian<Curve>& q) {
    using F = typename Curve::Field;
    if (p.is_zero()) return q;
    if (q.is_zero()) return p;
    F z1z1 = p.Z.square();
    F z2z2 = q.Z.square();
    F u1 = p.X * z2z2;
    F u2 = q.X * z1z1;
    F s1 = p.Y * q.Z * z2z2;
    F s2 = q.Y * p.Z * z1z1;
    if (u1 == u2) {
        if (s1 == s2) return ec_dbl(p);
        return Jacobian<Curve>::zero();
    }
    F h = u2 - u1;
    F i = h.dbl().square();
    F j = h * i;
    F r = (s2 - s1).dbl();
    F v = u1 * i;
    F x3 = r.square() - j - v.dbl();
    F y3 = r * (v - x3) - (s1 * j).dbl();
    F z3 = ((p.Z + q.Z).square() - z1z1 - z2z2) * h;
    return {x3, y3, z3};
}

template <typename Curve>
Jacobian<Curve> ec_add_mixed(const Jacobian<Curve>& p, const Affine<Curve>& q) {
    using F = typename Curve::Field;
    if (q.infinity) return p;
    if (p.is_zero()) return Jacobian<Curve>::from_affine(q);
    F z1z1 = p.Z.square();
    F u2 = q.x * z1z1;
    F s2 = q.y * p.Z * z1z1;
    if (p.X == u2) {
        if (p.Y == s2) return ec_dbl(p);
        return Jacobian<Curve>::zero();
    }
    F h = u2 - p.X;
    F hh = h.square();
    F i = hh.dbl().dbl();
    F j = h * i;
    F r = (s2 - p.Y).dbl();
    F v = p.X * i;
    F x3 = r.square() - j - v.dbl();
    F y3 = r * (v - x3) - (p.Y * j).dbl();
    F z3 = (p.Z + h).square() - z1z1 - hh;
    return {x3, y3, z3};
}

template <typename Curve>
Affine<Curve> ec_to_affine(const Jacobian<Curve>& p) {
    using F = typename Curve::Field;
    if (p.is_zero()) return Affine<Curve>::zero();
    F zinv = p.Z.inverse();
    F zinv2 = zinv.square();
    return Affine<Curve>::make(p.X * zinv2, p.Y * zinv2 * zinv);
}

// Montgomery-trick batch normalization; one field inversion total.
template <typename Curve>
std::vector<Affine<Curve>> ec_batch_to_affine(std::span<const Jacobian<Curve>> pts) {
    using F = typename Curve::Field;
    std::vector<Affine<Curve>> out(pts.size());
    std::vector<F> prefix(pts.size());
    F acc = F::one();
    for (size_t i = 0; i < pts.size(); ++i) {
        prefix[i] = acc;
        if (!pts[i].is_zero()) acc *= pts[i].Z;
    }
    F inv = acc.inverse();
    for (size_t i = pts.size(); i-- > 0;) {
        if (pts[i].is_zero()) {
            out[i] = Affine<Curve>::zero();
            continue;
        }
        F zinv = inv * prefix[i];
        inv *= pts[i].Z;
        F zinv2 = zinv.square();
        out[i] = Affine<Curve>::make(pts[i].X * zinv2, pts[i].Y * zinv2 * zinv);
    }
    return out;
}

template <typename Curve>
Jacobian<Curve> ec_scalar_mul(const Affine<Curve>& p, const Limbs& scalar) {
    Jacobian<Curve> acc = Jacobian<Curve>::zero();
    bool started = false;
    for (int limb = 3; limb >= 0; --limb) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) acc = ec_dbl(acc);
            if ((scalar[limb] >> bit) & 1) {
                acc = ec_add_mixed(acc, p);
                started = true;
            }
        }
    }
    return acc;
}

template <typename Curve>
Jacobian<Curve> ec_scalar_mul(const Affine<Curve>& p, const Fr& scalar) {
    return ec_scalar_mul(p, scalar.to_canonical());
}

template <typename Curve>
bool ec_in_subgroup(const Affine<Curve>& p) {
    if (p.infinity) return true;
    return ec_scalar_mul(p, Fr::MOD).is_zero();
}

namespace detail {
inline unsigned msm_window(size_t n) {
    unsigned c = 3;
    while ((size_t(1) << (c + 3)) < n && c < 16) ++c;
    return c;
}
} // namespace detail

// Windowed bucket MSM. Returns sum_i scalars[i] * points[i]; windows are
// independent so they fan out across workers and recombine in order.
template <typename Curve>
Jacobian<Curve> ec_msm(std::span<const Affine<Curve>> points, std::span<const Fr> scalars) {
    if (points.size() != scalars.size())
        throw std::invalid_argument("ec_msm: points/scalars length mismatch");
    size_t n = points.size();
    if (n == 0) return Jacobian<Curve>::zero();

    std::vector<Limbs> repr(n);
    for (size_t i = 0; i < n; ++i) repr[i] = scalars[i].to_canonical();

    const unsigned c = detail::msm_window(n);
    const unsigned windows = (254 + c - 1) / c;
    std::vector<Jacobian<Curve>> window_sums(windows, Jacobian<Curve>::zero());

    parallel_chunks(windows, [&](size_t, size_t wbegin, size_t wend) {
        std::vector<Jacobian<Curve>> buckets((size_t(1) << c) - 1);
        for (size_t w = wbegin; w < wend; ++w) {
            for (auto& b : buckets) b = Jacobian<Curve>::zero();
            unsigned bit_offset = (unsigned)w * c;
            for (size_t i = 0; i < n; ++i) {
                unsigned limb = bit_offset / 64;
                unsigned shift = bit_offset % 64;
                u64 idx = repr[i][limb] >> shift;
                if (shift + c > 64 && limb + 1 < 4) idx |= repr[i][limb + 1] << (64 - shift);
                idx &= (u64(1) << c) - 1;
                if (idx) buckets[idx - 1] = ec_add_mixed(buckets[idx - 1], points[i]);
            }
            Jacobian<Curve> running = Jacobian<Curve>::zero();
            Jacobian<Curve> sum = Jacobian<Curve>::zero();
            for (size_t b = buckets.size(); b-- > 0;) {
                running = ec_add(running, buckets[b]);
                sum = ec_add(sum, running);
            }
            window_sums[w] = sum;
        }
    });

    Jacobian<Curve> total = Jacobian<Curve>::zero();
    for (size_t w = windows; w-- > 0;) {
        for (unsigned i = 0; i < c && !total.is_zero(); ++i) total = ec_dbl(total);
        total = ec_add(total, window_sums[w]);
    }
    return total;
}

// Fixed-base comb table: mult by any scalar costs ~256/width mixed adds.
template <typename Curve>
class FixedBaseTable {
public:
    explicit FixedBaseTable(const Affine<Curve>& base, unsigned width = 8) : width_(width) {
        blocks_ = (256 + width - 1) / width;
        size_t per = (size_t(1) << width) - 1;
        std::vector<Jacobian<Curve>> jac(blocks_ * per);
        Jacobian<Curve> block_base = Jacobian<Curve>::from_affine(base);
        for (unsigned b = 0; b < blocks_; ++b) {
            Jacobian<Curve> acc = Jacobian<Curve>::zero();
            for (size_t v = 0; v < per; ++v) {
                acc = ec_add(acc, block_base);
                jac[b * per + v] = acc;
            }
            if (b + 1 < blocks_) {
                block_base = acc; // (2^width - 1) * base so far
                block_base = ec_add(block_base, jac[b * per]);
            }
        }
        table_ = ec_batch_to_affine<Curve>(jac);
    }

    Jacobian<Curve> mul(const Fr& scalar) const {
        Limbs repr = scalar.to_canonical();
        Jacobian<Curve> acc = Jacobian<Curve>::zero();
        size_t per = (size_t(1) << width_) - 1;
        for (unsigned b = 0; b < blocks_; ++b) {
            unsigned bit_offset = b * width_;
            unsigned limb = bit_offset / 64;
            unsigned shift = bit_offset % 64;
            u64 idx = repr[limb] >> shift;
            if (shift + width_ > 64 && limb + 1 < 4) idx |= repr[limb + 1] << (64 - shift);
            idx &= (u64(1) << width_) - 1;
            if (idx) acc = ec_add_mixed(acc, table_[b * per + idx - 1]);
        }
        return acc;
    }

private:
    unsigned width_;
    unsigned blocks_;
    std::vector<Affine<Curve>> table_;
};

using G1Affine = Affine<G1Curve>;
using G2Affine = Affine<G2Curve>;
using G1Jac = Jacobian<G1Curve>;
using G2Jac = Jacobian<G2Curve>;

// ---- serialization (32-byte big-endian limbs; infinity = all zeros) ----

inline std::array<std::uint8_t, 64> g1_to_bytes(const G1Affine& p) {
    std::array<std::uint8_t, 64> out{};
    if (p.infinity) return out;
    auto xb = p.x.to_bytes_be();
    auto yb = p.y.to_bytes_be();
    std::copy(xb.begin(), xb.end(), out.begin());
    std::copy(yb.begin(), yb.end(), out.begin() + 32);
    return out;
}

inline G1Affine g1_from_bytes(std::span<const std::uint8_t> in) {
    if (in.size() != 64) throw std::invalid_argument("g1_from_bytes: expected 64 bytes");
    bool all_zero = true;
    for (auto b : in)
        if (b) {
            all_zero = false;
            break;
        }
    if (all_zero) return G1Affine::zero();
    auto x = Fq::from_bytes_be(in.subspan(0, 32));
    auto y = Fq::from_bytes_be(in.subspan(32, 32));
    if (!x || !y) throw std::invalid_argument("g1_from_bytes: non-canonical coordinate");
    G1Affine p = G1Affine::make(*x, *y);
    if (!p.on_curve()) throw std::invalid_argument("g1_from_bytes: point not on curve");
    return p; // cofactor 1: on-curve implies subgroup membership
}

// G2 coordinate order: x.c0 || x.c1 || y.c0 || y.c1.
inline std::array<std::uint8_t, 128> g2_to_bytes(const G2Affine& p) {
    std::array<std::uint8_t, 128> out{};
    if (p.infinity) return out;
    auto w = [&](const Fq& f, size_t off) {
        auto b = f.to_bytes_be();
        std::copy(b.begin(), b.end(), out.begin() + off);
    };
    w(p.x.c0, 0);
    w(p.x.c1, 32);
    w(p.y.c0, 64);
    w(p.y.c1, 96);
    return out;
}

inline G2Affine g2_from_bytes(std::span<const std::uint8_t> in) {
    if (in.size() != 128) throw std::invalid_argument("g2_from_bytes: expected 128 bytes");
    bool all_zero = true;
    for (auto b : in)
        if (b) {
            all_zero = false;
            break;
        }
    if (all_zero) return G2Affine::zero();
    auto rd = [&](size_t off) {
        auto f = Fq::from_bytes_be(in.subspan(off, 32));
        if (!f) throw std::invalid_argument("g2_from_bytes: non-canonical coordinate");
        return *f;
    };
    G2Affine p = G2Affine::make({rd(0), rd(32)}, {rd(64), rd(96)});
    if (!p.on_curve()) throw std::invalid_argument("g2_from_bytes: point not on curve");
    if (!ec_in_subgroup(p)) throw std::invalid_argument("g2_from_bytes: point not in subgroup");
    return p;
}

} // namespace zkdfl
