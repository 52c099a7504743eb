#pragma once

// Radix-2 number-theoretic transform over Fr on the canonical power-of-two
// roots-of-unity domains, plus the coset evaluation helpers the quotient
// computation needs.

#include <span>
#include <stdexcept>
#include <vector>

#include "zkdfl/ff.hpp"

namespace zkdfl {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(size_t n) {
    int k = 0;
    while ((size_t(1) << k) < n) ++k;
    return k;
}

namespace detail {

inline void fft_in_place(std::vector<Fr>& a, const Fr& root) {
    size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        Fr wlen = root;
        for (size_t l = len; l < n; l <<= 1) wlen = wlen.square();
        for (size_t i = 0; i < n; i += len) {
            Fr w = Fr::one();
            for (size_t j = 0; j < len / 2; ++j) {
                Fr u = a[i + j];
                Fr v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace detail

// Forward: coefficients -> evaluations on (1, w, w^2, ...), w of order n.
// Inverse: the exact inverse map.
inline std::vector<Fr> fft(std::vector<Fr> values, bool inverse = false) {
    size_t n = values.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    if (n == 1) return values;
    int k = log2_exact(n);
    Fr root = fr_root_of_unity(k);
    if (inverse) root = root.inverse();
    detail::fft_in_place(values, root);
    if (inverse) {
        Fr ninv = Fr::from_u64((u64)n).inverse();
        for (auto& v : values) v *= ninv;
    }
    return values;
}

inline std::vector<Fr> ifft(std::vector<Fr> values) { return fft(std::move(values), true); }

// Evaluations of the coefficient vector on the coset g * <w>.
inline std::vector<Fr> coset_fft(std::vector<Fr> coeffs, const Fr& shift) {
    Fr power = Fr::one();
    for (auto& c : coeffs) {
        c *= power;
        power *= shift;
    }
    return fft(std::move(coeffs));
}

inline std::vector<Fr> coset_ifft(std::vector<Fr> values, const Fr& shift) {
    auto coeffs = ifft(std::move(values));
    Fr sinv = shift.inverse();
    Fr power = Fr::one();
    for (auto& c : coeffs) {
        c *= power;
        power *= sinv;
    }
    return coeffs;
}

} // namespace zkdfl
