#pragma once

// MiMC7 block cipher over Fr: r rounds of x -> (x + k + c_i)^7, final output
// shifted by the key. Comes in three forms that must agree bit-for-bit: the
// native function, the R1CS gadget (4 multiplication constraints per round),
// and the Miyaguchi-Preneel chain used to hash weight vectors.

#include <span>
#include <vector>

#include "zkdfl/r1cs.hpp"
#include "zkdfl/rng.hpp"

namespace zkdfl::mimc7 {

inline constexpr u64 DEFAULT_SEED = 0x6D696D6337ull; // "mimc7"
inline constexpr std::size_t DEFAULT_ROUNDS = 91;    // ceil(254 / log2(7))

struct MimcParams {
    std::vector<Fr> constants; // c_0 = 0, fixed at instantiation
    std::size_t rounds() const { return constants.size(); }
};

// c_0 = 0; c_i = next four SplitMix64 words combined little-endian, mod r.
inline MimcParams round_constants(u64 seed, std::size_t r) {
    if (r == 0) throw std::invalid_argument("round_constants: need at least one round");
    MimcParams p;
    p.constants.reserve(r);
    p.constants.push_back(Fr::zero());
    SplitMix64 stream(seed);
    for (std::size_t i = 1; i < r; ++i) {
        Limbs limbs{stream.next(), stream.next(), stream.next(), stream.next()};
        p.constants.push_back(Fr::from_u256_reduce(limbs));
    }
    return p;
}

inline const MimcParams& default_params() {
    static const MimcParams p = round_constants(DEFAULT_SEED, DEFAULT_ROUNDS);
    return p;
}

inline Fr pow7(const Fr& t) {
    Fr t2 = t.square();
    Fr t4 = t2.square();
    return t4 * t2 * t;
}

inline Fr encrypt(const Fr& x, const Fr& k, const MimcParams& params) {
    Fr acc = x;
    for (const Fr& c : params.constants) acc = pow7(acc + k + c);
    return acc + k;
}

// Miyaguchi-Preneel chain: s <- s + x + E_s(x), starting from s = 0.
inline Fr hash_vec(std::span<const Fr> xs, const MimcParams& params) {
    if (xs.empty()) throw std::invalid_argument("hash_vec: empty input");
    Fr state = Fr::zero();
    for (const Fr& x : xs) state = state + x + encrypt(x, state, params);
    return state;
}

// Packs little-endian 64-bit words three to a field element:
// e0 + e1*2^64 + e2*2^128, zero-padded tail. Values must be < 2^64 each,
// which the fixed-point encoding guarantees with a wide margin.
inline std::vector<Fr> pack_words(std::span<const u64> words) {
    std::vector<Fr> out;
    out.reserve((words.size() + 2) / 3);
    for (std::size_t i = 0; i < words.size(); i += 3) {
        Limbs limbs{words[i], 0, 0, 0};
        if (i + 1 < words.size()) limbs[1] = words[i + 1];
        if (i + 2 < words.size()) limbs[2] = words[i + 2];
        out.push_back(Fr::from_u256_reduce(limbs));
    }
    return out;
}

inline Fr hash_packed_words(std::span<const u64> words, const MimcParams& params) {
    auto packed = pack_words(words);
    return hash_vec(packed, params);
}

// ---- gadget forms ----
//
// Gadgets are generic over the sink so the same synthesis path can build a
// real ConstraintSystem, count constraints, or (with `values`) generate the
// witness assignment. `values` grows in allocation order: values[i] is the
// value of variable index i.

template <typename Sys>
struct Synth {
    Sys& sys;
    std::vector<Fr>* values = nullptr; // non-null: also compute assignments

    Variable alloc(const Fr& value) {
        Variable v = sys.alloc_witness();
        if (values) values->push_back(value);
        return v;
    }

    Fr eval(const LinearCombination& lc) const {
        return values ? lc.evaluate(*values) : Fr::zero();
    }

    void enforce(LinearCombination a, LinearCombination b, LinearCombination c) {
        sys.enforce(std::move(a), std::move(b), std::move(c));
    }
};

// Constrains out = E_k(x) with exactly 4 multiplication constraints per
// round: t^2, t^4, t^6 = t^4 * t^2, and t^7 folded into the chain step. The
// final round's product lands directly on (out - k).
template <typename Sys>
Variable encrypt_gadget(Synth<Sys>& synth, const LinearCombination& x,
                        const LinearCombination& k, const MimcParams& params) {
    const std::size_t r = params.rounds();
    LinearCombination acc = x;
    Fr acc_val = synth.eval(x);
    Fr k_val = synth.eval(k);
    Variable out;
    for (std::size_t i = 0; i < r; ++i) {
        LinearCombination t = acc + k + LinearCombination::constant(params.constants[i]);
        Fr t_val = acc_val + k_val + params.constants[i];
        Fr t2_val = t_val.square();
        Fr t4_val = t2_val.square();
        Fr t6_val = t4_val * t2_val;
        Variable t2 = synth.alloc(t2_val);
        Variable t4 = synth.alloc(t4_val);
        Variable t6 = synth.alloc(t6_val);
        synth.enforce(t, t, LinearCombination(t2));
        synth.enforce(LinearCombination(t2), LinearCombination(t2), LinearCombination(t4));
        synth.enforce(LinearCombination(t4), LinearCombination(t2), LinearCombination(t6));
        Fr t7_val = t6_val * t_val;
        if (i + 1 < r) {
            Variable next = synth.alloc(t7_val);
            synth.enforce(LinearCombination(t6), t, LinearCombination(next));
            acc = LinearCombination(next);
            acc_val = t7_val;
        } else {
            // out = t^7 + k  <=>  t^6 * t = out - k
            out = synth.alloc(t7_val + k_val);
            synth.enforce(LinearCombination(t6), t, LinearCombination(out) - k);
        }
    }
    return out;
}

// Chained digest of a packed vector; each element costs 4r + 1 constraints
// (the +1 materializes the running state, and for the last element it binds
// the digest to `target` when one is supplied).
template <typename Sys>
Variable hash_vec_gadget(Synth<Sys>& synth, std::span<const LinearCombination> xs,
                         const MimcParams& params,
                         const Variable* target = nullptr) {
    if (xs.empty()) throw std::invalid_argument("hash_vec_gadget: empty input");
    LinearCombination state; // starts at zero
    Fr state_val = Fr::zero();
    Variable state_var{};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Variable enc = encrypt_gadget(synth, xs[i], state, params);
        LinearCombination next = state + xs[i] + LinearCombination(enc);
        Fr next_val = state_val + synth.eval(xs[i]) + synth.eval(LinearCombination(enc));
        bool last = (i + 1 == xs.size());
        if (last && target) {
            state_var = *target;
        } else {
            state_var = synth.alloc(next_val);
        }
        synth.enforce(next, LinearCombination(synth.sys.one()), LinearCombination(state_var));
        state = LinearCombination(state_var);
        state_val = next_val;
    }
    return state_var;
}

// Spec-facing overload: variable-in, variable-out single-block gadget.
inline Variable gadget(ConstraintSystem& cs, const Variable& x, const Variable& k,
                       const MimcParams& params) {
    Synth<ConstraintSystem> synth{cs, nullptr};
    return encrypt_gadget(synth, LinearCombination(x), LinearCombination(k), params);
}

} // namespace zkdfl::mimc7
