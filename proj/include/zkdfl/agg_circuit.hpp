#pragma once

// The aggregation statement: one circuit proving, for m clients with P
// encoded parameters each, that (a) the quotient vector is the exact integer
// floor-average of the client vectors (sum_k e_kj = m q_j + rem_j with both
// q and rem range-checked), (b) each public H^k is the MiMC7 chain digest of
// client k's packed vector, (c) w_hash is the digest of the packed quotient,
// and (d) H_sum is the field sum of the client digests.
//
// Public input order: [H^1 .. H^m, w_hash, H_sum].
// Witness order: e_{k,j} (client-major), q_j, rem_j, per-parameter
// decomposition bits, then hash-gadget intermediates.

#include <memory>

#include "zkdfl/mimc7.hpp"
#include "zkdfl/qap.hpp"

namespace zkdfl::agg {

inline constexpr std::uint32_t QUOTIENT_BITS = 48;

inline std::uint32_t rem_bit_width(std::uint32_t m) {
    std::uint32_t b = 0;
    std::uint32_t top = m - 1;
    while (top) {
        ++b;
        top >>= 1;
    }
    return b; // 0 when m == 1
}

struct AggStatement {
    std::uint32_t m = 0;
    std::uint32_t num_params = 0;
    std::uint32_t rem_bits = 0;
    std::size_t pack_len = 0;        // ceil(P / 3)
    std::size_t num_constraints = 0;
    std::size_t num_variables = 0;

    std::uint32_t num_public() const { return m + 2; }
    std::uint32_t h_index(std::uint32_t k) const { return 1 + k; }
    std::uint32_t w_hash_index() const { return m + 1; }
    std::uint32_t h_sum_index() const { return m + 2; }
    // witness vector offsets (0-based within the witness block)
    std::size_t e_offset(std::uint32_t k, std::uint32_t j) const {
        return (std::size_t)k * num_params + j;
    }
    std::size_t q_offset(std::uint32_t j) const {
        return (std::size_t)m * num_params + j;
    }
    std::size_t rem_offset(std::uint32_t j) const {
        return (std::size_t)m * num_params + num_params + j;
    }
};

namespace detail {

struct AssignData {
    const std::vector<std::vector<u64>>* encoded = nullptr;
    std::vector<u64> quotient;
    std::vector<u64> remainder;
    std::vector<Fr> publics;
};

inline Fr pow2_fr(unsigned i) {
    Limbs l{0, 0, 0, 0};
    l[i / 64] = u64(1) << (i % 64);
    return Fr::from_u256_reduce(l);
}

// One synthesis path for all three uses: building the real system, counting
// constraints, and generating the witness values.
template <typename Sys>
AggStatement synthesize(Sys& sys, std::vector<Fr>* values, std::uint32_t m, std::uint32_t P,
                        const mimc7::MimcParams& params, const AssignData* data) {
    if (m < 1 || P < 1) throw std::invalid_argument("agg circuit: need m >= 1 and P >= 1");

    AggStatement st;
    st.m = m;
    st.num_params = P;
    st.rem_bits = rem_bit_width(m);
    st.pack_len = ((std::size_t)P + 2) / 3;

    mimc7::Synth<Sys> synth{sys, values};
    const Fr m_fr = Fr::from_u64(m);

    // publics
    std::vector<Variable> h_vars(m);
    for (std::uint32_t k = 0; k < m; ++k) {
        h_vars[k] = sys.alloc_public();
        if (values) values->push_back(data->publics[k]);
    }
    Variable w_hash_var = sys.alloc_public();
    if (values) values->push_back(data->publics[m]);
    Variable h_sum_var = sys.alloc_public();
    if (values) values->push_back(data->publics[m + 1]);

    // client vectors, quotient, remainder
    std::vector<std::vector<Variable>> e_vars(m, std::vector<Variable>(P));
    for (std::uint32_t k = 0; k < m; ++k)
        for (std::uint32_t j = 0; j < P; ++j)
            e_vars[k][j] = synth.alloc(values ? Fr::from_u64((*data->encoded)[k][j]) : Fr::zero());
    std::vector<Variable> q_vars(P), rem_vars(P);
    for (std::uint32_t j = 0; j < P; ++j)
        q_vars[j] = synth.alloc(values ? Fr::from_u64(data->quotient[j]) : Fr::zero());
    for (std::uint32_t j = 0; j < P; ++j)
        rem_vars[j] = synth.alloc(values ? Fr::from_u64(data->remainder[j]) : Fr::zero());

    // allocates `bits` boolean variables for val and constrains their
    // recomposition to equal target_lc
    auto bit_decompose = [&](u64 val, unsigned bits, const LinearCombination& target_lc) {
        LinearCombination recomposed;
        for (unsigned i = 0; i < bits; ++i) {
            Fr bit_val = ((val >> i) & 1) ? Fr::one() : Fr::zero();
            Variable b = synth.alloc(bit_val);
            // b * (1 - b) = 0
            synth.enforce(LinearCombination(b),
                          LinearCombination(sys.one()) - LinearCombination(b),
                          LinearCombination());
            recomposed.add(b, pow2_fr(i));
        }
        synth.enforce(recomposed, LinearCombination(sys.one()), target_lc);
    };

    // per-parameter averaging rows
    for (std::uint32_t j = 0; j < P; ++j) {
        u64 q_val = values ? data->quotient[j] : 0;
        u64 rem_val = values ? data->remainder[j] : 0;
        if (m == 1) {
            // degenerate: q = e, rem = 0
            synth.enforce(LinearCombination(rem_vars[j]), LinearCombination(sys.one()),
                          LinearCombination());
        } else {
            bit_decompose(q_val, QUOTIENT_BITS, LinearCombination(q_vars[j]));
            bit_decompose(rem_val, st.rem_bits, LinearCombination(rem_vars[j]));
            // m - 1 - rem in [0, 2^b) closes the range to [0, m)
            bit_decompose((u64)(m - 1) - rem_val, st.rem_bits,
                          LinearCombination::constant(Fr::from_u64(m - 1)) -
                              LinearCombination(rem_vars[j]));
        }
        LinearCombination col_sum;
        for (std::uint32_t k = 0; k < m; ++k) col_sum.add(e_vars[k][j], Fr::one());
        synth.enforce(col_sum, LinearCombination(sys.one()),
                      LinearCombination::term(q_vars[j], m_fr) + LinearCombination(rem_vars[j]));
    }

    // packs a parameter vector (as variables) three to a field element
    auto packed_lcs = [&](const std::vector<Variable>& vars) {
        std::vector<LinearCombination> out;
        out.reserve(st.pack_len);
        for (std::uint32_t j = 0; j < P; j += 3) {
            LinearCombination lc(vars[j]);
            if (j + 1 < P) lc.add(vars[j + 1], pow2_fr(64));
            if (j + 2 < P) lc.add(vars[j + 2], pow2_fr(128));
            out.push_back(std::move(lc));
        }
        return out;
    };

    // client digests bound to the public H^k slots
    for (std::uint32_t k = 0; k < m; ++k) {
        auto xs = packed_lcs(e_vars[k]);
        mimc7::hash_vec_gadget(synth, xs, params, &h_vars[k]);
    }
    // quotient digest bound to w_hash
    {
        auto xs = packed_lcs(q_vars);
        mimc7::hash_vec_gadget(synth, xs, params, &w_hash_var);
    }
    // H_sum = sum_k H^k
    LinearCombination digest_sum;
    for (std::uint32_t k = 0; k < m; ++k) digest_sum.add(h_vars[k], Fr::one());
    synth.enforce(digest_sum, LinearCombination(sys.one()), LinearCombination(h_sum_var));

    st.num_constraints = sys.num_constraints();
    st.num_variables = sys.num_variables();
    return st;
}

} // namespace detail

struct BuildResult {
    std::shared_ptr<ConstraintSystem> cs;
    AggStatement layout;
};

inline BuildResult build_circuit(std::uint32_t m, std::uint32_t P,
                                 const mimc7::MimcParams& params) {
    BuildResult out;
    out.cs = std::make_shared<ConstraintSystem>();
    out.layout = detail::synthesize(*out.cs, nullptr, m, P, params, nullptr);
    return out;
}

// Statement shape (counts, offsets) without materializing constraints.
inline AggStatement statement_shape(std::uint32_t m, std::uint32_t P,
                                    const mimc7::MimcParams& params) {
    ConstraintCounter counter;
    return detail::synthesize(counter, nullptr, m, P, params, nullptr);
}

// Exact count of the circuit build, without materializing constraints.
inline std::size_t constraint_count(std::uint32_t m, std::uint32_t P,
                                    const mimc7::MimcParams& params) {
    return statement_shape(m, P, params).num_constraints;
}

struct WitnessResult {
    AggStatement layout;
    std::vector<Fr> publics;  // [H^1..H^m, w_hash, H_sum]
    std::vector<Fr> witness;  // aligned with the circuit's witness block
    std::vector<u64> quotient;
    std::vector<u64> remainder;
};

// Computes the full satisfying assignment for honest encoded inputs.
inline WitnessResult assign_witness(const std::vector<std::vector<u64>>& encoded,
                                    const mimc7::MimcParams& params) {
    if (encoded.empty() || encoded[0].empty())
        throw std::invalid_argument("assign_witness: need at least one client and parameter");
    const std::uint32_t m = (std::uint32_t)encoded.size();
    const std::uint32_t P = (std::uint32_t)encoded[0].size();

    detail::AssignData data;
    data.encoded = &encoded;
    for (std::uint32_t k = 0; k < m; ++k) {
        if (encoded[k].size() != P)
            throw std::invalid_argument("assign_witness: ragged encoded matrix");
        for (std::uint32_t j = 0; j < P; ++j)
            if (encoded[k][j] >= (u64(1) << 47))
                throw std::range_error("assign_witness: encoded value at client " +
                                       std::to_string(k) + ", param " + std::to_string(j) +
                                       " exceeds 2^47");
    }
    data.quotient.resize(P);
    data.remainder.resize(P);
    for (std::uint32_t j = 0; j < P; ++j) {
        u64 sum = 0;
        for (std::uint32_t k = 0; k < m; ++k) sum += encoded[k][j];
        data.quotient[j] = sum / m;
        data.remainder[j] = sum % m;
    }
    Fr h_sum = Fr::zero();
    for (std::uint32_t k = 0; k < m; ++k) {
        Fr h = mimc7::hash_packed_words(encoded[k], params);
        data.publics.push_back(h);
        h_sum += h;
    }
    data.publics.push_back(mimc7::hash_packed_words(data.quotient, params));
    data.publics.push_back(h_sum);

    ConstraintCounter counter;
    std::vector<Fr> values;
    values.push_back(Fr::one());
    WitnessResult out;
    out.layout = detail::synthesize(counter, &values, m, P, params, &data);
    out.publics.assign(values.begin() + 1, values.begin() + 1 + out.layout.num_public());
    out.witness.assign(values.begin() + 1 + out.layout.num_public(), values.end());
    out.quotient = std::move(data.quotient);
    out.remainder = std::move(data.remainder);
    return out;
}

} // namespace zkdfl::agg
