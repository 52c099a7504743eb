#pragma once

// Three-phase pairing-based proof system over a QAP: single-party trusted
// setup producing the CRS, randomized prover, and pairing-product verifier.

#include <memory>
#include <string>

#include "zkdfl/pairing.hpp"
#include "zkdfl/qap.hpp"
#include "zkdfl/rng.hpp"

namespace zkdfl::groth16 {

struct ToxicWaste {
    Fr tau, alpha, beta, gamma, delta;
};

struct ProvingKey {
    G1Affine alpha_g1, beta_g1, delta_g1;
    G2Affine beta_g2, delta_g2;
    std::vector<G1Affine> a_query;  // u_i(tau), all variables
    std::vector<G1Affine> b1_query; // v_i(tau) in G1, all variables
    std::vector<G2Affine> b2_query; // v_i(tau) in G2, all variables
    std::vector<G1Affine> k_query;  // (beta u_i + alpha v_i + w_i)/delta, witness variables
    std::vector<G1Affine> h_query;  // tau^i t(tau)/delta, i < d-1
    std::uint32_t num_public = 0;
};

struct VerifyingKey {
    G1Affine alpha_g1;
    G2Affine beta_g2, gamma_g2, delta_g2;
    std::vector<G1Affine> ic; // (beta u_i + alpha v_i + w_i)/gamma, i <= num_public
};

struct Proof {
    G1Affine a;
    G2Affine b;
    G1Affine c;
};

// Raised when the assignment fails the satisfiability pre-check.
class UnsatisfiedCircuit : public std::runtime_error {
public:
    explicit UnsatisfiedCircuit(std::size_t index)
        : std::runtime_error("unsatisfied circuit: constraint " + std::to_string(index) +
                             " does not hold"),
          constraint_index(index) {}
    std::size_t constraint_index;
};

namespace detail {

inline const FixedBaseTable<G1Curve>& g1_gen_table() {
    static const FixedBaseTable<G1Curve> t(G1Affine::generator());
    return t;
}

inline const FixedBaseTable<G2Curve>& g2_gen_table() {
    static const FixedBaseTable<G2Curve> t(G2Affine::generator());
    return t;
}

inline std::vector<G1Affine> g1_fixed_base_batch(std::span<const Fr> scalars) {
    std::vector<G1Jac> jac(scalars.size());
    parallel_chunks(scalars.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) jac[i] = g1_gen_table().mul(scalars[i]);
    });
    return ec_batch_to_affine<G1Curve>(jac);
}

inline std::vector<G2Affine> g2_fixed_base_batch(std::span<const Fr> scalars) {
    std::vector<G2Jac> jac(scalars.size());
    parallel_chunks(scalars.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) jac[i] = g2_gen_table().mul(scalars[i]);
    });
    return ec_batch_to_affine<G2Curve>(jac);
}

} // namespace detail

struct SetupResult {
    ProvingKey pk;
    VerifyingKey vk;
    ToxicWaste waste; // retained for tests; discard in production use
};

inline SetupResult setup(const Qap& qap, SplitMix64& rng) {
    if (qap.system().num_constraints() == 0)
        throw std::invalid_argument("setup: degenerate QAP with zero constraints");

    ToxicWaste tw;
    tw.alpha = rng.next_fr_nonzero();
    tw.beta = rng.next_fr_nonzero();
    tw.gamma = rng.next_fr_nonzero();
    tw.delta = rng.next_fr_nonzero();
    tw.tau = rng.next_fr_nonzero();
    // tau must avoid the evaluation domain (t(tau) != 0)
    for (;;) {
        Fr td = tw.tau.pow(std::span<const u64>(Limbs{qap.domain_size(), 0, 0, 0}.data(), 4));
        if (td != Fr::one()) break;
        tw.tau = rng.next_fr_nonzero();
    }

    QapTauEvals evals = qap.evaluate_at(tw.tau);
    const std::uint32_t n_vars = qap.num_variables();
    const std::uint32_t n_pub = qap.num_public();
    Fr gamma_inv = tw.gamma.inverse();
    Fr delta_inv = tw.delta.inverse();

    std::vector<Fr> k_scalars(n_vars - n_pub - 1);
    std::vector<Fr> ic_scalars(n_pub + 1);
    for (std::uint32_t i = 0; i < n_vars; ++i) {
        Fr k = tw.beta * evals.a[i] + tw.alpha * evals.b[i] + evals.c[i];
        if (i <= n_pub)
            ic_scalars[i] = k * gamma_inv;
        else
            k_scalars[i - n_pub - 1] = k * delta_inv;
    }
    std::vector<Fr> h_scalars(qap.domain_size() - 1);
    Fr t_delta = evals.t_at_tau * delta_inv;
    for (std::size_t i = 0; i < h_scalars.size(); ++i) h_scalars[i] = evals.tau_powers[i] * t_delta;

    SetupResult out;
    out.pk.num_public = n_pub;
    out.pk.alpha_g1 = ec_to_affine(detail::g1_gen_table().mul(tw.alpha));
    out.pk.beta_g1 = ec_to_affine(detail::g1_gen_table().mul(tw.beta));
    out.pk.delta_g1 = ec_to_affine(detail::g1_gen_table().mul(tw.delta));
    out.pk.beta_g2 = ec_to_affine(detail::g2_gen_table().mul(tw.beta));
    out.pk.delta_g2 = ec_to_affine(detail::g2_gen_table().mul(tw.delta));
    out.pk.a_query = detail::g1_fixed_base_batch(evals.a);
    out.pk.b1_query = detail::g1_fixed_base_batch(evals.b);
    out.pk.b2_query = detail::g2_fixed_base_batch(evals.b);
    out.pk.k_query = detail::g1_fixed_base_batch(k_scalars);
    out.pk.h_query = detail::g1_fixed_base_batch(h_scalars);

    out.vk.alpha_g1 = out.pk.alpha_g1;
    out.vk.beta_g2 = out.pk.beta_g2;
    out.vk.gamma_g2 = ec_to_affine(detail::g2_gen_table().mul(tw.gamma));
    out.vk.delta_g2 = out.pk.delta_g2;
    out.vk.ic = detail::g1_fixed_base_batch(ic_scalars);

    out.waste = tw;
    return out;
}

inline Proof prove(const ProvingKey& pk, const Qap& qap, std::span<const Fr> public_inputs,
                   std::span<const Fr> witness, SplitMix64& rng) {
    const auto& cs = qap.system();
    if (public_inputs.size() != cs.num_public() || witness.size() != cs.num_witness())
        throw std::invalid_argument("prove: assignment shape mismatch");

    std::vector<Fr> z;
    z.reserve(cs.num_variables());
    z.push_back(Fr::one());
    z.insert(z.end(), public_inputs.begin(), public_inputs.end());
    z.insert(z.end(), witness.begin(), witness.end());

    if (auto bad = cs.first_unsatisfied(z)) throw UnsatisfiedCircuit(*bad);

    Fr r = rng.next_fr();
    Fr s = rng.next_fr();

    std::vector<Fr> h = qap.quotient_coeffs(z);
    h.resize(qap.domain_size() - 1); // degree <= d - 2 once satisfiability holds

    // A = alpha + sum z_i u_i(tau) + r delta
    G1Jac a_acc = ec_msm<G1Curve>(pk.a_query, z);
    a_acc = ec_add_mixed(a_acc, pk.alpha_g1);
    a_acc = ec_add(a_acc, ec_scalar_mul(pk.delta_g1, r));
    G1Affine a = ec_to_affine(a_acc);

    G2Jac b_acc = ec_msm<G2Curve>(pk.b2_query, z);
    b_acc = ec_add_mixed(b_acc, pk.beta_g2);
    b_acc = ec_add(b_acc, ec_scalar_mul(pk.delta_g2, s));
    G2Affine b = ec_to_affine(b_acc);

    G1Jac b1_acc = ec_msm<G1Curve>(pk.b1_query, z);
    b1_acc = ec_add_mixed(b1_acc, pk.beta_g1);
    b1_acc = ec_add(b1_acc, ec_scalar_mul(pk.delta_g1, s));

    G1Jac c_acc = ec_msm<G1Curve>(pk.k_query, witness);
    c_acc = ec_add(c_acc, ec_msm<G1Curve>(pk.h_query, h));
    c_acc = ec_add(c_acc, ec_scalar_mul(a, s));
    c_acc = ec_add(c_acc, ec_scalar_mul(ec_to_affine(b1_acc), r));
    c_acc = ec_add(c_acc, ec_scalar_mul(pk.delta_g1, -(r * s)));
    G1Affine c = ec_to_affine(c_acc);

    return Proof{a, b, c};
}

inline bool verify(const VerifyingKey& vk, std::span<const Fr> public_inputs,
                   const Proof& proof) {
    if (public_inputs.size() + 1 != vk.ic.size())
        throw std::invalid_argument("verify: public input count does not match key");

    G1Jac vkx = G1Jac::from_affine(vk.ic[0]);
    if (!public_inputs.empty())
        vkx = ec_add(vkx, ec_msm<G1Curve>(std::span<const G1Affine>(vk.ic).subspan(1),
                                          public_inputs));

    // e(A, B) = e(alpha, beta) e(vk_x, gamma) e(C, delta)
    std::array<G1Affine, 4> g1s{proof.a, vk.alpha_g1.negate(), ec_to_affine(vkx).negate(),
                                proof.c.negate()};
    std::array<G2Affine, 4> g2s{proof.b, vk.beta_g2, vk.gamma_g2, vk.delta_g2};
    return pairing_product(g1s, g2s) == Gt::one();
}

// ---- byte formats ----
// proof file: A(64) || B(128) || C(64)
// verifying-key file: alpha(64) || beta(128) || gamma(128) || delta(128) ||
//                     ic-count (4-byte big-endian) || ic elements (64 each)

inline Bytes serialize_proof(const Proof& p) {
    Bytes out;
    append_bytes(out, g1_to_bytes(p.a));
    append_bytes(out, g2_to_bytes(p.b));
    append_bytes(out, g1_to_bytes(p.c));
    return out;
}

inline Proof deserialize_proof(std::span<const std::uint8_t> in) {
    if (in.size() != 256) throw std::invalid_argument("proof must be exactly 256 bytes");
    Proof p;
    p.a = g1_from_bytes(in.subspan(0, 64));
    p.b = g2_from_bytes(in.subspan(64, 128));
    p.c = g1_from_bytes(in.subspan(192, 64));
    return p;
}

inline Bytes serialize_vk(const VerifyingKey& vk) {
    Bytes out;
    append_bytes(out, g1_to_bytes(vk.alpha_g1));
    append_bytes(out, g2_to_bytes(vk.beta_g2));
    append_bytes(out, g2_to_bytes(vk.gamma_g2));
    append_bytes(out, g2_to_bytes(vk.delta_g2));
    append_u32_be(out, (std::uint32_t)vk.ic.size());
    for (const auto& p : vk.ic) append_bytes(out, g1_to_bytes(p));
    return out;
}

inline VerifyingKey deserialize_vk(std::span<const std::uint8_t> in) {
    if (in.size() < 64 + 3 * 128 + 4) throw std::invalid_argument("verifying key too short");
    VerifyingKey vk;
    vk.alpha_g1 = g1_from_bytes(in.subspan(0, 64));
    vk.beta_g2 = g2_from_bytes(in.subspan(64, 128));
    vk.gamma_g2 = g2_from_bytes(in.subspan(192, 128));
    vk.delta_g2 = g2_from_bytes(in.subspan(320, 128));
    std::uint32_t count = read_u32_be(in.subspan(448, 4));
    if (in.size() != 452 + (std::size_t)count * 64)
        throw std::invalid_argument("verifying key length mismatch");
    vk.ic.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        vk.ic.push_back(g1_from_bytes(in.subspan(452 + (std::size_t)i * 64, 64)));
    return vk;
}

} // namespace zkdfl::groth16
