#pragma once

// R1CS -> QAP reduction. Constraint i maps to the domain point w^i of the
// smallest power-of-two roots-of-unity domain covering all constraints; the
// per-variable polynomials are carried implicitly by the sparse constraint
// rows (the evaluation of A_i at w^j is A_j's coefficient on variable i).

#include <memory>

#include "zkdfl/fft.hpp"
#include "zkdfl/parallel.hpp"
#include "zkdfl/r1cs.hpp"

namespace zkdfl {

struct QapTauEvals {
    std::vector<Fr> a, b, c; // per-variable polynomial values at tau
    Fr t_at_tau;             // tau^d - 1
    std::vector<Fr> tau_powers;
};

class Qap {
public:
    Qap(std::shared_ptr<const ConstraintSystem> cs, std::size_t domain_size)
        : cs_(std::move(cs)), domain_(domain_size) {}

    const ConstraintSystem& system() const { return *cs_; }
    std::shared_ptr<const ConstraintSystem> system_ptr() const { return cs_; }
    std::size_t domain_size() const { return domain_; }
    std::uint32_t num_public() const { return cs_->num_public(); }
    std::uint32_t num_variables() const { return cs_->num_variables(); }

    // Values of every variable polynomial at an out-of-domain point tau.
    QapTauEvals evaluate_at(const Fr& tau) const {
        const std::size_t d = domain_;
        Fr t_at_tau = tau.pow(std::span<const u64>(Limbs{d, 0, 0, 0}.data(), 4)) - Fr::one();
        if (t_at_tau.is_zero())
            throw std::invalid_argument("Qap::evaluate_at: tau lies on the domain");

        // Lagrange basis at tau: L_j(tau) = w^j * (tau^d - 1) / (d * (tau - w^j)).
        Fr w = fr_root_of_unity(log2_exact(d));
        std::vector<Fr> denom(cs_->num_constraints());
        Fr wj = Fr::one();
        for (std::size_t j = 0; j < denom.size(); ++j) {
            denom[j] = tau - wj;
            wj *= w;
        }
        // batch inversion
        std::vector<Fr> prefix(denom.size());
        Fr acc = Fr::one();
        for (std::size_t j = 0; j < denom.size(); ++j) {
            prefix[j] = acc;
            acc *= denom[j];
        }
        Fr inv = acc.inverse();
        std::vector<Fr> lagrange(denom.size());
        Fr dinv_t = Fr::from_u64((u64)d).inverse() * t_at_tau;
        for (std::size_t j = denom.size(); j-- > 0;) {
            Fr dj_inv = inv * prefix[j];
            inv *= denom[j];
            lagrange[j] = dj_inv * dinv_t;
        }
        wj = Fr::one();
        for (std::size_t j = 0; j < lagrange.size(); ++j) {
            lagrange[j] *= wj;
            wj *= w;
        }

        QapTauEvals out;
        out.t_at_tau = t_at_tau;
        out.a.assign(cs_->num_variables(), Fr::zero());
        out.b.assign(cs_->num_variables(), Fr::zero());
        out.c.assign(cs_->num_variables(), Fr::zero());
        const auto& rows = cs_->constraints();
        for (std::size_t j = 0; j < rows.size(); ++j) {
            for (const auto& t : rows[j].a.terms()) out.a[t.index] += t.coeff * lagrange[j];
            for (const auto& t : rows[j].b.terms()) out.b[t.index] += t.coeff * lagrange[j];
            for (const auto& t : rows[j].c.terms()) out.c[t.index] += t.coeff * lagrange[j];
        }
        out.tau_powers.resize(d);
        Fr p = Fr::one();
        for (std::size_t i = 0; i < d; ++i) {
            out.tau_powers[i] = p;
            p *= tau;
        }
        return out;
    }

    // Domain evaluations of A(x), B(x), C(x) for a full assignment.
    std::array<std::vector<Fr>, 3> assignment_evals(std::span<const Fr> assignment) const {
        std::array<std::vector<Fr>, 3> out;
        for (auto& v : out) v.assign(domain_, Fr::zero());
        const auto& rows = cs_->constraints();
        parallel_chunks(rows.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
            for (std::size_t j = lo; j < hi; ++j) {
                out[0][j] = rows[j].a.evaluate(assignment);
                out[1][j] = rows[j].b.evaluate(assignment);
                out[2][j] = rows[j].c.evaluate(assignment);
            }
        });
        return out;
    }

    // Coefficients of h(X) = (A(X) B(X) - C(X)) / t(X), degree <= d - 2.
    // Exact for satisfying assignments.
    std::vector<Fr> quotient_coeffs(std::span<const Fr> assignment) const {
        auto evals = assignment_evals(assignment);
        Fr shift = Fr::from_u64(FrConfig::multiplicative_generator);
        std::vector<Fr> a = coset_fft(ifft(std::move(evals[0])), shift);
        std::vector<Fr> b = coset_fft(ifft(std::move(evals[1])), shift);
        std::vector<Fr> c = coset_fft(ifft(std::move(evals[2])), shift);
        // t on the coset is the constant shift^d - 1.
        Fr t_inv =
            (shift.pow(std::span<const u64>(Limbs{domain_, 0, 0, 0}.data(), 4)) - Fr::one())
                .inverse();
        for (std::size_t i = 0; i < domain_; ++i) a[i] = (a[i] * b[i] - c[i]) * t_inv;
        return coset_ifft(std::move(a), shift);
    }

private:
    std::shared_ptr<const ConstraintSystem> cs_;
    std::size_t domain_;
};

inline Qap to_qap(std::shared_ptr<const ConstraintSystem> cs) {
    if (!cs || cs->num_constraints() == 0)
        throw std::invalid_argument("to_qap: system must have at least one constraint");
    std::size_t d = 1;
    while (d < cs->num_constraints()) d <<= 1;
    return Qap(std::move(cs), d);
}

} // namespace zkdfl
