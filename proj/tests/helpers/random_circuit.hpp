#pragma once

// Random satisfiable R1CS instances built by forward evaluation: every
// constraint multiplies two random linear combinations of existing variables
// into a fresh witness variable.

#include <memory>
#include <vector>

#include "zkdfl/r1cs.hpp"
#include "zkdfl/rng.hpp"

namespace zkdfl::testing {

struct RandomInstance {
    std::shared_ptr<ConstraintSystem> cs;
    std::vector<Fr> assignment;        // full: [1, publics..., witnesses...]
    std::vector<std::size_t> products; // indices of forward-computed variables
};

inline RandomInstance random_satisfiable_system(SplitMix64& rng, std::size_t num_public,
                                                std::size_t num_constraints) {
    RandomInstance out;
    out.cs = std::make_shared<ConstraintSystem>();
    out.assignment.push_back(Fr::one());

    std::vector<Variable> vars;
    vars.push_back(out.cs->one());
    for (std::size_t i = 0; i < num_public; ++i) {
        vars.push_back(out.cs->alloc_public());
        out.assignment.push_back(rng.next_fr());
    }
    for (std::size_t i = 0; i < num_constraints; ++i) {
        auto random_lc = [&](Fr& value) {
            LinearCombination lc;
            value = Fr::zero();
            std::size_t terms = 1 + rng.next_below(3);
            for (std::size_t t = 0; t < terms; ++t) {
                const Variable& v = vars[rng.next_below(vars.size())];
                Fr coeff = Fr::from_u64(1 + rng.next_below(1000));
                lc.add(v, coeff);
                value += coeff * out.assignment[v.index];
            }
            return lc;
        };
        Fr av, bv;
        LinearCombination a = random_lc(av);
        LinearCombination b = random_lc(bv);
        if (i == 0) {
            // Anchor every public input into the statement; an input no
            // constraint touches would be semantically meaningless (and
            // unfalsifiable, since its key element is the zero point).
            for (std::size_t pi = 1; pi <= num_public; ++pi) {
                a.add(vars[pi], Fr::one());
                av += out.assignment[pi];
            }
        }
        Variable prod = out.cs->alloc_witness();
        out.assignment.push_back(av * bv);
        out.cs->enforce(a, b, LinearCombination(prod));
        vars.push_back(prod);
        out.products.push_back(prod.index);
    }
    return out;
}

} // namespace zkdfl::testing
