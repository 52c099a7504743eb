#include <catch2/catch_amalgamated.hpp>

#include "zkdfl/agg_circuit.hpp"
#include "zkdfl/fl.hpp"
#include "zkdfl/groth16.hpp"

using namespace zkdfl;

namespace {

std::vector<Fr> full_assignment(const agg::WitnessResult& w) {
    std::vector<Fr> z;
    z.push_back(Fr::one());
    z.insert(z.end(), w.publics.begin(), w.publics.end());
    z.insert(z.end(), w.witness.begin(), w.witness.end());
    return z;
}

std::vector<std::vector<u64>> random_encoded(SplitMix64& rng, std::uint32_t m, std::uint32_t p) {
    std::vector<std::vector<u64>> enc(m, std::vector<u64>(p));
    for (auto& row : enc)
        for (auto& v : row) v = (u64(1) << 40) + rng.next_below(u64(1) << 30);
    return enc;
}

} // namespace

TEST_CASE("m=1 identity aggregation") {
    const auto& params = mimc7::default_params();
    auto built = agg::build_circuit(1, 1, params);
    std::vector<std::vector<u64>> enc{{12345}};
    auto wit = agg::assign_witness(enc, params);
    REQUIRE(wit.layout.num_variables == built.cs->num_variables());
    CHECK(built.cs->is_satisfied(full_assignment(wit)));
    CHECK(wit.quotient[0] == 12345);
    CHECK(wit.remainder[0] == 0);

    // q must equal e; a perturbed quotient breaks the system
    auto z = full_assignment(wit);
    z[1 + wit.layout.num_public() + wit.layout.q_offset(0)] += Fr::one();
    CHECK_FALSE(built.cs->is_satisfied(z));
}

TEST_CASE("small instances reproduce integer floor division") {
    const auto& params = mimc7::default_params();
    {
        auto built = agg::build_circuit(2, 2, params);
        std::vector<std::vector<u64>> enc{{10, 11}, {12, 15}};
        auto wit = agg::assign_witness(enc, params);
        CHECK(wit.quotient == std::vector<u64>{11, 13});
        CHECK(wit.remainder == std::vector<u64>{0, 0});
        CHECK(built.cs->is_satisfied(full_assignment(wit)));
    }
    {
        auto built = agg::build_circuit(3, 1, params);
        auto wit_a = agg::assign_witness({{1}, {2}, {3}}, params);
        CHECK(wit_a.quotient[0] == 2);
        CHECK(wit_a.remainder[0] == 0);
        CHECK(built.cs->is_satisfied(full_assignment(wit_a)));

        auto wit_b = agg::assign_witness({{1}, {2}, {4}}, params);
        CHECK(wit_b.quotient[0] == 2);
        CHECK(wit_b.remainder[0] == 1);
        CHECK(built.cs->is_satisfied(full_assignment(wit_b)));
    }
}

TEST_CASE("honest fixed-point encodings from the FL stack satisfy the circuit") {
    const auto& params = mimc7::default_params();
    SplitMix64 rng(501);
    fl::FixedPointCodec codec;
    const std::uint32_t m = 3;
    std::vector<std::vector<u64>> enc;
    for (std::uint32_t k = 0; k < m; ++k) {
        fl::FlatWeights w(17);
        for (auto& v : w) v = rng.next_gaussian();
        enc.push_back(fl::encode_weights(w, codec));
    }
    auto built = agg::build_circuit(m, 17, params);
    auto wit = agg::assign_witness(enc, params);
    CHECK(built.cs->is_satisfied(full_assignment(wit)));

    // H_sum is the field sum of the client digests (by construction, asserted)
    Fr sum = Fr::zero();
    for (std::uint32_t k = 0; k < m; ++k) sum += wit.publics[k];
    CHECK(wit.publics[m + 1] == sum);
}

TEST_CASE("a value mutated after hashing breaks satisfiability") {
    const auto& params = mimc7::default_params();
    SplitMix64 rng(502);
    auto enc = random_encoded(rng, 3, 5);
    auto built = agg::build_circuit(3, 5, params);
    auto wit = agg::assign_witness(enc, params);
    auto z = full_assignment(wit);
    REQUIRE(built.cs->is_satisfied(z));

    std::size_t witness_base = 1 + wit.layout.num_public();
    auto mutated = z;
    mutated[witness_base + wit.layout.e_offset(1, 3)] += Fr::one();
    CHECK_FALSE(built.cs->is_satisfied(mutated));
}

TEST_CASE("assign_witness validates inputs") {
    const auto& params = mimc7::default_params();
    std::vector<std::vector<u64>> empty;
    CHECK_THROWS_AS(agg::assign_witness(empty, params), std::invalid_argument);
    std::vector<std::vector<u64>> ragged{{1, 2}, {3}};
    CHECK_THROWS_AS(agg::assign_witness(ragged, params), std::invalid_argument);
    std::vector<std::vector<u64>> oversized{{u64(1) << 47}};
    CHECK_THROWS_AS(agg::assign_witness(oversized, params), std::range_error);
}

TEST_CASE("constraint_count matches the materialized build") {
    const auto& params = mimc7::default_params();
    for (std::uint32_t m : {1u, 2u, 3u, 5u}) {
        for (std::uint32_t p : {1u, 2u, 7u}) {
            auto built = agg::build_circuit(m, p, params);
            CHECK(agg::constraint_count(m, p, params) == built.cs->num_constraints());
            CHECK(built.layout.num_constraints == built.cs->num_constraints());
        }
    }
}

TEST_CASE("constraint count doubles with client count (measured trend)") {
    const auto& params = mimc7::default_params();
    // The hash chains scale with m+1 (m client digests plus the output
    // digest) and the range checks are m-independent, so the empirical
    // doubling ratio sits just below 2.
    double c5 = (double)agg::constraint_count(5, 669, params);
    double c10 = (double)agg::constraint_count(10, 669, params);
    double c20 = (double)agg::constraint_count(20, 669, params);
    CHECK(c10 / c5 > 1.7);
    CHECK(c10 / c5 < 2.0);
    CHECK(c20 / c10 > 1.8);
    CHECK(c20 / c10 < 2.0);
}

TEST_CASE("constraint count is linear in the parameter count") {
    const auto& params = mimc7::default_params();
    std::vector<double> xs, ys;
    for (std::uint32_t p : {100u, 200u, 400u, 800u}) {
        xs.push_back((double)p);
        ys.push_back((double)agg::constraint_count(5, p, params));
    }
    double n = (double)xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double fit = slope * xs[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - sy / n) * (ys[i] - sy / n);
    }
    CHECK(1.0 - ss_res / ss_tot >= 0.999);
}

TEST_CASE("statement-level soundness: every single-value perturbation detected") {
    const auto& params = mimc7::default_params();
    SplitMix64 rng(503);
    for (std::uint32_t m : {2u, 4u}) {
        auto enc = random_encoded(rng, m, 4);
        auto built = agg::build_circuit(m, 4, params);
        auto wit = agg::assign_witness(enc, params);
        auto z = full_assignment(wit);
        REQUIRE(built.cs->is_satisfied(z));
        for (std::size_t i = 1; i < z.size(); ++i) {
            auto mutated = z;
            mutated[i] += Fr::one();
            if (built.cs->is_satisfied(mutated)) {
                CAPTURE(m, i);
                FAIL("perturbation went undetected");
            }
        }
    }
}

TEST_CASE("quotient/remainder uniqueness under the range checks") {
    SplitMix64 rng(504);
    for (int trial = 0; trial < 50; ++trial) {
        u64 m = 2 + rng.next_below(6);
        u64 sum = 0;
        for (u64 k = 0; k < m; ++k) sum += rng.next_below(u64(1) << 41);
        int valid = 0;
        for (u64 rem = 0; rem < m; ++rem) {
            if ((sum - rem) % m != 0) continue;
            if ((sum - rem) / m >= (u64(1) << 48)) continue;
            ++valid;
        }
        CHECK(valid == 1);
    }
}

TEST_CASE("decoded circuit quotient tracks floating FedAvg within 2/S") {
    const auto& params = mimc7::default_params();
    SplitMix64 rng(505);
    fl::FixedPointCodec codec;
    for (int trial = 0; trial < 10; ++trial) {
        std::uint32_t m = 2 + (std::uint32_t)rng.next_below(6);
        std::uint32_t p = 1 + (std::uint32_t)rng.next_below(30);
        std::vector<fl::FlatWeights> ws(m, fl::FlatWeights(p));
        std::vector<std::size_t> sizes(m, 1); // equal weights in-circuit
        std::vector<std::vector<u64>> enc;
        for (auto& w : ws) {
            for (auto& v : w) v = 4.0 * (2.0 * rng.next_double() - 1.0);
            enc.push_back(fl::encode_weights(w, codec));
        }
        auto wit = agg::assign_witness(enc, params);
        auto reference = fl::fed_avg(ws, sizes);
        for (std::uint32_t j = 0; j < p; ++j) {
            double decoded = codec.decode_one(wit.quotient[j]);
            CHECK(std::abs(decoded - reference[j]) <= 2.0 / codec.scale);
        }
    }
}

TEST_CASE("end-to-end: aggregation statement proves and verifies") {
    const auto& params = mimc7::default_params();
    SplitMix64 rng(506);
    auto enc = random_encoded(rng, 2, 3);
    auto built = agg::build_circuit(2, 3, params);
    auto wit = agg::assign_witness(enc, params);

    Qap qap = to_qap(built.cs);
    auto keys = groth16::setup(qap, rng);
    auto proof = groth16::prove(keys.pk, qap, wit.publics, wit.witness, rng);
    CHECK(groth16::verify(keys.vk, wit.publics, proof));

    // mutated H_sum rejects
    auto bad = wit.publics;
    bad[wit.layout.h_sum_index() - 1] += Fr::one();
    CHECK_FALSE(groth16::verify(keys.vk, bad, proof));
}
