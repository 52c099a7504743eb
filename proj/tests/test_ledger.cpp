#include <catch2/catch_amalgamated.hpp>

#include "zkdfl/agg_circuit.hpp"
#include "zkdfl/ledger.hpp"

using namespace zkdfl;
using namespace zkdfl::ledger;

namespace {

struct ProvenStatement {
    std::shared_ptr<ConstraintSystem> cs;
    agg::WitnessResult wit;
    groth16::VerifyingKey vk;
    groth16::Proof proof;
};

ProvenStatement prove_small_statement(std::uint32_t m, std::uint32_t p, u64 seed) {
    const auto& params = mimc7::default_params();
    SplitMix64 rng(seed);
    std::vector<std::vector<u64>> enc(m, std::vector<u64>(p));
    for (auto& row : enc)
        for (auto& v : row) v = (u64(1) << 40) + rng.next_below(u64(1) << 20);
    auto built = agg::build_circuit(m, p, params);
    ProvenStatement out;
    out.cs = built.cs;
    out.wit = agg::assign_witness(enc, params);
    Qap qap = to_qap(built.cs);
    auto keys = groth16::setup(qap, rng);
    out.vk = keys.vk;
    out.proof = groth16::prove(keys.pk, qap, out.wit.publics, out.wit.witness, rng);
    return out;
}

// Runs the full zkDFL contract flow for an already-proven statement and
// returns the gas total (deploys included).
u64 zkdfl_round_gas(SimChain& chain, const ProvenStatement& st) {
    std::size_t m = st.wit.layout.m;
    std::vector<Address> clients;
    for (std::size_t k = 0; k < m; ++k) clients.push_back(client_address(k));
    Fr h_sum = st.wit.publics[m + 1];

    u64 gas = 0;
    Address ch = chain.deploy_hash_sum(server_address(), clients, h_sum);
    gas += chain.log().back().gas;
    Address cp = chain.deploy_proof_verify(server_address(), st.vk);
    gas += chain.log().back().gas;
    for (std::size_t k = 0; k < m; ++k) {
        auto r = chain.submit_hash(ch, clients[k], st.wit.publics[k]);
        REQUIRE(r.success);
        gas += r.gas;
    }
    auto fin = chain.finalize_hash_sum(ch, server_address());
    REQUIRE(fin.success);
    REQUIRE(fin.flag);
    gas += fin.gas;
    auto ver = chain.verify_proof_onchain(cp, clients[0], st.wit.publics, st.proof);
    REQUIRE(ver.success);
    REQUIRE(ver.flag);
    gas += ver.gas;
    return gas;
}

} // namespace

TEST_CASE("deploy gas and address uniqueness") {
    SimChain chain;
    GasSchedule gs;
    Address a = chain.deploy_baseline(server_address());
    CHECK(chain.log().back().gas == gs.contract_deploy); // empty init-data

    Address b = chain.deploy_baseline(server_address());
    CHECK_FALSE(a == b);

    auto st = prove_small_statement(2, 3, 601);
    Address cp = chain.deploy_proof_verify(server_address(), st.vk);
    Bytes vk_bytes = groth16::serialize_vk(st.vk);
    CHECK(chain.log().back().gas == gs.contract_deploy + gs.calldata_cost(vk_bytes.size()));
    CHECK(chain.proof_verify_state(cp) != nullptr);
}

TEST_CASE("hash submission happy path and exact gas") {
    SimChain chain;
    GasSchedule gs;
    std::vector<Address> clients{client_address(0), client_address(1)};
    Address ch = chain.deploy_hash_sum(server_address(), clients, Fr::zero());

    auto r0 = chain.submit_hash(ch, clients[0], Fr::zero());
    CHECK(r0.success);
    CHECK(chain.hash_sum_state(ch)->running_sum == Fr::zero());
    CHECK(r0.gas == gs.tx_base + gs.calldata_cost(32) + gs.sload + gs.arith_add + gs.sstore_new);

    auto r1 = chain.submit_hash(ch, clients[1], Fr::from_u64(5));
    CHECK(r1.gas == gs.tx_base + gs.calldata_cost(32) + gs.sload + gs.arith_add + gs.sstore_update);
}

TEST_CASE("duplicate and unknown submissions revert but charge gas") {
    SimChain chain;
    std::vector<Address> clients{client_address(0)};
    Address ch = chain.deploy_hash_sum(server_address(), clients, Fr::zero());
    REQUIRE(chain.submit_hash(ch, clients[0], Fr::one()).success);
    Fr sum_before = chain.hash_sum_state(ch)->running_sum;

    auto dup = chain.submit_hash(ch, clients[0], Fr::one());
    CHECK_FALSE(dup.success);
    CHECK(dup.gas > 0);
    CHECK(chain.hash_sum_state(ch)->running_sum == sum_before);

    auto unknown = chain.submit_hash(ch, client_address(9), Fr::one());
    CHECK_FALSE(unknown.success);
    CHECK(unknown.gas > 0);
}

TEST_CASE("running sum matches the off-chain field sum for 10 clients") {
    SimChain chain;
    SplitMix64 rng(602);
    std::vector<Address> clients;
    for (int k = 0; k < 10; ++k) clients.push_back(client_address((std::size_t)k));
    std::vector<Fr> hs;
    Fr expect = Fr::zero();
    for (int k = 0; k < 10; ++k) {
        hs.push_back(rng.next_fr());
        expect += hs.back();
    }
    Address ch = chain.deploy_hash_sum(server_address(), clients, expect);
    for (int k = 0; k < 10; ++k) REQUIRE(chain.submit_hash(ch, clients[(size_t)k], hs[(size_t)k]).success);
    CHECK(chain.hash_sum_state(ch)->running_sum == expect);

    auto fin = chain.finalize_hash_sum(ch, server_address());
    CHECK(fin.success);
    CHECK(fin.flag);
}

TEST_CASE("finalize: early call reverts, perturbed hash yields false") {
    SimChain chain;
    GasSchedule gs;
    std::vector<Address> clients{client_address(0), client_address(1)};
    Fr h0 = Fr::from_u64(11), h1 = Fr::from_u64(22);
    Address ch = chain.deploy_hash_sum(server_address(), clients, h0 + h1);

    REQUIRE(chain.submit_hash(ch, clients[0], h0).success);
    auto early = chain.finalize_hash_sum(ch, server_address());
    CHECK_FALSE(early.success); // missing submissions

    // second client submits a perturbed hash
    REQUIRE(chain.submit_hash(ch, clients[1], h1 + Fr::one()).success);
    auto fin = chain.finalize_hash_sum(ch, server_address());
    CHECK(fin.success);
    CHECK_FALSE(fin.flag);
    CHECK(fin.gas == gs.tx_base + 2 * gs.sload + gs.arith_add);
}

TEST_CASE("on-chain proof verification: acceptance, gas formula, rejection") {
    SimChain chain;
    GasSchedule gs;
    auto st = prove_small_statement(2, 3, 603);
    Address cp = chain.deploy_proof_verify(server_address(), st.vk);

    auto ok = chain.verify_proof_onchain(cp, client_address(0), st.wit.publics, st.proof);
    CHECK(ok.success);
    CHECK(ok.flag);
    std::size_t n = st.wit.publics.size();
    u64 expect_gas = gs.tx_base + gs.calldata_cost(256 + 32 * n) +
                     (u64)n * (gs.ecmul + gs.ecadd) + gs.pairing_base + 4 * gs.pairing_per_pair;
    CHECK(ok.gas == expect_gas);
    CHECK(chain.proof_verify_state(cp)->accepted);
    CHECK(chain.proof_verify_state(cp)->recorded_publics == st.wit.publics);

    // flip one byte of the serialized proof: same gas, rejecting receipt
    Bytes bytes = groth16::serialize_proof(st.proof);
    bytes[7] ^= 0x40;
    auto bad = chain.verify_proof_raw(cp, client_address(0), st.wit.publics, bytes);
    CHECK(bad.success);
    CHECK_FALSE(bad.flag);
    CHECK(bad.gas == expect_gas);

    // omitted public input is a length-mismatch revert, not a rejection
    std::vector<Fr> missing(st.wit.publics.begin(), st.wit.publics.end() - 1);
    auto rev = chain.verify_proof_onchain(cp, client_address(0), missing, st.proof);
    CHECK_FALSE(rev.success);
}

TEST_CASE("baseline aggregation: identity, magnitude window, linearity in P") {
    GasSchedule gs;
    {
        SimChain chain;
        auto [agg1, gas1] = chain.baseline_round({{77}});
        CHECK(agg1 == std::vector<u64>{77});
        CHECK(gas1 > 0);
    }
    auto round_gas = [&](std::size_t m, std::size_t p) {
        SimChain chain;
        SplitMix64 rng(604);
        std::vector<std::vector<u64>> ws(m, std::vector<u64>(p));
        for (auto& w : ws)
            for (auto& v : w) v = (u64(1) << 40) + rng.next_below(1 << 20);
        auto [agg, gas] = chain.baseline_round(ws);
        // cross-check the aggregate against a scalar loop
        for (std::size_t j = 0; j < p; ++j) {
            u64 sum = 0;
            for (std::size_t k = 0; k < m; ++k) sum += ws[k][j];
            REQUIRE(agg[j] == sum / m);
        }
        return gas;
    };
    u64 g669 = round_gas(10, 669);
    CHECK(g669 >= 100000000ull);
    CHECK(g669 <= 250000000ull);

    u64 g4029 = round_gas(10, 4029);
    double measured = (double)g4029 / (double)g669;
    double expected = 4029.0 / 669.0;
    CHECK(std::abs(measured / expected - 1.0) <= 0.05);
}

TEST_CASE("baseline gas follows the closed-form cost model exactly") {
    GasSchedule gs;
    for (auto [m, p] : {std::pair<std::size_t, std::size_t>{3, 17},
                        {10, 669},
                        {7, 123}}) {
        SimChain chain;
        std::vector<std::vector<u64>> ws(m, std::vector<u64>(p, u64(1) << 40));
        auto [agg, gas] = chain.baseline_round(ws);
        (void)agg;
        u64 per_client = gs.tx_base + gs.calldata_cost(32 * p) + (u64)p * gs.sstore_new;
        u64 aggregate = (u64)p * ((u64)m * (gs.sload + gs.arith_add) + gs.arith_mul +
                                  gs.sstore_update);
        CHECK(gas == gs.contract_deploy + (u64)m * per_client + aggregate);
    }
}

TEST_CASE("zkDFL round gas is independent of the model size at fixed m") {
    auto st_small = prove_small_statement(2, 3, 605);
    auto st_large = prove_small_statement(2, 9, 606);
    SimChain a, b;
    u64 gas_small = zkdfl_round_gas(a, st_small);
    u64 gas_large = zkdfl_round_gas(b, st_large);
    CHECK(gas_small == gas_large); // exact equality under the cost model
}

TEST_CASE("transaction log replays to an identical state") {
    SimChain chain;
    auto st = prove_small_statement(3, 4, 607);
    zkdfl_round_gas(chain, st);
    chain.baseline_round({{100, 200}, {300, 400}});

    std::string exported = chain.export_log();
    SimChain replayed = SimChain::replay(exported);
    CHECK(replayed.state_fingerprint() == chain.state_fingerprint());
    CHECK(replayed.total_gas() == chain.total_gas());
    CHECK(replayed.export_log() == exported);
}

TEST_CASE("gas accounting is positive and additive") {
    SimChain chain;
    auto st = prove_small_statement(2, 2, 608);
    zkdfl_round_gas(chain, st);
    u64 sum = 0;
    for (const auto& r : chain.log()) {
        CHECK(r.gas > 0);
        sum += r.gas;
    }
    CHECK(sum == chain.total_gas());
    CHECK(chain.gas_of_account(server_address()) > 0);
}

TEST_CASE("log lines carry the documented fields") {
    SimChain chain;
    std::vector<Address> clients{client_address(0)};
    Address ch = chain.deploy_hash_sum(server_address(), clients, Fr::one());
    chain.submit_hash(ch, clients[0], Fr::one());
    std::string log = chain.export_log();
    // sender,contract,kind,calldata,gas,status
    CHECK(log.find("deploy_hash_sum") != std::string::npos);
    CHECK(log.find("submit_hash") != std::string::npos);
    CHECK(log.find(",ok") != std::string::npos);
    std::size_t lines = (std::size_t)std::count(log.begin(), log.end(), '\n');
    CHECK(lines == chain.log().size());
}
