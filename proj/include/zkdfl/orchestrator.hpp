#pragma once

// End-to-end protocol driver: one global round takes selected clients
// through local training, fixed-point encoding, the aggregation proof, the
// two on-chain verifications, and the client-side adoption checks. A tamper
// hook injects single-point corruptions so tests can assert that every one
// of them trips a verification stage.

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "zkdfl/agg_circuit.hpp"
#include "zkdfl/dataset.hpp"
#include "zkdfl/groth16.hpp"
#include "zkdfl/ledger.hpp"
#include "zkdfl/parallel.hpp"

namespace zkdfl::orch {

struct RoundConfig {
    std::size_t total_clients = 10; // K
    double fraction = 1.0;          // C
    std::vector<std::size_t> layers = fl::model_arch("model1");
    fl::TrainConfig train;
    u64 seed = 1;
    fl::FixedPointCodec codec;
    bool with_proof = true;
};

struct GasBreakdown {
    u64 deploys = 0;
    u64 contract_h_calls = 0;
    u64 contract_p_call = 0;
    u64 total() const { return deploys + contract_h_calls + contract_p_call; }
};

struct RoundRecord {
    std::size_t round_index = 0;
    std::size_t participants = 0;
    double accuracy = 0.0;
    std::size_t constraints = 0;
    double prove_ms = 0.0;
    std::size_t peak_memory_kb = 0;
    GasBreakdown gas;
    bool verified = false;
    std::vector<Fr> publics;
    groth16::Proof proof;
    Bytes vk_bytes;
    std::vector<u64> aggregated_encoded;
};

enum class TamperKind {
    None,
    ClientWeightsPostHash, // server alters a client's vector after hashes are public
    PublishedClientHash,   // server substitutes a client's contribution wholesale
    ClaimedHashSum,        // server lies to the hash-sum contract
    ProofBytes,            // proof corrupted in flight
    PublicWHash,           // w_hash public input mutated at the verify call
    BroadcastQuotient,     // aggregated vector mutated before broadcast
};

struct TamperSpec {
    TamperKind kind = TamperKind::None;
    u64 seed = 0; // drives which client/element/byte is hit
};

struct RoundFailure {
    std::string stage;
    std::string party;
    std::string detail;
};

struct RoundOutcome {
    std::optional<RoundRecord> record;
    std::optional<RoundFailure> failure;
    bool ok() const { return record.has_value(); }
};

// Per-(m, P) CRS cache; proofs are circuit-specific, so keys are minted once
// per shape and reused across rounds.
class CrsCache {
public:
    struct Entry {
        std::shared_ptr<ConstraintSystem> cs;
        Qap qap;
        agg::AggStatement layout;
        groth16::ProvingKey pk;
        groth16::VerifyingKey vk;
    };

    const Entry& get_or_create(std::uint32_t m, std::uint32_t P,
                               const mimc7::MimcParams& params, u64 seed) {
        auto key = std::make_pair(m, P);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
        auto built = agg::build_circuit(m, P, params);
        Qap qap = to_qap(built.cs);
        SplitMix64 rng(seed ^ (u64)m * 0x1000003 ^ (u64)P);
        auto keys = groth16::setup(qap, rng);
        Entry entry{built.cs, std::move(qap), built.layout, std::move(keys.pk),
                    std::move(keys.vk)};
        return entries_.emplace(key, std::move(entry)).first->second;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::uint32_t, std::uint32_t>, Entry> entries_;
};

struct FlEnvironment {
    std::vector<fl::ClientDataset> clients;
    fl::Dataset test;
    fl::MlpModel global;
    std::size_t round_index = 0;
};

inline FlEnvironment make_environment(const RoundConfig& cfg, const fl::Dataset& dataset) {
    FlEnvironment env;
    auto parts = partition(dataset, cfg.total_clients, HOLDOUT_FRACTION, cfg.seed);
    env.clients = std::move(parts.clients);
    env.test = std::move(parts.test);
    env.global = fl::MlpModel::init(cfg.layers, cfg.seed);
    return env;
}

// Best-effort peak resident estimate: VmHWM when the kernel exposes it,
// otherwise ru_maxrss.
inline std::size_t peak_memory_kb() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::size_t kb = 0;
            std::sscanf(line.c_str(), "VmHWM: %zu", &kb);
            return kb;
        }
    }
    struct rusage usage {};
    if (getrusage(RUSAGE_SELF, &usage) == 0) return (std::size_t)usage.ru_maxrss;
    return 0;
}

inline RoundOutcome run_round(const RoundConfig& cfg, FlEnvironment& env,
                              ledger::SimChain& chain, CrsCache& cache,
                              const TamperSpec& tamper = {}) {
    const auto& params = mimc7::default_params();
    auto fail = [&](std::string stage, std::string party, std::string detail) {
        RoundOutcome out;
        out.failure = RoundFailure{std::move(stage), std::move(party), std::move(detail)};
        return out;
    };
    if (env.clients.size() != cfg.total_clients)
        throw std::invalid_argument("run_round: environment has wrong client count");

    SplitMix64 tamper_rng(tamper.seed ^ 0x7A3B9);
    u64 round_seed = cfg.seed + 0x9E37 * (env.round_index + 1);

    // --- selection and local training ---
    auto selected = fl::select_clients(cfg.total_clients, cfg.fraction, round_seed);
    const std::uint32_t m = (std::uint32_t)selected.size();
    const std::uint32_t P = (std::uint32_t)env.global.param_count();

    std::vector<fl::FlatWeights> local(m);
    parallel_chunks(m, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            fl::TrainConfig tc = cfg.train;
            tc.seed = round_seed ^ (0xC11E57ull * (selected[i] + 1));
            local[i] = fl::client_update(env.global, env.clients[selected[i]], tc);
        }
    });

    // --- encoding; clients remember their own digests ---
    std::vector<std::vector<u64>> encoded(m);
    std::vector<Fr> client_digest(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        encoded[i] = fl::encode_weights(local[i], cfg.codec);
        client_digest[i] = mimc7::hash_packed_words(encoded[i], params);
    }

    // --- server-side tampering of the inputs, where applicable ---
    std::vector<std::vector<u64>> server_encoded = encoded;
    std::optional<std::uint32_t> wholesale_victim;
    if (tamper.kind == TamperKind::PublishedClientHash) {
        // substitute a whole contribution: vector AND published hash are
        // recomputed consistently, so only the client-side check can catch it
        std::uint32_t victim = (std::uint32_t)tamper_rng.next_below(m);
        wholesale_victim = victim;
        for (auto& v : server_encoded[victim]) v = (u64(1) << 40) + tamper_rng.next_below(1 << 20);
    }

    auto wit = agg::assign_witness(server_encoded, params);
    std::vector<Fr> publics = wit.publics;
    if (tamper.kind == TamperKind::ClientWeightsPostHash) {
        // hashes are already public; the tampered vector goes into the
        // witness while the publics keep the honest digests
        std::uint32_t victim = (std::uint32_t)tamper_rng.next_below(m);
        std::uint32_t param = (std::uint32_t)tamper_rng.next_below(P);
        std::vector<std::vector<u64>> altered = server_encoded;
        altered[victim][param] += 1 + tamper_rng.next_below(1000);
        auto tampered_wit = agg::assign_witness(altered, params);
        wit.witness = std::move(tampered_wit.witness); // publics stay honest
    }

    // --- circuit, keys, proof ---
    RoundRecord record;
    record.round_index = env.round_index;
    record.participants = m;
    record.constraints = agg::constraint_count(m, P, params);

    groth16::Proof proof;
    Bytes proof_bytes;
    if (cfg.with_proof) {
        const auto& crs = cache.get_or_create(m, P, params, cfg.seed);
        auto t0 = std::chrono::steady_clock::now();
        try {
            SplitMix64 prover_rng(round_seed ^ 0xB10C5EED);
            proof = groth16::prove(crs.pk, crs.qap, publics, wit.witness, prover_rng);
        } catch (const groth16::UnsatisfiedCircuit& e) {
            return fail("prove", "server", e.what());
        }
        record.prove_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        proof_bytes = groth16::serialize_proof(proof);
        if (tamper.kind == TamperKind::ProofBytes)
            proof_bytes[tamper_rng.next_below(proof_bytes.size())] ^=
                (std::uint8_t)(1 + tamper_rng.next_below(255));
        record.vk_bytes = groth16::serialize_vk(crs.vk);
    }

    // --- on-chain phase ---
    if (cfg.with_proof) {
        const auto& crs = cache.get_or_create(m, P, params, cfg.seed);
        std::vector<ledger::Address> participant_addrs;
        for (auto ord : selected) participant_addrs.push_back(ledger::client_address(ord));

        Fr claimed_sum = publics[m + 1];
        if (tamper.kind == TamperKind::ClaimedHashSum) claimed_sum += Fr::one();

        ledger::Address contract_h =
            chain.deploy_hash_sum(ledger::server_address(), participant_addrs, claimed_sum);
        record.gas.deploys += chain.log().back().gas;
        ledger::Address contract_p =
            chain.deploy_proof_verify(ledger::server_address(), crs.vk);
        record.gas.deploys += chain.log().back().gas;

        // every client checks its hash is in the public list at its index,
        // then submits that hash to the hash-sum contract
        for (std::uint32_t i = 0; i < m; ++i) {
            if (client_digest[i] != publics[i])
                return fail("client hash membership check",
                            "client " + std::to_string(selected[i]),
                            "own digest missing from public input list");
            auto r = chain.submit_hash(contract_h, participant_addrs[i], client_digest[i]);
            record.gas.contract_h_calls += r.gas;
            if (!r.success)
                return fail("contract_h submit", "client " + std::to_string(selected[i]), r.info);
        }
        auto fin = chain.finalize_hash_sum(contract_h, ledger::server_address());
        record.gas.contract_h_calls += fin.gas;
        if (!fin.success) return fail("contract_h finalize", "server", fin.info);
        if (!fin.flag)
            return fail("contract_h finalize", "server",
                        "running hash sum differs from the claimed total");

        std::vector<Fr> verify_publics = publics;
        if (tamper.kind == TamperKind::PublicWHash) verify_publics[m] += Fr::one();
        auto ver = chain.verify_proof_raw(contract_p, participant_addrs[0], verify_publics,
                                          proof_bytes);
        record.gas.contract_p_call += ver.gas;
        if (!ver.success) return fail("contract_p verify", "server", ver.info);
        if (!ver.flag) return fail("contract_p verify", "server", "proof rejected on chain");
        record.proof = proof;
    }

    // --- broadcast and client-side adoption ---
    std::vector<u64> broadcast = wit.quotient;
    if (tamper.kind == TamperKind::BroadcastQuotient)
        broadcast[tamper_rng.next_below(broadcast.size())] += 1 + tamper_rng.next_below(1000);

    Fr broadcast_digest = mimc7::hash_packed_words(broadcast, params);
    for (std::uint32_t i = 0; i < m; ++i) {
        if (broadcast_digest != publics[m])
            return fail("client quotient check", "client " + std::to_string(selected[i]),
                        "broadcast vector digest differs from public w_hash");
    }
    fl::FlatWeights averaged = fl::decode_weights(broadcast, cfg.codec);
    fl::MlpModel next_model = fl::unflatten(averaged, cfg.layers);

    env.global = next_model;
    env.round_index += 1;

    record.accuracy = fl::evaluate_accuracy(env.global, env.test);
    record.peak_memory_kb = peak_memory_kb();
    record.verified = true;
    record.publics = publics;
    record.aggregated_encoded = std::move(broadcast);
    RoundOutcome out;
    out.record = std::move(record);
    return out;
}

// Detection wrapper for tamper-suite assertions: true iff some stage failed.
inline bool tamper_detected(const RoundOutcome& outcome) { return !outcome.ok(); }

// ---- experiment harness ----

struct ExperimentGrid {
    std::vector<std::string> models{"model1"};
    std::vector<std::size_t> client_counts{10};
    std::vector<std::size_t> batch_sizes{10};
    std::vector<std::size_t> epoch_counts{1};
    double learning_rate = 0.01;
    u64 seed = 1;
    DatasetSource source = DatasetSource::synthetic();
    std::optional<std::size_t> max_samples;
    bool with_proof = true;
};

inline std::string run_experiment(const ExperimentGrid& grid, const std::string& out_path) {
    fl::Dataset dataset = load_dataset(grid.source, grid.max_samples, grid.seed);
    std::ostringstream csv;
    csv << "model,clients,batch,epochs,accuracy,constraints,prove_ms,gas_zkdfl,gas_baseline,"
           "verified\n";
    CrsCache cache;
    for (const auto& model : grid.models) {
        for (std::size_t clients : grid.client_counts) {
            for (std::size_t batch : grid.batch_sizes) {
                for (std::size_t epochs : grid.epoch_counts) {
                    RoundConfig cfg;
                    cfg.total_clients = clients;
                    cfg.fraction = 1.0;
                    cfg.layers = fl::model_arch(model);
                    cfg.train = fl::TrainConfig{epochs, batch, grid.learning_rate, grid.seed};
                    cfg.seed = grid.seed;
                    cfg.with_proof = grid.with_proof;

                    FlEnvironment env = make_environment(cfg, dataset);
                    ledger::SimChain chain;
                    auto outcome = run_round(cfg, env, chain, cache);
                    if (!outcome.ok())
                        throw std::runtime_error("experiment round failed at stage " +
                                                 outcome.failure->stage + ": " +
                                                 outcome.failure->detail);
                    const auto& rec = *outcome.record;

                    // baseline cost uses same-shaped vectors; the gas model
                    // prices length, not content
                    std::vector<std::vector<u64>> baseline_vecs(
                        clients, std::vector<u64>(env.global.param_count(), u64(1) << 40));
                    ledger::SimChain baseline_chain;
                    auto [agg_out, baseline_gas] = baseline_chain.baseline_round(baseline_vecs);
                    (void)agg_out;

                    csv << model << ',' << clients << ',' << batch << ',' << epochs << ','
                        << rec.accuracy << ',' << rec.constraints << ',' << rec.prove_ms << ','
                        << rec.gas.total() << ',' << baseline_gas << ','
                        << (rec.verified ? 1 : 0) << '\n';
                }
            }
        }
    }
    std::string text = csv.str();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write experiment CSV: " + out_path);
        out << text;
    }
    return text;
}

// ---- proof artifact files ----

inline void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write((const char*)data.data(), (std::streamsize)data.size());
}

inline Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline Bytes serialize_publics(std::span<const Fr> publics) {
    Bytes out;
    for (const auto& x : publics) append_bytes(out, x.to_bytes_be());
    return out;
}

inline std::vector<Fr> deserialize_publics(std::span<const std::uint8_t> data) {
    if (data.size() % 32 != 0)
        throw std::invalid_argument("public-input file must be a multiple of 32 bytes");
    std::vector<Fr> out;
    for (std::size_t i = 0; i < data.size(); i += 32) {
        auto x = Fr::from_bytes_be(data.subspan(i, 32));
        if (!x) throw std::invalid_argument("non-canonical field element in public-input file");
        out.push_back(*x);
    }
    return out;
}

} // namespace zkdfl::orch
