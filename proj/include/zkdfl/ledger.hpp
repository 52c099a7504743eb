#pragma once

// Deterministic simulated ledger: strictly sequential transaction
// application, per-contract storage, an EVM-mirroring gas schedule, and
// three native contracts — the hash-sum checker, the proof verifier, and a
// traditional-DFL baseline aggregator used for the cost comparison.
//
// Calldata is priced by length at the nonzero-byte rate; see the schedule
// note on `calldata_cost`.

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <variant>

#include "zkdfl/groth16.hpp"

namespace zkdfl::ledger {

struct GasSchedule {
    u64 tx_base = 21000;
    u64 calldata_nonzero_byte = 16;
    u64 calldata_zero_byte = 4; // kept for parity with the public schedule
    u64 sstore_new = 20000;
    u64 sstore_update = 5000;
    u64 sload = 2100;
    u64 arith_add = 3;
    u64 arith_mul = 5;
    u64 ecadd = 150;
    u64 ecmul = 6000;
    u64 pairing_base = 45000;
    u64 pairing_per_pair = 34000;
    u64 contract_deploy = 300000;

    // All payload bytes are priced as nonzero: the payloads here are field
    // elements, curve points, and offset-encoded weights, and length-based
    // pricing keeps round costs a function of (m, P) alone.
    u64 calldata_cost(std::size_t bytes) const { return calldata_nonzero_byte * bytes; }
};

using Address = std::array<std::uint8_t, 20>;

inline Address client_address(std::size_t ordinal) {
    Address a{};
    a[0] = 0xC1;
    for (int i = 0; i < 8; ++i) a[19 - i] = (std::uint8_t)((ordinal + 1) >> (8 * i));
    return a;
}

inline Address server_address() {
    Address a{};
    a[0] = 0x5E;
    a[19] = 1;
    return a;
}

inline std::string address_hex(const Address& a) { return to_hex(a); }

struct Receipt {
    bool success = false;
    bool flag = false; // finalize comparison result / proof acceptance
    u64 gas = 0;
    std::string info;
};

enum class TxKind {
    DeployHashSum,
    DeployProofVerify,
    DeployBaseline,
    SubmitHash,
    FinalizeHashSum,
    VerifyProof,
    BaselineSubmit,
    BaselineAggregate,
};

inline const char* tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::DeployHashSum: return "deploy_hash_sum";
        case TxKind::DeployProofVerify: return "deploy_proof_verify";
        case TxKind::DeployBaseline: return "deploy_baseline";
        case TxKind::SubmitHash: return "submit_hash";
        case TxKind::FinalizeHashSum: return "finalize_hash_sum";
        case TxKind::VerifyProof: return "verify_proof";
        case TxKind::BaselineSubmit: return "baseline_submit";
        case TxKind::BaselineAggregate: return "baseline_aggregate";
    }
    return "?";
}

inline std::optional<TxKind> tx_kind_from_name(const std::string& s) {
    for (TxKind k : {TxKind::DeployHashSum, TxKind::DeployProofVerify, TxKind::DeployBaseline,
                     TxKind::SubmitHash, TxKind::FinalizeHashSum, TxKind::VerifyProof,
                     TxKind::BaselineSubmit, TxKind::BaselineAggregate})
        if (s == tx_kind_name(k)) return k;
    return std::nullopt;
}

struct TxRecord {
    Address sender{};
    Address contract{}; // zero for deploys
    TxKind kind{};
    Bytes calldata;
    u64 gas = 0;
    bool success = false;
};

namespace contracts {

struct HashSum {
    std::vector<Address> expected;
    Fr claimed_sum;
    std::map<Address, Fr> submitted;
    Fr running_sum;
    bool sum_slot_written = false;
    bool finalized = false;
    bool final_result = false;
};

struct ProofVerify {
    groth16::VerifyingKey vk;
    bool accepted = false;
    std::vector<Fr> recorded_publics;
};

struct Baseline {
    std::vector<std::vector<u64>> stored; // one vector per submitting client
    std::vector<u64> aggregated;
    bool aggregated_done = false;
};

} // namespace contracts

class SimChain {
public:
    explicit SimChain(GasSchedule schedule = {})
        : schedule_(schedule), queue_(std::make_unique<std::mutex>()) {}

    const GasSchedule& schedule() const { return schedule_; }

    // ---- typed entry points (each one transaction) ----

    Address deploy_hash_sum(const Address& sender, const std::vector<Address>& expected,
                            const Fr& claimed_sum) {
        Bytes init;
        for (const auto& a : expected) append_bytes(init, a);
        append_bytes(init, claimed_sum.to_bytes_be());
        return apply(sender, Address{}, TxKind::DeployHashSum, std::move(init)).deployed;
    }

    Address deploy_proof_verify(const Address& sender, const groth16::VerifyingKey& vk) {
        return apply(sender, Address{}, TxKind::DeployProofVerify, groth16::serialize_vk(vk))
            .deployed;
    }

    Address deploy_baseline(const Address& sender) {
        return apply(sender, Address{}, TxKind::DeployBaseline, Bytes{}).deployed;
    }

    Receipt submit_hash(const Address& contract, const Address& sender, const Fr& h) {
        Bytes data;
        append_bytes(data, h.to_bytes_be());
        return apply(sender, contract, TxKind::SubmitHash, std::move(data)).receipt;
    }

    Receipt finalize_hash_sum(const Address& contract, const Address& sender) {
        return apply(sender, contract, TxKind::FinalizeHashSum, Bytes{}).receipt;
    }

    Receipt verify_proof_onchain(const Address& contract, const Address& sender,
                                 std::span<const Fr> public_inputs,
                                 const groth16::Proof& proof) {
        return verify_proof_raw(contract, sender, public_inputs, groth16::serialize_proof(proof));
    }

    // Raw form: proof bytes go on chain as-is, so malformed or off-curve
    // proofs still produce a (rejecting) receipt with the same gas.
    Receipt verify_proof_raw(const Address& contract, const Address& sender,
                             std::span<const Fr> public_inputs,
                             std::span<const std::uint8_t> proof_bytes) {
        Bytes data;
        for (const auto& x : public_inputs) append_bytes(data, x.to_bytes_be());
        data.insert(data.end(), proof_bytes.begin(), proof_bytes.end());
        return apply(sender, contract, TxKind::VerifyProof, std::move(data)).receipt;
    }

    Receipt baseline_submit(const Address& contract, const Address& sender,
                            std::span<const u64> encoded) {
        Bytes data;
        for (u64 v : encoded) {
            std::array<std::uint8_t, 32> word{};
            for (int i = 0; i < 8; ++i) word[31 - i] = (std::uint8_t)(v >> (8 * i));
            append_bytes(data, word);
        }
        return apply(sender, contract, TxKind::BaselineSubmit, std::move(data)).receipt;
    }

    Receipt baseline_aggregate(const Address& contract, const Address& sender) {
        return apply(sender, contract, TxKind::BaselineAggregate, Bytes{}).receipt;
    }

    // Traditional-DFL round: every client ships its whole encoded vector on
    // chain, then one aggregation pass floor-averages the stored vectors.
    // Returns the aggregate and the gas total of the round's transactions.
    std::pair<std::vector<u64>, u64> baseline_round(
        const std::vector<std::vector<u64>>& weights) {
        if (weights.empty()) throw std::invalid_argument("baseline_round: no clients");
        const std::size_t p = weights[0].size();
        for (const auto& w : weights)
            if (w.size() != p) throw std::invalid_argument("baseline_round: ragged weights");
        u64 gas = 0;
        Address server = server_address();
        Address contract = deploy_baseline(server);
        gas += log_.back().gas;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            Receipt r = baseline_submit(contract, client_address(k), weights[k]);
            if (!r.success) throw std::logic_error("baseline_round: submit reverted");
            gas += r.gas;
        }
        Receipt agg = baseline_aggregate(contract, server);
        if (!agg.success) throw std::logic_error("baseline_round: aggregation reverted");
        gas += agg.gas;
        return {std::get<contracts::Baseline>(contracts_.at(contract)).aggregated, gas};
    }

    // ---- inspection ----

    const std::vector<TxRecord>& log() const { return log_; }

    u64 total_gas() const {
        u64 g = 0;
        for (const auto& r : log_) g += r.gas;
        return g;
    }

    u64 gas_of_account(const Address& a) const {
        auto it = gas_by_account_.find(a);
        return it == gas_by_account_.end() ? 0 : it->second;
    }

    u64 gas_of_contract(const Address& a) const {
        auto it = gas_by_contract_.find(a);
        return it == gas_by_contract_.end() ? 0 : it->second;
    }

    const contracts::HashSum* hash_sum_state(const Address& a) const {
        auto it = contracts_.find(a);
        return it == contracts_.end() ? nullptr : std::get_if<contracts::HashSum>(&it->second);
    }

    const contracts::ProofVerify* proof_verify_state(const Address& a) const {
        auto it = contracts_.find(a);
        return it == contracts_.end() ? nullptr : std::get_if<contracts::ProofVerify>(&it->second);
    }

    // Order-insensitive fingerprint of storage plus gas ledgers; replaying a
    // log from genesis must reproduce it exactly.
    u64 state_fingerprint() const {
        Fnv1a h;
        for (const auto& [addr, state] : contracts_) {
            h.update(addr);
            if (const auto* hs = std::get_if<contracts::HashSum>(&state)) {
                h.update_u64(1);
                for (const auto& a : hs->expected) h.update(a);
                h.update(hs->claimed_sum.to_bytes_be());
                for (const auto& [a, v] : hs->submitted) {
                    h.update(a);
                    h.update(v.to_bytes_be());
                }
                h.update(hs->running_sum.to_bytes_be());
                h.update_u64((u64)hs->finalized << 1 | (u64)hs->final_result);
            } else if (const auto* pv = std::get_if<contracts::ProofVerify>(&state)) {
                h.update_u64(2);
                h.update(groth16::serialize_vk(pv->vk));
                h.update_u64(pv->accepted);
                for (const auto& x : pv->recorded_publics) h.update(x.to_bytes_be());
            } else if (const auto* bl = std::get_if<contracts::Baseline>(&state)) {
                h.update_u64(3);
                for (const auto& w : bl->stored)
                    for (u64 v : w) h.update_u64(v);
                for (u64 v : bl->aggregated) h.update_u64(v);
                h.update_u64(bl->aggregated_done);
            }
        }
        for (const auto& [a, g] : gas_by_account_) {
            h.update(a);
            h.update_u64(g);
        }
        return h.h;
    }

    // ---- audit log export / replay ----

    std::string export_log() const {
        std::ostringstream out;
        for (const auto& r : log_) {
            out << address_hex(r.sender) << ',' << address_hex(r.contract) << ','
                << tx_kind_name(r.kind) << ',' << to_hex(r.calldata) << ',' << r.gas << ','
                << (r.success ? "ok" : "revert") << '\n';
        }
        return out.str();
    }

    // Re-executes an exported log on a fresh chain.
    static SimChain replay(const std::string& exported, GasSchedule schedule = {}) {
        SimChain chain(schedule);
        std::istringstream in(exported);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::size_t pos = 0;
            for (int i = 0; i < 5; ++i) {
                std::size_t comma = line.find(',', pos);
                if (comma == std::string::npos)
                    throw std::invalid_argument("replay: malformed log line");
                fields.push_back(line.substr(pos, comma - pos));
                pos = comma + 1;
            }
            fields.push_back(line.substr(pos));
            Bytes sender_b = from_hex(fields[0]);
            Bytes contract_b = from_hex(fields[1]);
            auto kind = tx_kind_from_name(fields[2]);
            if (sender_b.size() != 20 || contract_b.size() != 20 || !kind)
                throw std::invalid_argument("replay: malformed log line");
            Address sender{}, contract{};
            std::copy(sender_b.begin(), sender_b.end(), sender.begin());
            std::copy(contract_b.begin(), contract_b.end(), contract.begin());
            chain.apply(sender, contract, *kind, from_hex(fields[3]));
        }
        return chain;
    }

private:
    struct ApplyResult {
        Receipt receipt;
        Address deployed{};
    };

    Address fresh_address() {
        Address a{};
        a[0] = 0xCC;
        u64 id = next_contract_id_++;
        for (int i = 0; i < 8; ++i) a[19 - i] = (std::uint8_t)(id >> (8 * i));
        return a;
    }

    ApplyResult apply(const Address& sender, const Address& contract, TxKind kind,
                      Bytes calldata) {
        std::lock_guard<std::mutex> lock(*queue_);
        ApplyResult out;
        switch (kind) {
            case TxKind::DeployHashSum:
            case TxKind::DeployProofVerify:
            case TxKind::DeployBaseline:
                out = apply_deploy(kind, calldata);
                break;
            case TxKind::SubmitHash: out.receipt = apply_submit(contract, sender, calldata); break;
            case TxKind::FinalizeHashSum: out.receipt = apply_finalize(contract); break;
            case TxKind::VerifyProof: out.receipt = apply_verify(contract, calldata); break;
            case TxKind::BaselineSubmit:
                out.receipt = apply_baseline_submit(contract, calldata);
                break;
            case TxKind::BaselineAggregate: out.receipt = apply_baseline_agg(contract); break;
        }
        Address target = out.deployed == Address{} ? contract : out.deployed;
        log_.push_back({sender, target, kind, std::move(calldata), out.receipt.gas,
                        out.receipt.success});
        gas_by_account_[sender] += out.receipt.gas;
        gas_by_contract_[target] += out.receipt.gas;
        return out;
    }

    ApplyResult apply_deploy(TxKind kind, const Bytes& init) {
        ApplyResult out;
        out.receipt.gas = schedule_.contract_deploy + schedule_.calldata_cost(init.size());
        out.deployed = fresh_address();
        if (kind == TxKind::DeployHashSum) {
            if (init.size() < 32 || (init.size() - 32) % 20 != 0)
                throw std::invalid_argument("deploy_hash_sum: malformed init data");
            contracts::HashSum hs;
            std::size_t n = (init.size() - 32) / 20;
            for (std::size_t i = 0; i < n; ++i) {
                Address a{};
                std::copy(init.begin() + i * 20, init.begin() + (i + 1) * 20, a.begin());
                hs.expected.push_back(a);
            }
            auto sum = Fr::from_bytes_be(std::span<const std::uint8_t>(init).subspan(n * 20, 32));
            if (!sum) throw std::invalid_argument("deploy_hash_sum: non-canonical claimed sum");
            hs.claimed_sum = *sum;
            contracts_[out.deployed] = std::move(hs);
        } else if (kind == TxKind::DeployProofVerify) {
            contracts::ProofVerify pv;
            pv.vk = groth16::deserialize_vk(init);
            contracts_[out.deployed] = std::move(pv);
        } else {
            contracts_[out.deployed] = contracts::Baseline{};
        }
        out.receipt.success = true;
        return out;
    }

    Receipt apply_submit(const Address& contract, const Address& sender, const Bytes& data) {
        Receipt r;
        u64 revert_gas = schedule_.tx_base + schedule_.calldata_cost(data.size()) + schedule_.sload;
        auto* hs = mutable_state<contracts::HashSum>(contract);
        if (!hs || data.size() != 32) {
            r.gas = revert_gas;
            r.info = "bad contract or calldata";
            return r;
        }
        auto h = Fr::from_bytes_be(data);
        bool known = false;
        for (const auto& a : hs->expected) known = known || a == sender;
        if (!h || !known || hs->finalized || hs->submitted.count(sender)) {
            r.gas = revert_gas;
            r.info = !known ? "unknown sender" : "duplicate or finalized";
            return r;
        }
        bool first_write = !hs->sum_slot_written;
        hs->running_sum += *h;
        hs->sum_slot_written = true;
        hs->submitted.emplace(sender, *h);
        r.success = true;
        r.gas = schedule_.tx_base + schedule_.calldata_cost(32) + schedule_.sload +
                schedule_.arith_add + (first_write ? schedule_.sstore_new : schedule_.sstore_update);
        return r;
    }

    Receipt apply_finalize(const Address& contract) {
        Receipt r;
        auto* hs = mutable_state<contracts::HashSum>(contract);
        if (!hs || hs->finalized || hs->submitted.size() != hs->expected.size()) {
            r.gas = schedule_.tx_base + schedule_.sload;
            r.info = "missing submissions";
            return r;
        }
        hs->finalized = true;
        hs->final_result = hs->running_sum == hs->claimed_sum;
        r.success = true;
        r.flag = hs->final_result;
        r.gas = schedule_.tx_base + 2 * schedule_.sload + schedule_.arith_add;
        return r;
    }

    Receipt apply_verify(const Address& contract, const Bytes& data) {
        Receipt r;
        auto* pv = mutable_state<contracts::ProofVerify>(contract);
        u64 calldata_gas = schedule_.tx_base + schedule_.calldata_cost(data.size());
        if (!pv || data.size() < 256 || (data.size() - 256) % 32 != 0) {
            r.gas = calldata_gas;
            r.info = "malformed verify calldata";
            return r;
        }
        std::size_t n = (data.size() - 256) / 32;
        if (n + 1 != pv->vk.ic.size()) {
            r.gas = calldata_gas;
            r.info = "public input count mismatch";
            return r;
        }
        std::vector<Fr> publics;
        std::span<const std::uint8_t> view(data);
        for (std::size_t i = 0; i < n; ++i) {
            auto x = Fr::from_bytes_be(view.subspan(i * 32, 32));
            if (!x) {
                r.gas = calldata_gas;
                r.info = "non-canonical public input";
                return r;
            }
            publics.push_back(*x);
        }
        bool accept = false;
        try {
            groth16::Proof proof = groth16::deserialize_proof(view.subspan(n * 32, 256));
            accept = groth16::verify(pv->vk, publics, proof);
        } catch (const std::invalid_argument&) {
            accept = false; // off-curve proof bytes: well-formed call, rejected proof
        }
        r.success = true;
        r.flag = accept;
        r.gas = calldata_gas + (u64)n * (schedule_.ecmul + schedule_.ecadd) +
                schedule_.pairing_base + 4 * schedule_.pairing_per_pair;
        if (accept) {
            pv->accepted = true;
            pv->recorded_publics = std::move(publics);
        }
        return r;
    }

    Receipt apply_baseline_submit(const Address& contract, const Bytes& data) {
        Receipt r;
        auto* bl = mutable_state<contracts::Baseline>(contract);
        if (!bl || data.empty() || data.size() % 32 != 0 || bl->aggregated_done) {
            r.gas = schedule_.tx_base + schedule_.calldata_cost(data.size());
            r.info = "malformed baseline submit";
            return r;
        }
        std::size_t p = data.size() / 32;
        if (!bl->stored.empty() && bl->stored[0].size() != p) {
            r.gas = schedule_.tx_base + schedule_.calldata_cost(data.size());
            r.info = "length mismatch";
            return r;
        }
        std::vector<u64> w(p);
        for (std::size_t j = 0; j < p; ++j) {
            u64 v = 0;
            for (int b = 24; b < 32; ++b) v = (v << 8) | data[j * 32 + b];
            w[j] = v;
        }
        bl->stored.push_back(std::move(w));
        r.success = true;
        r.gas = schedule_.tx_base + schedule_.calldata_cost(32 * p) + (u64)p * schedule_.sstore_new;
        return r;
    }

    Receipt apply_baseline_agg(const Address& contract) {
        Receipt r;
        auto* bl = mutable_state<contracts::Baseline>(contract);
        if (!bl || bl->stored.empty() || bl->aggregated_done) {
            r.gas = schedule_.tx_base + schedule_.sload;
            r.info = "nothing to aggregate";
            return r;
        }
        std::size_t m = bl->stored.size();
        std::size_t p = bl->stored[0].size();
        bl->aggregated.assign(p, 0);
        for (std::size_t j = 0; j < p; ++j) {
            u64 sum = 0;
            for (std::size_t k = 0; k < m; ++k) sum += bl->stored[k][j];
            bl->aggregated[j] = sum / m;
        }
        bl->aggregated_done = true;
        r.success = true;
        r.gas = (u64)p * ((u64)m * (schedule_.sload + schedule_.arith_add) + schedule_.arith_mul +
                          schedule_.sstore_update);
        return r;
    }

    template <typename T>
    T* mutable_state(const Address& a) {
        auto it = contracts_.find(a);
        return it == contracts_.end() ? nullptr : std::get_if<T>(&it->second);
    }

    using ContractState =
        std::variant<contracts::HashSum, contracts::ProofVerify, contracts::Baseline>;

    GasSchedule schedule_;
    std::unique_ptr<std::mutex> queue_;
    std::vector<TxRecord> log_;
    std::map<Address, ContractState> contracts_;
    std::map<Address, u64> gas_by_account_;
    std::map<Address, u64> gas_by_contract_;
    u64 next_contract_id_ = 1;
};

} // namespace zkdfl::ledger
