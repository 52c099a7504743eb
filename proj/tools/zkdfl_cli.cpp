// Command-line driver: run protocol rounds, sweep experiment grids, re-verify
// stored proofs, and sanity-check dataset trees.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "zkdfl/orchestrator.hpp"

using namespace zkdfl;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::size_t clients = 10;
    double fraction = 1.0;
    std::string model = "model1";
    std::size_t epochs = 1;
    std::size_t batch = 10;
    double lr = 0.01;
    u64 seed = 1;
    std::string dataset_dir;
    bool synthetic = false;
    std::size_t max_samples = 0;
    std::string out = "zkdfl-out";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--clients", o.clients, "total number of clients K");
    cmd->add_option("--fraction", o.fraction, "participating fraction C in (0, 1]");
    cmd->add_option("--epochs", o.epochs, "local epochs per round");
    cmd->add_option("--batch", o.batch, "minibatch size");
    cmd->add_option("--lr", o.lr, "SGD learning rate");
    cmd->add_option("--seed", o.seed, "deterministic run seed");
    cmd->add_option("--dataset-dir", o.dataset_dir, "sensor dataset directory (a01..a19 layout)");
    cmd->add_flag("--synthetic", o.synthetic, "use the seeded synthetic dataset");
    cmd->add_option("--max-samples", o.max_samples, "uniform subsample cap (0 = all)");
    cmd->add_option("--out", o.out, "output directory or file");
}

orch::DatasetSource source_of(const CommonOpts& o) {
    if (!o.dataset_dir.empty()) return orch::DatasetSource::uci(o.dataset_dir);
    if (!o.synthetic)
        std::cerr << "note: no --dataset-dir given, falling back to --synthetic\n";
    return orch::DatasetSource::synthetic();
}

std::optional<std::size_t> cap_of(const CommonOpts& o) {
    if (o.max_samples == 0) return std::nullopt;
    return o.max_samples;
}

int cmd_round(const CommonOpts& o) {
    orch::RoundConfig cfg;
    cfg.total_clients = o.clients;
    cfg.fraction = o.fraction;
    cfg.layers = fl::model_arch(o.model);
    cfg.train = fl::TrainConfig{o.epochs, o.batch, o.lr, o.seed};
    cfg.seed = o.seed;

    auto dataset = orch::load_dataset(source_of(o), cap_of(o), o.seed);
    auto env = orch::make_environment(cfg, dataset);
    ledger::SimChain chain;
    orch::CrsCache cache;

    std::cout << "running one round: model=" << o.model << " K=" << o.clients
              << " C=" << o.fraction << " P=" << env.global.param_count() << "\n";
    auto outcome = orch::run_round(cfg, env, chain, cache);
    if (!outcome.ok()) {
        std::cerr << "round aborted at stage '" << outcome.failure->stage << "' ("
                  << outcome.failure->party << "): " << outcome.failure->detail << "\n";
        return 1;
    }
    const auto& rec = *outcome.record;
    std::cout << "participants:   " << rec.participants << "\n"
              << "test accuracy:  " << rec.accuracy << "\n"
              << "constraints:    " << rec.constraints << "\n"
              << "prove time:     " << rec.prove_ms << " ms\n"
              << "peak memory:    " << rec.peak_memory_kb << " kB\n"
              << "gas (deploys):  " << rec.gas.deploys << "\n"
              << "gas (hash sub): " << rec.gas.contract_h_calls << "\n"
              << "gas (verify):   " << rec.gas.contract_p_call << "\n"
              << "gas (total):    " << rec.gas.total() << "\n";

    fs::create_directories(o.out);
    orch::write_file((fs::path(o.out) / "proof.bin").string(),
                     groth16::serialize_proof(rec.proof));
    orch::write_file((fs::path(o.out) / "public.bin").string(),
                     orch::serialize_publics(rec.publics));
    orch::write_file((fs::path(o.out) / "vk.bin").string(), rec.vk_bytes);
    std::ofstream log((fs::path(o.out) / "txlog.csv").string());
    log << chain.export_log();
    std::cout << "artifacts written to " << o.out << "/ (proof.bin, public.bin, vk.bin, txlog.csv)\n";
    return 0;
}

int cmd_experiment(const CommonOpts& o, const std::vector<std::string>& models,
                   const std::vector<std::size_t>& client_counts,
                   const std::vector<std::size_t>& batches,
                   const std::vector<std::size_t>& epoch_counts, bool no_proof) {
    orch::ExperimentGrid grid;
    if (!models.empty()) grid.models = models;
    if (!client_counts.empty()) grid.client_counts = client_counts;
    if (!batches.empty()) grid.batch_sizes = batches;
    if (!epoch_counts.empty()) grid.epoch_counts = epoch_counts;
    grid.learning_rate = o.lr;
    grid.seed = o.seed;
    grid.source = source_of(o);
    grid.max_samples = cap_of(o);
    grid.with_proof = !no_proof;

    std::string out_path = o.out;
    if (fs::is_directory(out_path) || out_path.find('.') == std::string::npos) {
        fs::create_directories(out_path);
        out_path = (fs::path(out_path) / "metrics.csv").string();
    }
    std::string csv = orch::run_experiment(grid, out_path);
    std::cout << csv;
    std::cout << "metrics written to " << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& proof_path, const std::string& public_path,
               const std::string& vk_path) {
    auto proof = groth16::deserialize_proof(orch::read_file(proof_path));
    auto publics = orch::deserialize_publics(orch::read_file(public_path));
    auto vk = groth16::deserialize_vk(orch::read_file(vk_path));
    bool ok = groth16::verify(vk, publics, proof);
    std::cout << (ok ? "accept" : "reject") << "\n";
    return ok ? 0 : 2;
}

int cmd_dataset_check(const std::string& dir) {
    auto ds = orch::load_dataset(orch::DatasetSource::uci(dir), std::nullopt, 0);
    std::vector<std::size_t> per_class(orch::NUM_CLASSES, 0);
    for (int label : ds.labels) ++per_class[(std::size_t)label];
    std::cout << "parsed " << ds.size() << " samples, " << orch::NUM_FEATURES
              << " features each\n";
    for (std::size_t c = 0; c < per_class.size(); ++c)
        std::cout << "  a" << (c < 9 ? "0" : "") << (c + 1) << ": " << per_class[c]
                  << " samples\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zkDFL: verifiable federated averaging on a simulated ledger"};
    app.set_config("--config", "", "key=value config file (flags take precedence)");
    app.require_subcommand(1);

    CommonOpts opts;

    auto* round = app.add_subcommand("round", "run one protocol round and emit proof artifacts");
    add_common(round, opts);
    round->add_option("--model", opts.model, "architecture: model1..model5")
        ->check(CLI::IsMember({"model1", "model2", "model3", "model4", "model5"}));

    std::vector<std::string> grid_models;
    std::vector<std::size_t> grid_clients, grid_batches, grid_epochs;
    bool no_proof = false;
    auto* experiment = app.add_subcommand("experiment", "sweep a grid and write a metrics CSV");
    add_common(experiment, opts);
    experiment->add_option("--model", grid_models, "architectures (repeat or comma-separate)")
        ->delimiter(',');
    experiment->add_option("--grid-clients", grid_clients, "client counts for the sweep")
        ->delimiter(',');
    experiment->add_option("--grid-batch", grid_batches, "batch sizes for the sweep")
        ->delimiter(',');
    experiment->add_option("--grid-epochs", grid_epochs, "epoch counts for the sweep")
        ->delimiter(',');
    experiment->add_flag("--no-proof", no_proof,
                         "skip proving and chain verification (accuracy-only sweeps)");

    std::string proof_path, public_path, vk_path;
    auto* verify = app.add_subcommand("verify", "re-verify a stored proof");
    verify->add_option("--proof", proof_path, "proof file (256 bytes)")->required();
    verify->add_option("--public", public_path, "public-input file (32-byte elements)")
        ->required();
    verify->add_option("--vk", vk_path, "verifying key file")->required();

    std::string check_dir;
    auto* dataset = app.add_subcommand("dataset", "dataset utilities");
    auto* check = dataset->add_subcommand("check", "parse and validate a dataset tree");
    check->add_option("--dataset-dir", check_dir, "dataset directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (round->parsed()) return cmd_round(opts);
        if (experiment->parsed())
            return cmd_experiment(opts, grid_models, grid_clients, grid_batches, grid_epochs,
                                  no_proof);
        if (verify->parsed()) return cmd_verify(proof_path, public_path, vk_path);
        if (dataset->parsed() && check->parsed()) return cmd_dataset_check(check_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
