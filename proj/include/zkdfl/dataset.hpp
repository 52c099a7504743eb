#pragma once

// Dataset ingestion: the wearable-sensor directory layout (a01..a19 activity
// dirs, p1..p8 subjects, s01..s60.txt segments of 125 rows x 45 comma
// separated values) and a seeded synthetic fallback (19 Gaussian class
// clusters in 45 dimensions) so nothing depends on downloading the archive.
// Rows are standardized per feature with statistics from the training split.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

#include "zkdfl/fl.hpp"

namespace zkdfl::orch {

inline constexpr std::size_t NUM_FEATURES = 45;
inline constexpr std::size_t NUM_CLASSES = 19;
inline constexpr double HOLDOUT_FRACTION = 0.2;

struct DatasetSource {
    enum class Kind { Synthetic, UciDirectory };
    Kind kind = Kind::Synthetic;
    std::string path;
    std::size_t synthetic_samples = 3800;
    double synthetic_noise = 1.0;

    static DatasetSource synthetic(std::size_t samples = 3800, double noise = 1.0) {
        DatasetSource s;
        s.kind = Kind::Synthetic;
        s.synthetic_samples = samples;
        s.synthetic_noise = noise;
        return s;
    }

    static DatasetSource uci(std::string directory) {
        DatasetSource s;
        s.kind = Kind::UciDirectory;
        s.path = std::move(directory);
        return s;
    }
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline fl::Dataset generate_synthetic(std::size_t samples, double noise, u64 seed) {
    SplitMix64 rng(seed ^ 0x5D47A3C19E0Bull);
    std::vector<std::array<double, NUM_FEATURES>> means(NUM_CLASSES);
    for (auto& mean : means)
        for (auto& v : mean) v = rng.next_gaussian();
    fl::Dataset ds;
    for (std::size_t i = 0; i < samples; ++i) {
        int label = (int)(i % NUM_CLASSES);
        std::vector<double> x(NUM_FEATURES);
        for (std::size_t d = 0; d < NUM_FEATURES; ++d)
            x[d] = means[(std::size_t)label][d] + noise * rng.next_gaussian();
        ds.push(std::move(x), label);
    }
    return ds;
}

inline void parse_uci_file(const std::filesystem::path& file, int label, fl::Dataset& out) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(NUM_FEATURES);
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            std::string_view field(line.data() + pos,
                                   (comma == std::string::npos ? line.size() : comma) - pos);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\r'))
                field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\r'))
                field.remove_suffix(1);
            double value = 0;
            auto res = std::from_chars(field.data(), field.data() + field.size(), value);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size() ||
                !std::isfinite(value))
                throw ParseError(file.string() + " line " + std::to_string(line_no) +
                                 ": non-numeric field");
            row.push_back(value);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (row.size() != NUM_FEATURES)
            throw ParseError(file.string() + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(NUM_FEATURES) + " fields, got " +
                             std::to_string(row.size()));
        out.push(std::move(row), label);
    }
}

inline fl::Dataset load_uci_tree(const std::string& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw ParseError("dataset directory not found: " + root);
    fl::Dataset ds;
    for (std::size_t a = 1; a <= NUM_CLASSES; ++a) {
        char abuf[8];
        std::snprintf(abuf, sizeof(abuf), "a%02zu", a);
        fs::path adir = fs::path(root) / abuf;
        if (!fs::is_directory(adir)) continue;
        std::vector<fs::path> files;
        for (const auto& subject : fs::directory_iterator(adir)) {
            if (!subject.is_directory()) continue;
            for (const auto& seg : fs::directory_iterator(subject.path()))
                if (seg.is_regular_file() && seg.path().extension() == ".txt")
                    files.push_back(seg.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) parse_uci_file(f, (int)(a - 1), ds);
    }
    if (ds.size() == 0) throw ParseError("no samples found under " + root);
    return ds;
}

inline std::size_t train_count(std::size_t n, double holdout) {
    return n - (std::size_t)std::floor(holdout * (double)n);
}

} // namespace detail

// Loads, optionally subsamples, shuffles, and standardizes. Standardization
// statistics come from the leading train_count(n) rows — the same boundary
// partition() uses — so the test split never leaks into them.
inline fl::Dataset load_dataset(const DatasetSource& source,
                                std::optional<std::size_t> max_samples, u64 seed) {
    fl::Dataset raw = source.kind == DatasetSource::Kind::Synthetic
                          ? detail::generate_synthetic(source.synthetic_samples,
                                                       source.synthetic_noise, seed)
                          : detail::load_uci_tree(source.path);

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    if (max_samples && *max_samples < order.size()) {
        SplitMix64 sub(seed ^ 0x5AB5A3F1Eull);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[sub.next_below(i)]);
        order.resize(*max_samples);
        std::sort(order.begin(), order.end());
    }
    SplitMix64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);

    fl::Dataset shuffled;
    for (std::size_t idx : order) shuffled.push(raw.features[idx], raw.labels[idx]);

    std::size_t stat_rows = detail::train_count(shuffled.size(), HOLDOUT_FRACTION);
    if (stat_rows == 0) throw std::invalid_argument("load_dataset: dataset too small");
    std::vector<double> mean(NUM_FEATURES, 0.0), var(NUM_FEATURES, 0.0);
    for (std::size_t i = 0; i < stat_rows; ++i)
        for (std::size_t d = 0; d < NUM_FEATURES; ++d) mean[d] += shuffled.features[i][d];
    for (auto& m : mean) m /= (double)stat_rows;
    for (std::size_t i = 0; i < stat_rows; ++i)
        for (std::size_t d = 0; d < NUM_FEATURES; ++d) {
            double delta = shuffled.features[i][d] - mean[d];
            var[d] += delta * delta;
        }
    std::vector<double> stddev(NUM_FEATURES);
    for (std::size_t d = 0; d < NUM_FEATURES; ++d) {
        double s = std::sqrt(var[d] / (double)stat_rows);
        stddev[d] = s > 1e-12 ? s : 1.0;
    }
    for (auto& row : shuffled.features)
        for (std::size_t d = 0; d < NUM_FEATURES; ++d) row[d] = (row[d] - mean[d]) / stddev[d];
    return shuffled;
}

struct PartitionResult {
    std::vector<fl::ClientDataset> clients;
    fl::Dataset test;
};

// Holdout tail becomes the test set; the training prefix is shuffled and cut
// into K equal contiguous segments (remainder rows dropped).
inline PartitionResult partition(const fl::Dataset& dataset, std::size_t num_clients,
                                 double holdout, u64 seed) {
    if (num_clients < 1) throw std::invalid_argument("partition: need at least one client");
    std::size_t train_rows = detail::train_count(dataset.size(), holdout);
    if (train_rows < num_clients)
        throw std::invalid_argument("partition: fewer training rows than clients");

    PartitionResult out;
    for (std::size_t i = train_rows; i < dataset.size(); ++i)
        out.test.push(dataset.features[i], dataset.labels[i]);

    std::vector<std::size_t> order(train_rows);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed ^ 0x9A97717033ull);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);

    std::size_t per_client = train_rows / num_clients;
    for (std::size_t k = 0; k < num_clients; ++k) {
        fl::ClientDataset client;
        client.ordinal = k;
        for (std::size_t i = 0; i < per_client; ++i) {
            std::size_t idx = order[k * per_client + i];
            client.data.push(dataset.features[idx], dataset.labels[idx]);
        }
        out.clients.push_back(std::move(client));
    }
    return out;
}

} // namespace zkdfl::orch
