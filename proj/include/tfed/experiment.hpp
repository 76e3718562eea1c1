#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfed/data.hpp"
#include "tfed/federation.hpp"
#include "tfed/metrics.hpp"
#include "tfed/model.hpp"
#include "tfed/stationary.hpp"

namespace tfed::experiment {

/// The four pipeline configurations. Time-series conversion (windowing) is
/// always on; the others toggle feature engineering and stationary
/// conversion.
enum class Pipeline { Base, FeatureEngineering, Stationary, All };

std::string to_string(Pipeline p);
std::string to_string(federation::Paradigm p);
std::string to_string(federation::TopologyKind k);

struct DataSourceConfig {
    enum class Kind { Synthetic, Csv } kind = Kind::Synthetic;
    data::SynthSpec synth;
    std::string csv_path;
    data::CsvFormatSpec csv_format;
};

struct ExperimentConfig {
    DataSourceConfig source;
    data::SplitRecipe recipe;
    Pipeline pipeline = Pipeline::Base;
    federation::Paradigm paradigm = federation::Paradigm::DFL;
    federation::TopologyKind topology = federation::TopologyKind::Fully;
    std::size_t participants = 5;
    std::size_t rounds = 10;
    model::ModelConfig model;  // input_dim/num_classes resolved from data
    model::TrainConfig train;
    stationary::StationaryOptions stationary;
    std::uint64_t seed = 42;
    std::string output_dir;

    /// Throws ConfigError naming the offending field (e.g. CFL with ring).
    void validate() const;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    std::uint64_t digest() const;
};

struct ParticipantRoundMetrics {
    std::size_t round;
    std::size_t participant;
    double train_loss;  // mean loss of the last local epoch this round
    metrics::Prf val_macro;
    metrics::Prf val_weighted;
};

struct ParticipantFinal {
    std::size_t participant;
    metrics::ConfusionMatrix test_confusion;
    metrics::Prf test_macro;
    metrics::Prf test_weighted;
    std::size_t train_windows;
    std::size_t val_windows;
    std::size_t test_windows;
    std::size_t bytes_sent;
    std::size_t bytes_received;
};

struct ExperimentReport {
    std::string config_json;  // resolved configuration snapshot
    std::uint64_t config_digest;
    std::map<int, int> class_map;
    std::vector<ParticipantRoundMetrics> rounds;
    std::vector<ParticipantFinal> finals;
    metrics::Prf test_macro_mean;     // arithmetic mean over participants
    metrics::Prf test_weighted_mean;
    federation::TransportLedger ledger;
    std::size_t total_bytes;
    data::Scaler scaler;
    stationary::StationaryPlan plan;

    std::string to_json() const;  // deterministic; excludes wall-clock
};

/// Runs the full pipeline + federation for one configuration. Deterministic
/// given the config (seed included).
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes report.json, ledger.csv, rounds.csv, resolved-config.json,
/// class-map.json, scaler.json, stationary-plan.json into `dir`. The ledger
/// rows carry a per-row FNV-1a checksum for later integrity checks.
void write_run_directory(const std::string& dir, const ExperimentReport& report);

/// FNV-1a 64 over a byte range; shared by payload digests and ledger rows.
std::uint64_t fnv1a(const void* bytes, std::size_t len, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace tfed::experiment
