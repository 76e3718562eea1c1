#pragma once

#include <cstdint>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tfed/dataset.hpp"

namespace tfed::data {

/// One row of a simulation export: fault class (0 = normal), run id, sample
/// index within the run, and the feature vector.
struct SimulationRecord {
    int fault_class = 0;
    int simulation_run = 0;
    int sample_index = 0;
    std::vector<double> features;
};

/// Column mapping for CSV ingestion. Defaults match the common Rieth-style
/// export: faultNumber, simulationRun, sample, then every remaining column
/// is a feature.
struct CsvFormatSpec {
    char delimiter = ',';
    std::string fault_column = "faultNumber";
    std::string run_column = "simulationRun";
    std::string sample_column = "sample";
};

std::vector<SimulationRecord> ingest_csv(const std::string& path,
                                         const CsvFormatSpec& spec = {});
void write_csv(const std::string& path, const std::vector<SimulationRecord>& records,
               const CsvFormatSpec& spec = {});

/// The split/trim/class-removal recipe. Runs of each class are assigned to
/// train/validation/test pools in ascending run-id order. Training and
/// validation runs drop their first `drop_first` samples; test runs keep
/// 1-based samples in [test_keep_from, test_keep_to]. Removed classes vanish
/// from every split and the remaining ids are re-indexed densely.
struct SplitRecipe {
    std::size_t train_runs_per_class = 10;
    std::size_t val_runs_per_class = 5;
    std::size_t test_runs_per_class = 5;
    std::size_t drop_first = 20;
    std::size_t test_keep_from = 161;  // 1-based, inclusive
    std::size_t test_keep_to = 500;
    std::set<int> removed_classes = {3, 9, 15};
};

struct SplitResult {
    TabularDataset train;
    TabularDataset validation;
    TabularDataset test;
    std::map<int, int> class_map;  // original class -> dense label
};

SplitResult apply_split_recipe(const std::vector<SimulationRecord>& records,
                               const SplitRecipe& recipe);

/// Per-feature standardization statistics, fit on training data only.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> stddev;  // population convention; 1 where < 1e-12

    std::string to_json() const;
};

Scaler fit_scaler(const TabularDataset& train);
TabularDataset scale(const TabularDataset& dataset, const Scaler& scaler);

/// Run assignment: within each (split, class) the runs go round-robin by
/// ascending run id across participants.
struct PartitionPlan {
    struct Splits {
        std::vector<std::pair<int, int>> train;  // (class, run)
        std::vector<std::pair<int, int>> validation;
        std::vector<std::pair<int, int>> test;
    };
    std::vector<Splits> participants;
};

struct ParticipantData {
    TabularDataset train;
    TabularDataset validation;
    TabularDataset test;
};

struct PartitionResult {
    PartitionPlan plan;
    std::vector<ParticipantData> participants;
};

PartitionResult partition(const SplitResult& splits, std::size_t n_participants);

/// Synthetic data generator: class 0 is an AR(1) process per feature with
/// optional seasonal component and random-walk trend; fault classes add a
/// class-specific persistent mean shift and an optional injected oscillation
/// after `onset_sample`. Deterministic per seed.
struct SynthSpec {
    std::size_t n_features = 8;
    std::size_t n_classes = 4;   // including class 0
    std::size_t runs_per_class = 20;
    std::size_t samples_per_run = 200;
    std::uint64_t seed = 1;
    double ar_coeff = 0.6;
    double noise_sigma = 1.0;
    double seasonal_amplitude = 0.0;  // 0 disables
    std::size_t seasonal_period = 24;
    bool random_walk_trend = false;
    double fault_shift_sigma = 3.0;   // mean-shift scale, in noise sigmas
    double fault_osc_amplitude = 0.0; // injected oscillation scale; 0 disables
    std::size_t onset_sample = 20;    // fault effects start after this sample
};

std::vector<SimulationRecord> synthesize(const SynthSpec& spec);

}  // namespace tfed::data
