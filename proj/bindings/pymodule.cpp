// Python bindings for the simulator core. The surface mirrors the main C++
// operations: feature math, stationary tooling, the model wire format, fedavg,
// metrics, synthetic data, and whole-experiment execution from a JSON config.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

#include "tfed/data.hpp"
#include "tfed/experiment.hpp"
#include "tfed/features.hpp"
#include "tfed/federation.hpp"
#include "tfed/metrics.hpp"
#include "tfed/model.hpp"
#include "tfed/stationary.hpp"
#include "tfed/timeseries.hpp"

namespace py = pybind11;
using namespace tfed;

namespace {

using Matrix = std::vector<std::vector<double>>;

TabularDataset to_tabular(const Matrix& rows, const std::vector<int>& labels) {
    TabularDataset d;
    d.rows = rows.size();
    d.cols = d.rows ? rows.front().size() : 0;
    for (const auto& row : rows) {
        if (row.size() != d.cols) throw std::invalid_argument("ragged row in matrix");
        d.values.insert(d.values.end(), row.begin(), row.end());
    }
    d.labels = labels.empty() ? std::vector<int>(d.rows, 0) : labels;
    if (d.labels.size() != d.rows)
        throw std::invalid_argument("labels length must equal the row count");
    return d;
}

Matrix from_tabular(const TabularDataset& d) {
    Matrix out(d.rows, std::vector<double>(d.cols));
    for (std::size_t r = 0; r < d.rows; ++r)
        for (std::size_t c = 0; c < d.cols; ++c) out[r][c] = d.at(r, c);
    return out;
}

}  // namespace

PYBIND11_MODULE(_tfedsim, m) {
    m.doc() = "deterministic federated learning simulator for industrial time series";

    // --- feature math -------------------------------------------------------
    m.def(
        "autocorrelation",
        [](const std::vector<double>& window, std::size_t lag) {
            return features::autocorrelation(window, lag);
        },
        py::arg("window"), py::arg("lag"), "Windowed autocorrelation at the given lag.");
    m.def(
        "dft",
        [](const std::vector<double>& window, std::size_t bin) {
            return features::dft(window, bin);
        },
        py::arg("window"), py::arg("bin"), "Direct-summation DFT coefficient at the given bin.");
    m.def(
        "dominant_values",
        [](const std::vector<double>& window) {
            const auto dom = features::dominant_values(window);
            py::dict out;
            out["ac"] = std::vector<double>{dom.ac_dominant[0], dom.ac_dominant[1]};
            out["dft"] = std::vector<double>{dom.dft_dominant[0], dom.dft_dominant[1]};
            return out;
        },
        py::arg("window"),
        "Top-2 absolute autocorrelations and top-2 DFT magnitudes of a window.");

    // --- windowing and feature engineering -----------------------------------
    m.def(
        "window_count",
        [](std::size_t rows, std::size_t ts) {
            return rows >= ts ? rows - ts + 1 : std::size_t{0};
        },
        py::arg("rows"), py::arg("ts"));
    m.def(
        "engineer_features",
        [](const Matrix& rows, const std::vector<int>& labels, std::size_t ts) {
            const auto w = window(to_tabular(rows, labels), ts);
            const auto fe = features::engineer_features(w);
            Matrix values(fe.windows * fe.ts, std::vector<double>(fe.cols));
            for (std::size_t i = 0; i < fe.windows; ++i)
                for (std::size_t t = 0; t < fe.ts; ++t)
                    for (std::size_t c = 0; c < fe.cols; ++c)
                        values[i * fe.ts + t][c] = fe.at(i, t, c);
            py::dict out;
            out["values"] = values;
            out["labels"] = fe.labels;
            out["windows"] = fe.windows;
            out["ts"] = fe.ts;
            out["cols"] = fe.cols;
            return out;
        },
        py::arg("rows"), py::arg("labels"), py::arg("ts"),
        "Window a (rows x features) matrix and append the engineered columns.");

    // --- stationary conversion ------------------------------------------------
    m.def(
        "adf_test",
        [](const std::vector<double>& series) {
            const auto r = stationary::adf_test(series);
            py::dict out;
            out["statistic"] = r.statistic;
            out["critical_value"] = r.critical_value;
            out["lags_used"] = r.lags_used;
            out["is_stationary"] = r.is_stationary;
            out["degenerate"] = r.degenerate;
            return out;
        },
        py::arg("series"), "Augmented Dickey-Fuller stationarity test.");
    m.def(
        "detrend",
        [](const std::vector<double>& series, std::size_t ma_window) {
            return stationary::detrend(series, ma_window);
        },
        py::arg("series"), py::arg("ma_window"), "Subtract the trailing moving average.");
    m.def(
        "deseasonalize",
        [](const std::vector<double>& series, std::size_t period) {
            return stationary::deseasonalize(series, period);
        },
        py::arg("series"), py::arg("period"), "Seasonal differencing at the given period.");
    m.def(
        "detect_period",
        [](const std::vector<double>& series, std::size_t min_lag, std::size_t max_lag,
           double threshold) -> std::optional<std::size_t> {
            return stationary::detect_period(series, min_lag, max_lag, threshold);
        },
        py::arg("series"), py::arg("min_lag") = 2, py::arg("max_lag") = 100,
        py::arg("threshold") = 0.3, "Autocorrelation-peak period detection.");
    m.def(
        "fit_stationary_plan",
        [](const Matrix& rows) { return stationary::fit_plan(to_tabular(rows, {})).to_json(); },
        py::arg("rows"), "Fit a per-column stationary plan; returns the plan as JSON.");
    m.def(
        "apply_stationary_plan",
        [](const Matrix& rows, const std::string& plan_json) {
            const auto plan = stationary::StationaryPlan::from_json(plan_json);
            return from_tabular(stationary::apply_plan(to_tabular(rows, {}), plan));
        },
        py::arg("rows"), py::arg("plan_json"), "Apply a previously fitted plan.");

    // --- model wire format and aggregation -------------------------------------
    m.def(
        "payload_size",
        [](std::size_t input_dim, std::size_t hidden1, std::size_t hidden2,
           std::size_t num_classes, std::size_t ts) {
            return model::payload_size({input_dim, hidden1, hidden2, num_classes, ts});
        },
        py::arg("input_dim"), py::arg("hidden1"), py::arg("hidden2"), py::arg("num_classes"),
        py::arg("ts"), "Serialized model size in bytes for a configuration.");
    m.def(
        "fedavg",
        [](const std::vector<std::pair<std::vector<double>, std::size_t>>& models) {
            if (models.empty()) throw std::invalid_argument("fedavg needs at least one model");
            // Flat-vector convenience form of the C++ fedavg: same weighting,
            // applied to one tensor.
            model::ModelConfig cfg{1, 1, 1, 1, 1};
            std::vector<federation::WeightedModel> wrapped;
            const std::size_t len = models.front().first.size();
            for (std::size_t i = 0; i < models.size(); ++i) {
                if (models[i].first.size() != len)
                    throw std::invalid_argument("fedavg inputs must have equal length");
                federation::WeightedModel w;
                w.participant_id = i;
                w.sample_count = models[i].second;
                w.params = model::ModelParameters::zeros(cfg);
                w.params.tensors.resize(1);
                w.params.tensors[0].name = "flat";
                w.params.tensors[0].rows = len;
                w.params.tensors[0].cols = 1;
                w.params.tensors[0].data = models[i].first;
                wrapped.push_back(std::move(w));
            }
            return federation::fedavg(std::move(wrapped)).tensors[0].data;
        },
        py::arg("models"),
        "Sample-count-weighted mean of flat parameter vectors: [(values, count), ...].");

    // --- metrics ----------------------------------------------------------------
    m.def(
        "precision_recall_f1",
        [](const std::vector<int>& preds, const std::vector<int>& labels,
           std::size_t num_classes, const std::string& averaging) {
            const auto cm = metrics::confusion(preds, labels, num_classes);
            const auto avg = averaging == "weighted" ? metrics::Averaging::Weighted
                                                     : metrics::Averaging::Macro;
            const auto prf = metrics::precision_recall_f1(cm, avg);
            py::dict out;
            out["precision"] = prf.precision;
            out["recall"] = prf.recall;
            out["f1"] = prf.f1;
            return out;
        },
        py::arg("preds"), py::arg("labels"), py::arg("num_classes"),
        py::arg("averaging") = "macro");

    // --- data and experiments -----------------------------------------------------
    m.def(
        "synthesize_csv",
        [](const std::string& config_json, const std::string& out_path) {
            const auto config = experiment::ExperimentConfig::from_json(config_json);
            const auto records = data::synthesize(config.source.synth);
            data::write_csv(out_path, records);
            return records.size();
        },
        py::arg("config_json"), py::arg("out_path"),
        "Generate the synthetic dataset described by a config and write it as CSV.");
    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto config = experiment::ExperimentConfig::from_json(config_json);
            config.validate();
            return experiment::run_experiment(config).to_json();
        },
        py::arg("config_json"),
        "Run one experiment from a JSON config; returns the report as JSON.");
    m.def(
        "run_experiment_to_dir",
        [](const std::string& config_json, const std::string& out_dir) {
            auto config = experiment::ExperimentConfig::from_json(config_json);
            config.output_dir = out_dir;
            config.validate();
            experiment::write_run_directory(out_dir, experiment::run_experiment(config));
        },
        py::arg("config_json"), py::arg("out_dir"),
        "Run one experiment and write the full artifact directory.");
}
