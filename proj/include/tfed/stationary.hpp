#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfed/dataset.hpp"

namespace tfed::stationary {

/// Outcome of the Augmented Dickey-Fuller unit-root test.
struct AdfResult {
    double statistic = 0.0;      // t-ratio of the lagged-level coefficient
    double critical_value = 0.0; // MacKinnon constant-only value at alpha
    std::size_t lags_used = 0;
    bool is_stationary = false;  // statistic < critical_value
    bool degenerate = false;     // constant series short-circuit
};

struct AdfOptions {
    std::optional<std::size_t> max_lag;  // cap on the Schwert lag order
    double alpha = 0.05;
    std::optional<double> critical_value_override;
};

/// ADF test with constant-only regression
///   dx_t = a + g*x_{t-1} + sum_i b_i * dx_{t-i} + e
/// fit by OLS; lag order p = floor(12 * (T/100)^(1/4)) capped at max_lag.
/// A constant series is reported stationary via the degenerate path.
/// Throws InsufficientDataError when the series is too short.
AdfResult adf_test(std::span<const double> series, const AdfOptions& opts = {});

/// Subtracts the trailing moving average (expanding over the first
/// ma_window - 1 entries); output length equals input length.
std::vector<double> detrend(std::span<const double> series, std::size_t ma_window);

/// Seasonal differencing: out[t] = x[t] - x[t-period] for t >= period, zeros
/// before. Output length equals input length.
std::vector<double> deseasonalize(std::span<const double> series, std::size_t period);

/// Lag in [min_lag, max_lag] maximizing the autocorrelation, if that maximum
/// exceeds `threshold`; nullopt otherwise (including degenerate series).
std::optional<std::size_t> detect_period(std::span<const double> series,
                                         std::size_t min_lag, std::size_t max_lag,
                                         double threshold = 0.3);

/// Per-column stationarity transform, fit on normal-class data only and then
/// applied unchanged to every class.
struct ColumnPlan {
    bool detrend = false;
    std::size_t ma_window = 10;
    bool deseasonalize = false;
    std::optional<std::size_t> period;
    double adf_statistic = 0.0;          // diagnostics from fitting
    double adf_statistic_after = 0.0;    // re-test after detrending (0 if none)
};

struct StationaryPlan {
    std::vector<ColumnPlan> columns;

    bool is_identity() const;
    std::string to_json() const;
    static StationaryPlan from_json(const std::string& text);
};

struct StationaryOptions {
    AdfOptions adf;
    std::size_t ma_window = 10;
    std::size_t period_min_lag = 2;
    std::size_t period_max_lag = 100;
    double ac_threshold = 0.3;
};

/// Fits one ColumnPlan per feature on normal-class data: columns the ADF test
/// already calls stationary get identity plans; non-stationary columns are
/// detrended, re-tested, and scanned for a seasonal period on the detrended
/// series.
StationaryPlan fit_plan(const TabularDataset& normal_data,
                        const StationaryOptions& opts = {});

/// Applies a fitted plan column by column (detrend, then seasonal
/// differencing), independently per segment. Labels and shape are preserved.
/// Throws std::invalid_argument on a column-count mismatch.
TabularDataset apply_plan(const TabularDataset& data, const StationaryPlan& plan);

}  // namespace tfed::stationary
