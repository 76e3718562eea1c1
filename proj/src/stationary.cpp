#include "tfed/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tfed/errors.hpp"
#include "tfed/features.hpp"

namespace tfed::stationary {

namespace {

// MacKinnon large-sample critical values, constant-only regression.
double mackinnon_critical(double alpha) {
    struct Entry { double alpha, value; };
    static constexpr Entry table[] = {
        {0.01, -3.43}, {0.025, -3.12}, {0.05, -2.86}, {0.10, -2.57}};
    double best = table[2].value;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& e : table) {
        const double gap = std::abs(e.alpha - alpha);
        if (gap < best_gap) {
            best_gap = gap;
            best = e.value;
        }
    }
    return best;
}

// Solves A x = b for symmetric positive-definite-ish A via Gauss-Jordan with
// partial pivoting, returning the full inverse as well. Throws
// DegenerateSignalError on a (near-)singular matrix.
std::vector<double> invert(std::vector<double> a, std::size_t k) {
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1.0;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r * k + col]) > std::abs(a[pivot * k + col])) pivot = r;
        if (std::abs(a[pivot * k + col]) < 1e-12)
            throw DegenerateSignalError("singular regression matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < k; ++j) {
                std::swap(a[pivot * k + j], a[col * k + j]);
                std::swap(inv[pivot * k + j], inv[col * k + j]);
            }
        }
        const double d = a[col * k + col];
        for (std::size_t j = 0; j < k; ++j) {
            a[col * k + j] /= d;
            inv[col * k + j] /= d;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r * k + col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) {
                a[r * k + j] -= f * a[col * k + j];
                inv[r * k + j] -= f * inv[col * k + j];
            }
        }
    }
    return inv;
}

double series_variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    return var / static_cast<double>(x.size());
}

}  // namespace

AdfResult adf_test(std::span<const double> series, const AdfOptions& opts) {
    const std::size_t T = series.size();
    std::size_t p = static_cast<std::size_t>(
        std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
    if (opts.max_lag) p = std::min(p, *opts.max_lag);

    AdfResult result;
    result.critical_value = opts.critical_value_override
                                ? *opts.critical_value_override
                                : mackinnon_critical(opts.alpha);

    if (T < 20 + p)
        throw InsufficientDataError("ADF needs at least " + std::to_string(20 + p) +
                                    " samples, got " + std::to_string(T));

    // A constant series is trivially stationary; the regression would be
    // singular.
    const double scale = std::max(1.0, std::abs(series[0]));
    if (series_variance(series) <= 1e-24 * scale * scale) {
        result.degenerate = true;
        result.is_stationary = true;
        result.statistic = -std::numeric_limits<double>::infinity();
        result.lags_used = p;
        return result;
    }

    // Regression rows t = p+1 .. T-1 (0-based):
    //   dx_t = a + g*x_{t-1} + sum_{i=1..p} b_i * dx_{t-i}
    const std::size_t N = T - 1 - p;
    const std::size_t K = p + 2;
    std::vector<double> xtx(K * K, 0.0), xty(K, 0.0), row(K);
    std::vector<double> dep(N);
    std::vector<std::vector<double>> design(N, std::vector<double>(K));
    for (std::size_t r = 0; r < N; ++r) {
        const std::size_t t = p + 1 + r;
        dep[r] = series[t] - series[t - 1];
        design[r][0] = 1.0;
        design[r][1] = series[t - 1];
        for (std::size_t i = 1; i <= p; ++i)
            design[r][1 + i] = series[t - i] - series[t - i - 1];
    }
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t i = 0; i < K; ++i) {
            xty[i] += design[r][i] * dep[r];
            for (std::size_t j = i; j < K; ++j) xtx[i * K + j] += design[r][i] * design[r][j];
        }
    }
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < i; ++j) xtx[i * K + j] = xtx[j * K + i];

    std::vector<double> xtx_inv;
    try {
        xtx_inv = invert(xtx, K);
    } catch (const DegenerateSignalError&) {
        result.degenerate = true;
        result.is_stationary = true;
        result.statistic = -std::numeric_limits<double>::infinity();
        result.lags_used = p;
        return result;
    }

    std::vector<double> beta(K, 0.0);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) beta[i] += xtx_inv[i * K + j] * xty[j];

    double rss = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
        double fit = 0.0;
        for (std::size_t i = 0; i < K; ++i) fit += design[r][i] * beta[i];
        const double e = dep[r] - fit;
        rss += e * e;
    }
    if (N <= K) throw InsufficientDataError("not enough degrees of freedom for ADF");
    const double sigma2 = rss / static_cast<double>(N - K);
    const double se = std::sqrt(std::max(sigma2 * xtx_inv[1 * K + 1], 0.0));
    if (se == 0.0) {
        // Exact fit of the lagged level; treat like the degenerate path.
        result.degenerate = true;
        result.is_stationary = true;
        result.statistic = -std::numeric_limits<double>::infinity();
        result.lags_used = p;
        return result;
    }

    result.statistic = beta[1] / se;
    result.lags_used = p;
    result.is_stationary = result.statistic < result.critical_value;
    return result;
}

std::vector<double> detrend(std::span<const double> series, std::size_t ma_window) {
    if (ma_window < 1) throw std::invalid_argument("ma_window must be >= 1");
    if (ma_window > series.size())
        throw std::invalid_argument("ma_window exceeds series length");
    std::vector<double> out(series.size());
    double running = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        running += series[t];
        if (t >= ma_window) running -= series[t - ma_window];
        const std::size_t count = std::min(t + 1, ma_window);
        out[t] = series[t] - running / static_cast<double>(count);
    }
    return out;
}

std::vector<double> deseasonalize(std::span<const double> series, std::size_t period) {
    if (period < 1) throw std::invalid_argument("period must be >= 1");
    if (period >= series.size())
        throw std::invalid_argument("period must be < series length");
    std::vector<double> out(series.size(), 0.0);
    for (std::size_t t = period; t < series.size(); ++t)
        out[t] = series[t] - series[t - period];
    return out;
}

std::optional<std::size_t> detect_period(std::span<const double> series,
                                         std::size_t min_lag, std::size_t max_lag,
                                         double threshold) {
    if (min_lag < 2 || min_lag >= max_lag || max_lag >= series.size())
        throw std::invalid_argument("require 2 <= min_lag < max_lag < series length");
    // The autocorrelation of any smooth signal is large at small lags, so a
    // global argmax would always return min_lag. Candidates are local maxima
    // of the AC curve instead; the strongest one above the threshold wins,
    // ties going to the smaller lag.
    std::vector<double> ac(max_lag + 2, -std::numeric_limits<double>::infinity());
    const std::size_t top = std::min(max_lag + 1, series.size() - 1);
    for (std::size_t k = min_lag - 1; k <= top; ++k) {
        try {
            ac[k] = features::autocorrelation(series, k);
        } catch (const DegenerateSignalError&) {
            return std::nullopt;
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_lag = 0;
    for (std::size_t k = min_lag; k <= max_lag; ++k) {
        const bool rising = ac[k] > ac[k - 1];
        const bool falling = k + 1 > top || ac[k] >= ac[k + 1];
        if (rising && falling && ac[k] > best) {
            best = ac[k];
            best_lag = k;
        }
    }
    if (best > threshold) return best_lag;
    return std::nullopt;
}

bool StationaryPlan::is_identity() const {
    for (const auto& c : columns)
        if (c.detrend || c.deseasonalize) return false;
    return true;
}

std::string StationaryPlan::to_json() const {
    nlohmann::ordered_json j;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : columns) {
        nlohmann::ordered_json jc;
        jc["detrend"] = c.detrend;
        jc["ma_window"] = c.ma_window;
        jc["deseasonalize"] = c.deseasonalize;
        if (c.period) jc["period"] = *c.period; else jc["period"] = nullptr;
        jc["adf_statistic"] = c.adf_statistic;
        jc["adf_statistic_after"] = c.adf_statistic_after;
        j["columns"].push_back(jc);
    }
    return j.dump(2);
}

StationaryPlan StationaryPlan::from_json(const std::string& text) {
    StationaryPlan plan;
    const auto j = nlohmann::json::parse(text);
    for (const auto& jc : j.at("columns")) {
        ColumnPlan c;
        c.detrend = jc.at("detrend").get<bool>();
        c.ma_window = jc.at("ma_window").get<std::size_t>();
        c.deseasonalize = jc.at("deseasonalize").get<bool>();
        if (!jc.at("period").is_null()) c.period = jc.at("period").get<std::size_t>();
        c.adf_statistic = jc.value("adf_statistic", 0.0);
        c.adf_statistic_after = jc.value("adf_statistic_after", 0.0);
        plan.columns.push_back(c);
    }
    return plan;
}

StationaryPlan fit_plan(const TabularDataset& normal_data, const StationaryOptions& opts) {
    normal_data.validate();
    StationaryPlan plan;
    plan.columns.resize(normal_data.cols);
    for (std::size_t c = 0; c < normal_data.cols; ++c) {
        ColumnPlan& col = plan.columns[c];
        col.ma_window = opts.ma_window;
        const std::vector<double> series = normal_data.column(c);
        const AdfResult first = adf_test(series, opts.adf);
        col.adf_statistic = first.statistic;
        if (first.is_stationary) continue;  // identity plan for this column

        col.detrend = true;
        const std::vector<double> detrended = detrend(series, opts.ma_window);
        const AdfResult second = adf_test(detrended, opts.adf);
        col.adf_statistic_after = second.statistic;

        // A strong deterministic season makes the detrended series test
        // stationary even though the seasonal structure is still there, so
        // the period scan runs on every detrended column.
        const std::size_t max_lag = std::min(opts.period_max_lag, series.size() - 1);
        if (opts.period_min_lag < max_lag) {
            if (auto period = detect_period(detrended, opts.period_min_lag, max_lag,
                                            opts.ac_threshold);
                period && *period >= 2) {
                col.deseasonalize = true;
                col.period = period;
            }
        }
    }
    return plan;
}

TabularDataset apply_plan(const TabularDataset& data, const StationaryPlan& plan) {
    if (plan.columns.size() != data.cols)
        throw std::invalid_argument("plan column count does not match dataset");
    TabularDataset out = data;
    if (plan.is_identity()) return out;

    // Segment boundaries: transforms run independently per simulation run.
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    if (data.segment_ids.empty()) {
        ranges.emplace_back(0, data.rows);
    } else {
        std::size_t start = 0;
        for (std::size_t r = 1; r <= data.rows; ++r) {
            if (r == data.rows || data.segment_ids[r] != data.segment_ids[start]) {
                ranges.emplace_back(start, r);
                start = r;
            }
        }
    }

    for (std::size_t c = 0; c < data.cols; ++c) {
        const ColumnPlan& col = plan.columns[c];
        if (!col.detrend && !col.deseasonalize) continue;
        for (const auto& [start, end] : ranges) {
            std::vector<double> series(end - start);
            for (std::size_t r = start; r < end; ++r) series[r - start] = out.at(r, c);
            if (col.detrend && col.ma_window <= series.size())
                series = detrend(series, col.ma_window);
            if (col.deseasonalize && col.period && *col.period < series.size())
                series = deseasonalize(series, *col.period);
            for (std::size_t r = start; r < end; ++r) out.at(r, c) = series[r - start];
        }
    }
    return out;
}

}  // namespace tfed::stationary
