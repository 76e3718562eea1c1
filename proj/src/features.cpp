#include "tfed/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfed/errors.hpp"

namespace tfed::features {

namespace {

double window_mean(std::span<const double> w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    return sum / static_cast<double>(w.size());
}

bool is_degenerate(std::span<const double> w, double mean) {
    double den = 0.0;
    double scale = 1.0;
    for (double v : w) {
        den += (v - mean) * (v - mean);
        scale = std::max(scale, std::abs(v));
    }
    return den <= 1e-24 * scale * scale * static_cast<double>(w.size());
}

}  // namespace

double autocorrelation(std::span<const double> window, std::size_t k) {
    const std::size_t W = window.size();
    if (W < 2) throw std::invalid_argument("window must have at least 2 samples");
    if (k >= W) throw std::invalid_argument("lag k must be < window length");

    const double mean = window_mean(window);
    double den = 0.0;
    for (double v : window) den += (v - mean) * (v - mean);
    if (is_degenerate(window, mean))
        throw DegenerateSignalError("constant window has undefined autocorrelation");

    double num = 0.0;
    for (std::size_t i = 0; i + k < W; ++i)
        num += (window[i] - mean) * (window[i + k] - mean);
    return num / den;
}

std::complex<double> dft(std::span<const double> window, std::size_t k) {
    const std::size_t W = window.size();
    if (k >= W) throw std::invalid_argument("bin k must be < window length");

    std::complex<double> sum = 0.0;
    const double base = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(W);
    for (std::size_t j = 0; j < W; ++j) {
        const double angle = base * static_cast<double>(j);
        sum += window[j] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return sum;
}

DominantFeatures dominant_values(std::span<const double> window) {
    const std::size_t W = window.size();
    if (W < 4) throw std::invalid_argument("dominant_values requires window length >= 4");

    DominantFeatures out;
    if (is_degenerate(window, window_mean(window))) return out;  // all zeros

    // AC over lags 1..W-1; top two by |value|, ties to the smaller lag.
    double best[2] = {0.0, 0.0};
    double best_abs[2] = {-1.0, -1.0};
    for (std::size_t k = 1; k < W; ++k) {
        const double ac = autocorrelation(window, k);
        const double a = std::abs(ac);
        if (a > best_abs[0]) {
            best[1] = best[0]; best_abs[1] = best_abs[0];
            best[0] = ac; best_abs[0] = a;
        } else if (a > best_abs[1]) {
            best[1] = ac; best_abs[1] = a;
        }
    }
    out.ac_dominant[0] = best[0];
    out.ac_dominant[1] = best[1];

    // DFT amplitudes over bins 1..W/2 (DC and the conjugate-symmetric upper
    // half excluded); top two, ties to the lower bin.
    double mag[2] = {-1.0, -1.0};
    for (std::size_t k = 1; k <= W / 2; ++k) {
        const double m = std::abs(dft(window, k));
        if (m > mag[0]) {
            mag[1] = mag[0];
            mag[0] = m;
        } else if (m > mag[1]) {
            mag[1] = m;
        }
    }
    out.dft_dominant[0] = std::max(mag[0], 0.0);
    out.dft_dominant[1] = std::max(mag[1], 0.0);
    return out;
}

WindowedDataset engineer_features(const WindowedDataset& data) {
    if (data.ts < 4)
        throw std::invalid_argument("engineer_features requires ts >= 4, got " +
                                    std::to_string(data.ts));

    const std::size_t n = data.cols;
    WindowedDataset out;
    out.windows = data.windows;
    out.ts = data.ts;
    out.cols = 5 * n;
    out.labels = data.labels;
    out.values.resize(out.windows * out.ts * out.cols);

    std::vector<double> column(data.ts);
    for (std::size_t w = 0; w < data.windows; ++w) {
        for (std::size_t f = 0; f < n; ++f) {
            for (std::size_t t = 0; t < data.ts; ++t) column[t] = data.at(w, t, f);
            const DominantFeatures dom = dominant_values(column);
            for (std::size_t t = 0; t < data.ts; ++t) {
                out.at(w, t, f) = column[t];
                const std::size_t base = n + 4 * f;
                out.at(w, t, base + 0) = dom.ac_dominant[0];
                out.at(w, t, base + 1) = dom.ac_dominant[1];
                out.at(w, t, base + 2) = dom.dft_dominant[0];
                out.at(w, t, base + 3) = dom.dft_dominant[1];
            }
        }
    }
    return out;
}

}  // namespace tfed::features
