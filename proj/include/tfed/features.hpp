#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "tfed/dataset.hpp"

namespace tfed::features {

/// Dominant derived features of one signal window: the two autocorrelation
/// values of largest absolute value over lags >= 1 (kept signed, ordered by
/// descending |value|, ties to the smaller lag) and the two largest DFT
/// amplitudes over bins 1..W/2 (ordered descending, ties to the lower bin).
struct DominantFeatures {
    double ac_dominant[2] = {0.0, 0.0};
    double dft_dominant[2] = {0.0, 0.0};
};

/// Windowed autocorrelation at lag k:
///   sum_{i=0}^{W-1-k} (x_i - mean)(x_{i+k} - mean) / sum_{i=0}^{W-1} (x_i - mean)^2
/// Throws DegenerateSignalError for a constant window, std::invalid_argument
/// for k >= W.
double autocorrelation(std::span<const double> window, std::size_t k);

/// Naive discrete Fourier transform of the window at frequency bin k,
/// indices re-based to 0..W-1. Throws std::invalid_argument for k >= W.
std::complex<double> dft(std::span<const double> window, std::size_t k);

/// Dominant AC/DFT values of one window (see DominantFeatures). Requires
/// W >= 4. A constant window yields all zeros rather than an error.
DominantFeatures dominant_values(std::span<const double> window);

/// Appends 4 derived columns per original feature (ac1, ac2, dft1, dft2 in
/// that order, features in original column order), computed over each
/// window's own ts samples and broadcast across the window's time steps.
/// Output has 5n columns; window count and labels are unchanged.
/// Requires ts >= 4.
WindowedDataset engineer_features(const WindowedDataset& data);

}  // namespace tfed::features
