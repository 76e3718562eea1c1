#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tfed/errors.hpp"
#include "tfed/features.hpp"
#include "tfed/timeseries.hpp"

using namespace tfed;
using namespace tfed::features;

namespace {

// Independent oracle: Eq-style direct summation, written without reference to
// the library implementation.
std::complex<double> naive_dft(const std::vector<double>& x, std::size_t k) {
    std::complex<double> sum = 0.0;
    const std::size_t W = x.size();
    for (std::size_t j = 0; j < W; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * j) /
                             static_cast<double>(W);
        sum += std::complex<double>(x[j] * std::cos(angle), x[j] * std::sin(angle));
    }
    return sum;
}

std::vector<double> sine_window(std::size_t len, double period) {
    std::vector<double> x(len);
    for (std::size_t t = 0; t < len; ++t)
        x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    return x;
}

}  // namespace

TEST_CASE("autocorrelation lag 0 is 1 for non-constant windows") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> x(16);
        for (double& v : x) v = dist(rng);
        CHECK(autocorrelation(x, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("autocorrelation of a sine at its period approaches (W-k)/W") {
    // The truncated numerator leaves W-k aligned terms over a full-window
    // denominator, so a perfectly periodic signal scores (W-k)/W, not 1.
    const auto x = sine_window(32, 8.0);
    CHECK(autocorrelation(x, 8) == doctest::Approx(24.0 / 32.0).epsilon(0.05));
}

TEST_CASE("alternating window has lag-1 autocorrelation -(W-1)/W") {
    // Hand computation: mean 0, numerator sums 7 products of -1, denominator 8.
    const std::vector<double> x = {1, -1, 1, -1, 1, -1, 1, -1};
    CHECK(autocorrelation(x, 1) == doctest::Approx(-7.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("autocorrelation error paths") {
    const std::vector<double> c = {3, 3, 3, 3};
    CHECK_THROWS_AS(autocorrelation(c, 1), DegenerateSignalError);
    const std::vector<double> x = {1, 2, 3, 4};
    CHECK_THROWS_AS(autocorrelation(x, 4), std::invalid_argument);
}

TEST_CASE("|autocorrelation| <= 1 + 1e-9 under fuzzing") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> dist;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x(12);
        for (double& v : x) v = dist(rng);
        for (std::size_t k = 0; k < x.size(); ++k)
            CHECK(std::abs(autocorrelation(x, k)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("dft of a constant window is DC only") {
    const std::vector<double> x(8, 2.5);
    CHECK(dft(x, 0).real() == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::abs(dft(x, 0).imag()) < 1e-9);
    for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(dft(x, k)) < 1e-9);
}

TEST_CASE("dft of cos(2*pi*3t/16) has magnitude 8 at bin 3") {
    std::vector<double> x(16);
    for (std::size_t t = 0; t < 16; ++t)
        x[t] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(t) / 16.0);
    CHECK(std::abs(dft(x, 3)) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("dft matches the naive oracle on random windows") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(64);
        for (double& v : x) v = dist(rng);
        for (std::size_t k = 0; k < 64; ++k) {
            const auto got = dft(x, k);
            const auto want = naive_dft(x, k);
            CHECK(std::abs(got.real() - want.real()) < 1e-9);
            CHECK(std::abs(got.imag() - want.imag()) < 1e-9);
        }
    }
}

TEST_CASE("dft conjugate symmetry on real input") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist;
    std::vector<double> x(16);
    for (double& v : x) v = dist(rng);
    for (std::size_t k = 1; k < 8; ++k)
        CHECK(std::abs(std::abs(dft(x, k)) - std::abs(dft(x, 16 - k))) < 1e-9);
}

TEST_CASE("dominant values of a constant window are zeros") {
    const std::vector<double> x(8, 1.0);
    const auto dom = dominant_values(x);
    CHECK(dom.ac_dominant[0] == 0.0);
    CHECK(dom.ac_dominant[1] == 0.0);
    CHECK(dom.dft_dominant[0] == 0.0);
    CHECK(dom.dft_dominant[1] == 0.0);
}

TEST_CASE("pure cosine: top DFT amplitude 8 at bin 3 of 16, second tiny") {
    std::vector<double> x(16);
    for (std::size_t t = 0; t < 16; ++t)
        x[t] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(t) / 16.0);
    const auto dom = dominant_values(x);
    CHECK(dom.dft_dominant[0] == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(dom.dft_dominant[1] < 1e-9);
    CHECK(dom.dft_dominant[0] >= dom.dft_dominant[1]);
}

TEST_CASE("square wave period 4: dominant AC includes the lag-4 value") {
    std::vector<double> x(16);
    for (std::size_t t = 0; t < 16; ++t) x[t] = (t % 4 < 2) ? 1.0 : -1.0;
    // Brute-force oracle over all lags.
    double best = 0.0;
    std::size_t best_lag = 0;
    for (std::size_t k = 1; k < 16; ++k) {
        const double ac = autocorrelation(x, k);
        if (std::abs(ac) > std::abs(best)) {
            best = ac;
            best_lag = k;
        }
    }
    const auto dom = dominant_values(x);
    CHECK(dom.ac_dominant[0] == doctest::Approx(best));
    CHECK(best_lag >= 1);
}

TEST_CASE("engineer_features arity and label preservation") {
    TabularDataset d;
    d.rows = 10;
    d.cols = 2;
    d.values.resize(20);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> dist;
    for (double& v : d.values) v = dist(rng);
    d.labels.assign(10, 0);
    for (std::size_t i = 5; i < 10; ++i) d.labels[i] = 1;

    const auto w = window(d, 5);
    const auto fe = features::engineer_features(w);
    CHECK(fe.cols == 10);  // 5n
    CHECK(fe.windows == w.windows);
    CHECK(fe.labels == w.labels);
    // Original columns preserved.
    for (std::size_t i = 0; i < w.windows; ++i)
        for (std::size_t t = 0; t < 5; ++t)
            for (std::size_t c = 0; c < 2; ++c) CHECK(fe.at(i, t, c) == w.at(i, t, c));
    // Deterministic across runs.
    const auto fe2 = features::engineer_features(w);
    CHECK(fe.values == fe2.values);
}

TEST_CASE("engineer_features appends the DFT dominant of a pure cosine") {
    TabularDataset d;
    d.rows = 16;
    d.cols = 1;
    d.values.resize(16);
    for (std::size_t t = 0; t < 16; ++t)
        d.values[t] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(t) / 16.0);
    d.labels.assign(16, 0);
    const auto w = window(d, 16);
    const auto fe = features::engineer_features(w);
    REQUIRE(fe.cols == 5);
    // Column layout per feature: ac1, ac2, dft1, dft2 after the originals.
    CHECK(fe.at(0, 0, 3) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("engineer_features rejects ts < 4") {
    TabularDataset d;
    d.rows = 6;
    d.cols = 1;
    d.values = {1, 2, 3, 4, 5, 6};
    d.labels.assign(6, 0);
    const auto w = window(d, 3);
    CHECK_THROWS_AS(features::engineer_features(w), std::invalid_argument);
}
