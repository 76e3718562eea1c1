#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace tfed {

/// Tabular data: m samples by n features, row-major, with one class label per
/// row. Rows may be grouped into contiguous segments (independent simulation
/// runs); segment_ids is either empty (single segment) or has one entry per
/// row, constant within a segment and changing only at segment boundaries.
struct TabularDataset {
    std::vector<double> values;  // m * n, row-major
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> labels;                       // size m
    std::vector<std::string> feature_names;        // size n (may be empty)
    std::vector<int> segment_ids;                  // size m or empty
    std::vector<std::pair<int, int>> segment_keys; // (class, run) per segment id

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }

    /// Extracts one feature column in row order.
    std::vector<double> column(std::size_t c) const;

    /// Throws if row/label/segment arities disagree or values are non-finite.
    void validate() const;
};

/// Sliding-window view of a TabularDataset: w windows of ts consecutive rows,
/// each with the label of its last row. Stored row-major as (w, ts, n).
struct WindowedDataset {
    std::vector<double> values;  // w * ts * n
    std::size_t windows = 0;
    std::size_t ts = 0;
    std::size_t cols = 0;
    std::vector<int> labels;  // size w

    double at(std::size_t w, std::size_t t, std::size_t c) const {
        return values[(w * ts + t) * cols + c];
    }
    double& at(std::size_t w, std::size_t t, std::size_t c) {
        return values[(w * ts + t) * cols + c];
    }
};

}  // namespace tfed
