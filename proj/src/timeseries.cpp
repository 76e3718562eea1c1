#include "tfed/timeseries.hpp"

#include <stdexcept>
#include <string>

#include "tfed/errors.hpp"

namespace tfed {

namespace {

// Contiguous [start, end) ranges of equal segment id.
std::vector<std::pair<std::size_t, std::size_t>> segment_ranges(
    const TabularDataset& data, BoundaryPolicy policy) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    if (policy == BoundaryPolicy::Global || data.segment_ids.empty()) {
        ranges.emplace_back(0, data.rows);
        return ranges;
    }
    std::size_t start = 0;
    for (std::size_t r = 1; r <= data.rows; ++r) {
        if (r == data.rows || data.segment_ids[r] != data.segment_ids[start]) {
            ranges.emplace_back(start, r);
            start = r;
        }
    }
    return ranges;
}

}  // namespace

WindowedDataset window(const TabularDataset& data, std::size_t ts, BoundaryPolicy policy) {
    if (ts < 1) throw std::invalid_argument("ts must be >= 1");
    data.validate();

    const auto ranges = segment_ranges(data, policy);
    std::size_t total = 0;
    for (const auto& [start, end] : ranges) {
        const std::size_t len = end - start;
        if (ts > len)
            throw EmptyWindowError("ts = " + std::to_string(ts) +
                                   " exceeds segment length " + std::to_string(len));
        total += len - ts + 1;
    }

    WindowedDataset out;
    out.ts = ts;
    out.cols = data.cols;
    out.windows = total;
    out.values.resize(total * ts * data.cols);
    out.labels.resize(total);

    std::size_t w = 0;
    for (const auto& [start, end] : ranges) {
        for (std::size_t i = start; i + ts <= end; ++i, ++w) {
            for (std::size_t t = 0; t < ts; ++t)
                for (std::size_t c = 0; c < data.cols; ++c)
                    out.at(w, t, c) = data.at(i + t, c);
            out.labels[w] = data.labels[i + ts - 1];
        }
    }
    return out;
}

}  // namespace tfed
