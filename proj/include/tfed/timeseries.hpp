#pragma once

#include "tfed/dataset.hpp"

namespace tfed {

/// How sliding windows treat segment boundaries.
enum class BoundaryPolicy {
    Global,      // one contiguous series; windows may span the whole table
    PerSegment,  // windows never straddle two segments (independent runs)
};

/// Converts a tabular dataset into sliding windows of ts consecutive rows.
/// Each segment of length L yields L - ts + 1 windows; the label of a window
/// is the label of its last row. Throws EmptyWindowError when ts exceeds the
/// shortest segment (or the whole table under Global policy).
WindowedDataset window(const TabularDataset& data, std::size_t ts,
                       BoundaryPolicy policy = BoundaryPolicy::PerSegment);

}  // namespace tfed
