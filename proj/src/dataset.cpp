#include "tfed/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "tfed/errors.hpp"

namespace tfed {

std::vector<double> TabularDataset::column(std::size_t c) const {
    if (c >= cols) throw std::invalid_argument("column index out of range");
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = values[r * cols + c];
    return out;
}

void TabularDataset::validate() const {
    if (rows == 0 || cols == 0) throw std::invalid_argument("dataset must be non-empty");
    if (values.size() != rows * cols)
        throw std::invalid_argument("values size does not match rows * cols");
    if (labels.size() != rows)
        throw std::invalid_argument("labels length does not match row count");
    if (!segment_ids.empty() && segment_ids.size() != rows)
        throw std::invalid_argument("segment_ids length does not match row count");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset contains non-finite values");
}

}  // namespace tfed
