#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace subanchor {

// Dense row-major types: one row per vocabulary entry, so row access is
// contiguous in the training and retrieval hot paths.
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Index = Eigen::Index;
using TokenId = std::int32_t;

using TokenSpan = std::pair<std::int32_t, std::int32_t>;  // [start, end) in code points

}  // namespace subanchor
