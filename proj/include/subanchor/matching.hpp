#pragma once

#include <cstdint>
#include <vector>

#include "subanchor/types.hpp"

namespace subanchor {

struct ScoredPair {
  TokenId i = -1;  // row (L1) index
  TokenId j = -1;  // column (L2) index
  double score = 0;
};

struct MutualArgmaxResult {
  std::vector<ScoredPair> pairs;  // sorted by descending score, ties by (i, j)
  std::int64_t argmax_ties = 0;   // tie occurrences, broken by lowest index
};

// Pairs (i, j) with i = argmax_l S(l, j) and j = argmax_l S(i, l).
// The score of a pair is S(i, j); for a single similarity matrix the two
// directional readings coincide.
template <typename Derived>
MutualArgmaxResult mutual_argmax(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  const Index rows = s.rows(), cols = s.cols();
  MutualArgmaxResult result;
  if (rows == 0 || cols == 0) return result;

  std::vector<Index> row_best(static_cast<std::size_t>(rows));
  std::vector<Index> col_best(static_cast<std::size_t>(cols));
  for (Index i = 0; i < rows; ++i) {
    Index best = 0;
    Scalar best_val = s(i, 0);
    for (Index j = 1; j < cols; ++j) {
      Scalar v = s(i, j);
      if (v > best_val) {
        best = j;
        best_val = v;
      } else if (v == best_val) {
        ++result.argmax_ties;
      }
    }
    row_best[static_cast<std::size_t>(i)] = best;
  }
  for (Index j = 0; j < cols; ++j) {
    Index best = 0;
    Scalar best_val = s(0, j);
    for (Index i = 1; i < rows; ++i) {
      Scalar v = s(i, j);
      if (v > best_val) {
        best = i;
        best_val = v;
      } else if (v == best_val) {
        ++result.argmax_ties;
      }
    }
    col_best[static_cast<std::size_t>(j)] = best;
  }
  for (Index i = 0; i < rows; ++i) {
    Index j = row_best[static_cast<std::size_t>(i)];
    if (col_best[static_cast<std::size_t>(j)] == i)
      result.pairs.push_back({static_cast<TokenId>(i), static_cast<TokenId>(j),
                              static_cast<double>(s(i, j))});
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const ScoredPair& a, const ScoredPair& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.i != b.i) return a.i < b.i;
              return a.j < b.j;
            });
  return result;
}

}  // namespace subanchor
