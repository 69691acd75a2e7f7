#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "subanchor/types.hpp"

namespace subanchor {

namespace detail {

template <typename T>
Mat<T> unit_rows(const Mat<T>& m) {
  Mat<T> out = m;
  for (Index r = 0; r < out.rows(); ++r) {
    T n = out.row(r).norm();
    if (n > 0) out.row(r) /= n;
  }
  return out;
}

// Mean of the K largest values per row.
template <typename T>
Vec<T> topk_row_mean(const Mat<T>& m, int k) {
  Vec<T> out(m.rows());
  std::vector<T> row(static_cast<std::size_t>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end(), std::greater<T>());
    T sum = std::accumulate(row.begin(), row.begin() + k, T(0));
    out(r) = sum / static_cast<T>(k);
  }
  return out;
}

}  // namespace detail

// Cross-domain similarity local scaling over a fixed query/candidate setting:
//   CSLS(x, y) = 2 cos(x, y) - r_T(x) - r_S(y)
// where r_T(x) is the mean cosine of query x to its K nearest candidates and
// r_S(y) the mean cosine of candidate y to its K nearest queries.
template <typename T>
class CslsScorer {
 public:
  CslsScorer(const Mat<T>& queries, const Mat<T>& candidates, int k = 10)
      : k_(k) {
    if (k < 1) throw std::invalid_argument("csls: K must be >= 1");
    if (k >= candidates.rows())
      throw std::invalid_argument("csls: K must be smaller than the candidate count");
    if (queries.cols() != candidates.cols())
      throw std::invalid_argument("csls: dimension mismatch between queries and candidates");
    cos_ = detail::unit_rows(queries) * detail::unit_rows(candidates).transpose();
    r_queries_ = detail::topk_row_mean(cos_, k);
    Mat<T> cos_t = cos_.transpose();
    r_candidates_ = detail::topk_row_mean(cos_t, std::min<int>(k, static_cast<int>(cos_t.cols())));
  }

  int k() const { return k_; }
  Index num_queries() const { return cos_.rows(); }
  Index num_candidates() const { return cos_.cols(); }

  T score(Index query, Index candidate) const {
    return 2 * cos_(query, candidate) - r_queries_(query) - r_candidates_(candidate);
  }

  // Candidate ids sorted by descending CSLS score; ties by lowest id.
  std::vector<Index> retrieve(Index query) const {
    std::vector<Index> ids(static_cast<std::size_t>(cos_.cols()));
    std::iota(ids.begin(), ids.end(), Index{0});
    std::stable_sort(ids.begin(), ids.end(), [&](Index a, Index b) {
      return score(query, a) > score(query, b);
    });
    return ids;
  }

  Index top1(Index query) const {
    Index best = 0;
    T best_score = score(query, 0);
    for (Index c = 1; c < cos_.cols(); ++c) {
      T v = score(query, c);
      if (v > best_score) {
        best = c;
        best_score = v;
      }
    }
    return best;
  }

 private:
  int k_;
  Mat<T> cos_;
  Vec<T> r_queries_;
  Vec<T> r_candidates_;
};

}  // namespace subanchor
