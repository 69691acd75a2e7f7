#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "subanchor/types.hpp"

namespace subanchor {

// Euclidean projection onto the probability simplex (sparsemax). Sort-based:
// k = max{ k : 1 + k z_(k) > sum_{j<=k} z_(j) }, tau = (sum_{j<=k} z_(j) - 1)/k,
// p_i = max(z_i - tau, 0).
template <typename Derived>
Vec<typename Derived::Scalar> sparsemax(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  const Index n = z.size();
  if (n == 0) throw std::invalid_argument("sparsemax: empty input");

  std::vector<Scalar> sorted(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = z(i);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());

  Scalar cumsum = 0;
  Scalar tau = sorted[0] - 1;
  Index support = 1;
  for (Index k = 1; k <= n; ++k) {
    Scalar zk = sorted[static_cast<std::size_t>(k - 1)];
    cumsum += zk;
    if (1 + static_cast<Scalar>(k) * zk > cumsum) {
      support = k;
      tau = (cumsum - 1) / static_cast<Scalar>(k);
    }
  }
  (void)support;

  Vec<Scalar> p(n);
  for (Index i = 0; i < n; ++i) p(i) = std::max<Scalar>(z(i) - tau, 0);
  return p;
}

}  // namespace subanchor
