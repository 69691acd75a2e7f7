#include "subanchor/mapping.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "subanchor/csls.hpp"

namespace subanchor {

namespace {

std::vector<TokenId> default_rank(Index n) {
  std::vector<TokenId> rank(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rank[static_cast<std::size_t>(i)] = static_cast<TokenId>(i);
  return rank;
}

Mat<double> take_rows(const Mat<double>& m, const std::vector<TokenId>& ids, Index k) {
  Mat<double> out(k, m.cols());
  for (Index i = 0; i < k; ++i) out.row(i) = m.row(ids[static_cast<std::size_t>(i)]);
  return out;
}

// Symmetric inverse square root with eigenvalue clamping.
Mat<double> inv_sqrt_sym(const Mat<double>& a) {
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("mapping: eigendecomposition failed in whitening");
  Vec<double> d = es.eigenvalues();
  for (Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(d(i), 1e-12));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Mat<double> normalize_embeddings(const Mat<double>& e, int* zero_rows) {
  Mat<double> out = e;
  int zeros = 0;
  const double fill = 1.0 / std::sqrt(static_cast<double>(out.cols()));
  auto unit_rows = [&](bool count_zeros) {
    for (Index r = 0; r < out.rows(); ++r) {
      double n = out.row(r).norm();
      if (n <= 1e-30) {
        if (count_zeros) ++zeros;
        out.row(r).setConstant(fill);
        n = 1.0;
      }
      out.row(r) /= out.row(r).norm();
    }
  };
  unit_rows(true);
  out.rowwise() -= out.colwise().mean();
  unit_rows(false);
  if (zero_rows) *zero_rows = zeros;
  return out;
}

SeedDictionary unsupervised_init(const Mat<double>& x, const Mat<double>& z, Index k_vocab,
                                 const std::vector<TokenId>& x_rank,
                                 const std::vector<TokenId>& z_rank) {
  if (x.rows() + z.rows() < 32)
    throw std::invalid_argument("unsupervised_init: fewer than 32 rows total");
  const std::vector<TokenId> xr = x_rank.empty() ? default_rank(x.rows()) : x_rank;
  const std::vector<TokenId> zr = z_rank.empty() ? default_rank(z.rows()) : z_rank;
  const Index k = std::min({k_vocab, static_cast<Index>(xr.size()), static_cast<Index>(zr.size())});

  Mat<double> xk = take_rows(x, xr, k);
  Mat<double> zk = take_rows(z, zr, k);
  Mat<double> mx = xk * xk.transpose();
  Mat<double> mz = zk * zk.transpose();
  auto fingerprints = [](Mat<double>& m) {
    for (Index r = 0; r < m.rows(); ++r) {
      double* begin = m.data() + r * m.cols();
      std::sort(begin, begin + m.cols());
      double n = m.row(r).norm();
      if (n > 0) m.row(r) /= n;
    }
  };
  fingerprints(mx);
  fingerprints(mz);

  Mat<double> sim = mx * mz.transpose();
  SeedDictionary seed;
  double sim_sum = 0;
  std::vector<Index> row_best(static_cast<std::size_t>(k)), col_best(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    Index best;
    sim.row(i).maxCoeff(&best);
    row_best[static_cast<std::size_t>(i)] = best;
  }
  for (Index j = 0; j < k; ++j) {
    Index best;
    sim.col(j).maxCoeff(&best);
    col_best[static_cast<std::size_t>(j)] = best;
  }
  for (Index i = 0; i < k; ++i) {
    Index j = row_best[static_cast<std::size_t>(i)];
    if (col_best[static_cast<std::size_t>(j)] != i) continue;
    TokenId xi = xr[static_cast<std::size_t>(i)];
    TokenId zj = zr[static_cast<std::size_t>(j)];
    seed.pairs.emplace_back(xi, zj);
    double xn = x.row(xi).norm(), zn = z.row(zj).norm();
    if (xn > 0 && zn > 0) sim_sum += x.row(xi).dot(z.row(zj)) / (xn * zn);
  }
  if (seed.pairs.empty()) throw std::runtime_error("unsupervised_init: no seed pairs found");
  seed.mean_similarity = sim_sum / static_cast<double>(seed.pairs.size());
  return seed;
}

Mat<double> procrustes_rotation(const Mat<double>& x, const Mat<double>& z,
                                const std::vector<std::pair<TokenId, TokenId>>& dict,
                                double* orthogonality_error) {
  if (dict.empty()) throw std::invalid_argument("procrustes: empty dictionary");
  Mat<double> cross = Mat<double>::Zero(x.cols(), z.cols());
  for (const auto& [i, j] : dict) cross += x.row(i).transpose() * z.row(j);
  Eigen::BDCSVD<Mat<double>> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("procrustes: SVD failed");
  Mat<double> w = svd.matrixU() * svd.matrixV().transpose();
  if (orthogonality_error) {
    Mat<double> gram = w.transpose() * w;
    gram.diagonal().array() -= 1.0;
    *orthogonality_error = gram.norm();
  }
  return w;
}

MappedSpaces self_learn(const Mat<double>& x, const Mat<double>& z, const SeedDictionary& seed,
                        const SelfLearnOptions& opt, const std::vector<TokenId>& x_rank,
                        const std::vector<TokenId>& z_rank) {
  if (seed.pairs.empty()) throw std::invalid_argument("self_learn: empty seed dictionary");
  const std::vector<TokenId> xr = x_rank.empty() ? default_rank(x.rows()) : x_rank;
  const std::vector<TokenId> zr = z_rank.empty() ? default_rank(z.rows()) : z_rank;
  const Index k =
      std::min({opt.induction_vocab, static_cast<Index>(xr.size()), static_cast<Index>(zr.size())});
  const Mat<double> zk = take_rows(z, zr, k);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  MappedSpaces result;
  std::vector<std::pair<TokenId, TokenId>> dict = seed.pairs;
  std::vector<std::pair<TokenId, TokenId>> best_dict = dict;
  double best_objective = -2.0;
  double keep_prob = opt.keep_prob_start;
  const int csls_k = std::max(1, std::min<int>(opt.csls_k, static_cast<int>(k) - 1));

  for (int iter = 0; iter < opt.max_iters; ++iter) {
    double orth_err = 0;
    Mat<double> w = procrustes_rotation(x, z, dict, &orth_err);
    result.rotation = w;

    // Induce the next dictionary among the top-k rows of each space.
    Mat<double> xk_mapped = take_rows(x, xr, k) * w;
    Mat<double> cos = xk_mapped * zk.transpose();
    Mat<double> masked = cos;
    if (keep_prob < 1.0) {
      for (Index i = 0; i < masked.rows(); ++i)
        for (Index j = 0; j < masked.cols(); ++j)
          if (unif(rng) >= keep_prob) masked(i, j) = -2.0;
    }
    Vec<double> r_x = detail::topk_row_mean(cos, csls_k);
    Mat<double> cos_t = cos.transpose();
    Vec<double> r_z = detail::topk_row_mean(cos_t, csls_k);

    std::vector<Index> fwd(static_cast<std::size_t>(k)), bwd(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
      Index best = 0;
      double best_score = -1e30;
      for (Index j = 0; j < k; ++j) {
        double v = 2 * masked(i, j) - r_z(j);
        if (v > best_score) {
          best_score = v;
          best = j;
        }
      }
      fwd[static_cast<std::size_t>(i)] = best;
    }
    for (Index j = 0; j < k; ++j) {
      Index best = 0;
      double best_score = -1e30;
      for (Index i = 0; i < k; ++i) {
        double v = 2 * masked(i, j) - r_x(i);
        if (v > best_score) {
          best_score = v;
          best = i;
        }
      }
      bwd[static_cast<std::size_t>(j)] = best;
    }

    std::vector<std::pair<TokenId, TokenId>> induced;
    double sim_sum = 0;
    for (Index i = 0; i < k; ++i) {
      Index j = fwd[static_cast<std::size_t>(i)];
      if (bwd[static_cast<std::size_t>(j)] != i) continue;
      induced.emplace_back(xr[static_cast<std::size_t>(i)], zr[static_cast<std::size_t>(j)]);
      sim_sum += cos(i, j);
    }
    if (induced.empty()) throw std::runtime_error("mapping collapsed: empty induced dictionary");
    double objective = sim_sum / static_cast<double>(induced.size());

    result.trace.push_back(
        {iter, induced.size(), objective, keep_prob, orth_err});
    dict = std::move(induced);

    if (objective > best_objective + opt.tol) {
      best_objective = objective;
      best_dict = dict;
    } else if (keep_prob >= 1.0) {
      result.converged = true;
      break;
    } else {
      keep_prob = std::min(1.0, keep_prob * 2);
    }
  }

  result.rotation = procrustes_rotation(x, z, best_dict);

  // Final transformation from the best dictionary: whitening, rotation,
  // re-weighting by sqrt singular values, de-whitening.
  const auto nd = static_cast<Index>(best_dict.size());
  Mat<double> dx(nd, x.cols()), dz(nd, z.cols());
  for (Index r = 0; r < nd; ++r) {
    dx.row(r) = x.row(best_dict[static_cast<std::size_t>(r)].first);
    dz.row(r) = z.row(best_dict[static_cast<std::size_t>(r)].second);
  }
  Mat<double> wx1 = inv_sqrt_sym(dx.transpose() * dx);
  Mat<double> wz1 = inv_sqrt_sym(dz.transpose() * dz);
  Mat<double> x1d = dx * wx1;
  Mat<double> z1d = dz * wz1;
  Eigen::BDCSVD<Mat<double>> svd(x1d.transpose() * z1d,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("mapping: final SVD failed");
  Mat<double> u = svd.matrixU();
  Mat<double> v = svd.matrixV();
  Vec<double> s = svd.singularValues().array().sqrt();

  Mat<double> x_transform =
      wx1 * u * s.asDiagonal() * u.transpose() * wx1.inverse() * u;
  Mat<double> z_transform =
      wz1 * v * s.asDiagonal() * v.transpose() * wz1.inverse() * v;
  result.x_mapped = x * x_transform;
  result.z_mapped = z * z_transform;
  result.final_dictionary = std::move(best_dict);
  return result;
}

}  // namespace subanchor
