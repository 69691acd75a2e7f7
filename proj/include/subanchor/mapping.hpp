#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subanchor/types.hpp"

namespace subanchor {

// Length-normalize rows, mean-center, length-normalize again. Zero-norm rows
// are replaced by a uniform small vector first; their count is reported via
// zero_rows when given.
Mat<double> normalize_embeddings(const Mat<double>& e, int* zero_rows = nullptr);

struct SeedDictionary {
  std::vector<std::pair<TokenId, TokenId>> pairs;
  // Mean cosine between the paired embedding rows (a quality diagnostic:
  // high when the spaces already share axes, near zero for unrelated spaces).
  double mean_similarity = 0;
};

// Similarity-distribution initialization: within-language similarity
// matrices over the k most frequent rows, rows sorted and normalized, then
// mutual nearest neighbours between the sorted-row fingerprints.
// `x_rank`/`z_rank` list row indices in descending frequency order; empty
// means natural row order.
SeedDictionary unsupervised_init(const Mat<double>& x, const Mat<double>& z,
                                 Index k_vocab = 4000,
                                 const std::vector<TokenId>& x_rank = {},
                                 const std::vector<TokenId>& z_rank = {});

struct MapIteration {
  int iter = 0;
  std::size_t dict_size = 0;
  double mean_similarity = 0;
  double keep_prob = 0;
  double orthogonality_error = 0;  // ||W^T W - I||_F of the Procrustes solve
};

struct SelfLearnOptions {
  int max_iters = 100;
  Index induction_vocab = 4000;
  int csls_k = 10;
  double keep_prob_start = 0.1;
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

struct MappedSpaces {
  Mat<double> x_mapped;
  Mat<double> z_mapped;
  Mat<double> rotation;  // last orthogonal Procrustes solution
  std::vector<MapIteration> trace;
  bool converged = false;
  std::vector<std::pair<TokenId, TokenId>> final_dictionary;
};

// Stochastic self-learning: alternate orthogonal Procrustes with mutual-CSLS
// dictionary induction, then apply symmetric re-weighting (whiten, rotate,
// scale by sqrt singular values, de-whiten) with the final dictionary.
MappedSpaces self_learn(const Mat<double>& x, const Mat<double>& z, const SeedDictionary& seed,
                        const SelfLearnOptions& opt = {},
                        const std::vector<TokenId>& x_rank = {},
                        const std::vector<TokenId>& z_rank = {});

// Orthogonal Procrustes: the W maximizing alignment of the paired rows,
// via SVD of X_d^T Z_d. Also reports ||W^T W - I||_F.
Mat<double> procrustes_rotation(const Mat<double>& x, const Mat<double>& z,
                                const std::vector<std::pair<TokenId, TokenId>>& dict,
                                double* orthogonality_error = nullptr);

}  // namespace subanchor
