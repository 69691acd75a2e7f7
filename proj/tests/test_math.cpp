#include <doctest.h>

#include <random>

#include "subanchor/csls.hpp"
#include "subanchor/matching.hpp"
#include "subanchor/simplex.hpp"

using namespace subanchor;

namespace {

// Independent simplex projection: bisection on the threshold tau with
// sum_i max(z_i - tau, 0) = 1.
Vec<double> simplex_projection_bisect(const Vec<double>& z) {
  double lo = z.minCoeff() - 1.0, hi = z.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    double mass = (z.array() - mid).cwiseMax(0.0).sum();
    if (mass > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  double tau = (lo + hi) / 2;
  return (z.array() - tau).cwiseMax(0.0);
}

// Brute force Eq.-style mutual argmax with lowest-index tie-breaking.
std::vector<std::pair<Index, Index>> mutual_argmax_brute(const Mat<double>& s) {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) {
      double row_max = s.row(i).maxCoeff();
      double col_max = s.col(j).maxCoeff();
      if (s(i, j) != row_max || s(i, j) != col_max) continue;
      bool first_in_row = true, first_in_col = true;
      for (Index l = 0; l < j; ++l)
        if (s(i, l) == row_max) first_in_row = false;
      for (Index l = 0; l < i; ++l)
        if (s(l, j) == col_max) first_in_col = false;
      if (first_in_row && first_in_col) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sparsemax worked example and grid oracle") {
  Vec<double> z(3);
  z << 1.0, 0.5, -0.5;
  Vec<double> p = sparsemax(z);
  CHECK(p(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p(1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p(2) == doctest::Approx(0.0).epsilon(1e-12));

  // Quadratic minimization over a fine grid confirms the projection: no grid
  // point on the simplex is closer to z.
  double best = (p - z).squaredNorm();
  const int steps = 200;
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; a + b <= steps; ++b) {
      Vec<double> q(3);
      q << static_cast<double>(a) / steps, static_cast<double>(b) / steps,
          1.0 - static_cast<double>(a + b) / steps;
      CHECK((q - z).squaredNorm() >= best - 1e-9);
    }
  }
}

TEST_CASE("sparsemax symmetry and one-hot threshold") {
  Vec<double> same(2);
  same << 3.7, 3.7;
  Vec<double> p = sparsemax(same);
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == doctest::Approx(0.5));

  Vec<double> dom(4);
  dom << 5.0, 3.9, 2.0, -1.0;  // leader ahead by more than 1
  Vec<double> q = sparsemax(dom);
  CHECK(q(0) == doctest::Approx(1.0));
  CHECK(q.tail(3).maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("sparsemax equals the bisection oracle on random vectors") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0, 2);
  std::uniform_int_distribution<int> dim(2, 64);
  for (int trial = 0; trial < 300; ++trial) {
    Vec<double> z(dim(rng));
    for (Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    Vec<double> p = sparsemax(z);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    Vec<double> ref = simplex_projection_bisect(z);
    CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("sparsemax rejects an empty vector") {
  Vec<double> empty(0);
  CHECK_THROWS_AS(sparsemax(empty), std::invalid_argument);
}

TEST_CASE("mutual argmax on the documented 2x2 matrices") {
  Mat<double> s(2, 2);
  s << 0.9, 0.1, 0.2, 0.8;
  auto r = mutual_argmax(s);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].i == 0);
  CHECK(r.pairs[0].j == 0);
  CHECK(r.pairs[0].score == doctest::Approx(0.9));
  CHECK(r.pairs[1].i == 1);
  CHECK(r.pairs[1].j == 1);

  Mat<double> t(2, 2);
  t << 0.9, 0.8, 0.85, 0.1;
  auto r2 = mutual_argmax(t);
  REQUIRE(r2.pairs.size() == 1);
  CHECK(r2.pairs[0].i == 0);
  CHECK(r2.pairs[0].j == 0);
}

TEST_CASE("mutual argmax equals brute force on random matrices") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1, 1);
  std::uniform_int_distribution<Index> rows(1, 40), cols(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    Mat<double> s(rows(rng), cols(rng));
    for (Index i = 0; i < s.rows(); ++i)
      for (Index j = 0; j < s.cols(); ++j) s(i, j) = unif(rng);
    auto got = mutual_argmax(s);
    auto want = mutual_argmax_brute(s);
    REQUIRE(got.pairs.size() == want.size());
    std::set<std::pair<Index, Index>> got_set;
    for (const auto& p : got.pairs) got_set.insert({p.i, p.j});
    for (const auto& p : want) CHECK(got_set.count(p) == 1);
  }
}

TEST_CASE("mutual argmax is a one-to-one partial matching, ties logged") {
  Mat<double> s(3, 3);
  s.setConstant(0.5);  // everything ties
  auto r = mutual_argmax(s);
  CHECK(r.argmax_ties > 0);
  std::set<TokenId> is, js;
  for (const auto& p : r.pairs) {
    CHECK(is.insert(p.i).second);
    CHECK(js.insert(p.j).second);
  }
}

TEST_CASE("CSLS ranks the exact match first") {
  Mat<double> candidates = Mat<double>::Zero(6, 4);
  for (Index i = 0; i < 6; ++i) candidates(i, i % 4) = 1.0;
  Mat<double> queries(1, 4);
  queries << 0.0, 0.0, 0.9, 0.1;
  CslsScorer<double> scorer(queries, candidates, 2);
  CHECK(scorer.top1(0) == 2);  // the candidate aligned with dimension 2
}

TEST_CASE("CSLS equals a naive double-loop reference") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0, 1);
  Mat<double> q(10, 8), c(20, 8);
  for (Index i = 0; i < q.rows(); ++i)
    for (Index d = 0; d < q.cols(); ++d) q(i, d) = normal(rng);
  for (Index i = 0; i < c.rows(); ++i)
    for (Index d = 0; d < c.cols(); ++d) c(i, d) = normal(rng);

  const int k = 10;
  CslsScorer<double> scorer(q, c, k);

  auto cosine = [](const Vec<double>& a, const Vec<double>& b) {
    return a.dot(b) / (a.norm() * b.norm());
  };
  // r_T per query: mean cosine to its k nearest candidates.
  for (Index qi = 0; qi < q.rows(); ++qi) {
    std::vector<double> cos_to_c;
    for (Index ci = 0; ci < c.rows(); ++ci)
      cos_to_c.push_back(cosine(q.row(qi).transpose(), c.row(ci).transpose()));
    std::vector<double> sorted = cos_to_c;
    std::sort(sorted.rbegin(), sorted.rend());
    double rt = 0;
    for (int t = 0; t < k; ++t) rt += sorted[static_cast<std::size_t>(t)];
    rt /= k;
    for (Index ci = 0; ci < c.rows(); ++ci) {
      std::vector<double> cos_to_q;
      for (Index qj = 0; qj < q.rows(); ++qj)
        cos_to_q.push_back(cosine(c.row(ci).transpose(), q.row(qj).transpose()));
      std::sort(cos_to_q.rbegin(), cos_to_q.rend());
      double rs = 0;
      int kk = std::min<int>(k, static_cast<int>(cos_to_q.size()));
      for (int t = 0; t < kk; ++t) rs += cos_to_q[static_cast<std::size_t>(t)];
      rs /= kk;
      double want = 2 * cos_to_c[static_cast<std::size_t>(ci)] - rt - rs;
      CHECK(scorer.score(qi, ci) == doctest::Approx(want).epsilon(1e-9));
    }
  }

  // Full ranking agrees with sorting the reference scores.
  for (Index qi = 0; qi < q.rows(); ++qi) {
    auto ranked = scorer.retrieve(qi);
    for (std::size_t r = 1; r < ranked.size(); ++r)
      CHECK(scorer.score(qi, ranked[r - 1]) >= scorer.score(qi, ranked[r]));
  }
}

TEST_CASE("CSLS reduces to cosine ranking when the r terms are constant") {
  // Candidates on a ring: every candidate has the same neighbourhood
  // density, so the r terms are equal and argmax matches plain cosine.
  const int n = 12;
  Mat<double> c(n, 2);
  for (int i = 0; i < n; ++i) {
    double a = 2 * M_PI * i / n;
    c(i, 0) = std::cos(a);
    c(i, 1) = std::sin(a);
  }
  Mat<double> q(1, 2);
  q << std::cos(0.2), std::sin(0.2);
  CslsScorer<double> scorer(q, c, 3);
  Index best_cos;
  (c * q.row(0).transpose()).maxCoeff(&best_cos);
  CHECK(scorer.top1(0) == best_cos);
}

TEST_CASE("CSLS rejects K >= candidate count") {
  Mat<double> q(2, 3), c(4, 3);
  q.setRandom();
  c.setRandom();
  CHECK_THROWS_AS(CslsScorer<double>(q, c, 4), std::invalid_argument);
  CHECK_THROWS_AS(CslsScorer<double>(q, c, 0), std::invalid_argument);
}
