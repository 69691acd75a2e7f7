#include "subanchor/bitext_align.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "subanchor/segmentation.hpp"

namespace subanchor {

namespace {

double diag_feature(std::size_t i, std::size_t j, std::size_t n, std::size_t m) {
  // i: 1-based source position, j: 1-based target position.
  return -std::abs(static_cast<double>(i) / static_cast<double>(n) -
                   static_cast<double>(j) / static_cast<double>(m));
}

// Normalizer of the real-position prior for one target slot.
double log_partition(std::size_t j, std::size_t n, std::size_t m, double lambda) {
  double z = 0;
  for (std::size_t i = 1; i <= n; ++i) z += std::exp(lambda * diag_feature(i, j, n, m));
  return std::log(z);
}

// Maximize g(lambda) = lambda * feat_mass - sum_slots mass * logZ(lambda).
double golden_section_lambda(const std::function<double(double)>& g, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 48; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return (a + b) / 2;
}

}  // namespace

AlignmentModel::AlignmentModel(TokenId src_vocab_size, TokenId tgt_vocab_size, IbmOptions opt,
                               AlignDirection direction)
    : src_vocab_size_(src_vocab_size),
      tgt_vocab_size_(tgt_vocab_size),
      opt_(opt),
      direction_(direction),
      tension_(opt.tension),
      table_(static_cast<std::size_t>(src_vocab_size) + 1) {
  if (opt.null_prob < 0 || opt.null_prob >= 1)
    throw std::invalid_argument("alignment: null probability must be in [0, 1)");
  if (opt.tension <= 0) throw std::invalid_argument("alignment: tension must be positive");
}

double AlignmentModel::prob(TokenId e, TokenId f) const {
  if (!initialized_) return 1.0 / static_cast<double>(tgt_vocab_size_);
  const auto row = e == kNull ? static_cast<std::size_t>(src_vocab_size_)
                              : static_cast<std::size_t>(e);
  const auto& t = table_[row];
  auto it = t.find(f);
  return it == t.end() ? 0.0 : it->second;
}

double AlignmentModel::row_sum(TokenId e) const {
  const auto row = e == kNull ? static_cast<std::size_t>(src_vocab_size_)
                              : static_cast<std::size_t>(e);
  double s = 0;
  for (const auto& [f, p] : table_[row]) s += p;
  return s;
}

std::vector<double> AlignmentModel::posterior(const std::vector<TokenId>& src, TokenId f,
                                              std::size_t j, std::size_t tgt_len) const {
  const std::size_t n = src.size();
  std::vector<double> post(n + 1, 0.0);
  const double log_z_prior = log_partition(j, n, tgt_len, tension_);
  post[0] = opt_.null_prob * prob(kNull, f);
  double total = post[0];
  for (std::size_t i = 1; i <= n; ++i) {
    double prior =
        (1.0 - opt_.null_prob) * std::exp(tension_ * diag_feature(i, j, n, tgt_len) - log_z_prior);
    post[i] = prior * prob(src[i - 1], f);
    total += post[i];
  }
  if (total > 0)
    for (double& p : post) p /= total;
  return post;
}

AlignmentModel train_ibm2_fast(const EncodedBitext& bitext, TokenId src_vocab_size,
                               TokenId tgt_vocab_size, const IbmOptions& opt,
                               AlignDirection direction) {
  if (bitext.empty()) throw std::invalid_argument("train_ibm2_fast: empty bitext");
  AlignmentModel model(src_vocab_size, tgt_vocab_size, opt, direction);

  for (int iter = 0; iter < opt.iterations; ++iter) {
    std::vector<std::unordered_map<TokenId, double>> counts(
        static_cast<std::size_t>(src_vocab_size) + 1);
    double loglik = 0;
    double feat_mass = 0;  // sum over posteriors of gamma * h(i,j,n,m)
    // Expected real (non-null) mass per (n, m, j) slot, for the lambda refit.
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> slot_mass;

    for (const auto& [src, tgt] : bitext) {
      const std::size_t n = src.size(), m = tgt.size();
      if (n == 0 || m == 0) continue;
      for (std::size_t j = 1; j <= m; ++j) {
        const TokenId f = tgt[j - 1];
        const double log_z_prior = log_partition(j, n, m, model.tension_);
        std::vector<double> post(n + 1, 0.0);
        double total = model.opt_.null_prob * model.prob(AlignmentModel::kNull, f);
        post[0] = total;
        for (std::size_t i = 1; i <= n; ++i) {
          double prior = (1.0 - model.opt_.null_prob) *
                         std::exp(model.tension_ * diag_feature(i, j, n, m) - log_z_prior);
          post[i] = prior * model.prob(src[i - 1], f);
          total += post[i];
        }
        if (total <= 0) continue;
        loglik += std::log(total);
        const double null_gamma = post[0] / total;
        counts[static_cast<std::size_t>(src_vocab_size)][f] += null_gamma;
        double real_mass = 0;
        for (std::size_t i = 1; i <= n; ++i) {
          double gamma = post[i] / total;
          if (gamma <= 0) continue;
          counts[static_cast<std::size_t>(src[i - 1])][f] += gamma;
          feat_mass += gamma * diag_feature(i, j, n, m);
          real_mass += gamma;
        }
        if (real_mass > 0) slot_mass[{n, m, j}] += real_mass;
      }
    }
    model.loglik_.push_back(loglik);

    // M-step: normalize translation rows.
    for (auto& row : counts) {
      double sum = 0;
      for (const auto& [f, c] : row) sum += c;
      if (sum > 0)
        for (auto& [f, c] : row) c /= sum;
    }
    model.table_ = std::move(counts);
    model.initialized_ = true;

    if (opt.optimize_tension) {
      auto expected_prior_ll = [&](double lambda) {
        double g = lambda * feat_mass;
        for (const auto& [slot, mass] : slot_mass) {
          const auto& [n, m, j] = slot;
          g -= mass * log_partition(j, n, m, lambda);
        }
        return g;
      };
      double candidate = golden_section_lambda(expected_prior_ll, 0.05, 16.0);
      // Generalized EM: only accept a tension that improves the expected
      // complete-data log-likelihood.
      if (expected_prior_ll(candidate) >= expected_prior_ll(model.tension_))
        model.tension_ = candidate;
    }
  }
  return model;
}

EncodedBitext encode_bitext(const SentenceStream& src, const SentenceStream& tgt,
                            const Vocabulary& src_vocab, const Vocabulary& tgt_vocab) {
  std::vector<std::string> src_lines = src.collect();
  std::vector<std::string> tgt_lines = tgt.collect();
  if (src_lines.size() != tgt_lines.size()) {
    std::size_t offending = std::min(src_lines.size(), tgt_lines.size()) + 1;
    throw std::runtime_error("bitext line-count mismatch: " + std::to_string(src_lines.size()) +
                             " vs " + std::to_string(tgt_lines.size()) +
                             " sentences, first missing line " + std::to_string(offending));
  }
  if (src_lines.empty()) throw std::runtime_error("empty bitext");
  Segmenter src_seg(src_vocab), tgt_seg(tgt_vocab);
  EncodedBitext out;
  out.reserve(src_lines.size());
  for (std::size_t k = 0; k < src_lines.size(); ++k)
    out.emplace_back(src_seg.encode(src_lines[k]).token_ids,
                     tgt_seg.encode(tgt_lines[k]).token_ids);
  return out;
}

std::vector<std::vector<std::pair<int, int>>> viterbi_align(const AlignmentModel& model,
                                                            const EncodedBitext& bitext) {
  std::vector<std::vector<std::pair<int, int>>> out;
  out.reserve(bitext.size());
  for (const auto& [src, tgt] : bitext) {
    std::vector<std::pair<int, int>> links;
    const std::size_t n = src.size(), m = tgt.size();
    for (std::size_t j = 1; j <= m && n > 0; ++j) {
      const TokenId f = tgt[j - 1];
      const double log_z_prior = log_partition(j, n, m, model.tension());
      double best = model.null_prob() * model.prob(AlignmentModel::kNull, f);
      int best_i = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        double p = (1.0 - model.null_prob()) *
                   std::exp(model.tension() * diag_feature(i, j, n, m) - log_z_prior) *
                   model.prob(src[i - 1], f);
        if (p > best) {
          best = p;
          best_i = static_cast<int>(i);
        }
      }
      if (best_i > 0) links.emplace_back(best_i - 1, static_cast<int>(j) - 1);
    }
    out.push_back(std::move(links));
  }
  return out;
}

std::string pharaoh_format(const std::vector<std::pair<int, int>>& alignment) {
  std::ostringstream os;
  for (std::size_t k = 0; k < alignment.size(); ++k) {
    if (k > 0) os << ' ';
    os << alignment[k].first << '-' << alignment[k].second;
  }
  return os.str();
}

Mat<double> similarity_from_bitext(const AlignmentModel& fwd, const AlignmentModel& rev) {
  if (fwd.src_vocab_size() != rev.tgt_vocab_size() ||
      fwd.tgt_vocab_size() != rev.src_vocab_size())
    throw std::invalid_argument(
        "similarity_from_bitext: models were not trained on mirrored vocabularies");
  Mat<double> s = Mat<double>::Zero(fwd.src_vocab_size(), fwd.tgt_vocab_size());
  for (TokenId e = 0; e < fwd.src_vocab_size(); ++e)
    for (const auto& [f, p] : fwd.table()[static_cast<std::size_t>(e)]) s(e, f) += p / 2;
  for (TokenId e = 0; e < rev.src_vocab_size(); ++e)
    for (const auto& [f, p] : rev.table()[static_cast<std::size_t>(e)]) s(f, e) += p / 2;
  return s;
}

}  // namespace subanchor
