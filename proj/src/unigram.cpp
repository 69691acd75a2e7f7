#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "segmentation_internal.hpp"
#include "subanchor/segmentation.hpp"

namespace subanchor {

namespace {

using detail::word_units;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

struct PieceModel {
  // piece -> log probability; all pieces cover >= 1 unit symbol
  std::unordered_map<std::string, double> logp;
  std::set<std::string> mandatory;  // single-unit symbols, never pruned
  int max_units = 8;

  bool contains(const std::string& piece) const { return logp.count(piece) > 0; }
};

struct TrainWord {
  std::vector<std::string> units;
  std::int64_t count;
};

// Forward-backward over the segmentation lattice of one word.
// Returns log Z; accumulates expected piece counts scaled by `count`.
double forward_backward(const TrainWord& w, const PieceModel& model,
                        std::unordered_map<std::string, double>* expected) {
  const std::size_t n = w.units.size();
  std::vector<double> alpha(n + 1, kNegInf), beta(n + 1, kNegInf);
  alpha[0] = 0.0;
  auto piece_at = [&](std::size_t i, std::size_t j) {
    std::string piece;
    for (std::size_t k = i; k < j; ++k) piece += w.units[k];
    return piece;
  };
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t lo = j > static_cast<std::size_t>(model.max_units)
                         ? j - static_cast<std::size_t>(model.max_units)
                         : 0;
    for (std::size_t i = lo; i < j; ++i) {
      if (alpha[i] == kNegInf) continue;
      auto it = model.logp.find(piece_at(i, j));
      if (it == model.logp.end()) continue;
      alpha[j] = logaddexp(alpha[j], alpha[i] + it->second);
    }
  }
  const double log_z = alpha[n];
  if (expected == nullptr || log_z == kNegInf) return log_z;

  beta[n] = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    std::size_t hi = std::min(n, i + static_cast<std::size_t>(model.max_units));
    for (std::size_t j = i + 1; j <= hi; ++j) {
      if (beta[j] == kNegInf) continue;
      auto it = model.logp.find(piece_at(i, j));
      if (it == model.logp.end()) continue;
      beta[i] = logaddexp(beta[i], it->second + beta[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == kNegInf) continue;
    std::size_t hi = std::min(n, i + static_cast<std::size_t>(model.max_units));
    for (std::size_t j = i + 1; j <= hi; ++j) {
      if (beta[j] == kNegInf) continue;
      std::string piece = piece_at(i, j);
      auto it = model.logp.find(piece);
      if (it == model.logp.end()) continue;
      double post = std::exp(alpha[i] + it->second + beta[j] - log_z);
      if (post > 0) (*expected)[piece] += post * static_cast<double>(w.count);
    }
  }
  return log_z;
}

// Best alternative segmentation of `piece` when the piece itself is removed.
double viterbi_without(const std::string& piece, const PieceModel& model) {
  std::vector<std::string> units = word_units(std::string(detail::strip_marker(piece)));
  // word_units() re-attaches a marker; keep it only if the piece had one.
  if (detail::strip_marker(piece).size() == piece.size())
    units.front() = units.front().substr(kBoundaryMarker.size());
  const std::size_t n = units.size();
  std::vector<double> best(n + 1, kNegInf);
  best[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t lo = j > static_cast<std::size_t>(model.max_units)
                         ? j - static_cast<std::size_t>(model.max_units)
                         : 0;
    for (std::size_t i = lo; i < j; ++i) {
      if (best[i] == kNegInf) continue;
      std::string sub;
      for (std::size_t k = i; k < j; ++k) sub += units[k];
      if (sub == piece) continue;
      auto it = model.logp.find(sub);
      if (it == model.logp.end()) continue;
      best[j] = std::max(best[j], best[i] + it->second);
    }
  }
  return best[n];
}

}  // namespace

Vocabulary learn_unigram(const WordCounts& counts, std::size_t m, const UnigramOptions& opt,
                         UnigramTrace* trace) {
  if (counts.empty()) throw std::invalid_argument("learn_unigram: empty word counts");

  std::vector<TrainWord> words;
  words.reserve(counts.size());
  std::set<std::string> mandatory;
  for (const auto& [word, count] : counts) {
    TrainWord w{word_units(word), count};
    for (const std::string& u : w.units) mandatory.insert(u);
    words.push_back(std::move(w));
  }
  const std::size_t min_feasible = opt.base.specials.size() + mandatory.size();
  if (m < min_feasible)
    throw std::invalid_argument("learn_unigram: size " + std::to_string(m) +
                                " below minimum feasible size " + std::to_string(min_feasible));

  // Seed vocabulary: frequent substrings up to max_piece_len units.
  std::map<std::string, double> seed_freq;
  for (const TrainWord& w : words) {
    for (std::size_t i = 0; i < w.units.size(); ++i) {
      std::string piece;
      for (std::size_t j = i;
           j < std::min(w.units.size(), i + static_cast<std::size_t>(opt.max_piece_len)); ++j) {
        piece += w.units[j];
        if (j == i) {
          seed_freq[piece] += static_cast<double>(w.count);
        } else if (w.count >= opt.base.min_word_freq) {
          seed_freq[piece] += static_cast<double>(w.count);
        }
      }
    }
  }
  const std::size_t seed_cap = std::max(
      min_feasible, static_cast<std::size_t>(opt.seed_multiplier * static_cast<double>(m)));
  std::vector<std::pair<std::string, double>> candidates;
  for (const auto& [piece, freq] : seed_freq)
    if (!mandatory.count(piece) && freq >= 2.0) candidates.emplace_back(piece, freq);
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (min_feasible + candidates.size() > seed_cap)
    candidates.resize(seed_cap - min_feasible);

  PieceModel model;
  model.max_units = opt.max_piece_len;
  double total = 0;
  for (const std::string& u : mandatory) total += seed_freq[u];
  for (const auto& [piece, freq] : candidates) total += freq;
  for (const std::string& u : mandatory) model.logp[u] = std::log(seed_freq[u] / total);
  for (const auto& [piece, freq] : candidates) model.logp[piece] = std::log(freq / total);
  model.mandatory = mandatory;

  std::unordered_map<std::string, double> expected;
  int rounds_used = 0;
  auto em_block = [&](int rounds) {
    std::vector<double> lls;
    for (int r = 0; r < rounds && rounds_used < opt.max_em_rounds; ++r, ++rounds_used) {
      expected.clear();
      double ll = 0;
      for (const TrainWord& w : words) {
        double log_z = forward_backward(w, model, &expected);
        ll += static_cast<double>(w.count) * log_z;
      }
      lls.push_back(ll);
      double exp_total = 0;
      for (const auto& [piece, c] : expected) exp_total += c;
      for (auto& [piece, lp] : model.logp) {
        auto it = expected.find(piece);
        double c = it == expected.end() ? 0.0 : it->second;
        lp = c > 0 ? std::log(c / exp_total) : kNegInf;
      }
      // A piece with zero posterior mass can never recover; drop it unless
      // mandatory (mandatory symbols always carry mass).
      for (auto it = model.logp.begin(); it != model.logp.end();) {
        if (it->second == kNegInf && !model.mandatory.count(it->first))
          it = model.logp.erase(it);
        else
          ++it;
      }
      if (lls.size() >= 2 &&
          std::abs(lls.back() - lls[lls.size() - 2]) <=
              1e-9 * std::abs(lls[lls.size() - 2]))
        break;
    }
    if (trace) trace->em_loglik_blocks.push_back(lls);
  };

  em_block(opt.em_rounds_per_prune);
  std::size_t target_pieces = m - opt.base.specials.size();
  while (model.logp.size() > target_pieces) {
    std::vector<std::pair<double, std::string>> losses;
    for (const auto& [piece, lp] : model.logp) {
      if (model.mandatory.count(piece)) continue;
      auto it = expected.find(piece);
      double freq = it == expected.end() ? 0.0 : it->second;
      double alt = viterbi_without(piece, model);
      double loss = alt == kNegInf ? std::numeric_limits<double>::max()
                                   : freq * (lp - alt);
      losses.emplace_back(loss, piece);
    }
    if (losses.empty()) break;
    std::sort(losses.begin(), losses.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    std::size_t excess = model.logp.size() - target_pieces;
    std::size_t k = std::min(
        excess, std::max<std::size_t>(
                    1, static_cast<std::size_t>(opt.prune_fraction *
                                                static_cast<double>(losses.size()))));
    for (std::size_t i = 0; i < k && i < losses.size(); ++i) model.logp.erase(losses[i].second);
    // Renormalize survivors.
    double z = kNegInf;
    for (const auto& [piece, lp] : model.logp) z = logaddexp(z, lp);
    for (auto& [piece, lp] : model.logp) lp -= z;
    em_block(opt.em_rounds_per_prune);
  }

  Vocabulary vocab;
  vocab.scheme = Scheme::kUnigram;
  vocab.specials = opt.base.specials;
  for (const std::string& s : opt.base.specials) vocab.entries.push_back({s, 0, -1e4});
  std::vector<std::pair<std::string, double>> pieces(model.logp.begin(), model.logp.end());
  std::sort(pieces.begin(), pieces.end(), [&](const auto& a, const auto& b) {
    double fa = expected.count(a.first) ? expected.at(a.first) : 0.0;
    double fb = expected.count(b.first) ? expected.at(b.first) : 0.0;
    if (fa != fb) return fa > fb;
    return a.first < b.first;
  });
  for (const auto& [piece, lp] : pieces) vocab.entries.push_back({piece, 0, lp});
  vocab.rebuild_index();

  // Final frequencies from Viterbi-encoding the count table.
  Segmenter segmenter(vocab);
  for (const auto& [word, count] : counts) {
    Segmentation seg = segmenter.encode(word);
    for (TokenId id : seg.token_ids) vocab.entries[static_cast<std::size_t>(id)].freq += count;
  }
  return vocab;
}

}  // namespace subanchor
