#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subanchor/corpus.hpp"
#include "subanchor/types.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

// One sentence pair, subword-encoded: (source ids, target ids).
using EncodedBitext = std::vector<std::pair<std::vector<TokenId>, std::vector<TokenId>>>;

struct IbmOptions {
  int iterations = 5;
  double null_prob = 0.08;     // p0
  double tension = 4.0;        // initial lambda
  bool optimize_tension = true;
};

enum class AlignDirection { kFwd, kRev };

class AlignmentModel {
 public:
  static constexpr TokenId kNull = -1;

  AlignmentModel(TokenId src_vocab_size, TokenId tgt_vocab_size, IbmOptions opt,
                 AlignDirection direction);

  // t(f | e); e == kNull addresses the null source token.
  double prob(TokenId e, TokenId f) const;
  // Sum over observed f of t(f | e).
  double row_sum(TokenId e) const;
  // Posterior over source positions for target token f at 1-based slot j of
  // a sentence pair with lengths (|src|, tgt_len). Index 0 is the null token,
  // index i the i-th source word.
  std::vector<double> posterior(const std::vector<TokenId>& src, TokenId f, std::size_t j,
                                std::size_t tgt_len) const;

  double tension() const { return tension_; }
  double null_prob() const { return opt_.null_prob; }
  AlignDirection direction() const { return direction_; }
  TokenId src_vocab_size() const { return src_vocab_size_; }
  TokenId tgt_vocab_size() const { return tgt_vocab_size_; }
  const std::vector<double>& loglik_per_iter() const { return loglik_; }
  const std::vector<std::unordered_map<TokenId, double>>& table() const { return table_; }

 private:
  friend AlignmentModel train_ibm2_fast(const EncodedBitext&, TokenId, TokenId,
                                        const IbmOptions&, AlignDirection);
  TokenId src_vocab_size_;
  TokenId tgt_vocab_size_;
  IbmOptions opt_;
  AlignDirection direction_;
  double tension_;
  bool initialized_ = false;  // before the first M-step t is uniform
  // [src id, with null at index src_vocab_size] -> {tgt id -> prob}
  std::vector<std::unordered_map<TokenId, double>> table_;
  std::vector<double> loglik_;
};

// EM over the diagonal-reparameterized alignment prior
//   p(a_j = i | j, m, n) ∝ exp(lambda * -|i/n - j/m|),  p(a_j = null) = p0,
// with lambda refit by golden-section search on the expected log-likelihood
// each iteration. Throws on an empty bitext.
AlignmentModel train_ibm2_fast(const EncodedBitext& bitext, TokenId src_vocab_size,
                               TokenId tgt_vocab_size, const IbmOptions& opt = {},
                               AlignDirection direction = AlignDirection::kFwd);

// Reads two line-aligned files and encodes them. Throws on a line-count
// mismatch, naming the first offending line.
EncodedBitext encode_bitext(const SentenceStream& src, const SentenceStream& tgt,
                            const Vocabulary& src_vocab, const Vocabulary& tgt_vocab);

// Viterbi alignments, one (src_pos, tgt_pos) list per sentence pair,
// 0-based, null alignments omitted (Pharaoh "i-j" convention).
std::vector<std::vector<std::pair<int, int>>> viterbi_align(const AlignmentModel& model,
                                                            const EncodedBitext& bitext);

std::string pharaoh_format(const std::vector<std::pair<int, int>>& alignment);

// S[i][j] = (t_fwd(j|i) + t_rev(i|j)) / 2 over co-occurring pairs, 0 elsewhere.
Mat<double> similarity_from_bitext(const AlignmentModel& fwd, const AlignmentModel& rev);

}  // namespace subanchor
