#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "subanchor/corpus.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

struct SegmenterOptions {
  std::vector<std::string> specials = kDefaultSpecials;
  // Words below this count contribute base characters but not merge/seed
  // statistics.
  std::int64_t min_word_freq = 2;
};

struct UnigramOptions {
  SegmenterOptions base;
  double seed_multiplier = 4.0;  // seed vocabulary capped at seed_multiplier * m
  int max_piece_len = 8;         // code points, marker included
  double prune_fraction = 0.2;   // fraction of prunable entries removed per round
  int em_rounds_per_prune = 2;
  int max_em_rounds = 40;
};

struct UnigramTrace {
  // Corpus log-likelihood after each EM round, grouped in blocks between
  // prune steps. Within a block the vocabulary is fixed, so the values must
  // be non-decreasing.
  std::vector<std::vector<double>> em_loglik_blocks;
};

// Learns a BPE vocabulary of total size m (specials + base characters +
// merges). Throws std::invalid_argument when m is below the minimum feasible
// size. If the corpus runs out of mergeable pairs first, the achievable
// maximum is returned (entries.size() < m).
Vocabulary learn_bpe(const WordCounts& counts, std::size_t m, const SegmenterOptions& opt = {});

// Unigram LM vocabulary of total size m: EM over a substring seed vocabulary,
// then iterative pruning by loss increase until the size target is met.
Vocabulary learn_unigram(const WordCounts& counts, std::size_t m, const UnigramOptions& opt = {},
                         UnigramTrace* trace = nullptr);

struct Segmentation {
  std::vector<TokenId> token_ids;
  std::vector<TokenSpan> offsets;  // code-point spans in the input sentence

  std::size_t size() const { return token_ids.size(); }
};

// Stateless after construction; caches per-word segmentations, so reuse one
// instance when encoding a corpus.
class Segmenter {
 public:
  explicit Segmenter(const Vocabulary& vocab);
  Segmentation encode(std::string_view sentence) const;
  const Vocabulary& vocab() const { return vocab_; }

 private:
  struct Impl;
  const Vocabulary& vocab_;
  std::shared_ptr<Impl> impl_;
};

// One-shot convenience. Unknown characters map to UNK; never fails.
Segmentation encode(const Vocabulary& vocab, std::string_view sentence);

// Inverts the boundary-marker convention. Exact for segmentations free of
// special tokens.
std::string decode(const Vocabulary& vocab, const std::vector<TokenId>& token_ids);

std::vector<std::vector<TokenId>> encode_corpus(const Vocabulary& vocab,
                                                const SentenceStream& stream);

}  // namespace subanchor
