#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subanchor/corpus.hpp"
#include "subanchor/types.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

struct EmbeddingMatrix {
  Mat<float> rows;                // |V| x d
  std::vector<std::string> names;  // row-aligned subword surfaces
  std::string vocab_fingerprint;
  std::string trained_on;

  Index size() const { return rows.rows(); }
  Index dim() const { return rows.cols(); }
};

struct SgnsOptions {
  int dim = 1024;
  int window = 5;
  int negatives = 10;
  int epochs = 5;
  float lr_start = 0.025f;
  float lr_min = 1e-4f;
  double unigram_power = 0.75;
  int threads = 1;  // 1 => bitwise deterministic under a fixed seed
  std::uint64_t seed = 1;
};

struct SgnsTrace {
  std::vector<double> epoch_loss;  // mean negative-sampling objective per epoch
};

// Skip-gram with negative sampling over a subword-id corpus. Returns the
// input vectors. Throws std::invalid_argument for d < 8 or ids outside the
// vocabulary.
EmbeddingMatrix train_sgns(const std::vector<std::vector<TokenId>>& corpus,
                           const Vocabulary& vocab, const SgnsOptions& opt,
                           SgnsTrace* trace = nullptr);

EmbeddingMatrix train_sgns(const SentenceStream& corpus, const Vocabulary& vocab,
                           const SgnsOptions& opt, SgnsTrace* trace = nullptr);

// word2vec text format: header "count dim", then one row per line.
void save_word2vec(const std::string& path, const EmbeddingMatrix& emb);
EmbeddingMatrix load_word2vec(const std::string& path);

// Row-aligns an embedding file against a vocabulary; throws if any subword is
// missing from the file.
EmbeddingMatrix align_to_vocab(const EmbeddingMatrix& emb, const Vocabulary& vocab);

}  // namespace subanchor
