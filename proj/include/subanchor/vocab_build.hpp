#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subanchor/anchoring.hpp"
#include "subanchor/embeddings.hpp"
#include "subanchor/types.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

struct MergeSpec {
  std::size_t m = 0;      // per-language monolingual size
  std::size_t n = 0;      // target joint size
  std::size_t alpha = 0;  // anchors merged, = 2m - n
};

struct MergedEntry {
  enum class Origin { kShared, kL1Only, kL2Only };
  Origin origin = Origin::kL1Only;
  std::string l1_surface;  // empty for L2-only entries
  std::string l2_surface;  // empty for L1-only entries
  TokenId l1_id = -1;
  TokenId l2_id = -1;
  double score = 0;  // shared entries only
};

struct MergedVocabulary {
  MergeSpec spec;
  std::vector<MergedEntry> entries;  // |entries| == n
  std::vector<TokenId> l1_to_joint;  // size m
  std::vector<TokenId> l2_to_joint;  // size m

  std::size_t size() const { return entries.size(); }
};

// Merges two size-m vocabularies into a joint vocabulary of exactly size n by
// sharing the top alpha = 2m - n anchors. Ordering: shared entries by
// descending score, then L1-only by id, then L2-only by id.
// Throws when alpha <= 0 (n >= 2m leaves nothing to merge) or when fewer
// anchors are available than alpha requires, reporting the smallest
// achievable n.
MergedVocabulary merge_for_mt(const Vocabulary& v1, const Vocabulary& v2,
                              const AnchorDictionary& anchors, std::size_t n);

void save_merged(const std::string& path, const MergedVocabulary& merged);
MergedVocabulary load_merged(const std::string& path);

enum class LayoutMode { kShareOnly, kShareAlign };

struct LayoutRow {
  enum class Kind { kTied, kInitialized, kRandom };
  Kind kind = Kind::kRandom;
  TokenId tied_l1 = -1;
  Vec<float> init;            // kInitialized
  std::uint64_t random_seed = 0;  // kRandom
  int sparse_support = 0;     // kInitialized: sparsemax support size
};

struct EmbeddingLayout {
  std::vector<LayoutRow> rows;  // one disposition per L2 id
  double sharing_percent = 0;   // 100 * |tied| / |V2|
  int sharing_percent_rounded = 0;
  std::size_t tied = 0, initialized = 0, random = 0;
};

// Builds the transfer layout for the L2 embedding layer: anchored subwords
// tie to their L1 rows, special tokens tie by name, and the rest are either
// random (share-only) or sparsemax-weighted sums of L1 rows (share+align).
// share+align requires the similarity matrix.
EmbeddingLayout build_lm_layout(const Vocabulary& v1, const Vocabulary& v2,
                                const AnchorDictionary& anchors, const EmbeddingMatrix& e1,
                                const SimilarityMatrix* similarity, LayoutMode mode,
                                std::uint64_t seed = 1);

void save_layout(const std::string& path, const EmbeddingLayout& layout, const Vocabulary& v2,
                 LayoutMode mode);

// Materializes the layout as a full L2 matrix (ties resolved against e1,
// random rows drawn as normal(0, 0.02) from the recorded per-row seeds).
Mat<float> materialize_layout(const EmbeddingLayout& layout, const EmbeddingMatrix& e1);

}  // namespace subanchor
