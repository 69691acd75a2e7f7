#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "subanchor/matching.hpp"
#include "subanchor/types.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

struct SimilarityMatrix {
  enum class Kind { kCosine, kBitext };
  Mat<double> s;  // |V1| x |V2|
  Kind kind = Kind::kCosine;
  std::string row_language;
  std::string col_language;
};

// S(i, j) = cos(x_i, z_j); zero vectors yield similarity 0.
SimilarityMatrix cosine_similarity_matrix(const Mat<double>& x_mapped,
                                          const Mat<double>& z_mapped);

struct SelectionPolicy {
  enum class Kind { kAll, kTopK, kMinScore };
  Kind kind = Kind::kAll;
  std::size_t top_k = 0;
  double min_score = 0;

  static SelectionPolicy all() { return {}; }
  static SelectionPolicy best(std::size_t k) { return {Kind::kTopK, k, 0}; }
  static SelectionPolicy threshold(double tau) { return {Kind::kMinScore, 0, tau}; }
};

struct AnchorDictionary {
  std::vector<ScoredPair> pairs;  // descending score; one-to-one partial matching
  double threshold_used = 0;      // min_score policies; otherwise the lowest kept score

  std::size_t size() const { return pairs.size(); }
};

// Applies a selection policy to mutual-argmax pairs. Throws when top_k
// requests more pairs than exist, reporting the achievable maximum.
AnchorDictionary select_anchors(const std::vector<ScoredPair>& pairs,
                                const SelectionPolicy& policy);

struct SharedPairClassification {
  // Identical surfaces present in both vocabularies but not anchored at all.
  std::set<std::string> false_positives;
  // Anchors whose two surfaces differ.
  std::vector<ScoredPair> false_negatives;
  // Anchors whose two surfaces are identical.
  std::vector<ScoredPair> true_shared;
  // Identical surfaces reclassified as false negatives because one side is
  // anchored to a different surface.
  std::set<std::string> identical_reclassified_fn;
};

// Classifies every surface form present in both vocabularies. A surface
// anchored to itself is shared; an identical surface anchored elsewhere
// counts as a false negative, never as a false positive; an unanchored
// identical surface is a false positive. Special tokens are ignored.
SharedPairClassification classify_shared_pairs(const AnchorDictionary& anchors,
                                               const Vocabulary& v1, const Vocabulary& v2);

struct IdPair {
  TokenId i = -1;
  TokenId j = -1;
  auto operator<=>(const IdPair&) const = default;
};

struct AblationSets {
  std::vector<IdPair> joint;      // all identical-surface pairs
  std::vector<IdPair> minus_fp;   // joint minus false positives
  std::vector<IdPair> minus_fn;   // joint plus FN anchors, conflicts removed
  std::vector<IdPair> anchored;   // the anchor dictionary itself (-fp -fn)
};

AblationSets ablation_anchor_sets(const SharedPairClassification& classification,
                                  const AnchorDictionary& anchors, const Vocabulary& v1,
                                  const Vocabulary& v2);

// TSV with columns src_subword, tgt_subword, score, rank.
void save_anchors(const std::string& path, const AnchorDictionary& anchors,
                  const Vocabulary& v1, const Vocabulary& v2);
AnchorDictionary load_anchors(const std::string& path, const Vocabulary& v1,
                              const Vocabulary& v2);

void save_classification(const std::string& path, const SharedPairClassification& classification,
                         const Vocabulary& v1, const Vocabulary& v2);

}  // namespace subanchor
