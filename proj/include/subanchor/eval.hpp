#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subanchor/anchoring.hpp"
#include "subanchor/corpus.hpp"
#include "subanchor/segmentation.hpp"
#include "subanchor/types.hpp"
#include "subanchor/vocab_build.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

// Mean of the subword embedding rows of a word encoded in isolation, special
// tokens excluded. nullopt when the word maps entirely to UNK (the caller
// logs and excludes it).
std::optional<Vec<double>> word_vector(std::string_view word, const Mat<double>& embeddings,
                                       const Segmenter& segmenter,
                                       const NormalizationConfig& norm = {});

struct BliTestSet {
  struct Item {
    std::string source;
    std::vector<std::string> golds;  // non-empty
  };
  std::vector<Item> items;
  bool filtered_identical = false;

  // Drops items whose source equals one of its gold targets.
  BliTestSet filter_identical() const;

  // TSV "source<TAB>target", multiple lines per source allowed.
  static BliTestSet load(const std::string& path);
};

struct BliResult {
  double precision_at_1 = 0;
  std::size_t evaluated = 0;
  std::size_t hits = 0;
  std::size_t excluded_unk = 0;  // sources or whole gold sets that were unencodable
  struct PairLog {
    std::string source;
    std::string predicted;
    bool hit = false;
    bool excluded = false;
  };
  std::vector<PairLog> log;
};

// CSLS(K) retrieval of gold targets: candidates are the distinct gold words
// of the test set, each encoded in the target space. Throws when no pair is
// evaluable.
BliResult bli_precision_at_1(const BliTestSet& test, const Mat<double>& src_space,
                             const Vocabulary& src_vocab, const Mat<double>& tgt_space,
                             const Vocabulary& tgt_vocab, int csls_k = 10,
                             const NormalizationConfig& norm = {});

struct BucketedCorpus {
  std::vector<double> edges;  // ascending upper bounds; final bucket reaches 1.0
  struct Bucket {
    double lo = 0, hi = 0;
    std::size_t count = 0;
    std::vector<std::size_t> sentence_ids;
    double bleu = -1;  // -1 when not scored
  };
  std::vector<Bucket> buckets;
  std::vector<double> fractions;  // per sentence
};

// Buckets source sentences by the fraction of their subword tokens that are
// false positives or members of false-negative anchors. Special tokens are
// excluded from the denominator; a sentence with no tokens lands in the
// lowest bucket.
BucketedCorpus bucket_by_fpfn(const SentenceStream& corpus, const MergedVocabulary& merged,
                              const Vocabulary& v1, const SharedPairClassification& classification,
                              std::vector<double> edges = {0.1, 0.2, 0.3, 0.4, 0.5});

// Attaches a corpus BLEU score to every non-empty bucket, scoring the
// hypothesis/reference lines of its member sentences.
void score_buckets(BucketedCorpus& buckets, const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references);

void save_bucket_report(const std::string& path, const BucketedCorpus& buckets);

// Corpus BLEU with 13a-style tokenization: modified n-gram precisions
// (n = 1..4), geometric mean, exponential brevity penalty. Returns a
// percentage in [0, 100]. Unsmoothed: a zero n-gram precision yields 0.
double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references);

std::vector<std::string> tokenize_13a(std::string_view segment);

}  // namespace subanchor
