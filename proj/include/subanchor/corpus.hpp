#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace subanchor {

struct NormalizationConfig {
  bool lowercase = true;
  bool unicode_nfc = true;
  bool punctuation_split = true;

  bool operator==(const NormalizationConfig&) const = default;
};

// NFC-compose, lowercase, split punctuation off adjacent word characters,
// collapse whitespace runs and trim. Returns nullopt when the result is empty
// (the caller drops the sentence). Throws Utf8Error on malformed input.
std::optional<std::string> normalize_sentence(std::string_view raw, const NormalizationConfig& cfg);

struct CorpusStats {
  std::int64_t sentences_read = 0;
  std::int64_t sentences_kept = 0;
  std::int64_t dropped_empty = 0;
};

// Deterministic single-consumer stream of normalized sentences, backed by a
// file (one sentence per line) or an in-memory list. Re-iterable.
class SentenceStream {
 public:
  SentenceStream(std::string path, std::string language_tag, NormalizationConfig cfg = {});
  SentenceStream(std::vector<std::string> lines, std::string language_tag,
                 NormalizationConfig cfg = {});

  // Calls fn for each non-empty normalized sentence, in source order.
  void for_each(const std::function<void(const std::string&)>& fn) const;

  std::vector<std::string> collect() const;

  const CorpusStats& stats() const { return stats_; }
  const std::string& language_tag() const { return language_; }
  const NormalizationConfig& normalization() const { return cfg_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;                 // empty when in-memory
  std::vector<std::string> lines_;   // used when path_ is empty
  std::string language_;
  NormalizationConfig cfg_;
  mutable CorpusStats stats_;
};

using WordCounts = std::map<std::string, std::int64_t>;

// Exact whitespace-token frequencies over the normalized stream.
// Throws std::runtime_error when the stream yields no sentences.
WordCounts word_counts(const SentenceStream& stream);

// Shards merge associatively.
void merge_counts(WordCounts& into, const WordCounts& from);

std::vector<std::string> split_words(std::string_view sentence);

}  // namespace subanchor
