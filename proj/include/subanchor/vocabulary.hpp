#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subanchor/types.hpp"

namespace subanchor {

// Word-boundary marker prepended to word-initial subwords (both schemes).
inline constexpr std::string_view kBoundaryMarker = "\xE2\x96\x81";  // U+2581 ▁

inline constexpr const char* kUnkToken = "[UNK]";
inline const std::vector<std::string> kDefaultSpecials = {"[UNK]", "[PAD]", "[BOS]", "[EOS]"};

enum class Scheme { kBpe, kUnigram };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(std::string_view name);

struct VocabEntry {
  std::string subword;
  std::int64_t freq = 0;
  double logprob = 0.0;  // unigram only
};

class Vocabulary {
 public:
  Scheme scheme = Scheme::kBpe;
  std::string language;
  std::vector<std::string> specials;  // stored as the first entries, in order
  std::vector<VocabEntry> entries;    // id == index
  std::vector<std::pair<std::string, std::string>> merges;  // BPE, in learned order

  std::size_t size() const { return entries.size(); }
  bool is_special(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < specials.size();
  }
  TokenId id_of(std::string_view subword) const;
  TokenId unk_id() const { return id_of(kUnkToken); }
  TokenId special_id(std::string_view name) const { return id_of(name); }

  // Ids of entries sorted by descending frequency (specials excluded),
  // ties by id. Used for frequency cutoffs in mapping and anchoring.
  std::vector<TokenId> ids_by_frequency() const;

  void rebuild_index();

  std::string fingerprint() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace subanchor
