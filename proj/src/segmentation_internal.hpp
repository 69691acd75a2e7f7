#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "subanchor/text.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor::detail {

// A word as its base symbols: the boundary marker is fused with the first
// character ("low" -> ["▁l", "o", "w"]). Each symbol covers one code point.
inline std::vector<std::string> word_units(std::string_view word) {
  std::vector<CodePoint> cps = utf8_decode(word);
  std::vector<std::string> units;
  units.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::string u;
    if (i == 0) u = std::string(kBoundaryMarker);
    utf8_append(u, cps[i]);
    units.push_back(std::move(u));
  }
  return units;
}

// Tie-break key for BPE merges: the merged surface with the boundary marker
// stripped, so "▁lo" sorts as "lo".
inline std::string_view strip_marker(std::string_view s) {
  if (s.size() >= kBoundaryMarker.size() &&
      s.substr(0, kBoundaryMarker.size()) == kBoundaryMarker)
    return s.substr(kBoundaryMarker.size());
  return s;
}

struct WordPieces {
  std::vector<TokenId> ids;
  std::vector<std::pair<std::int32_t, std::int32_t>> unit_spans;  // [start,end) units
};

}  // namespace subanchor::detail
