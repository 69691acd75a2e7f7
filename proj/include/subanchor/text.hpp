#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subanchor {

using CodePoint = std::uint32_t;

struct Utf8Error : std::runtime_error {
  std::size_t byte_offset;
  explicit Utf8Error(std::size_t offset)
      : std::runtime_error("invalid UTF-8 sequence at byte offset " + std::to_string(offset)),
        byte_offset(offset) {}
};

// Throws Utf8Error on malformed input (overlong forms, surrogates, truncation).
std::vector<CodePoint> utf8_decode(std::string_view s);

void utf8_append(std::string& out, CodePoint cp);
std::string utf8_encode(const std::vector<CodePoint>& cps);

// Simple one-to-one lowercase for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Everything else passes through unchanged.
CodePoint lowercase(CodePoint cp);

// Canonical composition for the common Latin/Greek/Cyrillic precomposed
// characters (base + combining mark -> composed form). Not full NFC: no
// decomposition and no canonical reordering, but idempotent by construction.
void compose_canonical(std::vector<CodePoint>& cps);

bool is_whitespace(CodePoint cp);
bool is_punctuation(CodePoint cp);

}  // namespace subanchor
