#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace subanchor {

// FNV-1a, 64 bit. Used for artifact fingerprints and per-stage seed fan-out.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// Deterministic seed for a pipeline stage: one top-level seed, fanned out by
// stage name and input fingerprint. Identical inputs get identical seeds, so
// e.g. copying a corpus reproduces the exact same embedding run.
inline std::uint64_t fanout_seed(std::uint64_t top_seed, std::string_view stage,
                                 std::string_view input_fingerprint = {}) {
  std::uint64_t h = fnv1a64(stage);
  h = fnv1a64(input_fingerprint, h);
  h ^= top_seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h == 0 ? 0x6a09e667f3bcc909ull : h;
}

}  // namespace subanchor
