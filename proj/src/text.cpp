#include "subanchor/text.hpp"

#include <unordered_map>

namespace subanchor {

std::vector<CodePoint> utf8_decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    CodePoint cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw Utf8Error(i);
    }
    if (i + len > s.size()) throw Utf8Error(i);
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) throw Utf8Error(i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings, surrogates and out-of-range values.
    static const CodePoint min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < min_for_len[len]) throw Utf8Error(i);
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) throw Utf8Error(i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, CodePoint cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(const std::vector<CodePoint>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (CodePoint cp : cps) utf8_append(out, cp);
  return out;
}

CodePoint lowercase(CodePoint cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  // Latin-1 supplement (except the multiplication sign).
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
  // Latin Extended-A: alternating case pairs with a few irregular spots.
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0178) return 0x00FF;  // Y with diaeresis
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  // Greek.
  if (cp == 0x0386) return 0x03AC;
  if (cp >= 0x0388 && cp <= 0x038A) return cp + 0x25;
  if (cp == 0x038C) return 0x03CC;
  if (cp == 0x038E || cp == 0x038F) return cp + 0x3F;
  if (cp >= 0x0391 && cp <= 0x03A1) return cp + 32;
  if (cp >= 0x03A3 && cp <= 0x03AB) return cp + 32;
  // Cyrillic.
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
  return cp;
}

namespace {

constexpr std::uint64_t pair_key(CodePoint base, CodePoint mark) {
  return (static_cast<std::uint64_t>(base) << 32) | mark;
}

// Base + combining mark -> precomposed code point. None of the outputs appear
// as a base in another entry, which keeps composition idempotent.
const std::unordered_map<std::uint64_t, CodePoint>& composition_table() {
  static const std::unordered_map<std::uint64_t, CodePoint> table = {
      // a e i o u y n c + grave/acute/circumflex/tilde/diaeresis
      {pair_key('a', 0x300), 0xE0},  {pair_key('a', 0x301), 0xE1},
      {pair_key('a', 0x302), 0xE2},  {pair_key('a', 0x303), 0xE3},
      {pair_key('a', 0x308), 0xE4},  {pair_key('a', 0x30A), 0xE5},
      {pair_key('a', 0x304), 0x101}, {pair_key('a', 0x306), 0x103},
      {pair_key('e', 0x300), 0xE8},  {pair_key('e', 0x301), 0xE9},
      {pair_key('e', 0x302), 0xEA},  {pair_key('e', 0x308), 0xEB},
      {pair_key('e', 0x304), 0x113}, {pair_key('e', 0x30C), 0x11B},
      {pair_key('i', 0x300), 0xEC},  {pair_key('i', 0x301), 0xED},
      {pair_key('i', 0x302), 0xEE},  {pair_key('i', 0x308), 0xEF},
      {pair_key('i', 0x304), 0x12B},
      {pair_key('o', 0x300), 0xF2},  {pair_key('o', 0x301), 0xF3},
      {pair_key('o', 0x302), 0xF4},  {pair_key('o', 0x303), 0xF5},
      {pair_key('o', 0x308), 0xF6},  {pair_key('o', 0x304), 0x14D},
      {pair_key('u', 0x300), 0xF9},  {pair_key('u', 0x301), 0xFA},
      {pair_key('u', 0x302), 0xFB},  {pair_key('u', 0x308), 0xFC},
      {pair_key('u', 0x304), 0x16B}, {pair_key('u', 0x30A), 0x16F},
      {pair_key('y', 0x301), 0xFD},  {pair_key('y', 0x308), 0xFF},
      {pair_key('n', 0x303), 0xF1},  {pair_key('n', 0x301), 0x144},
      {pair_key('n', 0x30C), 0x148},
      {pair_key('c', 0x327), 0xE7},  {pair_key('c', 0x301), 0x107},
      {pair_key('c', 0x30C), 0x10D},
      {pair_key('s', 0x301), 0x15B}, {pair_key('s', 0x30C), 0x161},
      {pair_key('s', 0x327), 0x15F},
      {pair_key('z', 0x301), 0x17A}, {pair_key('z', 0x30C), 0x17E},
      {pair_key('g', 0x306), 0x11F},
      {pair_key('r', 0x30C), 0x159},
      {pair_key('l', 0x301), 0x13A},
      {pair_key('t', 0x30C), 0x165},
      {pair_key('d', 0x30C), 0x10F},
      // Uppercase bases (lowercasing may come after composition).
      {pair_key('A', 0x300), 0xC0},  {pair_key('A', 0x301), 0xC1},
      {pair_key('A', 0x302), 0xC2},  {pair_key('A', 0x303), 0xC3},
      {pair_key('A', 0x308), 0xC4},  {pair_key('A', 0x30A), 0xC5},
      {pair_key('E', 0x300), 0xC8},  {pair_key('E', 0x301), 0xC9},
      {pair_key('E', 0x302), 0xCA},  {pair_key('E', 0x308), 0xCB},
      {pair_key('I', 0x300), 0xCC},  {pair_key('I', 0x301), 0xCD},
      {pair_key('O', 0x300), 0xD2},  {pair_key('O', 0x301), 0xD3},
      {pair_key('O', 0x303), 0xD5},  {pair_key('O', 0x308), 0xD6},
      {pair_key('U', 0x300), 0xD9},  {pair_key('U', 0x301), 0xDA},
      {pair_key('U', 0x308), 0xDC},
      {pair_key('N', 0x303), 0xD1},  {pair_key('C', 0x327), 0xC7},
      // Greek vowel + tonos / dialytika.
      {pair_key(0x3B1, 0x301), 0x3AC}, {pair_key(0x3B5, 0x301), 0x3AD},
      {pair_key(0x3B7, 0x301), 0x3AE}, {pair_key(0x3B9, 0x301), 0x3AF},
      {pair_key(0x3BF, 0x301), 0x3CC}, {pair_key(0x3C5, 0x301), 0x3CD},
      {pair_key(0x3C9, 0x301), 0x3CE}, {pair_key(0x3B9, 0x308), 0x3CA},
      {pair_key(0x3C5, 0x308), 0x3CB},
      {pair_key(0x391, 0x301), 0x386}, {pair_key(0x395, 0x301), 0x388},
      {pair_key(0x397, 0x301), 0x389}, {pair_key(0x399, 0x301), 0x38A},
      {pair_key(0x39F, 0x301), 0x38C}, {pair_key(0x3A5, 0x301), 0x38E},
      {pair_key(0x3A9, 0x301), 0x38F},
      // Cyrillic breve / diaeresis forms.
      {pair_key(0x438, 0x306), 0x439}, {pair_key(0x418, 0x306), 0x419},
      {pair_key(0x435, 0x308), 0x451}, {pair_key(0x415, 0x308), 0x401},
      {pair_key(0x443, 0x306), 0x45E}, {pair_key(0x423, 0x306), 0x40E},
  };
  return table;
}

}  // namespace

void compose_canonical(std::vector<CodePoint>& cps) {
  const auto& table = composition_table();
  std::size_t w = 0;
  for (std::size_t r = 0; r < cps.size(); ++r) {
    if (w > 0) {
      auto it = table.find(pair_key(cps[w - 1], cps[r]));
      if (it != table.end()) {
        cps[w - 1] = it->second;
        continue;
      }
    }
    cps[w++] = cps[r];
  }
  cps.resize(w);
}

bool is_whitespace(CodePoint cp) {
  switch (cp) {
    case ' ':
    case '\t':
    case '\n':
    case '\r':
    case '\f':
    case '\v':
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punctuation(CodePoint cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
           (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
  }
  switch (cp) {
    case 0x00A1:  // inverted exclamation
    case 0x00AB:  // left guillemet
    case 0x00BB:  // right guillemet
    case 0x00BF:  // inverted question
    case 0x00B7:  // middle dot
    case 0x2010:
    case 0x2011:
    case 0x2012:
    case 0x2013:  // en dash
    case 0x2014:  // em dash
    case 0x2018:
    case 0x2019:
    case 0x201A:
    case 0x201C:
    case 0x201D:
    case 0x201E:
    case 0x2026:  // ellipsis
    case 0x2039:
    case 0x203A:
    case 0x060C:  // Arabic comma
    case 0x061B:  // Arabic semicolon
    case 0x061F:  // Arabic question mark
    case 0x0387:  // Greek ano teleia
    case 0x3001:  // ideographic comma
    case 0x3002:  // ideographic full stop
    case 0xFF01:
    case 0xFF0C:
    case 0xFF1F:
      return true;
    default:
      return false;
  }
}

}  // namespace subanchor
