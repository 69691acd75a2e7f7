#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "subanchor/eval.hpp"

namespace subanchor {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// mteval-v13a punctuation classes: symbols always split; period and comma
// split unless attached to a digit; dash split after a digit.
bool is_13a_symbol(char c) {
  return (c >= ' ' && c <= '&') || (c >= '(' && c <= '+') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~') || c == '/';
}

std::string unescape_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      if (s.substr(i, 6) == "&quot;") { out += '"'; i += 6; continue; }
      if (s.substr(i, 5) == "&amp;") { out += '&'; i += 5; continue; }
      if (s.substr(i, 4) == "&lt;") { out += '<'; i += 4; continue; }
      if (s.substr(i, 4) == "&gt;") { out += '>'; i += 4; continue; }
    }
    out += s[i++];
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view segment) {
  std::string s = unescape_entities(segment);
  std::string spaced;
  spaced.reserve(s.size() * 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    char prev = i > 0 ? s[i - 1] : ' ';
    char next = i + 1 < s.size() ? s[i + 1] : ' ';
    bool split;
    if (c == '.' || c == ',') {
      split = !is_digit(prev) || !is_digit(next);
    } else if (c == '-') {
      split = is_digit(prev);
    } else {
      split = is_13a_symbol(c) && c != ' ';
    }
    if (c == ' ') {
      spaced += ' ';
    } else if (split) {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < spaced.size()) {
    while (i < spaced.size() && spaced[i] == ' ') ++i;
    std::size_t j = i;
    while (j < spaced.size() && spaced[j] != ' ') ++j;
    if (j > i) tokens.push_back(spaced.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("corpus_bleu: hypothesis/reference line counts differ (" +
                                std::to_string(hypotheses.size()) + " vs " +
                                std::to_string(references.size()) + ")");
  if (hypotheses.empty()) throw std::invalid_argument("corpus_bleu: empty corpus");

  constexpr int kMaxOrder = 4;
  std::int64_t matched[kMaxOrder] = {0, 0, 0, 0};
  std::int64_t total[kMaxOrder] = {0, 0, 0, 0};
  std::int64_t hyp_len = 0, ref_len = 0;

  for (std::size_t line = 0; line < hypotheses.size(); ++line) {
    std::vector<std::string> hyp = tokenize_13a(hypotheses[line]);
    std::vector<std::string> ref = tokenize_13a(references[line]);
    hyp_len += static_cast<std::int64_t>(hyp.size());
    ref_len += static_cast<std::int64_t>(ref.size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      std::map<std::vector<std::string>, std::int64_t> ref_ngrams;
      for (std::size_t i = 0; i + n <= ref.size(); ++i)
        ++ref_ngrams[{ref.begin() + static_cast<std::ptrdiff_t>(i),
                      ref.begin() + static_cast<std::ptrdiff_t>(i + n)}];
      std::map<std::vector<std::string>, std::int64_t> hyp_ngrams;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i)
        ++hyp_ngrams[{hyp.begin() + static_cast<std::ptrdiff_t>(i),
                      hyp.begin() + static_cast<std::ptrdiff_t>(i + n)}];
      for (const auto& [ngram, count] : hyp_ngrams) {
        total[n - 1] += count;
        auto it = ref_ngrams.find(ngram);
        if (it != ref_ngrams.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }

  if (hyp_len == 0) return 0.0;
  // Effective order: short corpora may have no higher-order n-grams at all.
  int order = 0;
  for (int n = 0; n < kMaxOrder; ++n)
    if (total[n] > 0) order = n + 1;
  if (order == 0) return 0.0;

  double log_prec = 0;
  for (int n = 0; n < order; ++n) {
    if (matched[n] == 0) return 0.0;
    log_prec += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
  }
  log_prec /= order;
  double bp = hyp_len < ref_len
                  ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                  : 1.0;
  return 100.0 * bp * std::exp(log_prec);
}

}  // namespace subanchor
