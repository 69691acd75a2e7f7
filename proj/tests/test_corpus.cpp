#include <doctest.h>

#include <random>

#include "subanchor/corpus.hpp"
#include "subanchor/text.hpp"

using namespace subanchor;

TEST_CASE("normalize_sentence applies the stated rules") {
  NormalizationConfig cfg;
  CHECK(normalize_sentence("Hello, World!", cfg) == "hello , world !");
  CHECK(normalize_sentence("a  b", cfg) == "a b");
  CHECK(normalize_sentence("", cfg) == std::nullopt);
  CHECK(normalize_sentence("   \t ", cfg) == std::nullopt);
  CHECK(normalize_sentence("  x ", cfg) == "x");
}

TEST_CASE("normalize_sentence composes combining marks") {
  NormalizationConfig cfg;
  // "cafe" with a combining acute on the e -> precomposed e-acute.
  std::string decomposed = "cafe\xCC\x81";
  auto norm = normalize_sentence(decomposed, cfg);
  REQUIRE(norm.has_value());
  CHECK(*norm == "caf\xC3\xA9");
}

TEST_CASE("normalize_sentence rejects invalid UTF-8 naming the byte offset") {
  NormalizationConfig cfg;
  std::string bad = "ab\xFFzz";
  try {
    normalize_sentence(bad, cfg);
    FAIL("expected Utf8Error");
  } catch (const Utf8Error& e) {
    CHECK(e.byte_offset == 2);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("normalization is idempotent on fuzzed strings") {
  NormalizationConfig cfg;
  std::mt19937_64 rng(7);
  const std::string pool =
      "abcXYZ 0189!?,.;:-()\"'\xC3\xA9\xC3\x84\xCE\xB1\xCE\xA3\xD0\xB4\xE2\x82\xAC";
  std::vector<CodePoint> pool_cps = utf8_decode(pool);
  std::uniform_int_distribution<std::size_t> pick(0, pool_cps.size() - 1);
  std::uniform_int_distribution<int> len(0, 40);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CodePoint> cps;
    int n = len(rng);
    for (int i = 0; i < n; ++i) cps.push_back(pool_cps[pick(rng)]);
    std::string raw = utf8_encode(cps);
    auto once = normalize_sentence(raw, cfg);
    if (!once) continue;
    auto twice = normalize_sentence(*once, cfg);
    REQUIRE(twice.has_value());
    CHECK(*twice == *once);
  }
}

TEST_CASE("word_counts matches an independent single-pass counter") {
  SentenceStream small(std::vector<std::string>{"a b", "a"}, "xx");
  WordCounts counts = word_counts(small);
  CHECK(counts.at("a") == 2);
  CHECK(counts.at("b") == 1);

  SentenceStream one(std::vector<std::string>{"x x x"}, "xx");
  CHECK(word_counts(one).at("x") == 3);

  // 1000-line synthetic corpus vs. a naive recount.
  std::mt19937_64 rng(13);
  std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "nu"};
  std::vector<std::string> lines;
  std::map<std::string, std::int64_t> naive;
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(1, 9);
  for (int i = 0; i < 1000; ++i) {
    std::string line;
    int n = len(rng);
    for (int w = 0; w < n; ++w) {
      const std::string& word = vocab[pick(rng)];
      if (w) line += ' ';
      line += word;
      ++naive[word];
    }
    lines.push_back(line);
  }
  SentenceStream stream(lines, "xx");
  WordCounts counts2 = word_counts(stream);
  CHECK(counts2.size() == naive.size());
  for (const auto& [w, c] : naive) CHECK(counts2.at(w) == c);
}

TEST_CASE("word_counts fails on an empty stream") {
  SentenceStream stream(std::vector<std::string>{"", "  "}, "xx");
  CHECK_THROWS_AS(word_counts(stream), std::runtime_error);
}

TEST_CASE("streams are deterministic and count drops") {
  std::vector<std::string> lines = {"A.", "", "b  c", "  "};
  SentenceStream stream(lines, "xx");
  auto first = stream.collect();
  CHECK(stream.stats().sentences_read == 4);
  CHECK(stream.stats().dropped_empty == 2);
  CHECK(stream.stats().sentences_kept == 2);
  auto second = stream.collect();
  CHECK(first == second);
  CHECK(first == std::vector<std::string>{"a .", "b c"});
}

TEST_CASE("count tables merge associatively") {
  WordCounts a{{"x", 1}, {"y", 2}};
  WordCounts b{{"y", 3}, {"z", 4}};
  WordCounts left = a;
  merge_counts(left, b);
  WordCounts right = b;
  merge_counts(right, a);
  CHECK(left == right);
  CHECK(left.at("y") == 5);
}
