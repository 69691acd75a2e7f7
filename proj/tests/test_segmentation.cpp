#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "subanchor/segmentation.hpp"
#include "synthetic.hpp"

using namespace subanchor;

namespace {

// Reference BPE: recounts pair frequencies from scratch after every merge.
// Mirrors the documented tie-break (marker-stripped merged string).
struct ReferenceBpe {
  std::vector<std::pair<std::string, std::string>> merges;
  std::set<std::string> entries;

  static std::string_view strip(std::string_view s) {
    std::string_view marker = kBoundaryMarker;
    return s.substr(0, marker.size()) == marker ? s.substr(marker.size()) : s;
  }

  void learn(const WordCounts& counts, int num_merges, std::int64_t min_word_freq) {
    std::vector<std::pair<std::vector<std::string>, std::int64_t>> words;
    for (const auto& [word, count] : counts) {
      std::vector<std::string> syms;
      bool first = true;
      for (char c : word) {
        std::string s = first ? std::string(kBoundaryMarker) + c : std::string(1, c);
        syms.push_back(s);
        entries.insert(s);
        first = false;
      }
      if (count >= min_word_freq) words.emplace_back(syms, count);
    }
    for (int step = 0; step < num_merges; ++step) {
      std::map<std::pair<std::string, std::string>, std::int64_t> pairs;
      for (const auto& [syms, count] : words)
        for (std::size_t i = 0; i + 1 < syms.size(); ++i) pairs[{syms[i], syms[i + 1]}] += count;
      if (pairs.empty()) break;
      std::pair<std::string, std::string> best;
      std::int64_t best_count = -1;
      for (const auto& [pair, count] : pairs) {
        if (count < best_count) continue;
        if (count > best_count) {
          best = pair;
          best_count = count;
          continue;
        }
        std::string sa = pair.first + pair.second, sb = best.first + best.second;
        if (std::make_pair(std::string(strip(sa)), sa) <
            std::make_pair(std::string(strip(sb)), sb))
          best = pair;
      }
      merges.push_back(best);
      entries.insert(best.first + best.second);
      for (auto& [syms, count] : words) {
        for (std::size_t i = 0; i + 1 < syms.size();) {
          if (syms[i] == best.first && syms[i + 1] == best.second) {
            syms[i] += syms[i + 1];
            syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(i) + 1);
          } else {
            ++i;
          }
        }
      }
    }
  }
};

WordCounts low_counts() { return {{"low", 5}, {"lower", 2}, {"lowest", 1}}; }

}  // namespace

TEST_CASE("BPE learns the documented merges on the low/lower/lowest table") {
  // 4 specials + 7 base characters, plus two merges.
  Vocabulary v = learn_bpe(low_counts(), 13);
  REQUIRE(v.merges.size() == 2);
  CHECK(v.merges[0] == std::make_pair(std::string(kBoundaryMarker) + "l", std::string("o")));
  CHECK(v.merges[1] == std::make_pair(std::string(kBoundaryMarker) + "lo", std::string("w")));
  CHECK(v.size() == 13);
}

TEST_CASE("BPE with m = base size yields characters only") {
  Vocabulary v = learn_bpe({{"a", 1}}, 5);
  CHECK(v.merges.empty());
  CHECK(v.size() == 5);  // 4 specials + "▁a"
  CHECK(v.id_of(std::string(kBoundaryMarker) + "a") >= 0);
}

TEST_CASE("BPE rejects a size below the minimum feasible") {
  try {
    learn_bpe(low_counts(), 5);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("11") != std::string::npos);
  }
}

TEST_CASE("BPE matches the step-by-step reference on a random corpus") {
  std::mt19937_64 rng(99);
  auto words = subanchor::testing::make_word_list(50, "abcde", 2, 7, rng);
  WordCounts counts;
  std::uniform_int_distribution<int> freq(2, 40);
  for (const auto& w : words) counts[w] = freq(rng);

  SegmenterOptions opt;
  Vocabulary v = learn_bpe(counts, 4 + 10 /*chars a..e marked+plain*/ + 20, opt);

  ReferenceBpe ref;
  ref.learn(counts, 20, opt.min_word_freq);
  REQUIRE(v.merges.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(v.merges[i] == ref.merges[i]);

  std::set<std::string> got;
  for (std::size_t i = v.specials.size(); i < v.entries.size(); ++i)
    got.insert(v.entries[i].subword);
  CHECK(got == ref.entries);
}

TEST_CASE("BPE is deterministic") {
  std::mt19937_64 rng(3);
  auto words = subanchor::testing::make_word_list(40, "abcd", 2, 6, rng);
  WordCounts counts;
  for (std::size_t i = 0; i < words.size(); ++i)
    counts[words[i]] = static_cast<std::int64_t>(2 + i % 9);
  Vocabulary a = learn_bpe(counts, 30);
  Vocabulary b = learn_bpe(counts, 30);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.entries[i].subword == b.entries[i].subword);
  CHECK(a.merges == b.merges);
}

TEST_CASE("encode applies merges in learned order") {
  Vocabulary v = learn_bpe(low_counts(), 13);
  Segmentation seg = encode(v, "lowest");
  std::vector<std::string> surfaces;
  for (TokenId id : seg.token_ids) surfaces.push_back(v.entries[static_cast<std::size_t>(id)].subword);
  CHECK(surfaces == std::vector<std::string>{std::string(kBoundaryMarker) + "low", "e", "s", "t"});
}

TEST_CASE("encoding the empty sentence is empty") {
  Vocabulary v = learn_bpe(low_counts(), 13);
  CHECK(encode(v, "").size() == 0);
}

TEST_CASE("unknown characters map to UNK and never fail") {
  Vocabulary v = learn_bpe(low_counts(), 13);
  Segmentation seg = encode(v, "lox qt");
  REQUIRE(seg.size() > 0);
  int unks = 0;
  for (TokenId id : seg.token_ids)
    if (id == v.unk_id()) ++unks;
  CHECK(unks >= 2);  // 'x' and the word-initial 'q' are unseen
}

TEST_CASE("offsets cover the sentence and reconstruct words") {
  Vocabulary v = learn_bpe(low_counts(), 13);
  std::string sentence = "low lowest";
  Segmentation seg = encode(v, sentence);
  REQUIRE(seg.offsets.size() == seg.token_ids.size());
  // Spans are within bounds, non-overlapping and increasing.
  std::int32_t prev_end = 0;
  for (auto [start, end] : seg.offsets) {
    CHECK(start >= prev_end);
    CHECK(end > start);
    prev_end = end;
  }
  CHECK(prev_end == static_cast<std::int32_t>(sentence.size()));
}

TEST_CASE("encode/decode round-trips 1000 fuzzed sentences (both schemes)") {
  std::mt19937_64 rng(1234);
  auto words = subanchor::testing::make_word_list(60, "abcdef", 1, 7, rng);
  WordCounts counts;
  std::uniform_int_distribution<int> freq(2, 30);
  for (const auto& w : words) counts[w] = freq(rng);

  Vocabulary bpe = learn_bpe(counts, 60);
  Vocabulary uni = learn_unigram(counts, 40);

  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> len(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string sentence;
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
      if (i) sentence += ' ';
      sentence += words[pick(rng)];
    }
    CHECK(decode(bpe, encode(bpe, sentence).token_ids) == sentence);
    CHECK(decode(uni, encode(uni, sentence).token_ids) == sentence);
  }
}

TEST_CASE("unigram keeps the whole-word piece on {aa: 10}") {
  // 4 specials + base symbols "▁a", "a" + one extra slot.
  Vocabulary v = learn_unigram({{"aa", 10}}, 7);
  CHECK(v.size() == 7);
  CHECK(v.id_of(std::string(kBoundaryMarker) + "aa") >= 0);
  Segmentation seg = encode(v, "aa");
  REQUIRE(seg.size() == 1);
  CHECK(v.entries[static_cast<std::size_t>(seg.token_ids[0])].subword ==
        std::string(kBoundaryMarker) + "aa");
}

TEST_CASE("unigram on unique single characters reduces to the character set") {
  WordCounts counts{{"a", 3}, {"b", 2}, {"c", 5}};
  UnigramTrace trace;
  Vocabulary v = learn_unigram(counts, 7, {}, &trace);
  CHECK(v.size() == 7);  // 4 specials + 3 single-character words
  REQUIRE(!trace.em_loglik_blocks.empty());
  // One segmentation per word: the likelihood is already at its fixed point.
  const auto& block = trace.em_loglik_blocks.front();
  if (block.size() > 1) CHECK(block[1] == doctest::Approx(block[0]).epsilon(1e-12));
}

TEST_CASE("unigram EM log-likelihood is non-decreasing within every block") {
  std::mt19937_64 rng(77);
  auto words = subanchor::testing::make_word_list(80, "abcd", 2, 8, rng);
  WordCounts counts;
  std::uniform_int_distribution<int> freq(2, 50);
  for (const auto& w : words) counts[w] = freq(rng);

  UnigramOptions opt;
  opt.em_rounds_per_prune = 4;
  UnigramTrace trace;
  Vocabulary v = learn_unigram(counts, 30, opt, &trace);
  CHECK(v.size() == 30);
  REQUIRE(!trace.em_loglik_blocks.empty());
  for (const auto& block : trace.em_loglik_blocks) {
    for (std::size_t r = 1; r < block.size(); ++r) {
      double tol = 1e-9 * std::abs(block[r - 1]);
      CHECK(block[r] >= block[r - 1] - tol);
    }
  }
}

TEST_CASE("unigram rejects a size below the minimum feasible") {
  CHECK_THROWS_AS(learn_unigram({{"abc", 4}}, 4), std::invalid_argument);
}

TEST_CASE("vocabulary JSON round-trip") {
  Vocabulary v = learn_bpe(low_counts(), 13);
  v.language = "en";
  std::string path = "/tmp/subanchor_test_vocab.json";
  v.save(path);
  Vocabulary loaded = Vocabulary::load(path);
  CHECK(loaded.scheme == v.scheme);
  CHECK(loaded.language == v.language);
  CHECK(loaded.merges == v.merges);
  REQUIRE(loaded.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(loaded.entries[i].subword == v.entries[i].subword);
    CHECK(loaded.entries[i].freq == v.entries[i].freq);
  }
  CHECK(loaded.fingerprint() == v.fingerprint());
}
