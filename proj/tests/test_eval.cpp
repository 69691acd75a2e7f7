#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "subanchor/eval.hpp"
#include "bleu_reference.hpp"
#include "synthetic.hpp"

using namespace subanchor;

namespace {

Vocabulary word_level_vocab(const std::vector<std::string>& words) {
  WordCounts counts;
  std::set<std::string> chars;
  for (const auto& w : words) {
    counts[w] = 10;
    bool first = true;
    for (char c : w) {
      chars.insert(first ? std::string(kBoundaryMarker) + c : std::string(1, c));
      first = false;
    }
  }
  // Large enough that every word becomes a single subword.
  std::size_t budget = 4 + chars.size();
  for (const auto& w : words) budget += w.size();
  return learn_bpe(counts, budget);
}

}  // namespace

TEST_CASE("13a tokenization") {
  CHECK(tokenize_13a("Hello, world!") ==
        std::vector<std::string>{"Hello", ",", "world", "!"});
  CHECK(tokenize_13a("1.5 points") == std::vector<std::string>{"1.5", "points"});
  CHECK(tokenize_13a("end.") == std::vector<std::string>{"end", "."});
  CHECK(tokenize_13a("3-4 a-b") == std::vector<std::string>{"3", "-", "4", "a-b"});
  CHECK(tokenize_13a("&quot;x&quot;") == std::vector<std::string>{"\"", "x", "\""});
}

TEST_CASE("word vectors average subword rows") {
  std::vector<std::string> words = {"cat", "dog", "catdog"};
  Vocabulary vocab = word_level_vocab(words);
  Segmenter seg(vocab);
  Mat<double> emb = Mat<double>::Zero(static_cast<Index>(vocab.size()), 4);
  for (Index r = 0; r < emb.rows(); ++r) emb(r, r % 4) = static_cast<double>(r + 1);

  TokenId cat = vocab.id_of(std::string(kBoundaryMarker) + "cat");
  REQUIRE(cat >= 0);
  auto v = word_vector("cat", emb, seg);
  REQUIRE(v.has_value());
  CHECK((*v - emb.row(cat).transpose()).cwiseAbs().maxCoeff() == 0.0);

  // A word splitting into two known subwords averages their rows.
  Segmentation two = seg.encode("dogcat");
  REQUIRE(two.size() == 2);
  auto v2 = word_vector("dogcat", emb, seg);
  REQUIRE(v2.has_value());
  Vec<double> want =
      (emb.row(two.token_ids[0]).transpose() + emb.row(two.token_ids[1]).transpose()) / 2;
  CHECK((*v2 - want).cwiseAbs().maxCoeff() < 1e-12);

  // Re-encoding determinism.
  auto v3 = word_vector("dogcat", emb, seg);
  CHECK((*v2 - *v3).cwiseAbs().maxCoeff() == 0.0);

  // Entirely unknown word -> excluded.
  CHECK(!word_vector("zzz", emb, seg).has_value());
}

TEST_CASE("BLI with gold equal to the retrieval space scores 1.0") {
  // 14 words, each its own translation candidate; the mapped spaces are the
  // same unit rows so retrieval is exact.
  std::vector<std::string> words;
  for (char c = 'a'; c <= 'n'; ++c) words.push_back(std::string(2, c));
  Vocabulary vocab = word_level_vocab(words);
  Mat<double> emb = Mat<double>::Zero(static_cast<Index>(vocab.size()),
                                      static_cast<Index>(vocab.size()));
  for (Index r = 0; r < emb.rows(); ++r) emb(r, r) = 1.0;

  BliTestSet test;
  for (const auto& w : words) test.items.push_back({w, {w}});
  BliResult result = bli_precision_at_1(test, emb, vocab, emb, vocab, 10);
  CHECK(result.precision_at_1 == doctest::Approx(1.0));
  CHECK(result.evaluated == words.size());
}

TEST_CASE("filtered BLI removes exactly the identical-surface pairs") {
  BliTestSet test;
  test.items = {{"epic", {"epic"}}, {"casa", {"house"}}, {"blue", {"blau", "blue"}}};
  BliTestSet filtered = test.filter_identical();
  CHECK(test.items.size() - filtered.items.size() == 2);
  REQUIRE(filtered.items.size() == 1);
  CHECK(filtered.items[0].source == "casa");
  CHECK(filtered.filtered_identical);
}

TEST_CASE("bucketing partitions the corpus by FP/FN fraction") {
  const std::string m = std::string(kBoundaryMarker);
  std::vector<std::string> words = {"aa", "bb", "cc", "dd"};
  Vocabulary v1 = word_level_vocab(words);
  Vocabulary v2 = word_level_vocab(std::vector<std::string>{"xx", "yy", "zz", "aa"});

  // "aa" is a false positive; ("bb" -> "yy") a false negative.
  AnchorDictionary anchors;
  anchors.pairs = {{v1.id_of(m + "bb"), v2.id_of(m + "yy"), 0.9}};
  SharedPairClassification c = classify_shared_pairs(anchors, v1, v2);
  REQUIRE(c.false_positives.count(m + "aa") == 1);
  REQUIRE(c.false_negatives.size() == 1);

  MergedVocabulary merged = merge_for_mt(v1, v2, anchors, 2 * v1.size() - 1);

  SentenceStream corpus(std::vector<std::string>{
                            "aa aa aa",      // all FP -> fraction 1.0
                            "cc dd",         // clean -> 0.0
                            "aa bb cc dd",   // 2 of 4 flagged -> 0.5
                        },
                        "xx");
  BucketedCorpus buckets = bucket_by_fpfn(corpus, merged, v1, c, {0.25, 0.5});
  REQUIRE(buckets.buckets.size() == 3);
  CHECK(buckets.fractions == std::vector<double>{1.0, 0.0, 0.5});
  CHECK(buckets.buckets[0].count == 1);  // [0, 0.25)
  CHECK(buckets.buckets[1].count == 0);  // [0.25, 0.5)
  CHECK(buckets.buckets[2].count == 2);  // [0.5, 1.0]
  std::size_t total = 0;
  for (const auto& b : buckets.buckets) total += b.count;
  CHECK(total == 3);

  std::vector<std::string> hyp = {"a b", "c d", "e f"};
  std::vector<std::string> ref = {"a b", "c d", "x y"};
  score_buckets(buckets, hyp, ref);
  CHECK(buckets.buckets[0].bleu == doctest::Approx(100.0));
  CHECK(buckets.buckets[2].bleu < 100.0);
}

TEST_CASE("BLEU trivial cases") {
  std::vector<std::string> same = {"the cat sat on the mat", "a quick brown fox"};
  CHECK(corpus_bleu(same, same) == doctest::Approx(100.0));

  std::vector<std::string> hyp = {"aa bb cc dd"};
  std::vector<std::string> ref = {"xx yy zz ww"};
  CHECK(corpus_bleu(hyp, ref) == doctest::Approx(0.0));

  CHECK_THROWS_AS(corpus_bleu({"a"}, {"a", "b"}), std::invalid_argument);
  CHECK_THROWS_AS(corpus_bleu({}, {}), std::invalid_argument);
}

TEST_CASE("BLEU matches the independent reference on a 20-sentence fixture") {
  std::mt19937_64 rng(71);
  std::vector<std::string> vocab = {"the",  "cat", "dog",  "house", "green", "runs",
                                    "fast", "to",  "from", "a",     "old",   "bridge"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(4, 14);
  std::uniform_real_distribution<double> unif(0, 1);
  std::vector<std::string> hyp, ref;
  for (int s = 0; s < 20; ++s) {
    int n = len(rng);
    std::string r, h;
    for (int w = 0; w < n; ++w) {
      std::string word = vocab[pick(rng)];
      if (w) r += ' ';
      r += word;
      // Hypothesis: mostly the same with random substitutions and drops.
      double u = unif(rng);
      if (u < 0.15) continue;
      if (u < 0.3) word = vocab[pick(rng)];
      if (!h.empty()) h += ' ';
      h += word;
    }
    ref.push_back(r + ".");
    hyp.push_back(h + ".");
  }
  double got = corpus_bleu(hyp, ref);
  double want = subanchor::testing::reference_bleu(hyp, ref);
  CHECK(got == doctest::Approx(want).epsilon(1e-6));
  CHECK(std::abs(got - want) < 0.01);
  CHECK(got >= 0.0);
  CHECK(got <= 100.0);

  // Corpus order does not matter.
  std::vector<std::string> hyp2 = hyp, ref2 = ref;
  std::vector<std::size_t> order(hyp.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    hyp2[i] = hyp[order[i]];
    ref2[i] = ref[order[i]];
  }
  CHECK(corpus_bleu(hyp2, ref2) == doctest::Approx(got).epsilon(1e-12));
}

TEST_CASE("P@1 never drops when gold sets grow") {
  std::vector<std::string> words;
  for (char c = 'a'; c <= 'p'; ++c) words.push_back(std::string(3, c));
  Vocabulary vocab = word_level_vocab(words);
  std::mt19937_64 rng(81);
  std::normal_distribution<double> normal(0, 1);
  Mat<double> emb(static_cast<Index>(vocab.size()), 6);
  for (Index r = 0; r < emb.rows(); ++r)
    for (Index c = 0; c < emb.cols(); ++c) emb(r, c) = normal(rng);

  BliTestSet narrow;
  for (std::size_t i = 0; i < words.size(); ++i)
    narrow.items.push_back({words[i], {words[(i + 1) % words.size()]}});
  BliTestSet wide = narrow;
  for (std::size_t i = 0; i < wide.items.size(); ++i)
    wide.items[i].golds.push_back(words[(i + 2) % words.size()]);

  BliResult a = bli_precision_at_1(narrow, emb, vocab, emb, vocab, 5);
  BliResult b = bli_precision_at_1(wide, emb, vocab, emb, vocab, 5);
  CHECK(b.precision_at_1 >= a.precision_at_1);
}
