#include <doctest.h>

#include <random>

#include "subanchor/embeddings.hpp"
#include "subanchor/segmentation.hpp"

using namespace subanchor;

namespace {

// Single-character words, so every token is one marked character.
Vocabulary char_vocab(const std::vector<std::string>& words) {
  WordCounts counts;
  for (const auto& w : words) counts[w] += 10;
  return learn_bpe(counts, 4 + words.size());
}

double cosine(const Mat<float>& m, TokenId a, TokenId b) {
  return m.row(a).dot(m.row(b)) / (m.row(a).norm() * m.row(b).norm());
}

}  // namespace

TEST_CASE("exclusively co-occurring tokens become close") {
  Vocabulary vocab = char_vocab({"a", "b", "c", "d", "e", "f"});
  std::vector<std::string> lines;
  for (int i = 0; i < 400; ++i) {
    lines.push_back("a b");
    lines.push_back("c d");
    lines.push_back("e f");
    lines.push_back("c e");
    lines.push_back("d f");
  }
  SentenceStream corpus(lines, "xx");
  SgnsOptions opt;
  opt.dim = 16;
  opt.epochs = 20;
  opt.window = 2;
  opt.negatives = 5;
  opt.seed = 9;
  EmbeddingMatrix emb = train_sgns(corpus, vocab, opt);
  TokenId a = vocab.id_of("\xE2\x96\x81" "a"), b = vocab.id_of("\xE2\x96\x81" "b");
  REQUIRE(a >= 0);
  REQUIRE(b >= 0);
  CHECK(cosine(emb.rows, a, b) > 0.5);
}

TEST_CASE("training is deterministic in single-threaded mode") {
  Vocabulary vocab = char_vocab({"a", "b", "c"});
  std::vector<std::string> lines;
  for (int i = 0; i < 50; ++i) lines.push_back(i % 2 ? "a b c" : "c b a");
  SentenceStream corpus(lines, "xx");
  SgnsOptions opt;
  opt.dim = 12;
  opt.epochs = 3;
  opt.seed = 42;
  EmbeddingMatrix e1 = train_sgns(corpus, vocab, opt);
  EmbeddingMatrix e2 = train_sgns(corpus, vocab, opt);
  CHECK((e1.rows.array() == e2.rows.array()).all());
}

TEST_CASE("per-epoch loss decreases over the first epochs") {
  Vocabulary vocab = char_vocab({"a", "b", "c", "d", "e", "f", "g", "h"});
  std::mt19937_64 rng(4);
  std::vector<std::string> lines;
  const char* groups[] = {"a b", "c d", "e f", "g h"};
  std::uniform_int_distribution<int> pick(0, 3);
  for (int i = 0; i < 1500; ++i) lines.push_back(groups[pick(rng)]);
  SentenceStream corpus(lines, "xx");
  SgnsOptions opt;
  opt.dim = 16;
  opt.epochs = 5;
  opt.window = 2;
  opt.seed = 7;
  SgnsTrace trace;
  train_sgns(corpus, vocab, opt, &trace);
  REQUIRE(trace.epoch_loss.size() == 5);
  for (std::size_t e = 1; e < trace.epoch_loss.size(); ++e)
    CHECK(trace.epoch_loss[e] < trace.epoch_loss[e - 1]);
}

TEST_CASE("no all-zero rows, all values finite, norms sane") {
  Vocabulary vocab = char_vocab({"a", "b", "c", "d"});
  std::vector<std::string> lines(100, "a b c d");
  SentenceStream corpus(lines, "xx");
  SgnsOptions opt;
  opt.dim = 8;
  opt.epochs = 2;
  EmbeddingMatrix emb = train_sgns(corpus, vocab, opt);
  int sane = 0;
  for (Index r = 0; r < emb.rows.rows(); ++r) {
    CHECK(emb.rows.row(r).allFinite());
    double n = emb.rows.row(r).norm();
    CHECK(n > 0.0);
    if (n > 1e-3 && n < 1e3) ++sane;
  }
  CHECK(static_cast<double>(sane) >= 0.99 * static_cast<double>(emb.rows.rows()));
}

TEST_CASE("paradigmatic substitutes separate from the median cosine") {
  Vocabulary vocab = char_vocab({"a", "b", "x", "y", "u", "v", "p", "q"});
  std::mt19937_64 rng(17);
  std::vector<std::string> lines;
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < 2000; ++i) {
    // a and b are perfect substitutes inside the frame "x _ y".
    lines.push_back(coin(rng) ? "x a y" : "x b y");
    lines.push_back(coin(rng) ? "u p v" : "u q v");
  }
  SentenceStream corpus(lines, "xx");
  SgnsOptions opt;
  opt.dim = 16;
  opt.epochs = 10;
  opt.window = 2;
  opt.seed = 3;
  EmbeddingMatrix emb = train_sgns(corpus, vocab, opt);

  TokenId a = vocab.id_of("\xE2\x96\x81" "a"), b = vocab.id_of("\xE2\x96\x81" "b");
  std::vector<double> all;
  for (Index i = static_cast<Index>(vocab.specials.size()); i < emb.rows.rows(); ++i)
    for (Index j = i + 1; j < emb.rows.rows(); ++j)
      all.push_back(cosine(emb.rows, static_cast<TokenId>(i), static_cast<TokenId>(j)));
  std::sort(all.begin(), all.end());
  double median = all[all.size() / 2];
  CHECK(cosine(emb.rows, a, b) - median >= 0.3);
}

TEST_CASE("dimension and corpus validation") {
  Vocabulary vocab = char_vocab({"a"});
  SgnsOptions opt;
  opt.dim = 4;
  CHECK_THROWS_AS(train_sgns({{0}}, vocab, opt), std::invalid_argument);
  opt.dim = 8;
  CHECK_THROWS_AS(train_sgns({{static_cast<TokenId>(vocab.size())}}, vocab, opt),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_sgns(std::vector<std::vector<TokenId>>{}, vocab, opt),
                  std::invalid_argument);
}

TEST_CASE("word2vec text format round-trips") {
  EmbeddingMatrix emb;
  emb.rows.resize(3, 4);
  emb.rows << 0.25f, -1.5f, 3.25e-5f, 7.0f,
      1.0f, 2.0f, 3.0f, 4.0f,
      -0.125f, 0.5f, -0.75f, 1e-8f;
  emb.names = {"\xE2\x96\x81\xC3\xA4", "b", "c"};
  std::string path = "/tmp/subanchor_test_emb.vec";
  save_word2vec(path, emb);
  EmbeddingMatrix loaded = load_word2vec(path);
  REQUIRE(loaded.rows.rows() == 3);
  REQUIRE(loaded.rows.cols() == 4);
  CHECK(loaded.names == emb.names);
  CHECK((loaded.rows.array() == emb.rows.array()).all());
}

TEST_CASE("align_to_vocab reorders rows and rejects missing subwords") {
  Vocabulary vocab = char_vocab({"a", "b"});
  EmbeddingMatrix emb;
  emb.rows.resize(static_cast<Index>(vocab.size()), 2);
  for (Index r = 0; r < emb.rows.rows(); ++r) emb.rows.row(r).setConstant(static_cast<float>(r));
  for (std::size_t i = 0; i < vocab.size(); ++i) emb.names.push_back(vocab.entries[i].subword);
  std::reverse(emb.names.begin(), emb.names.end());
  emb.rows = emb.rows.colwise().reverse().eval();

  EmbeddingMatrix aligned = align_to_vocab(emb, vocab);
  for (Index r = 0; r < aligned.rows.rows(); ++r)
    CHECK(aligned.names[static_cast<std::size_t>(r)] ==
          vocab.entries[static_cast<std::size_t>(r)].subword);

  emb.names[0] = "zzz";
  CHECK_THROWS_AS(align_to_vocab(emb, vocab), std::runtime_error);
}
