#include "synthetic.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace subanchor::testing {

std::vector<std::string> make_word_list(int count, const std::string& alphabet, int min_len,
                                        int max_len, std::mt19937_64& rng) {
  std::set<std::string> seen;
  std::vector<std::string> words;
  std::uniform_int_distribution<int> len_dist(min_len, max_len);
  std::uniform_int_distribution<std::size_t> chr(0, alphabet.size() - 1);
  while (static_cast<int>(words.size()) < count) {
    int len = len_dist(rng);
    std::string w;
    for (int i = 0; i < len; ++i) w += alphabet[chr(rng)];
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

namespace {

// Cumulative zipf distribution over ranks 0..n-1.
struct ZipfSampler {
  std::vector<double> cdf;
  ZipfSampler(int n, double exponent) {
    cdf.resize(static_cast<std::size_t>(n));
    double total = 0;
    for (int r = 0; r < n; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cdf[static_cast<std::size_t>(r)] = total;
    }
    for (double& v : cdf) v /= total;
  }
  int sample(std::mt19937_64& rng) const {
    double u = std::uniform_real_distribution<double>(0, 1)(rng);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(it - cdf.begin());
  }
};

}  // namespace

CipherCorpus make_cipher_corpus(const CipherCorpusOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  CipherCorpus corpus;
  corpus.l1_words = make_word_list(opt.lexicon_size, "abcdefghijklm", 4, 7, rng);
  corpus.l2_words = make_word_list(opt.lexicon_size, "nopqrstuvwxyz", 4, 7, rng);
  if (opt.fp_count > 0)
    corpus.fp_surfaces = make_word_list(opt.fp_count, "23456789", 4, 6, rng);

  // Topic structure gives words distinctive co-occurrence signatures.
  std::vector<std::vector<int>> topic_members(static_cast<std::size_t>(opt.topics));
  std::vector<int> topic_of(static_cast<std::size_t>(opt.lexicon_size));
  for (int c = 0; c < opt.lexicon_size; ++c) {
    topic_of[static_cast<std::size_t>(c)] = c % opt.topics;
    topic_members[static_cast<std::size_t>(c % opt.topics)].push_back(c);
  }

  ZipfSampler global(opt.lexicon_size, opt.zipf_exponent);
  std::uniform_int_distribution<int> topic_dist(0, opt.topics - 1);
  std::uniform_int_distribution<int> len_dist(opt.min_sentence_words, opt.max_sentence_words);
  std::uniform_real_distribution<double> unif(0, 1);

  auto sample_concept = [&](int topic) {
    if (unif(rng) < opt.in_topic_prob) {
      const auto& members = topic_members[static_cast<std::size_t>(topic)];
      // Zipf-ish within the topic: re-use the global sampler modulo size.
      int pick = global.sample(rng) % static_cast<int>(members.size());
      return members[static_cast<std::size_t>(pick)];
    }
    return global.sample(rng);
  };

  corpus.l1_sentences.reserve(static_cast<std::size_t>(opt.sentences));
  corpus.l2_sentences.reserve(static_cast<std::size_t>(opt.sentences));
  for (int s = 0; s < opt.sentences; ++s) {
    int topic = topic_dist(rng);
    int len = len_dist(rng);
    std::string s1, s2;
    for (int w = 0; w < len; ++w) {
      int c = sample_concept(topic);
      if (w) {
        s1 += ' ';
        s2 += ' ';
      }
      s1 += corpus.l1_words[static_cast<std::size_t>(c)];
      s2 += corpus.l2_words[static_cast<std::size_t>(c)];
    }
    corpus.l1_sentences.push_back(std::move(s1));
    corpus.l2_sentences.push_back(std::move(s2));
  }

  // Planted false positives: surface fp_surfaces[k] occurs in L1 inside the
  // contexts of one topic and in L2 inside the contexts of a different topic,
  // with no counterpart concept on the other side.
  for (int k = 0; k < opt.fp_count; ++k) {
    int topic_a = k % opt.topics;
    int topic_b = (k + opt.topics / 2) % opt.topics;
    for (int s = 0; s < opt.fp_sentences_each; ++s) {
      int len = len_dist(rng);
      std::string s1, s2;
      for (int w = 0; w < len; ++w) {
        if (w) {
          s1 += ' ';
          s2 += ' ';
        }
        if (unif(rng) < opt.fp_slot_prob)
          s1 += corpus.fp_surfaces[static_cast<std::size_t>(k)];
        else
          s1 += corpus.l1_words[static_cast<std::size_t>(sample_concept(topic_a))];
        if (unif(rng) < opt.fp_slot_prob)
          s2 += corpus.fp_surfaces[static_cast<std::size_t>(k)];
        else
          s2 += corpus.l2_words[static_cast<std::size_t>(sample_concept(topic_b))];
      }
      corpus.l1_sentences.push_back(std::move(s1));
      corpus.l2_sentences.push_back(std::move(s2));
    }
  }

  // Designated false-negative probes: frequent concepts, spread out a bit.
  for (int k = 0; k < opt.fn_count; ++k) corpus.fn_concepts.push_back(10 + 5 * k);
  return corpus;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const std::string& line : lines) out << line << "\n";
}

}  // namespace subanchor::testing
