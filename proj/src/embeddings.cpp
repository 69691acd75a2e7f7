#include "subanchor/embeddings.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "subanchor/segmentation.hpp"

namespace subanchor {

namespace {

constexpr int kExpTableSize = 1024;
constexpr float kMaxExp = 6.0f;

const float* exp_table() {
  static const std::vector<float> table = [] {
    std::vector<float> t(kExpTableSize);
    for (int i = 0; i < kExpTableSize; ++i) {
      float x = (static_cast<float>(i) / kExpTableSize * 2 - 1) * kMaxExp;
      float e = std::exp(x);
      t[static_cast<std::size_t>(i)] = e / (e + 1);  // sigmoid
    }
    return t;
  }();
  return table.data();
}

inline float sigmoid(float x) {
  if (x >= kMaxExp) return 1.0f;
  if (x <= -kMaxExp) return 0.0f;
  int idx = static_cast<int>((x + kMaxExp) * (kExpTableSize / (2 * kMaxExp)));
  if (idx >= kExpTableSize) idx = kExpTableSize - 1;
  return exp_table()[idx];
}

// word2vec-style LCG; cheap and reproducible.
inline std::uint64_t next_rand(std::uint64_t& state) {
  state = state * 25214903917ull + 11ull;
  return state;
}

std::vector<TokenId> build_negative_table(const std::vector<double>& freq, double power,
                                          std::size_t table_size) {
  std::vector<TokenId> table;
  table.reserve(table_size);
  double total = 0;
  for (double f : freq) total += std::pow(f, power);
  if (total <= 0) throw std::invalid_argument("train_sgns: corpus has no tokens");
  double cum = 0;
  std::size_t w = 0;
  cum = std::pow(freq[0], power) / total;
  for (std::size_t slot = 0; slot < table_size; ++slot) {
    table.push_back(static_cast<TokenId>(w));
    if (static_cast<double>(slot + 1) / static_cast<double>(table_size) > cum &&
        w + 1 < freq.size()) {
      ++w;
      cum += std::pow(freq[w], power) / total;
    }
  }
  return table;
}

}  // namespace

EmbeddingMatrix train_sgns(const std::vector<std::vector<TokenId>>& corpus,
                           const Vocabulary& vocab, const SgnsOptions& opt, SgnsTrace* trace) {
  if (opt.dim < 8) throw std::invalid_argument("train_sgns: dimension must be >= 8");
  if (opt.epochs < 1) throw std::invalid_argument("train_sgns: epochs must be >= 1");
  const auto vocab_size = static_cast<TokenId>(vocab.size());
  std::vector<double> freq(vocab.size(), 0.0);
  std::int64_t total_tokens = 0;
  for (const auto& sent : corpus) {
    for (TokenId id : sent) {
      if (id < 0 || id >= vocab_size)
        throw std::invalid_argument("train_sgns: token id outside vocabulary");
      freq[static_cast<std::size_t>(id)] += 1;
      ++total_tokens;
    }
  }
  if (total_tokens == 0) throw std::invalid_argument("train_sgns: empty corpus");

  const std::vector<TokenId> neg_table =
      build_negative_table(freq, opt.unigram_power, 1u << 20);

  const Index n = static_cast<Index>(vocab.size());
  const Index d = opt.dim;
  Mat<float> in(n, d), out(n, d);
  out.setZero();
  {
    std::uint64_t state = opt.seed;
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < d; ++c) {
        float u = static_cast<float>((next_rand(state) >> 16) & 0xFFFF) / 65536.0f;
        in(r, c) = (u - 0.5f) / static_cast<float>(d);
      }
  }

  const std::int64_t total_steps = total_tokens * opt.epochs;
  std::atomic<std::int64_t> processed{0};
  std::vector<double> epoch_loss(static_cast<std::size_t>(opt.epochs), 0.0);
  std::vector<std::int64_t> epoch_pairs(static_cast<std::size_t>(opt.epochs), 0);

  const int num_threads = std::max(1, opt.threads);
  auto worker = [&](int tid) {
    std::uint64_t state = opt.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(tid + 1);
    Vec<float> grad_in(d);
    double loss_acc = 0;
    std::int64_t pair_acc = 0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
      loss_acc = 0;
      pair_acc = 0;
      for (std::size_t s = static_cast<std::size_t>(tid); s < corpus.size();
           s += static_cast<std::size_t>(num_threads)) {
        const auto& sent = corpus[s];
        for (std::size_t pos = 0; pos < sent.size(); ++pos) {
          std::int64_t done = processed.fetch_add(1, std::memory_order_relaxed);
          float lr = opt.lr_start *
                     (1.0f - static_cast<float>(done) / static_cast<float>(total_steps + 1));
          if (lr < opt.lr_min) lr = opt.lr_min;
          const TokenId center = sent[pos];
          for (int off = -opt.window; off <= opt.window; ++off) {
            if (off == 0) continue;
            std::ptrdiff_t cpos = static_cast<std::ptrdiff_t>(pos) + off;
            if (cpos < 0 || cpos >= static_cast<std::ptrdiff_t>(sent.size())) continue;
            const TokenId context = sent[static_cast<std::size_t>(cpos)];
            grad_in.setZero();
            for (int k = 0; k <= opt.negatives; ++k) {
              TokenId target;
              float label;
              if (k == 0) {
                target = context;
                label = 1.0f;
              } else {
                target = neg_table[(next_rand(state) >> 16) % neg_table.size()];
                if (target == context) continue;
                label = 0.0f;
              }
              float dot = in.row(center).dot(out.row(target));
              float f = sigmoid(dot);
              loss_acc += -std::log(std::max(1e-7f, label > 0.5f ? f : 1.0f - f));
              float g = (label - f) * lr;
              grad_in += g * out.row(target).transpose();
              out.row(target) += g * in.row(center);
            }
            in.row(center) += grad_in.transpose();
            ++pair_acc;
          }
        }
      }
      if (tid == 0) {
        epoch_loss[static_cast<std::size_t>(epoch)] = loss_acc;
        epoch_pairs[static_cast<std::size_t>(epoch)] = pair_acc;
      }
    }
  };

  if (num_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < num_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  if (trace) {
    trace->epoch_loss.clear();
    for (std::size_t e = 0; e < epoch_loss.size(); ++e)
      trace->epoch_loss.push_back(epoch_loss[e] /
                                  std::max<std::int64_t>(1, epoch_pairs[e]));
  }

  EmbeddingMatrix emb;
  emb.rows = std::move(in);
  emb.names.reserve(vocab.size());
  for (const VocabEntry& e : vocab.entries) emb.names.push_back(e.subword);
  emb.vocab_fingerprint = vocab.fingerprint();
  return emb;
}

EmbeddingMatrix train_sgns(const SentenceStream& corpus, const Vocabulary& vocab,
                           const SgnsOptions& opt, SgnsTrace* trace) {
  EmbeddingMatrix emb = train_sgns(encode_corpus(vocab, corpus), vocab, opt, trace);
  emb.trained_on = corpus.path();
  return emb;
}

}  // namespace subanchor
