#include "subanchor/segmentation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "segmentation_internal.hpp"

namespace subanchor {

namespace {

using detail::strip_marker;
using detail::word_units;
using detail::WordPieces;

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const {
    return std::hash<std::string>()(p.first) * 1000003u ^ std::hash<std::string>()(p.second);
  }
};

using MergeRanks = std::unordered_map<std::pair<std::string, std::string>, std::int32_t, PairHash>;

MergeRanks build_ranks(const Vocabulary& vocab) {
  MergeRanks ranks;
  ranks.reserve(vocab.merges.size());
  for (std::size_t r = 0; r < vocab.merges.size(); ++r)
    ranks.emplace(vocab.merges[r], static_cast<std::int32_t>(r));
  return ranks;
}

// Greedy lowest-rank-first merge application over a word's unit symbols.
WordPieces bpe_segment_word(const Vocabulary& vocab, const MergeRanks& ranks,
                            std::string_view word) {
  std::vector<std::string> syms = word_units(word);
  std::vector<std::pair<std::int32_t, std::int32_t>> spans;
  spans.reserve(syms.size());
  for (std::size_t i = 0; i < syms.size(); ++i) {
    auto u = static_cast<std::int32_t>(i);
    spans.emplace_back(u, u + 1);
  }
  // Unknown base characters block merges across them.
  std::vector<bool> known(syms.size());
  for (std::size_t i = 0; i < syms.size(); ++i) known[i] = vocab.id_of(syms[i]) >= 0;

  while (syms.size() > 1) {
    std::int32_t best_rank = std::numeric_limits<std::int32_t>::max();
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (!known[i] || !known[i + 1]) continue;
      auto it = ranks.find({syms[i], syms[i + 1]});
      if (it != ranks.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == std::numeric_limits<std::int32_t>::max()) break;
    const auto& [left, right] = vocab.merges[static_cast<std::size_t>(best_rank)];
    std::vector<std::string> next_syms;
    std::vector<std::pair<std::int32_t, std::int32_t>> next_spans;
    std::vector<bool> next_known;
    for (std::size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && known[i] && known[i + 1] && syms[i] == left &&
          syms[i + 1] == right) {
        next_syms.push_back(left + right);
        next_spans.emplace_back(spans[i].first, spans[i + 1].second);
        next_known.push_back(true);
        i += 2;
      } else {
        next_syms.push_back(std::move(syms[i]));
        next_spans.push_back(spans[i]);
        next_known.push_back(known[i]);
        ++i;
      }
    }
    syms = std::move(next_syms);
    spans = std::move(next_spans);
    known = std::move(next_known);
  }

  WordPieces out;
  const TokenId unk = vocab.unk_id();
  for (std::size_t i = 0; i < syms.size(); ++i) {
    TokenId id = vocab.id_of(syms[i]);
    out.ids.push_back(id >= 0 ? id : unk);
    out.unit_spans.push_back(spans[i]);
  }
  return out;
}

// Viterbi segmentation under unigram log-probabilities.
WordPieces unigram_segment_word(const Vocabulary& vocab, std::string_view word) {
  const std::vector<std::string> units = word_units(word);
  const std::size_t n = units.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  constexpr double kUnkPenalty = -1e4;
  const int max_len = 16;

  std::vector<double> best(n + 1, kNegInf);
  std::vector<std::int32_t> back(n + 1, -1);     // start position of best last piece
  std::vector<TokenId> back_id(n + 1, -1);
  best[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t lo = j > static_cast<std::size_t>(max_len) ? j - max_len : 0;
    for (std::size_t i = lo; i < j; ++i) {
      if (best[i] == kNegInf) continue;
      std::string piece;
      for (std::size_t k = i; k < j; ++k) piece += units[k];
      TokenId id = vocab.id_of(piece);
      double score;
      if (id >= 0 && !vocab.is_special(id)) {
        score = best[i] + vocab.entries[static_cast<std::size_t>(id)].logprob;
      } else if (j - i == 1) {
        id = vocab.unk_id();
        score = best[i] + kUnkPenalty;
      } else {
        continue;
      }
      if (score > best[j]) {
        best[j] = score;
        back[j] = static_cast<std::int32_t>(i);
        back_id[j] = id;
      }
    }
  }

  WordPieces out;
  std::size_t j = n;
  std::vector<std::pair<TokenId, std::pair<std::int32_t, std::int32_t>>> rev;
  while (j > 0) {
    std::int32_t i = back[j];
    rev.push_back({back_id[j], {i, static_cast<std::int32_t>(j)}});
    j = static_cast<std::size_t>(i);
  }
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    out.ids.push_back(it->first);
    out.unit_spans.push_back(it->second);
  }
  return out;
}

}  // namespace

Vocabulary learn_bpe(const WordCounts& counts, std::size_t m, const SegmenterOptions& opt) {
  if (counts.empty()) throw std::invalid_argument("learn_bpe: empty word counts");

  // Base characters come from every word; coverage is unconditional.
  std::set<std::string> base_set;
  for (const auto& [word, count] : counts) {
    (void)count;
    for (const std::string& u : word_units(word)) base_set.insert(u);
  }
  const std::size_t min_feasible = opt.specials.size() + base_set.size();
  if (m < min_feasible)
    throw std::invalid_argument("learn_bpe: size " + std::to_string(m) +
                                " below minimum feasible size " + std::to_string(min_feasible));

  Vocabulary vocab;
  vocab.scheme = Scheme::kBpe;
  vocab.specials = opt.specials;
  for (const std::string& s : opt.specials) vocab.entries.push_back({s, 0, 0.0});
  for (const std::string& u : base_set) vocab.entries.push_back({u, 0, 0.0});

  std::set<std::string> entry_set(base_set);
  for (const std::string& s : opt.specials) entry_set.insert(s);

  // Words below the frequency floor contribute characters but no merge
  // statistics.
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> words;
  for (const auto& [word, count] : counts)
    if (count >= opt.min_word_freq) words.emplace_back(word_units(word), count);

  while (vocab.entries.size() < m) {
    std::map<std::pair<std::string, std::string>, std::int64_t> pair_counts;
    for (const auto& [syms, count] : words)
      for (std::size_t i = 0; i + 1 < syms.size(); ++i)
        pair_counts[{syms[i], syms[i + 1]}] += count;
    if (pair_counts.empty()) break;

    auto better = [](const std::pair<std::string, std::string>& a,
                     const std::pair<std::string, std::string>& b) {
      std::string sa = a.first + a.second, sb = b.first + b.second;
      auto ka = strip_marker(sa), kb = strip_marker(sb);
      if (ka != kb) return ka < kb;
      return sa < sb;
    };
    std::pair<std::string, std::string> best;
    std::int64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count || (count == best_count && better(pair, best))) {
        best = pair;
        best_count = count;
      }
    }
    if (best_count <= 0) break;

    vocab.merges.push_back(best);
    std::string merged = best.first + best.second;
    if (entry_set.insert(merged).second) vocab.entries.push_back({merged, 0, 0.0});

    for (auto& [syms, count] : words) {
      (void)count;
      for (std::size_t i = 0; i + 1 < syms.size();) {
        if (syms[i] == best.first && syms[i + 1] == best.second) {
          syms[i] = merged;
          syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        } else {
          ++i;
        }
      }
    }
  }
  vocab.rebuild_index();

  // Final per-entry frequencies: segment the full count table with the
  // learned merges.
  MergeRanks ranks = build_ranks(vocab);
  for (const auto& [word, count] : counts) {
    WordPieces pieces = bpe_segment_word(vocab, ranks, word);
    for (TokenId id : pieces.ids) vocab.entries[static_cast<std::size_t>(id)].freq += count;
  }
  return vocab;
}

struct Segmenter::Impl {
  MergeRanks ranks;
  mutable std::unordered_map<std::string, WordPieces> cache;
};

Segmenter::Segmenter(const Vocabulary& vocab) : vocab_(vocab), impl_(std::make_shared<Impl>()) {
  if (vocab.scheme == Scheme::kBpe) impl_->ranks = build_ranks(vocab);
}

Segmentation Segmenter::encode(std::string_view sentence) const {
  Segmentation seg;
  if (sentence.empty()) return seg;

  const std::vector<CodePoint> cps = utf8_decode(sentence);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && cps[i] == ' ') ++i;
    std::size_t j = i;
    std::string word;
    while (j < cps.size() && cps[j] != ' ') utf8_append(word, cps[j++]);
    if (j > i) {
      auto it = impl_->cache.find(word);
      if (it == impl_->cache.end()) {
        WordPieces pieces = vocab_.scheme == Scheme::kBpe
                                ? bpe_segment_word(vocab_, impl_->ranks, word)
                                : unigram_segment_word(vocab_, word);
        it = impl_->cache.emplace(std::move(word), std::move(pieces)).first;
      }
      const WordPieces& pieces = it->second;
      for (std::size_t k = 0; k < pieces.ids.size(); ++k) {
        seg.token_ids.push_back(pieces.ids[k]);
        seg.offsets.emplace_back(static_cast<std::int32_t>(i) + pieces.unit_spans[k].first,
                                 static_cast<std::int32_t>(i) + pieces.unit_spans[k].second);
      }
    }
    i = j;
  }
  return seg;
}

Segmentation encode(const Vocabulary& vocab, std::string_view sentence) {
  return Segmenter(vocab).encode(sentence);
}

std::string decode(const Vocabulary& vocab, const std::vector<TokenId>& token_ids) {
  std::string out;
  for (TokenId id : token_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab.entries.size())
      throw std::out_of_range("decode: token id " + std::to_string(id) + " out of range");
    std::string_view surface = vocab.entries[static_cast<std::size_t>(id)].subword;
    std::string_view stripped = strip_marker(surface);
    if (stripped.size() != surface.size() && !out.empty()) out.push_back(' ');
    out += stripped;
  }
  return out;
}

std::vector<std::vector<TokenId>> encode_corpus(const Vocabulary& vocab,
                                                const SentenceStream& stream) {
  Segmenter segmenter(vocab);
  std::vector<std::vector<TokenId>> out;
  stream.for_each([&](const std::string& sentence) {
    out.push_back(segmenter.encode(sentence).token_ids);
  });
  return out;
}

}  // namespace subanchor
