#include "subanchor/eval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "subanchor/csls.hpp"

namespace subanchor {

std::optional<Vec<double>> word_vector(std::string_view word, const Mat<double>& embeddings,
                                       const Segmenter& segmenter,
                                       const NormalizationConfig& norm) {
  std::optional<std::string> normalized = normalize_sentence(word, norm);
  if (!normalized) return std::nullopt;
  Segmentation seg = segmenter.encode(*normalized);
  Vec<double> sum = Vec<double>::Zero(embeddings.cols());
  int used = 0;
  for (TokenId id : seg.token_ids) {
    if (segmenter.vocab().is_special(id)) continue;  // UNK and friends
    sum += embeddings.row(id).transpose();
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

BliTestSet BliTestSet::filter_identical() const {
  BliTestSet out;
  out.filtered_identical = true;
  for (const Item& item : items) {
    bool identical = std::find(item.golds.begin(), item.golds.end(), item.source) !=
                     item.golds.end();
    if (!identical) out.items.push_back(item);
  }
  return out;
}

BliTestSet BliTestSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open test set: " + path);
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::string>> golds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) tab = line.find(' ');
    if (tab == std::string::npos)
      throw std::runtime_error("test set line " + std::to_string(lineno) +
                               " has no source/target separator");
    std::string src = line.substr(0, tab);
    std::string tgt = line.substr(tab + 1);
    auto [it, inserted] = golds.try_emplace(src);
    if (inserted) order.push_back(src);
    it->second.push_back(tgt);
  }
  BliTestSet test;
  for (const std::string& src : order) test.items.push_back({src, golds[src]});
  if (test.items.empty()) throw std::runtime_error("test set is empty: " + path);
  return test;
}

BliResult bli_precision_at_1(const BliTestSet& test, const Mat<double>& src_space,
                             const Vocabulary& src_vocab, const Mat<double>& tgt_space,
                             const Vocabulary& tgt_vocab, int csls_k,
                             const NormalizationConfig& norm) {
  Segmenter src_seg(src_vocab), tgt_seg(tgt_vocab);

  // Candidates: the distinct encodable gold words of the test set.
  std::vector<std::string> candidates;
  std::unordered_map<std::string, Index> candidate_id;
  std::vector<Vec<double>> candidate_vecs;
  for (const BliTestSet::Item& item : test.items) {
    for (const std::string& gold : item.golds) {
      if (candidate_id.count(gold)) continue;
      std::optional<Vec<double>> v = word_vector(gold, tgt_space, tgt_seg, norm);
      if (!v) continue;
      candidate_id.emplace(gold, static_cast<Index>(candidates.size()));
      candidates.push_back(gold);
      candidate_vecs.push_back(std::move(*v));
    }
  }

  BliResult result;
  std::vector<Vec<double>> query_vecs;
  std::vector<std::size_t> query_items;
  for (std::size_t idx = 0; idx < test.items.size(); ++idx) {
    const BliTestSet::Item& item = test.items[idx];
    std::optional<Vec<double>> v = word_vector(item.source, src_space, src_seg, norm);
    bool any_gold = std::any_of(item.golds.begin(), item.golds.end(),
                                [&](const std::string& g) { return candidate_id.count(g) > 0; });
    if (!v || !any_gold) {
      ++result.excluded_unk;
      result.log.push_back({item.source, "", false, true});
      continue;
    }
    query_vecs.push_back(std::move(*v));
    query_items.push_back(idx);
  }
  if (query_vecs.empty()) throw std::runtime_error("bli_precision_at_1: no evaluable pairs");
  if (static_cast<Index>(candidates.size()) <= csls_k)
    throw std::invalid_argument("bli_precision_at_1: K=" + std::to_string(csls_k) +
                                " must be smaller than the candidate count (" +
                                std::to_string(candidates.size()) + ")");

  Mat<double> q(static_cast<Index>(query_vecs.size()), src_space.cols());
  for (std::size_t r = 0; r < query_vecs.size(); ++r)
    q.row(static_cast<Index>(r)) = query_vecs[r].transpose();
  Mat<double> c(static_cast<Index>(candidate_vecs.size()), tgt_space.cols());
  for (std::size_t r = 0; r < candidate_vecs.size(); ++r)
    c.row(static_cast<Index>(r)) = candidate_vecs[r].transpose();

  CslsScorer<double> scorer(q, c, csls_k);
  for (std::size_t r = 0; r < query_items.size(); ++r) {
    const BliTestSet::Item& item = test.items[query_items[r]];
    Index top = scorer.top1(static_cast<Index>(r));
    const std::string& predicted = candidates[static_cast<std::size_t>(top)];
    bool hit = std::find(item.golds.begin(), item.golds.end(), predicted) != item.golds.end();
    result.hits += hit ? 1u : 0u;
    ++result.evaluated;
    result.log.push_back({item.source, predicted, hit, false});
  }
  result.precision_at_1 = static_cast<double>(result.hits) /
                          static_cast<double>(result.evaluated);
  return result;
}

BucketedCorpus bucket_by_fpfn(const SentenceStream& corpus, const MergedVocabulary& merged,
                              const Vocabulary& v1,
                              const SharedPairClassification& classification,
                              std::vector<double> edges) {
  std::sort(edges.begin(), edges.end());
  BucketedCorpus out;
  out.edges = edges;
  double lo = 0;
  for (double e : edges) {
    out.buckets.push_back({lo, e, 0, {}, -1});
    lo = e;
  }
  out.buckets.push_back({lo, 1.0, 0, {}, -1});

  // Flagged surfaces on the source side: false positives plus the L1 members
  // of false-negative anchors.
  std::set<std::string> flagged(classification.false_positives);
  for (const ScoredPair& p : classification.false_negatives)
    flagged.insert(v1.entries[static_cast<std::size_t>(p.i)].subword);

  if (merged.l1_to_joint.size() != v1.size())
    throw std::invalid_argument("bucket_by_fpfn: merged vocabulary does not match the L1 side");

  Segmenter segmenter(v1);
  std::size_t sentence_id = 0;
  corpus.for_each([&](const std::string& sentence) {
    Segmentation seg = segmenter.encode(sentence);
    std::size_t tokens = 0, hits = 0;
    for (TokenId id : seg.token_ids) {
      if (v1.is_special(id)) continue;
      ++tokens;
      if (flagged.count(v1.entries[static_cast<std::size_t>(id)].subword)) ++hits;
    }
    double fraction = tokens == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(tokens);
    std::size_t b = 0;
    while (b + 1 < out.buckets.size() && fraction >= out.buckets[b].hi) ++b;
    ++out.buckets[b].count;
    out.buckets[b].sentence_ids.push_back(sentence_id);
    out.fractions.push_back(fraction);
    ++sentence_id;
  });
  return out;
}

void score_buckets(BucketedCorpus& buckets, const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size() || hypotheses.size() != buckets.fractions.size())
    throw std::invalid_argument("score_buckets: line counts do not match the bucketed corpus");
  for (auto& bucket : buckets.buckets) {
    if (bucket.sentence_ids.empty()) continue;
    std::vector<std::string> hyp, ref;
    for (std::size_t id : bucket.sentence_ids) {
      hyp.push_back(hypotheses[id]);
      ref.push_back(references[id]);
    }
    bucket.bleu = corpus_bleu(hyp, ref);
  }
}

void save_bucket_report(const std::string& path, const BucketedCorpus& buckets) {
  using nlohmann::json;
  json j;
  j["edges"] = buckets.edges;
  json jb = json::array();
  for (const auto& bucket : buckets.buckets) {
    json one{{"lo", bucket.lo}, {"hi", bucket.hi}, {"count", bucket.count}};
    if (bucket.bleu >= 0) one["bleu"] = bucket.bleu;
    jb.push_back(std::move(one));
  }
  j["buckets"] = std::move(jb);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write bucket report: " + path);
  out << j.dump(1) << "\n";
}

}  // namespace subanchor
