#include "subanchor/anchoring.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace subanchor {

SimilarityMatrix cosine_similarity_matrix(const Mat<double>& x_mapped,
                                          const Mat<double>& z_mapped) {
  if (x_mapped.cols() != z_mapped.cols())
    throw std::invalid_argument("cosine_similarity_matrix: dimension mismatch");
  Mat<double> xn = x_mapped, zn = z_mapped;
  for (Index r = 0; r < xn.rows(); ++r) {
    double n = xn.row(r).norm();
    if (n > 0) xn.row(r) /= n;
    else xn.row(r).setZero();
  }
  for (Index r = 0; r < zn.rows(); ++r) {
    double n = zn.row(r).norm();
    if (n > 0) zn.row(r) /= n;
    else zn.row(r).setZero();
  }
  SimilarityMatrix sim;
  sim.s = xn * zn.transpose();
  sim.kind = SimilarityMatrix::Kind::kCosine;
  return sim;
}

AnchorDictionary select_anchors(const std::vector<ScoredPair>& pairs,
                                const SelectionPolicy& policy) {
  std::vector<ScoredPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  AnchorDictionary out;
  switch (policy.kind) {
    case SelectionPolicy::Kind::kAll:
      out.pairs = std::move(sorted);
      break;
    case SelectionPolicy::Kind::kTopK:
      if (policy.top_k > sorted.size())
        throw std::invalid_argument("select_anchors: requested " + std::to_string(policy.top_k) +
                                    " anchors but only " + std::to_string(sorted.size()) +
                                    " mutual pairs are available");
      out.pairs.assign(sorted.begin(),
                       sorted.begin() + static_cast<std::ptrdiff_t>(policy.top_k));
      break;
    case SelectionPolicy::Kind::kMinScore:
      for (const ScoredPair& p : sorted)
        if (p.score >= policy.min_score) out.pairs.push_back(p);
      out.threshold_used = policy.min_score;
      break;
  }
  if (policy.kind != SelectionPolicy::Kind::kMinScore)
    out.threshold_used = out.pairs.empty() ? 0.0 : out.pairs.back().score;
  return out;
}

SharedPairClassification classify_shared_pairs(const AnchorDictionary& anchors,
                                               const Vocabulary& v1, const Vocabulary& v2) {
  SharedPairClassification out;
  std::unordered_map<TokenId, const ScoredPair*> by_l1, by_l2;
  for (const ScoredPair& p : anchors.pairs) {
    by_l1.emplace(p.i, &p);
    by_l2.emplace(p.j, &p);
  }
  for (const ScoredPair& p : anchors.pairs) {
    const std::string& s1 = v1.entries[static_cast<std::size_t>(p.i)].subword;
    const std::string& s2 = v2.entries[static_cast<std::size_t>(p.j)].subword;
    if (v1.is_special(p.i) || v2.is_special(p.j)) continue;
    if (s1 == s2)
      out.true_shared.push_back(p);
    else
      out.false_negatives.push_back(p);
  }
  for (std::size_t i1 = v1.specials.size(); i1 < v1.entries.size(); ++i1) {
    const std::string& surface = v1.entries[i1].subword;
    TokenId j2 = v2.id_of(surface);
    if (j2 < 0 || v2.is_special(j2)) continue;
    const TokenId i = static_cast<TokenId>(i1);
    auto a1 = by_l1.find(i);
    auto a2 = by_l2.find(j2);
    if (a1 != by_l1.end() && a1->second->j == j2) continue;  // anchored to itself
    if (a1 != by_l1.end() || a2 != by_l2.end())
      out.identical_reclassified_fn.insert(surface);
    else
      out.false_positives.insert(surface);
  }
  return out;
}

AblationSets ablation_anchor_sets(const SharedPairClassification& classification,
                                  const AnchorDictionary& anchors, const Vocabulary& v1,
                                  const Vocabulary& v2) {
  AblationSets out;
  for (std::size_t i1 = v1.specials.size(); i1 < v1.entries.size(); ++i1) {
    const std::string& surface = v1.entries[i1].subword;
    TokenId j2 = v2.id_of(surface);
    if (j2 < 0 || v2.is_special(j2)) continue;
    IdPair pair{static_cast<TokenId>(i1), j2};
    out.joint.push_back(pair);
    if (!classification.false_positives.count(surface)) out.minus_fp.push_back(pair);
    if (!classification.identical_reclassified_fn.count(surface)) out.minus_fn.push_back(pair);
  }
  for (const ScoredPair& p : classification.false_negatives)
    out.minus_fn.push_back({p.i, p.j});
  for (const ScoredPair& p : anchors.pairs) {
    if (v1.is_special(p.i) || v2.is_special(p.j)) continue;
    out.anchored.push_back({p.i, p.j});
  }
  return out;
}

void save_anchors(const std::string& path, const AnchorDictionary& anchors, const Vocabulary& v1,
                  const Vocabulary& v2) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write anchor file: " + path);
  out << "src_subword\ttgt_subword\tscore\trank\n";
  char buf[32];
  for (std::size_t r = 0; r < anchors.pairs.size(); ++r) {
    const ScoredPair& p = anchors.pairs[r];
    std::snprintf(buf, sizeof(buf), "%.8f", p.score);
    out << v1.entries[static_cast<std::size_t>(p.i)].subword << '\t'
        << v2.entries[static_cast<std::size_t>(p.j)].subword << '\t' << buf << '\t' << r << "\n";
  }
}

AnchorDictionary load_anchors(const std::string& path, const Vocabulary& v1,
                              const Vocabulary& v2) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open anchor file: " + path);
  AnchorDictionary anchors;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string src, tgt, score_str, rank_str;
    std::getline(ls, src, '\t');
    std::getline(ls, tgt, '\t');
    std::getline(ls, score_str, '\t');
    std::getline(ls, rank_str, '\t');
    TokenId i = v1.id_of(src), j = v2.id_of(tgt);
    if (i < 0 || j < 0)
      throw std::runtime_error("anchor file references unknown subword: " + src + " / " + tgt);
    anchors.pairs.push_back({i, j, std::stod(score_str)});
  }
  if (!anchors.pairs.empty()) anchors.threshold_used = anchors.pairs.back().score;
  return anchors;
}

void save_classification(const std::string& path,
                         const SharedPairClassification& classification, const Vocabulary& v1,
                         const Vocabulary& v2) {
  using nlohmann::json;
  json j;
  j["counts"] = {{"true_shared", classification.true_shared.size()},
                 {"false_positives", classification.false_positives.size()},
                 {"false_negatives", classification.false_negatives.size()},
                 {"identical_reclassified_fn", classification.identical_reclassified_fn.size()}};
  auto surface = [](const Vocabulary& v, TokenId id) {
    return v.entries[static_cast<std::size_t>(id)].subword;
  };
  json fp = json::array();
  for (const std::string& s : classification.false_positives) fp.push_back(s);
  json fn = json::array();
  for (const ScoredPair& p : classification.false_negatives)
    fn.push_back({{"src", surface(v1, p.i)}, {"tgt", surface(v2, p.j)}, {"score", p.score}});
  json ts = json::array();
  for (const ScoredPair& p : classification.true_shared)
    ts.push_back({{"surface", surface(v1, p.i)}, {"score", p.score}});
  j["false_positives"] = std::move(fp);
  j["false_negatives"] = std::move(fn);
  j["true_shared"] = std::move(ts);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write classification file: " + path);
  out << j.dump(1) << "\n";
}

}  // namespace subanchor
