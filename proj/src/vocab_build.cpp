#include "subanchor/vocab_build.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "subanchor/hash.hpp"
#include "subanchor/simplex.hpp"

namespace subanchor {

MergedVocabulary merge_for_mt(const Vocabulary& v1, const Vocabulary& v2,
                              const AnchorDictionary& anchors, std::size_t n) {
  const std::size_t m = v1.size();
  if (v2.size() != m)
    throw std::invalid_argument("merge_for_mt: vocabularies must have equal size, got " +
                                std::to_string(m) + " and " + std::to_string(v2.size()));
  if (n >= 2 * m)
    throw std::invalid_argument("merge_for_mt: joint size " + std::to_string(n) +
                                " >= 2m = " + std::to_string(2 * m) +
                                " leaves no anchors to merge (alpha = 2m - n <= 0)");
  const std::size_t alpha = 2 * m - n;
  if (alpha > m)
    throw std::invalid_argument("merge_for_mt: joint size " + std::to_string(n) +
                                " below the per-language size m = " + std::to_string(m));
  if (anchors.size() < alpha)
    throw std::invalid_argument(
        "merge_for_mt: need alpha = " + std::to_string(alpha) + " anchors but only " +
        std::to_string(anchors.size()) + " are available; smallest achievable joint size is n = " +
        std::to_string(2 * m - anchors.size()));

  std::vector<ScoredPair> top(anchors.pairs.begin(),
                              anchors.pairs.begin() + static_cast<std::ptrdiff_t>(alpha));
  std::sort(top.begin(), top.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  MergedVocabulary merged;
  merged.spec = {m, n, alpha};
  merged.l1_to_joint.assign(m, -1);
  merged.l2_to_joint.assign(m, -1);

  for (const ScoredPair& p : top) {
    TokenId joint = static_cast<TokenId>(merged.entries.size());
    merged.entries.push_back({MergedEntry::Origin::kShared,
                              v1.entries[static_cast<std::size_t>(p.i)].subword,
                              v2.entries[static_cast<std::size_t>(p.j)].subword, p.i, p.j,
                              p.score});
    merged.l1_to_joint[static_cast<std::size_t>(p.i)] = joint;
    merged.l2_to_joint[static_cast<std::size_t>(p.j)] = joint;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (merged.l1_to_joint[i] >= 0) continue;
    TokenId joint = static_cast<TokenId>(merged.entries.size());
    merged.entries.push_back({MergedEntry::Origin::kL1Only, v1.entries[i].subword, "",
                              static_cast<TokenId>(i), -1, 0.0});
    merged.l1_to_joint[i] = joint;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (merged.l2_to_joint[j] >= 0) continue;
    TokenId joint = static_cast<TokenId>(merged.entries.size());
    merged.entries.push_back({MergedEntry::Origin::kL2Only, "", v2.entries[j].subword, -1,
                              static_cast<TokenId>(j), 0.0});
    merged.l2_to_joint[j] = joint;
  }
  return merged;
}

namespace {

const char* origin_name(MergedEntry::Origin o) {
  switch (o) {
    case MergedEntry::Origin::kShared: return "shared";
    case MergedEntry::Origin::kL1Only: return "l1";
    default: return "l2";
  }
}

MergedEntry::Origin origin_from_name(const std::string& s) {
  if (s == "shared") return MergedEntry::Origin::kShared;
  if (s == "l1") return MergedEntry::Origin::kL1Only;
  if (s == "l2") return MergedEntry::Origin::kL2Only;
  throw std::runtime_error("unknown merged-entry origin: " + s);
}

}  // namespace

void save_merged(const std::string& path, const MergedVocabulary& merged) {
  using nlohmann::json;
  json j;
  j["m"] = merged.spec.m;
  j["n"] = merged.spec.n;
  j["alpha"] = merged.spec.alpha;
  json entries = json::array();
  for (const MergedEntry& e : merged.entries) {
    json je{{"origin", origin_name(e.origin)}};
    if (!e.l1_surface.empty() || e.origin != MergedEntry::Origin::kL2Only) {
      je["l1"] = e.l1_surface;
      je["l1_id"] = e.l1_id;
    }
    if (!e.l2_surface.empty() || e.origin != MergedEntry::Origin::kL1Only) {
      je["l2"] = e.l2_surface;
      je["l2_id"] = e.l2_id;
    }
    if (e.origin == MergedEntry::Origin::kShared) je["score"] = e.score;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  j["id_map_l1"] = merged.l1_to_joint;
  j["id_map_l2"] = merged.l2_to_joint;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write merged vocabulary: " + path);
  out << j.dump(1) << "\n";
}

MergedVocabulary load_merged(const std::string& path) {
  using nlohmann::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open merged vocabulary: " + path);
  json j = json::parse(in);
  MergedVocabulary merged;
  merged.spec = {j.at("m").get<std::size_t>(), j.at("n").get<std::size_t>(),
                 j.at("alpha").get<std::size_t>()};
  for (const json& je : j.at("entries")) {
    MergedEntry e;
    e.origin = origin_from_name(je.at("origin").get<std::string>());
    if (je.contains("l1")) {
      e.l1_surface = je.at("l1").get<std::string>();
      e.l1_id = je.at("l1_id").get<TokenId>();
    }
    if (je.contains("l2")) {
      e.l2_surface = je.at("l2").get<std::string>();
      e.l2_id = je.at("l2_id").get<TokenId>();
    }
    if (je.contains("score")) e.score = je.at("score").get<double>();
    merged.entries.push_back(std::move(e));
  }
  merged.l1_to_joint = j.at("id_map_l1").get<std::vector<TokenId>>();
  merged.l2_to_joint = j.at("id_map_l2").get<std::vector<TokenId>>();
  return merged;
}

EmbeddingLayout build_lm_layout(const Vocabulary& v1, const Vocabulary& v2,
                                const AnchorDictionary& anchors, const EmbeddingMatrix& e1,
                                const SimilarityMatrix* similarity, LayoutMode mode,
                                std::uint64_t seed) {
  if (mode == LayoutMode::kShareAlign && similarity == nullptr)
    throw std::invalid_argument("build_lm_layout: share+align mode requires a similarity matrix");
  if (e1.rows.rows() != static_cast<Index>(v1.size()))
    throw std::invalid_argument("build_lm_layout: embedding rows do not match the L1 vocabulary");
  if (similarity != nullptr && (similarity->s.rows() != static_cast<Index>(v1.size()) ||
                                similarity->s.cols() != static_cast<Index>(v2.size())))
    throw std::invalid_argument("build_lm_layout: similarity matrix shape mismatch");

  EmbeddingLayout layout;
  layout.rows.resize(v2.size());

  std::vector<TokenId> tied_to(v2.size(), -1);
  for (const ScoredPair& p : anchors.pairs)
    if (tied_to[static_cast<std::size_t>(p.j)] < 0) tied_to[static_cast<std::size_t>(p.j)] = p.i;
  // Special tokens keep their pretrained L1 rows.
  for (const std::string& name : v2.specials) {
    TokenId j = v2.special_id(name), i = v1.special_id(name);
    if (j >= 0 && i >= 0) tied_to[static_cast<std::size_t>(j)] = i;
  }

  for (std::size_t j = 0; j < v2.size(); ++j) {
    LayoutRow& row = layout.rows[j];
    if (tied_to[j] >= 0) {
      row.kind = LayoutRow::Kind::kTied;
      row.tied_l1 = tied_to[j];
      ++layout.tied;
      continue;
    }
    if (mode == LayoutMode::kShareAlign) {
      Vec<double> column = similarity->s.col(static_cast<Index>(j));
      if (column.maxCoeff() > column.minCoeff() || column.maxCoeff() > 0) {
        Vec<double> weights = sparsemax(column);
        int support = 0;
        Vec<float> init = Vec<float>::Zero(e1.rows.cols());
        for (Index i = 0; i < weights.size(); ++i) {
          if (weights(i) <= 0) continue;
          ++support;
          init += static_cast<float>(weights(i)) * e1.rows.row(i).transpose();
        }
        if (support > 0) {
          row.kind = LayoutRow::Kind::kInitialized;
          row.init = std::move(init);
          row.sparse_support = support;
          ++layout.initialized;
          continue;
        }
      }
    }
    row.kind = LayoutRow::Kind::kRandom;
    row.random_seed = fanout_seed(seed, "layout-random", std::to_string(j));
    ++layout.random;
  }

  layout.sharing_percent =
      100.0 * static_cast<double>(layout.tied) / static_cast<double>(v2.size());
  layout.sharing_percent_rounded = static_cast<int>(std::llround(layout.sharing_percent));
  return layout;
}

void save_layout(const std::string& path, const EmbeddingLayout& layout, const Vocabulary& v2,
                 LayoutMode mode) {
  using nlohmann::json;
  json j;
  j["mode"] = mode == LayoutMode::kShareOnly ? "share-only" : "share+align";
  j["sharing_percent"] = layout.sharing_percent;
  j["sharing_percent_rounded"] = layout.sharing_percent_rounded;
  j["counts"] = {{"tied", layout.tied},
                 {"initialized", layout.initialized},
                 {"random", layout.random}};
  j["random_init"] = {{"distribution", "normal"}, {"std", 0.02}};
  json rows = json::object();
  for (std::size_t r = 0; r < layout.rows.size(); ++r) {
    const LayoutRow& row = layout.rows[r];
    json jr;
    switch (row.kind) {
      case LayoutRow::Kind::kTied:
        jr = {{"tied", row.tied_l1}};
        break;
      case LayoutRow::Kind::kInitialized: {
        std::vector<float> vals(row.init.data(), row.init.data() + row.init.size());
        jr = {{"init", vals}, {"support", row.sparse_support}};
        break;
      }
      case LayoutRow::Kind::kRandom:
        jr = {{"random", row.random_seed}};
        break;
    }
    rows[v2.entries[r].subword] = std::move(jr);
  }
  j["rows"] = std::move(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write layout file: " + path);
  out << j.dump(1) << "\n";
}

Mat<float> materialize_layout(const EmbeddingLayout& layout, const EmbeddingMatrix& e1) {
  Mat<float> out(static_cast<Index>(layout.rows.size()), e1.rows.cols());
  for (std::size_t r = 0; r < layout.rows.size(); ++r) {
    const LayoutRow& row = layout.rows[r];
    switch (row.kind) {
      case LayoutRow::Kind::kTied:
        out.row(static_cast<Index>(r)) = e1.rows.row(row.tied_l1);
        break;
      case LayoutRow::Kind::kInitialized:
        out.row(static_cast<Index>(r)) = row.init.transpose();
        break;
      case LayoutRow::Kind::kRandom: {
        std::mt19937_64 rng(row.random_seed);
        std::normal_distribution<float> normal(0.0f, 0.02f);
        for (Index c = 0; c < out.cols(); ++c) out(static_cast<Index>(r), c) = normal(rng);
        break;
      }
    }
  }
  return out;
}

}  // namespace subanchor
