#include "subanchor/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "subanchor/hash.hpp"

namespace subanchor {

using nlohmann::json;

std::string scheme_name(Scheme s) { return s == Scheme::kBpe ? "bpe" : "unigram"; }

Scheme scheme_from_name(std::string_view name) {
  if (name == "bpe") return Scheme::kBpe;
  if (name == "unigram") return Scheme::kUnigram;
  throw std::invalid_argument("unknown segmentation scheme: " + std::string(name));
}

TokenId Vocabulary::id_of(std::string_view subword) const {
  auto it = index_.find(std::string(subword));
  return it == index_.end() ? -1 : it->second;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [it, inserted] = index_.emplace(entries[i].subword, static_cast<TokenId>(i));
    if (!inserted)
      throw std::runtime_error("duplicate vocabulary entry: " + entries[i].subword);
  }
}

std::vector<TokenId> Vocabulary::ids_by_frequency() const {
  std::vector<TokenId> ids;
  ids.reserve(entries.size());
  for (std::size_t i = specials.size(); i < entries.size(); ++i)
    ids.push_back(static_cast<TokenId>(i));
  std::stable_sort(ids.begin(), ids.end(), [&](TokenId a, TokenId b) {
    return entries[static_cast<std::size_t>(a)].freq > entries[static_cast<std::size_t>(b)].freq;
  });
  return ids;
}

std::string Vocabulary::fingerprint() const {
  std::uint64_t h = fnv1a64(scheme_name(scheme));
  h = fnv1a64(language, h);
  for (const VocabEntry& e : entries) {
    h = fnv1a64(e.subword, h);
    h = fnv1a64(std::to_string(e.freq), h);
  }
  return hex64(h);
}

void Vocabulary::save(const std::string& path) const {
  json j;
  j["scheme"] = scheme_name(scheme);
  j["language"] = language;
  j["specials"] = specials;
  json jentries = json::array();
  for (const VocabEntry& e : entries) {
    json je{{"subword", e.subword}, {"freq", e.freq}};
    if (scheme == Scheme::kUnigram) je["logprob"] = e.logprob;
    jentries.push_back(std::move(je));
  }
  j["entries"] = std::move(jentries);
  if (scheme == Scheme::kBpe) {
    json jmerges = json::array();
    for (const auto& [l, r] : merges) jmerges.push_back(json::array({l, r}));
    j["merges"] = std::move(jmerges);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary file: " + path);
  out << j.dump(1) << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  json j = json::parse(in);
  Vocabulary v;
  v.scheme = scheme_from_name(j.at("scheme").get<std::string>());
  v.language = j.at("language").get<std::string>();
  v.specials = j.at("specials").get<std::vector<std::string>>();
  for (const json& je : j.at("entries")) {
    VocabEntry e;
    e.subword = je.at("subword").get<std::string>();
    e.freq = je.at("freq").get<std::int64_t>();
    if (je.contains("logprob")) e.logprob = je.at("logprob").get<double>();
    v.entries.push_back(std::move(e));
  }
  if (j.contains("merges")) {
    for (const json& jm : j.at("merges"))
      v.merges.emplace_back(jm.at(0).get<std::string>(), jm.at(1).get<std::string>());
  }
  v.rebuild_index();
  return v;
}

}  // namespace subanchor
