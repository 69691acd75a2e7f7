#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "subanchor/embeddings.hpp"

namespace subanchor {

void save_word2vec(const std::string& path, const EmbeddingMatrix& emb) {
  if (emb.rows.rows() != static_cast<Index>(emb.names.size()))
    throw std::invalid_argument("save_word2vec: name/row count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embedding file: " + path);
  out << emb.rows.rows() << " " << emb.rows.cols() << "\n";
  char buf[32];
  for (Index r = 0; r < emb.rows.rows(); ++r) {
    out << emb.names[static_cast<std::size_t>(r)];
    for (Index c = 0; c < emb.rows.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(emb.rows(r, c)));
      out << buf;
    }
    out << "\n";
  }
}

EmbeddingMatrix load_word2vec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("empty embedding file: " + path);
  std::istringstream hs(header);
  Index count = 0, dim = 0;
  if (!(hs >> count >> dim) || count <= 0 || dim <= 0)
    throw std::runtime_error("bad word2vec header in " + path);

  EmbeddingMatrix emb;
  emb.rows.resize(count, dim);
  emb.names.reserve(static_cast<std::size_t>(count));
  std::string line;
  Index r = 0;
  while (r < count && std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    for (Index c = 0; c < dim; ++c) {
      double v;
      if (!(ls >> v))
        throw std::runtime_error("truncated embedding row " + std::to_string(r) + " in " + path);
      emb.rows(r, c) = static_cast<float>(v);
    }
    emb.names.push_back(std::move(name));
    ++r;
  }
  if (r != count)
    throw std::runtime_error("embedding file " + path + " reports " + std::to_string(count) +
                             " rows but contains " + std::to_string(r));
  return emb;
}

EmbeddingMatrix align_to_vocab(const EmbeddingMatrix& emb, const Vocabulary& vocab) {
  EmbeddingMatrix out;
  out.rows.resize(static_cast<Index>(vocab.size()), emb.rows.cols());
  out.names.reserve(vocab.size());
  std::unordered_map<std::string, Index> pos;
  for (std::size_t i = 0; i < emb.names.size(); ++i)
    pos.emplace(emb.names[i], static_cast<Index>(i));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string& name = vocab.entries[i].subword;
    auto it = pos.find(name);
    if (it == pos.end())
      throw std::runtime_error("embedding file is missing subword: " + name);
    out.rows.row(static_cast<Index>(i)) = emb.rows.row(it->second);
    out.names.push_back(name);
  }
  out.vocab_fingerprint = vocab.fingerprint();
  out.trained_on = emb.trained_on;
  return out;
}

}  // namespace subanchor
