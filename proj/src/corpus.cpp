#include "subanchor/corpus.hpp"

#include <fstream>
#include <stdexcept>

#include "subanchor/text.hpp"

namespace subanchor {

std::optional<std::string> normalize_sentence(std::string_view raw, const NormalizationConfig& cfg) {
  std::vector<CodePoint> cps = utf8_decode(raw);
  if (cfg.unicode_nfc) compose_canonical(cps);
  if (cfg.lowercase) {
    for (CodePoint& cp : cps) cp = lowercase(cp);
  }

  std::string out;
  out.reserve(raw.size() + 8);
  bool pending_space = false;
  bool at_start = true;
  auto emit = [&](CodePoint cp) {
    if (pending_space && !at_start) out.push_back(' ');
    pending_space = false;
    at_start = false;
    utf8_append(out, cp);
  };
  for (CodePoint cp : cps) {
    if (is_whitespace(cp)) {
      pending_space = true;
    } else if (cfg.punctuation_split && is_punctuation(cp)) {
      pending_space = true;
      emit(cp);
      pending_space = true;
    } else {
      emit(cp);
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

SentenceStream::SentenceStream(std::string path, std::string language_tag, NormalizationConfig cfg)
    : path_(std::move(path)), language_(std::move(language_tag)), cfg_(cfg) {}

SentenceStream::SentenceStream(std::vector<std::string> lines, std::string language_tag,
                               NormalizationConfig cfg)
    : lines_(std::move(lines)), language_(std::move(language_tag)), cfg_(cfg) {}

void SentenceStream::for_each(const std::function<void(const std::string&)>& fn) const {
  stats_ = CorpusStats{};
  auto handle = [&](const std::string& raw) {
    ++stats_.sentences_read;
    std::optional<std::string> norm = normalize_sentence(raw, cfg_);
    if (!norm) {
      ++stats_.dropped_empty;
      return;
    }
    ++stats_.sentences_kept;
    fn(*norm);
  };
  if (!path_.empty()) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path_);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      handle(line);
    }
  } else {
    for (const std::string& line : lines_) handle(line);
  }
}

std::vector<std::string> SentenceStream::collect() const {
  std::vector<std::string> out;
  for_each([&](const std::string& s) { out.push_back(s); });
  return out;
}

std::vector<std::string> split_words(std::string_view sentence) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && sentence[i] == ' ') ++i;
    std::size_t j = i;
    while (j < sentence.size() && sentence[j] != ' ') ++j;
    if (j > i) words.emplace_back(sentence.substr(i, j - i));
    i = j;
  }
  return words;
}

WordCounts word_counts(const SentenceStream& stream) {
  WordCounts counts;
  stream.for_each([&](const std::string& sentence) {
    for (const std::string& w : split_words(sentence)) ++counts[w];
  });
  if (counts.empty()) throw std::runtime_error("word_counts: empty sentence stream");
  return counts;
}

void merge_counts(WordCounts& into, const WordCounts& from) {
  for (const auto& [word, count] : from) into[word] += count;
}

}  // namespace subanchor
