#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subanchor/anchoring.hpp"
#include "subanchor/corpus.hpp"
#include "subanchor/vocabulary.hpp"

namespace subanchor {

enum class BuildMode { kMtMerge, kLmShareOnly, kLmShareAlign };

std::string build_mode_name(BuildMode m);
BuildMode build_mode_from_name(std::string_view name);

struct PipelineConfig {
  // [corpus]
  std::string l1_path;
  std::string l2_path;
  std::string l1_lang = "l1";
  std::string l2_lang = "l2";
  std::string bitext_l1;  // optional parallel data
  std::string bitext_l2;
  NormalizationConfig norm;

  // [segmentation]
  Scheme scheme = Scheme::kBpe;
  std::size_t vocab_size = 0;  // m
  std::int64_t min_word_freq = 2;
  std::vector<std::string> specials = kDefaultSpecials;

  // [embeddings]
  int dim = 1024;
  int window = 5;
  int negatives = 10;
  int epochs = 5;
  int threads = 1;

  // [mapping]
  int map_max_iters = 100;
  int induction_vocab = 4000;
  int csls_k = 10;

  // [anchoring]
  SelectionPolicy policy;
  std::string anchor_source = "mapping";  // "mapping" | "bitext"

  // [build]
  BuildMode mode = BuildMode::kMtMerge;
  std::size_t joint_size = 0;  // n, mt-merge only

  // [eval] (all optional)
  std::string bli_test;
  bool bli_filter_identical = false;
  std::vector<double> bucket_edges = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::string bucket_hyp;
  std::string bucket_ref;

  bool operator==(const PipelineConfig&) const;
};

// Key-value text format with [sections]. Collects every problem instead of
// stopping at the first; throws ConfigError carrying the full list.
struct ConfigError : std::runtime_error {
  std::vector<std::string> problems;
  explicit ConfigError(std::vector<std::string> list);
};

PipelineConfig parse_config(const std::string& path);
PipelineConfig parse_config_text(std::string_view text, const std::string& origin = "<memory>");

// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const PipelineConfig& cfg);

// Semantic checks (sizes, modes, path existence). Returns all problems.
std::vector<std::string> validate_config(const PipelineConfig& cfg);

// Canonical fingerprint of one [section], for stage cache keys.
std::string config_section_fingerprint(const PipelineConfig& cfg, const std::string& section);

}  // namespace subanchor
