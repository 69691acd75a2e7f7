#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subanchor/config.hpp"

namespace subanchor {

struct PipelineOptions {
  std::string out_dir;
  std::uint64_t seed = 1;
  bool force = false;
  bool quiet = false;
};

// Orchestrates the stages behind the CLI subcommands. Artifacts live in
// out_dir; completed stages are cached via the manifest (config-section hash
// plus input-content hashes) and skipped on re-runs. One pipeline per
// artifact directory (lock file).
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, PipelineOptions opt);
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  // Full run: vocabularies, embeddings, mapping and/or bitext alignment,
  // anchors, the configured build, and any configured evaluations.
  void run();

  // One CLI subcommand worth of work: learn-vocab, train-emb, map,
  // align-bitext, anchor, merge, layout, eval-bli, eval-buckets.
  void run_subcommand(const std::string& name);

  const std::vector<std::string>& executed_stages() const { return executed_; }
  const std::vector<std::string>& cached_stages() const { return cached_; }

  std::string artifact_path(const std::string& name) const;

 private:
  struct Stage {
    std::string name;
    std::string fingerprint;
    // Required input files with the subcommand that produces each (empty for
    // user-supplied files).
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::string> outputs;  // artifact files produced
    std::function<void()> body;
  };

  void execute(const Stage& stage);
  bool cached(const Stage& stage) const;
  void record(const Stage& stage);
  std::string stage_fingerprint(const std::string& stage,
                                const std::vector<std::string>& sections,
                                const std::vector<std::string>& input_files) const;

  Stage learn_vocab_stage(bool first_language) const;
  Stage train_emb_stage(bool first_language) const;
  Stage map_stage() const;
  Stage align_bitext_stage() const;
  Stage anchor_stage() const;
  Stage merge_stage() const;
  Stage layout_stage() const;
  Stage eval_bli_stage() const;
  Stage eval_buckets_stage() const;

  PipelineConfig cfg_;
  PipelineOptions opt_;
  std::vector<std::string> executed_;
  std::vector<std::string> cached_;
  bool lock_held_ = false;
};

std::string hash_file(const std::string& path);

}  // namespace subanchor
