#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subanchor/config.hpp"
#include "subanchor/eval.hpp"
#include "subanchor/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonArgs {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "pipeline config file")->required();
  cmd->add_option("--out-dir", args.out_dir, "artifact directory")->required();
  cmd->add_option("--seed", args.seed, "top-level random seed (default 1)");
  cmd->add_flag("--force", args.force, "re-run stages even when cached");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

int run_stage_command(const CommonArgs& args, const std::string& stage) {
  subanchor::PipelineConfig cfg = subanchor::parse_config(args.config);
  subanchor::Pipeline pipeline(cfg, {args.out_dir, args.seed, args.force, false});
  if (stage == "pipeline")
    pipeline.run();
  else
    pipeline.run_subcommand(stage);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilingual subword vocabulary construction via cross-lingual anchoring"};
  app.require_subcommand(1);

  const std::vector<std::string> stage_commands = {
      "learn-vocab", "train-emb", "map",      "align-bitext", "anchor",
      "merge",       "layout",    "eval-bli", "eval-buckets", "pipeline"};
  const std::vector<std::string> descriptions = {
      "learn the per-language subword vocabularies",
      "train monolingual subword embeddings",
      "map the two embedding spaces into a shared space",
      "train the bitext aligner and export subword similarities",
      "extract mutual-argmax anchors and the FP/FN classification",
      "merge the vocabularies for MT (alpha = 2m - n)",
      "build the LM-transfer embedding layout",
      "bilingual lexicon induction with CSLS retrieval",
      "bucket sentences by FP/FN token fraction",
      "run every configured stage end to end"};

  CommonArgs common;
  std::string pipeline_stage;
  for (std::size_t i = 0; i < stage_commands.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(stage_commands[i], descriptions[i]);
    add_common(cmd, common);
    if (stage_commands[i] == "pipeline")
      cmd->add_option("--stage", pipeline_stage, "run a single stage of the pipeline");
  }

  std::string hyp_path, ref_path;
  CLI::App* bleu_cmd = app.add_subcommand("bleu", "corpus BLEU of detokenized text (13a)");
  bleu_cmd->add_option("--hyp", hyp_path, "hypothesis file, one segment per line")->required();
  bleu_cmd->add_option("--ref", ref_path, "reference file, one segment per line")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bleu_cmd->parsed()) {
      double score = subanchor::corpus_bleu(read_lines(hyp_path), read_lines(ref_path));
      std::cout.precision(2);
      std::cout << std::fixed << "BLEU = " << score << "\n";
      return kExitOk;
    }
    for (const std::string& name : stage_commands) {
      if (app.get_subcommand(name)->parsed()) {
        if (name == "pipeline" && !pipeline_stage.empty())
          return run_stage_command(common, pipeline_stage);
        return run_stage_command(common, name);
      }
    }
  } catch (const subanchor::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
