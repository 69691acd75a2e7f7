#include "subanchor/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "subanchor/bitext_align.hpp"
#include "subanchor/embeddings.hpp"
#include "subanchor/eval.hpp"
#include "subanchor/hash.hpp"
#include "subanchor/mapping.hpp"
#include "subanchor/segmentation.hpp"
#include "subanchor/vocab_build.hpp"

namespace subanchor {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  return hex64(h);
}

namespace {

json load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return json{{"stages", json::object()}};
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return json{{"stages", json::object()}};
  }
}

void store_manifest(const std::string& path, const json& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << manifest.dump(1) << "\n";
}

Mat<double> to_double(const Mat<float>& m) { return m.cast<double>(); }

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, PipelineOptions opt)
    : cfg_(std::move(cfg)), opt_(std::move(opt)) {
  if (opt_.out_dir.empty()) throw std::invalid_argument("pipeline: out_dir is required");
  std::vector<std::string> problems = validate_config(cfg_);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  fs::create_directories(opt_.out_dir);
  const std::string lock = artifact_path(".lock");
  if (fs::exists(lock))
    throw std::runtime_error("artifact directory is locked by another run: " + lock +
                             " (remove the file if that run is dead)");
  std::ofstream(lock) << "pid unknown\n";
  lock_held_ = true;

  json manifest = load_manifest(artifact_path("manifest.json"));
  manifest["seed"] = opt_.seed;
  manifest["config_hash"] = hex64(fnv1a64(serialize_config(cfg_)));
  manifest["version"] = 1;
  store_manifest(artifact_path("manifest.json"), manifest);
}

Pipeline::~Pipeline() {
  if (lock_held_) {
    std::error_code ec;
    fs::remove(artifact_path(".lock"), ec);
  }
}

std::string Pipeline::artifact_path(const std::string& name) const {
  return (fs::path(opt_.out_dir) / name).string();
}

std::string Pipeline::stage_fingerprint(const std::string& stage,
                                        const std::vector<std::string>& sections,
                                        const std::vector<std::string>& input_files) const {
  std::string key = stage + "|seed=" + std::to_string(opt_.seed);
  for (const std::string& s : sections) key += "|" + s + "=" + config_section_fingerprint(cfg_, s);
  for (const std::string& f : input_files) {
    key += "|" + f + "=";
    key += fs::exists(f) ? hash_file(f) : std::string("missing");
  }
  return hex64(fnv1a64(key));
}

namespace {

std::vector<std::string> input_paths(
    const std::vector<std::pair<std::string, std::string>>& inputs) {
  std::vector<std::string> paths;
  for (const auto& [path, producer] : inputs) paths.push_back(path);
  return paths;
}

}  // namespace

bool Pipeline::cached(const Stage& stage) const {
  if (opt_.force) return false;
  json manifest = load_manifest(artifact_path("manifest.json"));
  if (!manifest["stages"].contains(stage.name)) return false;
  const json& entry = manifest["stages"][stage.name];
  if (entry.value("fingerprint", "") != stage.fingerprint) return false;
  for (const std::string& out : stage.outputs) {
    if (!fs::exists(out)) return false;
    if (!entry["outputs"].contains(out)) return false;
    if (entry["outputs"][out].get<std::string>() != hash_file(out)) return false;
  }
  return true;
}

void Pipeline::record(const Stage& stage) {
  json manifest = load_manifest(artifact_path("manifest.json"));
  json outputs = json::object();
  for (const std::string& out : stage.outputs) outputs[out] = hash_file(out);
  manifest["stages"][stage.name] = {{"fingerprint", stage.fingerprint}, {"outputs", outputs}};
  store_manifest(artifact_path("manifest.json"), manifest);
}

void Pipeline::execute(const Stage& stage) {
  for (const auto& [input, producer] : stage.inputs) {
    if (fs::exists(input)) continue;
    if (producer.empty()) throw std::runtime_error("missing input file: " + input);
    throw std::runtime_error("missing artifact " + input + " (produced by the '" + producer +
                             "' subcommand)");
  }
  if (cached(stage)) {
    cached_.push_back(stage.name);
    if (!opt_.quiet) std::cout << "[stage] " << stage.name << ": cached\n";
    return;
  }
  if (!opt_.quiet) std::cout << "[stage] " << stage.name << ": running\n";
  stage.body();
  record(stage);
  executed_.push_back(stage.name);
}

Pipeline::Stage Pipeline::learn_vocab_stage(bool first_language) const {
  const std::string lang = first_language ? cfg_.l1_lang : cfg_.l2_lang;
  const std::string corpus = first_language ? cfg_.l1_path : cfg_.l2_path;
  Stage st;
  st.name = "learn-vocab-" + lang;
  st.inputs = {{corpus, ""}};
  st.outputs = {artifact_path("vocab." + lang + ".json")};
  st.fingerprint = stage_fingerprint(st.name, {"corpus", "segmentation"}, {corpus});
  st.body = [this, lang, corpus] {
    SentenceStream stream(corpus, lang, cfg_.norm);
    WordCounts counts = word_counts(stream);
    SegmenterOptions opt{cfg_.specials, cfg_.min_word_freq};
    Vocabulary vocab;
    if (cfg_.scheme == Scheme::kBpe) {
      vocab = learn_bpe(counts, cfg_.vocab_size, opt);
    } else {
      UnigramOptions uopt;
      uopt.base = opt;
      vocab = learn_unigram(counts, cfg_.vocab_size, uopt);
    }
    vocab.language = lang;
    vocab.save(artifact_path("vocab." + lang + ".json"));
  };
  return st;
}

Pipeline::Stage Pipeline::train_emb_stage(bool first_language) const {
  const std::string lang = first_language ? cfg_.l1_lang : cfg_.l2_lang;
  const std::string corpus = first_language ? cfg_.l1_path : cfg_.l2_path;
  const std::string vocab_file = artifact_path("vocab." + lang + ".json");
  Stage st;
  st.name = "train-emb-" + lang;
  st.inputs = {{corpus, ""}, {vocab_file, "learn-vocab"}};
  st.outputs = {artifact_path("emb." + lang + ".vec")};
  st.fingerprint =
      stage_fingerprint(st.name, {"corpus", "segmentation", "embeddings"}, {corpus, vocab_file});
  st.body = [this, lang, corpus, vocab_file] {
    Vocabulary vocab = Vocabulary::load(vocab_file);
    SentenceStream stream(corpus, lang, cfg_.norm);
    SgnsOptions opt;
    opt.dim = cfg_.dim;
    opt.window = cfg_.window;
    opt.negatives = cfg_.negatives;
    opt.epochs = cfg_.epochs;
    opt.threads = cfg_.threads;
    // The seed depends on the corpus content, not the language tag: identical
    // corpora reproduce identical embeddings.
    opt.seed = fanout_seed(opt_.seed, "train-emb", hash_file(corpus) + vocab.fingerprint());
    EmbeddingMatrix emb = train_sgns(stream, vocab, opt);
    save_word2vec(artifact_path("emb." + lang + ".vec"), emb);
  };
  return st;
}

Pipeline::Stage Pipeline::map_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  const std::string e1 = artifact_path("emb." + cfg_.l1_lang + ".vec");
  const std::string e2 = artifact_path("emb." + cfg_.l2_lang + ".vec");
  Stage st;
  st.name = "map";
  st.inputs = {{v1, "learn-vocab"}, {v2, "learn-vocab"}, {e1, "train-emb"}, {e2, "train-emb"}};
  st.outputs = {artifact_path("mapped." + cfg_.l1_lang + ".vec"),
                artifact_path("mapped." + cfg_.l2_lang + ".vec"),
                artifact_path("map_trace.json")};
  st.fingerprint = stage_fingerprint(st.name, {"mapping"}, {v1, v2, e1, e2});
  st.body = [this, v1, v2, e1, e2] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    EmbeddingMatrix emb1 = align_to_vocab(load_word2vec(e1), vocab1);
    EmbeddingMatrix emb2 = align_to_vocab(load_word2vec(e2), vocab2);
    Mat<double> x = normalize_embeddings(to_double(emb1.rows));
    Mat<double> z = normalize_embeddings(to_double(emb2.rows));
    std::vector<TokenId> xr = vocab1.ids_by_frequency();
    std::vector<TokenId> zr = vocab2.ids_by_frequency();
    SeedDictionary seed = unsupervised_init(x, z, cfg_.induction_vocab, xr, zr);
    SelfLearnOptions opt;
    opt.max_iters = cfg_.map_max_iters;
    opt.induction_vocab = cfg_.induction_vocab;
    opt.csls_k = cfg_.csls_k;
    opt.seed = fanout_seed(opt_.seed, "map", emb1.vocab_fingerprint + emb2.vocab_fingerprint);
    MappedSpaces mapped = self_learn(x, z, seed, opt, xr, zr);

    EmbeddingMatrix out1;
    out1.rows = mapped.x_mapped.cast<float>();
    out1.names = emb1.names;
    save_word2vec(artifact_path("mapped." + cfg_.l1_lang + ".vec"), out1);
    EmbeddingMatrix out2;
    out2.rows = mapped.z_mapped.cast<float>();
    out2.names = emb2.names;
    save_word2vec(artifact_path("mapped." + cfg_.l2_lang + ".vec"), out2);

    json trace;
    trace["converged"] = mapped.converged;
    trace["seed_pairs"] = seed.pairs.size();
    trace["seed_mean_similarity"] = seed.mean_similarity;
    json iters = json::array();
    for (const MapIteration& it : mapped.trace)
      iters.push_back({{"iter", it.iter},
                       {"dict_size", it.dict_size},
                       {"mean_similarity", it.mean_similarity},
                       {"keep_prob", it.keep_prob},
                       {"orthogonality_error", it.orthogonality_error}});
    trace["iterations"] = std::move(iters);
    std::ofstream out(artifact_path("map_trace.json"), std::ios::binary);
    out << trace.dump(1) << "\n";
  };
  return st;
}

Pipeline::Stage Pipeline::align_bitext_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  Stage st;
  st.name = "align-bitext";
  st.inputs = {{cfg_.bitext_l1, ""},
               {cfg_.bitext_l2, ""},
               {v1, "learn-vocab"},
               {v2, "learn-vocab"}};
  st.outputs = {artifact_path("bitext_sim.tsv"), artifact_path("align.fwd.pharaoh")};
  st.fingerprint =
      stage_fingerprint(st.name, {"corpus"}, {cfg_.bitext_l1, cfg_.bitext_l2, v1, v2});
  st.body = [this, v1, v2] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    SentenceStream src(cfg_.bitext_l1, cfg_.l1_lang, cfg_.norm);
    SentenceStream tgt(cfg_.bitext_l2, cfg_.l2_lang, cfg_.norm);
    EncodedBitext fwd_bitext = encode_bitext(src, tgt, vocab1, vocab2);
    EncodedBitext rev_bitext;
    rev_bitext.reserve(fwd_bitext.size());
    for (const auto& [a, b] : fwd_bitext) rev_bitext.emplace_back(b, a);

    IbmOptions opt;
    AlignmentModel fwd = train_ibm2_fast(fwd_bitext, static_cast<TokenId>(vocab1.size()),
                                         static_cast<TokenId>(vocab2.size()), opt,
                                         AlignDirection::kFwd);
    AlignmentModel rev = train_ibm2_fast(rev_bitext, static_cast<TokenId>(vocab2.size()),
                                         static_cast<TokenId>(vocab1.size()), opt,
                                         AlignDirection::kRev);
    Mat<double> sim = similarity_from_bitext(fwd, rev);

    std::ofstream simout(artifact_path("bitext_sim.tsv"), std::ios::binary);
    simout << vocab1.size() << "\t" << vocab2.size() << "\n";
    char buf[32];
    for (Index i = 0; i < sim.rows(); ++i)
      for (Index j = 0; j < sim.cols(); ++j)
        if (sim(i, j) > 0) {
          std::snprintf(buf, sizeof(buf), "%.8f", sim(i, j));
          simout << i << "\t" << j << "\t" << buf << "\n";
        }

    std::ofstream alout(artifact_path("align.fwd.pharaoh"), std::ios::binary);
    for (const auto& links : viterbi_align(fwd, fwd_bitext)) alout << pharaoh_format(links) << "\n";
  };
  return st;
}

namespace {

Mat<double> load_bitext_similarity(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open similarity file: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  Index rows = 0, cols = 0;
  hs >> rows >> cols;
  Mat<double> s = Mat<double>::Zero(rows, cols);
  Index i, j;
  double v;
  while (in >> i >> j >> v) s(i, j) = v;
  return s;
}

}  // namespace

Pipeline::Stage Pipeline::anchor_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  const bool from_bitext = cfg_.anchor_source == "bitext";
  const std::string sim_src1 =
      from_bitext ? artifact_path("bitext_sim.tsv") : artifact_path("mapped." + cfg_.l1_lang + ".vec");
  const std::string sim_src2 =
      from_bitext ? std::string() : artifact_path("mapped." + cfg_.l2_lang + ".vec");
  Stage st;
  st.name = "anchor";
  const std::string sim_producer = from_bitext ? "align-bitext" : "map";
  st.inputs = {{v1, "learn-vocab"}, {v2, "learn-vocab"}, {sim_src1, sim_producer}};
  if (!sim_src2.empty()) st.inputs.push_back({sim_src2, sim_producer});
  st.outputs = {artifact_path("anchors.tsv"), artifact_path("classification.json"),
                artifact_path("ablation.json")};
  st.fingerprint = stage_fingerprint(st.name, {"anchoring"}, input_paths(st.inputs));
  st.body = [this, v1, v2, from_bitext, sim_src1, sim_src2] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    SimilarityMatrix sim;
    if (from_bitext) {
      sim.s = load_bitext_similarity(sim_src1);
      sim.kind = SimilarityMatrix::Kind::kBitext;
    } else {
      EmbeddingMatrix m1 = align_to_vocab(load_word2vec(sim_src1), vocab1);
      EmbeddingMatrix m2 = align_to_vocab(load_word2vec(sim_src2), vocab2);
      sim = cosine_similarity_matrix(to_double(m1.rows), to_double(m2.rows));
    }
    sim.row_language = cfg_.l1_lang;
    sim.col_language = cfg_.l2_lang;

    MutualArgmaxResult mutual = mutual_argmax(sim.s);
    AnchorDictionary anchors = select_anchors(mutual.pairs, cfg_.policy);
    save_anchors(artifact_path("anchors.tsv"), anchors, vocab1, vocab2);

    SharedPairClassification classification = classify_shared_pairs(anchors, vocab1, vocab2);
    save_classification(artifact_path("classification.json"), classification, vocab1, vocab2);

    AblationSets sets = ablation_anchor_sets(classification, anchors, vocab1, vocab2);
    json ab;
    ab["sizes"] = {{"joint", sets.joint.size()},
                   {"minus_fp", sets.minus_fp.size()},
                   {"minus_fn", sets.minus_fn.size()},
                   {"anchored", sets.anchored.size()}};
    ab["argmax_ties"] = mutual.argmax_ties;
    std::ofstream out(artifact_path("ablation.json"), std::ios::binary);
    out << ab.dump(1) << "\n";
  };
  return st;
}

Pipeline::Stage Pipeline::merge_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  const std::string anchors_file = artifact_path("anchors.tsv");
  Stage st;
  st.name = "merge";
  st.inputs = {{v1, "learn-vocab"}, {v2, "learn-vocab"}, {anchors_file, "anchor"}};
  st.outputs = {artifact_path("merged.json")};
  st.fingerprint = stage_fingerprint(st.name, {"build"}, input_paths(st.inputs));
  st.body = [this, v1, v2, anchors_file] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    AnchorDictionary anchors = load_anchors(anchors_file, vocab1, vocab2);
    MergedVocabulary merged = merge_for_mt(vocab1, vocab2, anchors, cfg_.joint_size);
    save_merged(artifact_path("merged.json"), merged);
  };
  return st;
}

Pipeline::Stage Pipeline::layout_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  const std::string anchors_file = artifact_path("anchors.tsv");
  const std::string e1 = artifact_path("emb." + cfg_.l1_lang + ".vec");
  const bool align = cfg_.mode == BuildMode::kLmShareAlign;
  const bool from_bitext = cfg_.anchor_source == "bitext";
  Stage st;
  st.name = "layout";
  st.inputs = {{v1, "learn-vocab"},
               {v2, "learn-vocab"},
               {anchors_file, "anchor"},
               {e1, "train-emb"}};
  if (align) {
    if (from_bitext) {
      st.inputs.push_back({artifact_path("bitext_sim.tsv"), "align-bitext"});
    } else {
      st.inputs.push_back({artifact_path("mapped." + cfg_.l1_lang + ".vec"), "map"});
      st.inputs.push_back({artifact_path("mapped." + cfg_.l2_lang + ".vec"), "map"});
    }
  }
  st.outputs = {artifact_path("layout.json"), artifact_path("layout.vec")};
  st.fingerprint = stage_fingerprint(st.name, {"build"}, input_paths(st.inputs));
  st.body = [this, v1, v2, anchors_file, e1, align, from_bitext] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    AnchorDictionary anchors = load_anchors(anchors_file, vocab1, vocab2);
    EmbeddingMatrix emb1 = align_to_vocab(load_word2vec(e1), vocab1);
    SimilarityMatrix sim;
    if (align) {
      if (from_bitext) {
        sim.s = load_bitext_similarity(artifact_path("bitext_sim.tsv"));
        sim.kind = SimilarityMatrix::Kind::kBitext;
      } else {
        EmbeddingMatrix m1 =
            align_to_vocab(load_word2vec(artifact_path("mapped." + cfg_.l1_lang + ".vec")), vocab1);
        EmbeddingMatrix m2 =
            align_to_vocab(load_word2vec(artifact_path("mapped." + cfg_.l2_lang + ".vec")), vocab2);
        sim = cosine_similarity_matrix(to_double(m1.rows), to_double(m2.rows));
      }
    }
    EmbeddingLayout layout = build_lm_layout(
        vocab1, vocab2, anchors, emb1, align ? &sim : nullptr,
        align ? LayoutMode::kShareAlign : LayoutMode::kShareOnly,
        fanout_seed(opt_.seed, "layout", emb1.vocab_fingerprint));
    save_layout(artifact_path("layout.json"), layout, vocab2,
                align ? LayoutMode::kShareAlign : LayoutMode::kShareOnly);
    EmbeddingMatrix materialized;
    materialized.rows = materialize_layout(layout, emb1);
    for (const VocabEntry& e : vocab2.entries) materialized.names.push_back(e.subword);
    save_word2vec(artifact_path("layout.vec"), materialized);
  };
  return st;
}

Pipeline::Stage Pipeline::eval_bli_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  const std::string m1 = artifact_path("mapped." + cfg_.l1_lang + ".vec");
  const std::string m2 = artifact_path("mapped." + cfg_.l2_lang + ".vec");
  Stage st;
  st.name = "eval-bli";
  st.inputs = {{cfg_.bli_test, ""},
               {v1, "learn-vocab"},
               {v2, "learn-vocab"},
               {m1, "map"},
               {m2, "map"}};
  st.outputs = {artifact_path("bli_report.json")};
  st.fingerprint = stage_fingerprint(st.name, {"eval", "mapping"}, input_paths(st.inputs));
  st.body = [this, v1, v2, m1, m2] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    EmbeddingMatrix emb1 = align_to_vocab(load_word2vec(m1), vocab1);
    EmbeddingMatrix emb2 = align_to_vocab(load_word2vec(m2), vocab2);
    BliTestSet test = BliTestSet::load(cfg_.bli_test);
    if (cfg_.bli_filter_identical) test = test.filter_identical();
    BliResult result = bli_precision_at_1(test, to_double(emb1.rows), vocab1,
                                          to_double(emb2.rows), vocab2, cfg_.csls_k, cfg_.norm);
    json j;
    j["precision_at_1"] = result.precision_at_1;
    j["evaluated"] = result.evaluated;
    j["hits"] = result.hits;
    j["excluded_unk"] = result.excluded_unk;
    j["filtered_identical"] = cfg_.bli_filter_identical;
    json pairs = json::array();
    for (const auto& entry : result.log)
      pairs.push_back({{"source", entry.source},
                       {"predicted", entry.predicted},
                       {"hit", entry.hit},
                       {"excluded", entry.excluded}});
    j["pairs"] = std::move(pairs);
    std::ofstream out(artifact_path("bli_report.json"), std::ios::binary);
    out << j.dump(1) << "\n";
  };
  return st;
}

Pipeline::Stage Pipeline::eval_buckets_stage() const {
  const std::string v1 = artifact_path("vocab." + cfg_.l1_lang + ".json");
  const std::string v2 = artifact_path("vocab." + cfg_.l2_lang + ".json");
  Stage st;
  st.name = "eval-buckets";
  st.inputs = {{v1, "learn-vocab"},
               {v2, "learn-vocab"},
               {artifact_path("merged.json"), "merge"},
               {artifact_path("anchors.tsv"), "anchor"},
               {cfg_.l1_path, ""}};
  if (!cfg_.bucket_hyp.empty()) {
    st.inputs.push_back({cfg_.bucket_hyp, ""});
    st.inputs.push_back({cfg_.bucket_ref, ""});
  }
  st.outputs = {artifact_path("buckets.json")};
  st.fingerprint = stage_fingerprint(st.name, {"eval"}, input_paths(st.inputs));
  st.body = [this, v1, v2] {
    Vocabulary vocab1 = Vocabulary::load(v1);
    Vocabulary vocab2 = Vocabulary::load(v2);
    AnchorDictionary anchors = load_anchors(artifact_path("anchors.tsv"), vocab1, vocab2);
    SharedPairClassification classification = classify_shared_pairs(anchors, vocab1, vocab2);
    MergedVocabulary merged = load_merged(artifact_path("merged.json"));
    SentenceStream corpus(cfg_.l1_path, cfg_.l1_lang, cfg_.norm);
    BucketedCorpus buckets =
        bucket_by_fpfn(corpus, merged, vocab1, classification, cfg_.bucket_edges);
    if (!cfg_.bucket_hyp.empty()) {
      auto read_lines = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open file: " + path);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          lines.push_back(line);
        }
        return lines;
      };
      score_buckets(buckets, read_lines(cfg_.bucket_hyp), read_lines(cfg_.bucket_ref));
    }
    save_bucket_report(artifact_path("buckets.json"), buckets);
  };
  return st;
}

void Pipeline::run_subcommand(const std::string& name) {
  if (name == "learn-vocab") {
    execute(learn_vocab_stage(true));
    execute(learn_vocab_stage(false));
  } else if (name == "train-emb") {
    execute(train_emb_stage(true));
    execute(train_emb_stage(false));
  } else if (name == "map") {
    execute(map_stage());
  } else if (name == "align-bitext") {
    if (cfg_.bitext_l1.empty())
      throw std::runtime_error("align-bitext requires corpus.bitext_l1/bitext_l2 in the config");
    execute(align_bitext_stage());
  } else if (name == "anchor") {
    execute(anchor_stage());
  } else if (name == "merge") {
    if (cfg_.mode != BuildMode::kMtMerge)
      throw std::runtime_error("merge requires build.mode = mt-merge");
    execute(merge_stage());
  } else if (name == "layout") {
    if (cfg_.mode == BuildMode::kMtMerge)
      throw std::runtime_error("layout requires build.mode = lm-share-only or lm-share-align");
    execute(layout_stage());
  } else if (name == "eval-bli") {
    if (cfg_.bli_test.empty()) throw std::runtime_error("eval-bli requires eval.bli_test");
    execute(eval_bli_stage());
  } else if (name == "eval-buckets") {
    if (cfg_.mode != BuildMode::kMtMerge)
      throw std::runtime_error("eval-buckets requires build.mode = mt-merge");
    execute(eval_buckets_stage());
  } else {
    throw std::runtime_error("unknown stage: " + name);
  }
}

void Pipeline::run() {
  execute(learn_vocab_stage(true));
  execute(learn_vocab_stage(false));
  execute(train_emb_stage(true));
  execute(train_emb_stage(false));
  const bool from_bitext = cfg_.anchor_source == "bitext";
  const bool need_map = !from_bitext || !cfg_.bli_test.empty();
  if (need_map) execute(map_stage());
  if (from_bitext) execute(align_bitext_stage());
  execute(anchor_stage());
  if (cfg_.mode == BuildMode::kMtMerge)
    execute(merge_stage());
  else
    execute(layout_stage());
  if (!cfg_.bli_test.empty()) execute(eval_bli_stage());
  if (cfg_.mode == BuildMode::kMtMerge && !cfg_.bucket_hyp.empty()) execute(eval_buckets_stage());
}

}  // namespace subanchor
