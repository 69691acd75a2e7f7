#include "subanchor/config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "subanchor/hash.hpp"

namespace subanchor {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',') {
      if (std::string t = trim(item); !t.empty()) out.push_back(t);
      item.clear();
    } else {
      item += c;
    }
  }
  if (std::string t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct Parser {
  std::vector<std::string> problems;

  bool to_bool(const std::string& key, const std::string& value, bool fallback) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    problems.push_back(key + ": expected a boolean, got '" + value + "'");
    return fallback;
  }
  std::int64_t to_int(const std::string& key, const std::string& value, std::int64_t fallback) {
    try {
      std::size_t pos = 0;
      std::int64_t v = std::stoll(value, &pos);
      if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    problems.push_back(key + ": expected an integer, got '" + value + "'");
    return fallback;
  }
  double to_double(const std::string& key, const std::string& value, double fallback) {
    try {
      std::size_t pos = 0;
      double v = std::stod(value, &pos);
      if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    problems.push_back(key + ": expected a number, got '" + value + "'");
    return fallback;
  }
};

}  // namespace

std::string build_mode_name(BuildMode m) {
  switch (m) {
    case BuildMode::kMtMerge: return "mt-merge";
    case BuildMode::kLmShareOnly: return "lm-share-only";
    default: return "lm-share-align";
  }
}

BuildMode build_mode_from_name(std::string_view name) {
  if (name == "mt-merge") return BuildMode::kMtMerge;
  if (name == "lm-share-only") return BuildMode::kLmShareOnly;
  if (name == "lm-share-align") return BuildMode::kLmShareAlign;
  throw std::invalid_argument("unknown build mode: " + std::string(name));
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  return l1_path == o.l1_path && l2_path == o.l2_path && l1_lang == o.l1_lang &&
         l2_lang == o.l2_lang && bitext_l1 == o.bitext_l1 && bitext_l2 == o.bitext_l2 &&
         norm == o.norm && scheme == o.scheme && vocab_size == o.vocab_size &&
         min_word_freq == o.min_word_freq && specials == o.specials && dim == o.dim &&
         window == o.window && negatives == o.negatives && epochs == o.epochs &&
         threads == o.threads && map_max_iters == o.map_max_iters &&
         induction_vocab == o.induction_vocab && csls_k == o.csls_k &&
         policy.kind == o.policy.kind && policy.top_k == o.policy.top_k &&
         policy.min_score == o.policy.min_score && anchor_source == o.anchor_source &&
         mode == o.mode && joint_size == o.joint_size && bli_test == o.bli_test &&
         bli_filter_identical == o.bli_filter_identical && bucket_edges == o.bucket_edges &&
         bucket_hyp == o.bucket_hyp && bucket_ref == o.bucket_ref;
}

ConfigError::ConfigError(std::vector<std::string> list)
    : std::runtime_error([&] {
        std::string msg = "configuration problems:";
        for (const std::string& p : list) msg += "\n  - " + p;
        return msg;
      }()),
      problems(std::move(list)) {}

PipelineConfig parse_config_text(std::string_view text, const std::string& origin) {
  PipelineConfig cfg;
  Parser p;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.problems.push_back(origin + ":" + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      p.problems.push_back(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string qual = section + "." + key;

    if (section == "corpus") {
      if (key == "l1") cfg.l1_path = value;
      else if (key == "l2") cfg.l2_path = value;
      else if (key == "l1_lang") cfg.l1_lang = value;
      else if (key == "l2_lang") cfg.l2_lang = value;
      else if (key == "bitext_l1") cfg.bitext_l1 = value;
      else if (key == "bitext_l2") cfg.bitext_l2 = value;
      else if (key == "lowercase") cfg.norm.lowercase = p.to_bool(qual, value, true);
      else if (key == "nfc") cfg.norm.unicode_nfc = p.to_bool(qual, value, true);
      else if (key == "split_punctuation")
        cfg.norm.punctuation_split = p.to_bool(qual, value, true);
      else p.problems.push_back("unknown key " + qual);
    } else if (section == "segmentation") {
      if (key == "scheme") {
        try {
          cfg.scheme = scheme_from_name(value);
        } catch (const std::exception& e) {
          p.problems.push_back(qual + ": " + e.what());
        }
      } else if (key == "vocab_size")
        cfg.vocab_size = static_cast<std::size_t>(p.to_int(qual, value, 0));
      else if (key == "min_word_freq") cfg.min_word_freq = p.to_int(qual, value, 2);
      else if (key == "specials") cfg.specials = split_list(value);
      else p.problems.push_back("unknown key " + qual);
    } else if (section == "embeddings") {
      if (key == "dim") cfg.dim = static_cast<int>(p.to_int(qual, value, 1024));
      else if (key == "window") cfg.window = static_cast<int>(p.to_int(qual, value, 5));
      else if (key == "negatives") cfg.negatives = static_cast<int>(p.to_int(qual, value, 10));
      else if (key == "epochs") cfg.epochs = static_cast<int>(p.to_int(qual, value, 5));
      else if (key == "threads") cfg.threads = static_cast<int>(p.to_int(qual, value, 1));
      else p.problems.push_back("unknown key " + qual);
    } else if (section == "mapping") {
      if (key == "max_iters") cfg.map_max_iters = static_cast<int>(p.to_int(qual, value, 100));
      else if (key == "induction_vocab")
        cfg.induction_vocab = static_cast<int>(p.to_int(qual, value, 4000));
      else if (key == "csls_k") cfg.csls_k = static_cast<int>(p.to_int(qual, value, 10));
      else p.problems.push_back("unknown key " + qual);
    } else if (section == "anchoring") {
      if (key == "policy") {
        if (value == "all") cfg.policy.kind = SelectionPolicy::Kind::kAll;
        else if (value == "top_k") cfg.policy.kind = SelectionPolicy::Kind::kTopK;
        else if (value == "min_score") cfg.policy.kind = SelectionPolicy::Kind::kMinScore;
        else p.problems.push_back(qual + ": expected all|top_k|min_score, got '" + value + "'");
      } else if (key == "top_k")
        cfg.policy.top_k = static_cast<std::size_t>(p.to_int(qual, value, 0));
      else if (key == "min_score") cfg.policy.min_score = p.to_double(qual, value, 0);
      else if (key == "source") cfg.anchor_source = value;
      else p.problems.push_back("unknown key " + qual);
    } else if (section == "build") {
      if (key == "mode") {
        try {
          cfg.mode = build_mode_from_name(value);
        } catch (const std::exception& e) {
          p.problems.push_back(qual + ": " + e.what());
        }
      } else if (key == "joint_size")
        cfg.joint_size = static_cast<std::size_t>(p.to_int(qual, value, 0));
      else p.problems.push_back("unknown key " + qual);
    } else if (section == "eval") {
      if (key == "bli_test") cfg.bli_test = value;
      else if (key == "bli_filter_identical")
        cfg.bli_filter_identical = p.to_bool(qual, value, false);
      else if (key == "bucket_edges") {
        cfg.bucket_edges.clear();
        for (const std::string& item : split_list(value))
          cfg.bucket_edges.push_back(p.to_double(qual, item, 0));
      } else if (key == "bucket_hyp") cfg.bucket_hyp = value;
      else if (key == "bucket_ref") cfg.bucket_ref = value;
      else p.problems.push_back("unknown key " + qual);
    } else {
      p.problems.push_back(origin + ":" + std::to_string(lineno) + ": unknown section [" +
                           section + "]");
    }
  }
  if (!p.problems.empty()) throw ConfigError(std::move(p.problems));
  return cfg;
}

PipelineConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "[corpus]\n";
  os << "l1 = " << cfg.l1_path << "\n";
  os << "l2 = " << cfg.l2_path << "\n";
  os << "l1_lang = " << cfg.l1_lang << "\n";
  os << "l2_lang = " << cfg.l2_lang << "\n";
  if (!cfg.bitext_l1.empty()) os << "bitext_l1 = " << cfg.bitext_l1 << "\n";
  if (!cfg.bitext_l2.empty()) os << "bitext_l2 = " << cfg.bitext_l2 << "\n";
  os << "lowercase = " << (cfg.norm.lowercase ? "true" : "false") << "\n";
  os << "nfc = " << (cfg.norm.unicode_nfc ? "true" : "false") << "\n";
  os << "split_punctuation = " << (cfg.norm.punctuation_split ? "true" : "false") << "\n";
  os << "\n[segmentation]\n";
  os << "scheme = " << scheme_name(cfg.scheme) << "\n";
  os << "vocab_size = " << cfg.vocab_size << "\n";
  os << "min_word_freq = " << cfg.min_word_freq << "\n";
  os << "specials = " << join_list(cfg.specials) << "\n";
  os << "\n[embeddings]\n";
  os << "dim = " << cfg.dim << "\n";
  os << "window = " << cfg.window << "\n";
  os << "negatives = " << cfg.negatives << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "threads = " << cfg.threads << "\n";
  os << "\n[mapping]\n";
  os << "max_iters = " << cfg.map_max_iters << "\n";
  os << "induction_vocab = " << cfg.induction_vocab << "\n";
  os << "csls_k = " << cfg.csls_k << "\n";
  os << "\n[anchoring]\n";
  os << "policy = "
     << (cfg.policy.kind == SelectionPolicy::Kind::kAll
             ? "all"
             : cfg.policy.kind == SelectionPolicy::Kind::kTopK ? "top_k" : "min_score")
     << "\n";
  os << "top_k = " << cfg.policy.top_k << "\n";
  os << "min_score = " << format_double(cfg.policy.min_score) << "\n";
  os << "source = " << cfg.anchor_source << "\n";
  os << "\n[build]\n";
  os << "mode = " << build_mode_name(cfg.mode) << "\n";
  os << "joint_size = " << cfg.joint_size << "\n";
  os << "\n[eval]\n";
  if (!cfg.bli_test.empty()) os << "bli_test = " << cfg.bli_test << "\n";
  os << "bli_filter_identical = " << (cfg.bli_filter_identical ? "true" : "false") << "\n";
  std::vector<std::string> edges;
  for (double e : cfg.bucket_edges) edges.push_back(format_double(e));
  os << "bucket_edges = " << join_list(edges) << "\n";
  if (!cfg.bucket_hyp.empty()) os << "bucket_hyp = " << cfg.bucket_hyp << "\n";
  if (!cfg.bucket_ref.empty()) os << "bucket_ref = " << cfg.bucket_ref << "\n";
  return os.str();
}

std::vector<std::string> validate_config(const PipelineConfig& cfg) {
  std::vector<std::string> problems;
  auto need_file = [&](const std::string& path, const std::string& key) {
    if (path.empty()) {
      problems.push_back(key + " is required");
    } else if (!std::filesystem::exists(path)) {
      problems.push_back(key + ": path does not exist: " + path);
    }
  };
  auto optional_file = [&](const std::string& path, const std::string& key) {
    if (!path.empty() && !std::filesystem::exists(path))
      problems.push_back(key + ": path does not exist: " + path);
  };
  need_file(cfg.l1_path, "corpus.l1");
  need_file(cfg.l2_path, "corpus.l2");
  optional_file(cfg.bitext_l1, "corpus.bitext_l1");
  optional_file(cfg.bitext_l2, "corpus.bitext_l2");
  optional_file(cfg.bli_test, "eval.bli_test");
  optional_file(cfg.bucket_hyp, "eval.bucket_hyp");
  optional_file(cfg.bucket_ref, "eval.bucket_ref");
  if (cfg.bitext_l1.empty() != cfg.bitext_l2.empty())
    problems.push_back("corpus.bitext_l1 and corpus.bitext_l2 must be given together");
  if (cfg.vocab_size == 0) problems.push_back("segmentation.vocab_size must be positive");
  if (cfg.dim < 8) problems.push_back("embeddings.dim must be >= 8");
  if (cfg.window < 1) problems.push_back("embeddings.window must be >= 1");
  if (cfg.negatives < 1) problems.push_back("embeddings.negatives must be >= 1");
  if (cfg.epochs < 1) problems.push_back("embeddings.epochs must be >= 1");
  if (cfg.threads < 1) problems.push_back("embeddings.threads must be >= 1");
  if (cfg.map_max_iters < 1) problems.push_back("mapping.max_iters must be >= 1");
  if (cfg.csls_k < 1) problems.push_back("mapping.csls_k must be >= 1");
  if (cfg.anchor_source != "mapping" && cfg.anchor_source != "bitext")
    problems.push_back("anchoring.source must be 'mapping' or 'bitext'");
  if (cfg.anchor_source == "bitext" && cfg.bitext_l1.empty())
    problems.push_back("anchoring.source = bitext requires corpus.bitext_l1/bitext_l2");
  if (cfg.policy.kind == SelectionPolicy::Kind::kTopK && cfg.policy.top_k == 0)
    problems.push_back("anchoring.top_k must be positive for the top_k policy");
  if (cfg.mode == BuildMode::kMtMerge) {
    if (cfg.joint_size == 0) problems.push_back("build.joint_size (n) is required for mt-merge");
    else if (cfg.joint_size >= 2 * cfg.vocab_size)
      problems.push_back("build.joint_size must satisfy n < 2m (alpha = 2m - n > 0)");
    else if (cfg.joint_size < cfg.vocab_size)
      problems.push_back("build.joint_size must satisfy n >= m");
  }
  for (std::size_t i = 0; i < cfg.bucket_edges.size(); ++i) {
    double e = cfg.bucket_edges[i];
    if (e <= 0 || e >= 1) problems.push_back("eval.bucket_edges values must lie in (0, 1)");
    if (i > 0 && e <= cfg.bucket_edges[i - 1]) {
      problems.push_back("eval.bucket_edges must be strictly increasing");
      break;
    }
  }
  if (cfg.bucket_hyp.empty() != cfg.bucket_ref.empty())
    problems.push_back("eval.bucket_hyp and eval.bucket_ref must be given together");
  return problems;
}

std::string config_section_fingerprint(const PipelineConfig& cfg, const std::string& section) {
  std::string all = serialize_config(cfg);
  std::istringstream in(all);
  std::string line, current, wanted;
  for (std::string raw; std::getline(in, raw);) {
    std::string t = trim(raw);
    if (t.empty()) continue;
    if (t.front() == '[') {
      current = t.substr(1, t.size() - 2);
      continue;
    }
    if (current == section) wanted += t + "\n";
  }
  return hex64(fnv1a64(wanted));
}

}  // namespace subanchor
