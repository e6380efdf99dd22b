#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socialvec/classifier_io.hpp"
#include "socialvec/corpus.hpp"
#include "socialvec/error.hpp"
#include "socialvec/harness.hpp"
#include "socialvec/inference.hpp"
#include "socialvec/params.hpp"
#include "socialvec/synth.hpp"
#include "socialvec/trainer.hpp"

namespace socialvec::cli {

// Command-line misuse (unknown key, missing required flag, bad query
// syntax). Exits with status 2; data and runtime errors exit with 1.
struct UsageError : Error {
  using Error::Error;
};

// Flat `key=value` configuration with fixed precedence:
// flag > config file > built-in default. The config file is named by
// --config or by the SOCIALVEC_CONFIG environment variable and holds one
// `key=value` per line with `#` comments. Unknown keys are rejected.
class CliConfig {
 public:
  void define(const std::string& key, const std::string& default_value,
              const std::string& help) {
    order_.push_back(key);
    defaults_[key] = default_value;
    help_[key] = help;
  }

  void parse(const std::vector<std::string>& args) {
    values_ = defaults_;
    std::map<std::string, std::string> flags;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& arg = args[i];
      if (arg.size() < 3 || arg.substr(0, 2) != "--")
        throw UsageError("unexpected argument '" + arg + "'");
      std::string key, value;
      const auto eq = arg.find('=');
      if (eq != std::string::npos) {
        key = arg.substr(2, eq - 2);
        value = arg.substr(eq + 1);
      } else {
        key = arg.substr(2);
        if (i + 1 >= args.size())
          throw UsageError("flag --" + key + " needs a value");
        value = args[++i];
      }
      if (key != "config" && !defaults_.contains(key))
        throw UsageError("unknown option --" + key);
      flags[key] = value;
    }

    std::string config_path;
    if (auto it = flags.find("config"); it != flags.end()) {
      config_path = it->second;
    } else if (const char* env = std::getenv("SOCIALVEC_CONFIG")) {
      config_path = env;
    }
    if (!config_path.empty()) load_config_file(config_path);
    for (const auto& [key, value] : flags)
      if (key != "config") values_[key] = value;
  }

  const std::string& get(const std::string& key) const {
    return values_.at(key);
  }

  long long get_int(const std::string& key) const {
    const std::string& text = get(key);
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
      throw UsageError("option --" + key + " expects an integer, got '" +
                       text + "'");
    return v;
  }

  std::uint64_t get_seed(const std::string& key) const {
    const std::string& text = get(key);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
      throw UsageError("option --" + key + " expects an integer, got '" +
                       text + "'");
    return v;
  }

  double get_real(const std::string& key) const {
    const std::string& text = get(key);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
      throw UsageError("option --" + key + " expects a number, got '" + text +
                       "'");
    return v;
  }

  bool get_bool(const std::string& key) const {
    const std::string& text = get(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw UsageError("option --" + key + " expects true/false, got '" + text +
                     "'");
  }

  // Reproducibility header: the fully resolved configuration, printed
  // before any work happens.
  void echo(std::ostream& out, const std::string& command) const {
    std::vector<std::string> keys = order_;
    std::sort(keys.begin(), keys.end());
    out << "config command=" << command << "\n";
    for (const auto& key : keys)
      out << "config " << key << "=" << values_.at(key) << "\n";
  }

  void print_help(std::ostream& out, const std::string& command) const {
    out << "usage: socialvec " << command << " [--key value]...\n";
    for (const auto& key : order_) {
      out << "  --" << key;
      const std::string& dflt = defaults_.at(key);
      out << " (default: " << (dflt.empty() ? "<none>" : dflt) << ")  "
          << help_.at(key) << "\n";
    }
    out << "  --config FILE  key=value config file (or $SOCIALVEC_CONFIG)\n";
  }

 private:
  void load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
      std::size_t start = 0;
      while (start < line.size() &&
             (line[start] == ' ' || line[start] == '\t'))
        ++start;
      line = line.substr(start);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw UsageError(path + ":" + std::to_string(line_no) +
                         ": expected key=value");
      const std::string key = line.substr(0, eq);
      if (!defaults_.contains(key))
        throw UsageError(path + ":" + std::to_string(line_no) +
                         ": unknown config key '" + key + "'");
      values_[key] = line.substr(eq + 1);
    }
  }

  std::vector<std::string> order_;
  std::map<std::string, std::string> defaults_;
  std::map<std::string, std::string> help_;
  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------

namespace detail {

inline void define_synth_keys(CliConfig& cfg) {
  cfg.define("seed", "1", "random seed");
  cfg.define("n_users", "200", "number of users");
  cfg.define("n_communities", "2", "number of planted communities");
  cfg.define("p_in", "0.1", "within-community edge probability");
  cfg.define("p_out", "0.01", "cross-community edge probability");
  cfg.define("vocab_size", "1000", "token inventory size");
  cfg.define("tokens_per_user", "200", "tokens generated per user");
  cfg.define("topic_skew", "0.8", "mass on the community's token block");
  cfg.define("marker_noise", "0", "flip noise of the MemberOf attribute");
  cfg.define("attr_noise", "0.1", "flip noise of the Likes attribute");
}

inline SynthConfig synth_config(const CliConfig& cfg) {
  SynthConfig out;
  out.seed = cfg.get_seed("seed");
  out.n_users = static_cast<int>(cfg.get_int("n_users"));
  out.n_communities = static_cast<int>(cfg.get_int("n_communities"));
  out.p_in = cfg.get_real("p_in");
  out.p_out = cfg.get_real("p_out");
  out.vocab_size = static_cast<int>(cfg.get_int("vocab_size"));
  out.tokens_per_user = static_cast<int>(cfg.get_int("tokens_per_user"));
  out.topic_skew = cfg.get_real("topic_skew");
  out.attributes =
      default_attributes(out.n_communities, cfg.get_real("marker_noise"),
                         cfg.get_real("attr_noise"));
  return out;
}

inline void define_corpus_keys(CliConfig& cfg) {
  cfg.define("data", "", "directory holding documents/edges/triples .tsv");
  cfg.define("docs", "", "documents.tsv path (overrides --data)");
  cfg.define("edges", "", "edges.tsv path (overrides --data)");
  cfg.define("triples", "", "triples.tsv path (overrides --data)");
  cfg.define("min_count", "5", "minimum token count kept in the vocabulary");
}

inline CorpusFiles corpus_files(const CliConfig& cfg) {
  CorpusFiles files;
  files.documents = cfg.get("docs");
  files.edges = cfg.get("edges");
  files.triples = cfg.get("triples");
  const std::string dir = cfg.get("data");
  if (!dir.empty()) {
    namespace fs = std::filesystem;
    auto fill = [&](std::string& slot, const char* name) {
      if (slot.empty() && fs::exists(fs::path(dir) / name))
        slot = (fs::path(dir) / name).string();
    };
    fill(files.documents, "documents.tsv");
    fill(files.edges, "edges.tsv");
    fill(files.triples, "triples.tsv");
  }
  return files;
}

inline void define_train_keys(CliConfig& cfg) {
  cfg.define("k", "500", "embedding width K");
  cfg.define("epochs", "3", "SGD epochs");
  cfg.define("lambda1", "1.0", "graph stream weight");
  cfg.define("lambda2", "1.0", "relation stream weight");
  cfg.define("lr0", "0.2", "initial learning rate");
  cfg.define("lr_min", "0.05", "learning rate floor");
  cfg.define("neg_text", "5", "negative words per text event");
  cfg.define("neg_graph", "5", "negative users per graph event");
  cfg.define("neg_rel", "5", "negative entities per relation event");
  cfg.define("window", "5", "context window half-width");
  cfg.define("seed", "1", "random seed");
  cfg.define("workers", "1", "parallel workers (>1 is nondeterministic)");
  cfg.define("freeze_words", "false", "exclude word vectors from updates");
  cfg.define("shared_word_table", "false",
             "single word table for context and target sides");
  cfg.define("pretrained", "", "pretrained word vector file");
}

inline TrainConfig train_config(const CliConfig& cfg) {
  TrainConfig out;
  out.k = static_cast<int>(cfg.get_int("k"));
  out.epochs = static_cast<int>(cfg.get_int("epochs"));
  out.lambda_graph = cfg.get_real("lambda1");
  out.lambda_relation = cfg.get_real("lambda2");
  out.lr0 = cfg.get_real("lr0");
  out.lr_min = cfg.get_real("lr_min");
  out.text_negatives = static_cast<int>(cfg.get_int("neg_text"));
  out.graph_negatives = static_cast<int>(cfg.get_int("neg_graph"));
  out.relation_negatives = static_cast<int>(cfg.get_int("neg_rel"));
  out.window = static_cast<int>(cfg.get_int("window"));
  out.min_count = cfg.get_int("min_count");
  out.seed = cfg.get_seed("seed");
  out.workers = static_cast<int>(cfg.get_int("workers"));
  out.freeze_words = cfg.get_bool("freeze_words");
  out.shared_word_table = cfg.get_bool("shared_word_table");
  out.pretrained_words = cfg.get("pretrained");
  return out;
}

inline void define_head_keys(CliConfig& cfg) {
  cfg.define("hidden", "100", "attribute head hidden width H");
  cfg.define("hidden2", "50", "relation head hidden width H'");
  cfg.define("head_epochs", "50", "AdaGrad epochs for heads");
  cfg.define("eta", "0.05", "AdaGrad step size");
  cfg.define("eps", "1e-8", "AdaGrad denominator epsilon");
}

inline HeadConfig head_config(const CliConfig& cfg) {
  HeadConfig out;
  out.hidden = static_cast<int>(cfg.get_int("hidden"));
  out.hidden2 = static_cast<int>(cfg.get_int("hidden2"));
  out.epochs = static_cast<int>(cfg.get_int("head_epochs"));
  out.eta = cfg.get_real("eta");
  out.eps = cfg.get_real("eps");
  out.seed = cfg.get_seed("seed");
  return out;
}

// truth.tsv rows: `user_id \t community \t attr=value,attr=value,...`
struct TruthRow {
  std::string user;
  std::string community;
  std::vector<std::pair<std::string, std::string>> attrs;
};

inline std::vector<TruthRow> read_truth(const std::string& path) {
  std::vector<TruthRow> rows;
  const auto lines = socialvec::detail::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = socialvec::detail::split_tabs(lines[i]);
    if (fields.size() != 3)
      throw ParseError(path, i + 1,
                       "expected <user>\\t<community>\\t<attr=value,...>");
    TruthRow row;
    row.user = fields[0];
    row.community = fields[1];
    std::size_t start = 0;
    const std::string& attrs = fields[2];
    while (start < attrs.size()) {
      auto comma = attrs.find(',', start);
      if (comma == std::string::npos) comma = attrs.size();
      const std::string item = attrs.substr(start, comma - start);
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ParseError(path, i + 1, "expected attr=value, got '" + item +
                             "'");
      row.attrs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Labeled examples for one attribute (or "community"), with label names
// sorted so indices do not depend on file order.
struct LabeledUsers {
  std::vector<std::pair<int, int>> examples;
  std::vector<std::string> label_names;
};

inline LabeledUsers label_users(const std::vector<TruthRow>& rows,
                                const IdTable& users,
                                const std::string& attr) {
  std::vector<std::pair<int, std::string>> raw;
  for (const auto& row : rows) {
    const auto user = users.find(row.user);
    if (!user) continue;
    if (attr == "community") {
      raw.emplace_back(*user, row.community);
      continue;
    }
    for (const auto& [name, value] : row.attrs)
      if (name == attr) {
        raw.emplace_back(*user, value);
        break;
      }
  }
  if (raw.empty())
    throw Error("no labels found for attribute '" + attr + "'");
  LabeledUsers out;
  std::set<std::string> values;
  for (const auto& [user, value] : raw) values.insert(value);
  out.label_names.assign(values.begin(), values.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < out.label_names.size(); ++i)
    index[out.label_names[i]] = static_cast<int>(i);
  for (const auto& [user, value] : raw)
    out.examples.emplace_back(user, index[value]);
  return out;
}

inline std::vector<AblationVariant> parse_variants(const std::string& text) {
  const std::map<std::string, AblationVariant> known = {
      {"All", {"All", true, true, true}},
      {"OnlyNetwork", {"OnlyNetwork", false, true, false}},
      {"OnlyText", {"OnlyText", true, false, false}},
      {"OnlyAttributes", {"OnlyAttributes", false, false, true}},
      {"Network+Text", {"Network+Text", true, true, false}},
      {"Network+Attribute", {"Network+Attribute", false, true, true}},
  };
  std::vector<AblationVariant> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string name = text.substr(start, comma - start);
    if (!name.empty()) {
      const auto it = known.find(name);
      if (it == known.end())
        throw UsageError("unknown variant '" + name + "'");
      out.push_back(it->second);
    }
    start = comma + 1;
  }
  if (out.empty()) throw UsageError("no variants given");
  return out;
}

struct ParsedQuery {
  std::vector<std::pair<std::string, std::string>> given;  // rel, value
  std::vector<std::pair<std::string, std::string>> then;
};

// `IF rel=val[,rel=val...] THEN rel=val[,...]`
inline ParsedQuery parse_query(const std::string& text) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto space = text.find(' ', start);
    if (space == std::string::npos) space = text.size();
    if (space > start) words.push_back(text.substr(start, space - start));
    start = space + 1;
  }
  if (words.empty() || words[0] != "IF")
    throw UsageError("query must start with an IF clause");
  ParsedQuery query;
  auto* side = &query.given;
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i] == "THEN") {
      side = &query.then;
      continue;
    }
    std::size_t pos = 0;
    while (pos <= words[i].size()) {
      auto comma = words[i].find(',', pos);
      if (comma == std::string::npos) comma = words[i].size();
      const std::string item = words[i].substr(pos, comma - pos);
      if (!item.empty()) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
          throw UsageError("bad condition '" + item +
                           "', expected rel=value");
        side->emplace_back(item.substr(0, eq), item.substr(eq + 1));
      }
      pos = comma + 1;
    }
  }
  if (query.given.empty())
    throw UsageError("IF clause required and must be nonempty");
  if (query.then.empty()) throw UsageError("THEN clause must be nonempty");
  return query;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int run_synth(const std::vector<std::string>& args) {
  CliConfig cfg;
  cfg.define("out", "", "output directory (required)");
  detail::define_synth_keys(cfg);
  cfg.parse(args);
  cfg.echo(std::cerr, "synth");
  if (cfg.get("out").empty()) throw UsageError("--out is required");
  const SynthDataset dataset = generate(detail::synth_config(cfg));
  try {
    std::filesystem::create_directories(cfg.get("out"));
    write_synth_dataset(dataset, cfg.get("out"));
  } catch (const std::exception& e) {
    throw UsageError("cannot write to --out '" + cfg.get("out") +
                     "': " + e.what());
  }
  return 0;
}

inline int run_train(const std::vector<std::string>& args) {
  CliConfig cfg;
  cfg.define("model", "", "model output path (required)");
  detail::define_corpus_keys(cfg);
  detail::define_train_keys(cfg);
  cfg.parse(args);
  cfg.echo(std::cerr, "train");
  if (cfg.get("model").empty()) throw UsageError("--model is required");
  const TrainConfig train_cfg = detail::train_config(cfg);
  const SocialCorpus corpus =
      build_corpus(detail::corpus_files(cfg), train_cfg.min_count);
  TrainResult result = train(corpus, train_cfg);
  save_model(result.params,
             ModelTables{corpus.users, corpus.vocab, corpus.entities,
                         corpus.relations},
             cfg.get("model"));
  return 0;
}

inline int run_train_head(const std::vector<std::string>& args) {
  CliConfig cfg;
  cfg.define("model", "", "trained model path (required)");
  cfg.define("truth", "", "truth.tsv with labels (required)");
  cfg.define("attr", "Likes", "attribute to predict ('community' uses the "
                              "community column)");
  cfg.define("out", "", "classifier output path (required)");
  cfg.define("seed", "1", "random seed");
  detail::define_head_keys(cfg);
  cfg.parse(args);
  cfg.echo(std::cerr, "train-head");
  if (cfg.get("model").empty() || cfg.get("truth").empty() ||
      cfg.get("out").empty())
    throw UsageError("--model, --truth and --out are required");
  auto [model, tables] = load_model(cfg.get("model"));
  const auto truth = detail::read_truth(cfg.get("truth"));
  const auto labeled =
      detail::label_users(truth, tables.users, cfg.get("attr"));
  const AttributeClassifier clf =
      attr_train(labeled.examples, model, tables.users,
                 detail::head_config(cfg), labeled.label_names,
                 cfg.get("attr"));
  save_classifier(clf, cfg.get("out"));
  return 0;
}

inline int run_eval(const std::vector<std::string>& args) {
  CliConfig cfg;
  cfg.define("truth", "", "truth.tsv with labels (required for attr task)");
  cfg.define("task", "all", "attr | friend | all");
  cfg.define("attr", "Likes", "attribute evaluated by the attr task");
  cfg.define("variants", "All,OnlyNetwork,Network+Text,Network+Attribute",
             "comma-separated ablation variants");
  detail::define_corpus_keys(cfg);
  detail::define_train_keys(cfg);
  detail::define_head_keys(cfg);
  cfg.parse(args);
  cfg.echo(std::cerr, "eval");

  const std::string task = cfg.get("task");
  if (task != "attr" && task != "friend" && task != "all")
    throw UsageError("unknown task '" + task + "'");
  const TrainConfig train_cfg = detail::train_config(cfg);
  const HeadConfig head_cfg = detail::head_config(cfg);
  const SocialCorpus corpus =
      build_corpus(detail::corpus_files(cfg), train_cfg.min_count);
  const auto variants = detail::parse_variants(cfg.get("variants"));
  const SplitSpec split{0.8, 0.1, 0.1, train_cfg.seed};

  AttributeTask attr_task;
  const bool run_attr = task == "attr" || task == "all";
  if (run_attr) {
    if (cfg.get("truth").empty())
      throw Error("the attr task needs --truth labels");
    const auto truth = detail::read_truth(cfg.get("truth"));
    const auto labeled =
        detail::label_users(truth, corpus.users, cfg.get("attr"));
    attr_task.examples = labeled.examples;
    attr_task.label_names = labeled.label_names;
    attr_task.source_relation =
        cfg.get("attr") == "community" ? "" : cfg.get("attr");
  }
  const auto results = ablation_matrix(
      corpus, run_attr ? &attr_task : nullptr,
      task == "friend" || task == "all", variants, train_cfg, head_cfg,
      split);
  std::cout << results_tsv(results);
  return 0;
}

inline int run_group(const std::vector<std::string>& args) {
  CliConfig cfg;
  cfg.define("model", "", "trained model path (required)");
  cfg.define("heads", "", "comma-separated classifier paths (required)");
  cfg.define("query", "", "IF rel=val[,rel=val...] THEN rel=val[,...]");
  cfg.define("query2", "", "second query for --ratio");
  cfg.define("ratio", "false", "print the ratio of two queries");
  cfg.define("iterations", "500", "group-fit ascent iterations");
  cfg.define("step", "0.1", "group-fit step size");
  cfg.define("mu", "0.001", "group-fit L2 penalty");
  cfg.parse(args);
  cfg.echo(std::cerr, "group");
  if (cfg.get("model").empty() || cfg.get("heads").empty())
    throw UsageError("--model and --heads are required");
  if (cfg.get("query").empty()) throw UsageError("--query is required");

  auto [model, tables] = load_model(cfg.get("model"));
  const std::uint64_t fingerprint = user_table_fingerprint(tables.users);

  std::vector<AttributeClassifier> heads;
  const std::string& paths = cfg.get("heads");
  std::size_t start = 0;
  while (start <= paths.size()) {
    auto comma = paths.find(',', start);
    if (comma == std::string::npos) comma = paths.size();
    const std::string path = paths.substr(start, comma - start);
    if (!path.empty()) {
      AnyClassifier any = load_classifier(path);
      auto* attr = std::get_if<AttributeClassifier>(&any);
      if (attr == nullptr)
        throw Error(path + ": group queries need attribute classifiers");
      if (attr->k != model.k || attr->fingerprint != fingerprint)
        throw Error(path + ": classifier was trained on a different model");
      heads.push_back(std::move(*attr));
    }
    start = comma + 1;
  }

  auto resolve = [&](const std::pair<std::string, std::string>& cond) {
    for (const auto& head : heads) {
      if (head.name != cond.first) continue;
      for (int l = 0; l < head.labels; ++l)
        if (head.label_names[l] == cond.second)
          return GroupCondition{&head, l};
      throw Error("classifier '" + cond.first + "' has no label '" +
                  cond.second + "'");
    }
    throw Error("no classifier named '" + cond.first + "'");
  };
  auto build = [&](const detail::ParsedQuery& parsed) {
    GroupQuery query;
    for (const auto& cond : parsed.given) query.given.push_back(resolve(cond));
    for (const auto& cond : parsed.then) query.then.push_back(resolve(cond));
    return query;
  };

  GroupFitConfig fit_cfg;
  fit_cfg.iterations = static_cast<int>(cfg.get_int("iterations"));
  fit_cfg.step = cfg.get_real("step");
  fit_cfg.mu = cfg.get_real("mu");

  const GroupQuery q1 = build(detail::parse_query(cfg.get("query")));
  if (cfg.get_bool("ratio")) {
    if (cfg.get("query2").empty())
      throw UsageError("--ratio needs --query2");
    const GroupQuery q2 = build(detail::parse_query(cfg.get("query2")));
    const double ratio = group_ratio(q1, q2, model, fit_cfg);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "ratio=%.6g\n", ratio);
    std::cout << buf;
    return 0;
  }
  const GroupQueryResult result = group_query(q1, model, fit_cfg);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "p=%.6g factors=", result.probability);
  std::cout << buf;
  for (std::size_t i = 0; i < result.factors.size(); ++i) {
    if (i > 0) std::cout << ',';
    std::snprintf(buf, sizeof(buf), "%s:%.6g", result.factors[i].first.c_str(),
                  result.factors[i].second);
    std::cout << buf;
  }
  std::cout << "\n";
  return 0;
}

inline int run_export(const std::vector<std::string>& args) {
  CliConfig cfg;
  cfg.define("model", "", "trained model path (required)");
  cfg.define("table", "users", "users | words_in | words_out | entities");
  cfg.define("out", "-", "output path, '-' for stdout");
  cfg.parse(args);
  cfg.echo(std::cerr, "export");
  if (cfg.get("model").empty()) throw UsageError("--model is required");
  auto [model, tables] = load_model(cfg.get("model"));
  const std::string table = cfg.get("table");
  const VecTable* vecs = nullptr;
  const IdTable* ids = nullptr;
  if (table == "users") {
    vecs = &model.user_vecs;
    ids = &tables.users;
  } else if (table == "words_in") {
    vecs = &model.word_in_vecs;
    ids = &tables.vocab.table;
  } else if (table == "words_out") {
    vecs = &model.word_out_vecs;
    ids = &tables.vocab.table;
  } else if (table == "entities") {
    vecs = &model.entity_vecs;
    ids = &tables.entities;
  } else {
    throw UsageError("unknown table '" + table + "'");
  }
  std::string out;
  for (std::size_t i = 0; i < vecs->rows(); ++i)
    socialvec::detail::append_row(out, ids->name(static_cast<int>(i)),
                                  vecs->row(i));
  if (cfg.get("out") == "-")
    std::cout << out;
  else
    write_file(cfg.get("out"), out);
  return 0;
}

inline void print_usage(std::ostream& out) {
  out << "usage: socialvec <command> [--key value]...\n"
         "commands:\n"
         "  synth       generate a planted-structure corpus\n"
         "  train       learn embeddings from corpus TSV files\n"
         "  train-head  train an attribute classifier on a model\n"
         "  eval        run the ablation evaluation matrix\n"
         "  group       answer group-behavior queries\n"
         "  export      dump embeddings as text\n"
         "run `socialvec <command> --help` for per-command options.\n";
}

inline int dispatch(int argc, char** argv) {
  if (argc < 2) {
    print_usage(std::cerr);
    return 2;
  }
  const std::string command = argv[1];
  std::vector<std::string> args(argv + 2, argv + argc);
  const bool want_help =
      std::find(args.begin(), args.end(), "--help") != args.end();
  try {
    if (command == "--help" || command == "help") {
      print_usage(std::cout);
      return 0;
    }
    if (want_help) {
      CliConfig cfg;
      if (command == "synth") {
        cfg.define("out", "", "output directory (required)");
        detail::define_synth_keys(cfg);
      } else if (command == "train") {
        cfg.define("model", "", "model output path (required)");
        detail::define_corpus_keys(cfg);
        detail::define_train_keys(cfg);
      } else if (command == "train-head") {
        cfg.define("model", "", "trained model path (required)");
        cfg.define("truth", "", "truth.tsv with labels (required)");
        cfg.define("attr", "Likes", "attribute to predict");
        cfg.define("out", "", "classifier output path (required)");
        cfg.define("seed", "1", "random seed");
        detail::define_head_keys(cfg);
      } else if (command == "eval") {
        cfg.define("truth", "", "truth.tsv with labels");
        cfg.define("task", "all", "attr | friend | all");
        cfg.define("attr", "Likes", "attribute evaluated by the attr task");
        cfg.define("variants", "All,OnlyNetwork,Network+Text,"
                               "Network+Attribute",
                   "ablation variants");
        detail::define_corpus_keys(cfg);
        detail::define_train_keys(cfg);
        detail::define_head_keys(cfg);
      } else if (command == "group") {
        cfg.define("model", "", "trained model path (required)");
        cfg.define("heads", "", "classifier paths (required)");
        cfg.define("query", "", "IF ... THEN ... query");
        cfg.define("query2", "", "second query for --ratio");
        cfg.define("ratio", "false", "print the ratio of two queries");
        cfg.define("iterations", "500", "group-fit ascent iterations");
        cfg.define("step", "0.1", "group-fit step size");
        cfg.define("mu", "0.001", "group-fit L2 penalty");
      } else if (command == "export") {
        cfg.define("model", "", "trained model path (required)");
        cfg.define("table", "users", "which table to export");
        cfg.define("out", "-", "output path, '-' for stdout");
      } else {
        print_usage(std::cerr);
        return 2;
      }
      cfg.print_help(std::cout, command);
      return 0;
    }
    if (command == "synth") return run_synth(args);
    if (command == "train") return run_train(args);
    if (command == "train-head") return run_train_head(args);
    if (command == "eval") return run_eval(args);
    if (command == "group") return run_group(args);
    if (command == "export") return run_export(args);
    std::cerr << "error: unknown command '" << command << "'\n";
    print_usage(std::cerr);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_usage(std::cerr);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace socialvec::cli
