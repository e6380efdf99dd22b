#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "socialvec/corpus.hpp"
#include "socialvec/error.hpp"
#include "socialvec/math.hpp"
#include "socialvec/rng.hpp"

namespace socialvec {

struct InitConfig {
  std::uint64_t seed = 1;
  // Negative values mean "use the K-dependent default".
  double vec_half_range = -1.0;        // default 0.5 / K
  double relation_noise_half_range = -1.0;  // default 0.1 / K
};

// All learnable tensors. Relation rows are K*K matrices, row-major.
struct ModelParams {
  int k = 0;
  VecTable user_vecs;      // |V| x K
  VecTable word_in_vecs;   // |W| x K, context side
  VecTable word_out_vecs;  // |W| x K, target side (empty when shared)
  VecTable entity_vecs;    // |M| x K
  VecTable relation_mats;  // |R| x (K*K)
  bool shared_word_table = false;
  bool words_frozen = false;

  std::span<const double> user(int v) const { return user_vecs.row(v); }
  std::span<double> user(int v) { return user_vecs.row(v); }
  std::span<const double> word_in(int w) const { return word_in_vecs.row(w); }
  std::span<double> word_in(int w) { return word_in_vecs.row(w); }
  std::span<const double> word_out(int w) const {
    return shared_word_table ? word_in_vecs.row(w) : word_out_vecs.row(w);
  }
  std::span<double> word_out(int w) {
    return shared_word_table ? word_in_vecs.row(w) : word_out_vecs.row(w);
  }
  std::span<const double> entity(int m) const { return entity_vecs.row(m); }
  std::span<double> entity(int m) { return entity_vecs.row(m); }
  std::span<const double> relation(int r) const {
    return relation_mats.row(r);
  }
  std::span<double> relation(int r) { return relation_mats.row(r); }
};

struct ModelSizes {
  int users = 0;
  int words = 0;
  int entities = 0;
  int relations = 0;
};

// Vectors i.i.d. uniform in [-h, +h] with h = 0.5/K; relation matrices start
// at identity plus elementwise noise in [-0.1/K, +0.1/K] so the initial
// bilinear score is close to a plain dot product. Fill order (users,
// words-in, words-out, entities, relations) is fixed for reproducibility.
inline ModelParams init_params(const ModelSizes& sizes, int k,
                               const InitConfig& init,
                               bool shared_word_table = false) {
  if (k < 1) throw InvalidArgumentError("embedding width K must be >= 1");
  if (sizes.users < 0 || sizes.words < 0 || sizes.entities < 0 ||
      sizes.relations < 0)
    throw InvalidArgumentError("negative table size");
  const double half =
      init.vec_half_range >= 0.0 ? init.vec_half_range : 0.5 / k;
  const double rel_half = init.relation_noise_half_range >= 0.0
                              ? init.relation_noise_half_range
                              : 0.1 / k;
  ModelParams params;
  params.k = k;
  params.shared_word_table = shared_word_table;
  Rng rng(init.seed);
  auto fill = [&](VecTable& table, std::size_t rows, std::size_t width) {
    table = VecTable(rows, width);
    for (double& v : table.data()) v = rng.uniform(-half, half);
  };
  const auto ku = static_cast<std::size_t>(k);
  fill(params.user_vecs, sizes.users, ku);
  fill(params.word_in_vecs, sizes.words, ku);
  if (shared_word_table)
    params.word_out_vecs = VecTable(0, ku);
  else
    fill(params.word_out_vecs, sizes.words, ku);
  fill(params.entity_vecs, sizes.entities, ku);
  params.relation_mats = VecTable(sizes.relations, ku * ku);
  for (int r = 0; r < sizes.relations; ++r) {
    auto mat = params.relation_mats.row(r);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        mat[static_cast<std::size_t>(i) * ku + j] =
            (i == j ? 1.0 : 0.0) + rng.uniform(-rel_half, rel_half);
  }
  return params;
}

// ---------------------------------------------------------------------------
// Persistence: line-oriented UTF-8 text, decimal reals with 17 significant
// digits (lossless for 64-bit floats). See README for the exact layout.

namespace detail {

inline void append_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

inline void append_row(std::string& out, const std::string& id,
                       std::span<const double> values) {
  out += id;
  for (double v : values) {
    out += ' ';
    append_real(out, v);
  }
  out += '\n';
}

class ModelReader {
 public:
  explicit ModelReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open " + path);
  }

  std::string next_line() {
    std::string line;
    if (!std::getline(in_, line))
      throw TruncatedModelError(path_ + ": unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // `SECTION <count>`
  std::size_t section(const std::string& name) {
    const std::string line = next_line();
    const auto sp = line.find(' ');
    if (sp == std::string::npos || line.substr(0, sp) != name)
      throw TruncatedModelError(path_ + ": expected section " + name);
    return parse_count(line.substr(sp + 1), name);
  }

  // `<id> <v1> ... <vN>` with exactly `width` values. A short row at the
  // physical end of the file is a truncation, not a dimension mismatch.
  std::pair<std::string, std::vector<double>> row(std::size_t width) {
    const std::string line = next_line();
    const auto sp = line.find(' ');
    if (sp == std::string::npos)
      throw TruncatedModelError(path_ + ": malformed row '" + line + "'");
    std::vector<double> values = parse_reals(line.c_str() + sp + 1);
    if (values.size() != width) {
      if (values.size() < width && in_.eof())
        throw TruncatedModelError(path_ + ": file ends mid-row");
      throw DimensionMismatchError(
          path_ + ": row has " + std::to_string(values.size()) +
          " values, expected " + std::to_string(width));
    }
    return {line.substr(0, sp), std::move(values)};
  }

  std::size_t parse_count(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const long long n = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || n < 0)
      throw TruncatedModelError(path_ + ": bad count for " + what);
    return static_cast<std::size_t>(n);
  }

  const std::string& path() const { return path_; }

 private:
  std::vector<double> parse_reals(const char* cursor) {
    std::vector<double> values;
    while (*cursor != '\0') {
      char* end = nullptr;
      const double v = std::strtod(cursor, &end);
      if (end == cursor)
        throw TruncatedModelError(path_ + ": bad real value");
      values.push_back(v);
      cursor = end;
      while (*cursor == ' ') ++cursor;
    }
    return values;
  }

  std::string path_;
  std::ifstream in_;
};

}  // namespace detail

struct ModelTables {
  IdTable users;
  Vocabulary vocab;
  IdTable entities;
  IdTable relations;
};

inline std::string model_to_string(const ModelParams& params,
                                   const ModelTables& tables) {
  if (!all_finite(params.user_vecs.data()) ||
      !all_finite(params.word_in_vecs.data()) ||
      !all_finite(params.word_out_vecs.data()) ||
      !all_finite(params.entity_vecs.data()) ||
      !all_finite(params.relation_mats.data()))
    throw TrainError("refusing to save a model with non-finite values");
  std::string out;
  out += "SOCIALVEC 1\n";
  out += "K " + std::to_string(params.k) + "\n";
  auto section = [&](const char* name, const VecTable& table,
                     const IdTable& ids) {
    out += name;
    out += ' ';
    out += std::to_string(table.rows());
    out += '\n';
    for (std::size_t i = 0; i < table.rows(); ++i)
      detail::append_row(out, ids.name(static_cast<int>(i)), table.row(i));
  };
  section("USERS", params.user_vecs, tables.users);
  section("WORDS_IN", params.word_in_vecs, tables.vocab.table);
  section("WORDS_OUT", params.word_out_vecs, tables.vocab.table);
  section("ENTITIES", params.entity_vecs, tables.entities);
  section("RELATIONS", params.relation_mats, tables.relations);
  return out;
}

inline void save_model(const ModelParams& params, const ModelTables& tables,
                       const std::string& path) {
  write_file(path, model_to_string(params, tables));
}

inline std::pair<ModelParams, ModelTables> load_model(const std::string& path) {
  detail::ModelReader reader(path);
  const std::string header = reader.next_line();
  const auto sp = header.find(' ');
  if (sp == std::string::npos || header.substr(0, sp) != "SOCIALVEC")
    throw VersionMismatchError(path + ": not a SOCIALVEC model file");
  if (header.substr(sp + 1) != "1")
    throw VersionMismatchError(path + ": unsupported model version '" +
                               header.substr(sp + 1) + "'");
  const std::size_t k = reader.section("K");
  if (k < 1) throw DimensionMismatchError(path + ": K must be >= 1");

  ModelParams params;
  ModelTables tables;
  params.k = static_cast<int>(k);
  auto read_section = [&](const char* name, VecTable& table, IdTable& ids,
                          std::size_t width) {
    const std::size_t n = reader.section(name);
    table = VecTable(n, width);
    for (std::size_t i = 0; i < n; ++i) {
      auto [id, values] = reader.row(width);
      if (ids.add(id) != static_cast<int>(i))
        throw DimensionMismatchError(path + ": duplicate id '" + id +
                                     "' in section " + name);
      std::copy(values.begin(), values.end(), table.row(i).begin());
    }
  };
  read_section("USERS", params.user_vecs, tables.users, k);
  read_section("WORDS_IN", params.word_in_vecs, tables.vocab.table, k);
  IdTable out_words;
  read_section("WORDS_OUT", params.word_out_vecs, out_words, k);
  if (params.word_out_vecs.rows() > 0 && out_words != tables.vocab.table)
    throw DimensionMismatchError(path + ": WORDS_IN / WORDS_OUT id mismatch");
  read_section("ENTITIES", params.entity_vecs, tables.entities, k);
  read_section("RELATIONS", params.relation_mats, tables.relations, k * k);
  tables.vocab.freq.assign(tables.vocab.table.size(), 0);
  // A trained shared-table model has in-vectors but no out section.
  params.shared_word_table =
      params.word_in_vecs.rows() > 0 && params.word_out_vecs.rows() == 0;
  return {std::move(params), std::move(tables)};
}

// Overwrites word in-vectors for tokens found in `path` (lines
// `<token> <v1> ... <vK>`). Returns how many vocabulary tokens matched.
inline std::size_t load_pretrained_words(ModelParams& params,
                                         const Vocabulary& vocab,
                                         const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path);
  std::size_t matched = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(probe, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos)
      throw ParseError(path, line_no, "expected <token> <values...>");
    const std::string token = line.substr(0, sp);
    std::vector<double> values;
    const char* cursor = line.c_str() + sp + 1;
    while (*cursor != '\0') {
      char* end = nullptr;
      const double v = std::strtod(cursor, &end);
      if (end == cursor) throw ParseError(path, line_no, "bad real value");
      values.push_back(v);
      cursor = end;
      while (*cursor == ' ') ++cursor;
    }
    if (values.size() != static_cast<std::size_t>(params.k))
      throw DimensionMismatchError(
          path + ":" + std::to_string(line_no) + ": vector width " +
          std::to_string(values.size()) + " does not match K=" +
          std::to_string(params.k));
    if (auto id = vocab.table.find(token)) {
      std::copy(values.begin(), values.end(),
                params.word_in_vecs.row(*id).begin());
      ++matched;
    }
  }
  return matched;
}

}  // namespace socialvec
