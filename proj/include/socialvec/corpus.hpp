#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "socialvec/error.hpp"
#include "socialvec/rng.hpp"

namespace socialvec {

// Insertion-ordered string -> dense index table. Index order is the only
// order the library ever iterates in, which keeps every downstream artifact
// independent of hash-map iteration order.
class IdTable {
 public:
  int add(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(int id) const { return names_[id]; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const IdTable& a, const IdTable& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

struct Vocabulary {
  IdTable table;                 // token -> index, descending frequency
  std::vector<long long> freq;   // per retained token
  long long min_count = 0;

  int size() const { return table.size(); }
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct Document {
  int user = -1;
  std::vector<int> tokens;
  friend bool operator==(const Document&, const Document&) = default;
};

// Stored canonically with a < b.
struct Edge {
  int a = -1;
  int b = -1;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Triple {
  int relation = -1;
  int user = -1;
  int entity = -1;
  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct SocialCorpus {
  IdTable users;
  Vocabulary vocab;
  IdTable entities;
  IdTable relations;
  std::vector<Document> documents;
  std::vector<Edge> edges;
  std::vector<Triple> triples;

  friend bool operator==(const SocialCorpus&, const SocialCorpus&) = default;
};

// ---------------------------------------------------------------------------
// Ingestion

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline void check_id(const std::string& id, const std::string& path,
                     std::size_t line_no, const char* what) {
  if (id.empty())
    throw ParseError(path, line_no, std::string("empty ") + what);
  if (id.find_first_of(" \t\r\n") != std::string::npos)
    throw ParseError(path, line_no,
                     std::string(what) + " contains whitespace: '" + id + "'");
}

}  // namespace detail

struct RawDocument {
  int user = -1;
  std::vector<std::string> tokens;
};

struct IngestedDocuments {
  std::vector<RawDocument> records;
  std::size_t skipped_empty = 0;  // lines whose token list was empty
};

// One record per line: `<user_id>\t<space-separated tokens>`. Tokens are
// matched by exact byte equality; runs of spaces delimit tokens.
inline IngestedDocuments ingest_documents(
    const std::string& path, IdTable& user_table,
    std::unordered_map<std::string, long long>& token_counts) {
  IngestedDocuments out;
  const auto lines = detail::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_tabs(lines[i]);
    if (fields.size() < 2)
      throw ParseError(path, line_no, "expected <user_id>\\t<tokens>");
    if (fields.size() > 2)
      throw ParseError(path, line_no, "unexpected extra TAB");
    detail::check_id(fields[0], path, line_no, "user id");

    RawDocument doc;
    doc.user = user_table.add(fields[0]);
    std::istringstream toks(fields[1]);
    std::string token;
    while (toks >> token) {
      ++token_counts[token];
      doc.tokens.push_back(std::move(token));
    }
    if (doc.tokens.empty()) {
      ++out.skipped_empty;
      continue;
    }
    out.records.push_back(std::move(doc));
  }
  return out;
}

// Retains tokens with count >= min_count; indices assigned in descending
// frequency, ties broken lexicographically.
inline Vocabulary build_vocabulary(
    const std::unordered_map<std::string, long long>& token_counts,
    long long min_count) {
  if (min_count < 1) throw InvalidArgumentError("min_count must be >= 1");
  std::vector<std::pair<std::string, long long>> kept;
  for (const auto& [token, count] : token_counts)
    if (count >= min_count) kept.emplace_back(token, count);
  if (kept.empty()) throw InvalidArgumentError("empty vocabulary");
  std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  Vocabulary vocab;
  vocab.min_count = min_count;
  for (auto& [token, count] : kept) {
    vocab.table.add(token);
    vocab.freq.push_back(count);
  }
  return vocab;
}

// Lines `<user_a>\t<user_b>`; canonicalized to a < b, deduplicated.
inline std::vector<Edge> ingest_edges(const std::string& path,
                                      IdTable& user_table) {
  std::vector<Edge> edges;
  std::set<Edge> seen;
  const auto lines = detail::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_tabs(lines[i]);
    if (fields.size() != 2)
      throw ParseError(path, line_no, "expected <user_a>\\t<user_b>");
    detail::check_id(fields[0], path, line_no, "user id");
    detail::check_id(fields[1], path, line_no, "user id");
    if (fields[0] == fields[1])
      throw ParseError(path, line_no, "self-loop edge '" + fields[0] + "'");
    int a = user_table.add(fields[0]);
    int b = user_table.add(fields[1]);
    if (a > b) std::swap(a, b);
    const Edge e{a, b};
    if (seen.insert(e).second) edges.push_back(e);
  }
  return edges;
}

// Lines `<relation>\t<user_id>\t<entity>`; duplicates dropped.
inline std::vector<Triple> ingest_triples(const std::string& path,
                                          IdTable& relation_table,
                                          IdTable& user_table,
                                          IdTable& entity_table) {
  std::vector<Triple> triples;
  std::set<Triple> seen;
  const auto lines = detail::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_tabs(lines[i]);
    if (fields.size() != 3)
      throw ParseError(path, line_no, "expected <relation>\\t<user>\\t<entity>");
    detail::check_id(fields[0], path, line_no, "relation");
    detail::check_id(fields[1], path, line_no, "user id");
    detail::check_id(fields[2], path, line_no, "entity");
    const Triple t{relation_table.add(fields[0]), user_table.add(fields[1]),
                   entity_table.add(fields[2])};
    if (seen.insert(t).second) triples.push_back(t);
  }
  return triples;
}

struct CorpusFiles {
  std::string documents;  // empty string = absent
  std::string edges;
  std::string triples;
};

// Full ingestion pipeline. At least one of {documents, edges} is required.
inline SocialCorpus build_corpus(const CorpusFiles& files, long long min_count) {
  if (files.documents.empty() && files.edges.empty())
    throw InvalidArgumentError(
        "a corpus needs at least one of documents or edges");
  SocialCorpus corpus;
  std::vector<RawDocument> raw;
  if (!files.documents.empty()) {
    std::unordered_map<std::string, long long> counts;
    auto ingested = ingest_documents(files.documents, corpus.users, counts);
    raw = std::move(ingested.records);
    // a documents file with no records at all is an absent stream, not an
    // empty vocabulary
    if (!counts.empty()) corpus.vocab = build_vocabulary(counts, min_count);
    for (auto& doc : raw) {
      Document indexed;
      indexed.user = doc.user;
      for (const auto& token : doc.tokens)
        if (auto id = corpus.vocab.table.find(token))
          indexed.tokens.push_back(*id);
      // Documents emptied by the min_count filter carry no training events.
      if (!indexed.tokens.empty())
        corpus.documents.push_back(std::move(indexed));
    }
  }
  if (!files.edges.empty())
    corpus.edges = ingest_edges(files.edges, corpus.users);
  if (!files.triples.empty())
    corpus.triples = ingest_triples(files.triples, corpus.relations,
                                    corpus.users, corpus.entities);
  return corpus;
}

// ---------------------------------------------------------------------------
// Corpus -> TSV (the inverse of ingestion; also the canonical dump format)

inline std::string documents_tsv(const SocialCorpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    out += corpus.users.name(doc.user);
    out += '\t';
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i > 0) out += ' ';
      out += corpus.vocab.table.name(doc.tokens[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string edges_tsv(const SocialCorpus& corpus) {
  std::string out;
  for (const auto& e : corpus.edges) {
    out += corpus.users.name(e.a);
    out += '\t';
    out += corpus.users.name(e.b);
    out += '\n';
  }
  return out;
}

inline std::string triples_tsv(const SocialCorpus& corpus) {
  std::string out;
  for (const auto& t : corpus.triples) {
    out += corpus.relations.name(t.relation);
    out += '\t';
    out += corpus.users.name(t.user);
    out += '\t';
    out += corpus.entities.name(t.entity);
    out += '\n';
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("failed writing " + path);
}

// ---------------------------------------------------------------------------
// Negative sampling

// Draws indices with probability proportional to weight^power.
class NegativeSampler {
 public:
  NegativeSampler() = default;

  std::size_t size() const { return cumulative_.size(); }
  std::size_t support_size() const { return support_size_; }
  double power() const { return power_; }

  // Analytic probability of drawing index i.
  double probability(std::size_t i) const {
    const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - lo) / cumulative_.back();
  }

  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it =
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= cumulative_.size()) i = cumulative_.size() - 1;
    return i;
  }

  friend NegativeSampler build_sampler(std::span<const double> weights,
                                       double power);

 private:
  std::vector<double> cumulative_;
  std::size_t support_size_ = 0;
  double power_ = 1.0;
};

inline NegativeSampler build_sampler(std::span<const double> weights,
                                     double power) {
  if (!(power > 0.0 && power <= 1.0))
    throw InvalidArgumentError("sampler power must be in (0, 1]");
  NegativeSampler sampler;
  sampler.power_ = power;
  sampler.cumulative_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidArgumentError("negative sampler weight");
    if (w > 0.0) {
      total += std::pow(w, power);
      ++sampler.support_size_;
    }
    sampler.cumulative_.push_back(total);
  }
  if (total <= 0.0)
    throw InvalidArgumentError("sampler needs at least one positive weight");
  return sampler;
}

inline NegativeSampler uniform_sampler(std::size_t n) {
  std::vector<double> ones(n, 1.0);
  return build_sampler(ones, 1.0);
}

// Rejection sampling; the marginal over non-excluded support is the
// sampler's distribution renormalized.
template <typename ExcludeSet>
std::size_t sample_negative(const NegativeSampler& sampler, Rng& rng,
                            const ExcludeSet& exclude) {
  if (exclude.size() >= sampler.support_size()) {
    std::size_t available = 0;
    for (std::size_t i = 0; i < sampler.size(); ++i)
      if (sampler.probability(i) > 0.0 && !exclude.contains(i)) ++available;
    if (available == 0)
      throw InvalidArgumentError("exclusions cover the sampler support");
  }
  while (true) {
    const std::size_t i = sampler.sample(rng);
    if (!exclude.contains(i)) return i;
  }
}

// ---------------------------------------------------------------------------

// Up to `window` token indices on each side of `position`, truncated at the
// document boundaries; never includes the center token.
inline std::vector<int> context_window(const Document& doc,
                                       std::size_t position,
                                       std::size_t window) {
  if (position >= doc.tokens.size())
    throw InvalidArgumentError("context position out of range");
  std::vector<int> context;
  const std::size_t lo = position >= window ? position - window : 0;
  const std::size_t hi =
      std::min(doc.tokens.size(), position + window + 1);
  for (std::size_t i = lo; i < hi; ++i)
    if (i != position) context.push_back(doc.tokens[i]);
  return context;
}

}  // namespace socialvec
