#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "socialvec/corpus.hpp"
#include "socialvec/error.hpp"
#include "socialvec/rng.hpp"

namespace socialvec {

struct SynthAttribute {
  std::string relation;
  std::vector<std::string> entities;  // one per community
  double noise = 0.0;                 // chance of flipping to another label
};

// The two standard planted attributes: a noise-free community marker and a
// noisy community-correlated preference.
inline std::vector<SynthAttribute> default_attributes(int n_communities,
                                                      double marker_noise,
                                                      double attr_noise) {
  std::vector<std::string> groups, topics;
  for (int c = 0; c < n_communities; ++c) {
    groups.push_back("group" + std::to_string(c));
    topics.push_back("topic" + std::to_string(c));
  }
  return {{"MemberOf", groups, marker_noise}, {"Likes", topics, attr_noise}};
}

struct SynthConfig {
  int n_users = 200;
  int n_communities = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  int vocab_size = 1000;
  int tokens_per_user = 200;
  double topic_skew = 0.8;  // mass on the user's own community block
  std::vector<SynthAttribute> attributes = default_attributes(2, 0.0, 0.1);
  std::uint64_t seed = 1;

  void validate() const {
    if (n_communities < 1) throw InvalidArgumentError("need >= 1 community");
    if (n_users < 2 * n_communities)
      throw InvalidArgumentError("need at least two users per community");
    if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
      throw InvalidArgumentError("need 0 <= p_out <= p_in <= 1");
    if (vocab_size < n_communities)
      throw InvalidArgumentError("vocab_size must cover every community");
    if (tokens_per_user < 0)
      throw InvalidArgumentError("tokens_per_user must be nonnegative");
    const double uniform = 1.0 / n_communities;
    if (!(topic_skew >= uniform && topic_skew <= 1.0))
      throw InvalidArgumentError("topic_skew must be in [1/n_communities, 1]");
    for (const auto& attr : attributes) {
      if (static_cast<int>(attr.entities.size()) != n_communities)
        throw InvalidArgumentError("attribute '" + attr.relation +
                                   "' needs one entity per community");
      if (!(attr.noise >= 0.0 && attr.noise < 0.5))
        throw InvalidArgumentError("attribute noise must be in [0, 0.5)");
    }
  }
};

struct SynthDataset {
  SocialCorpus corpus;
  std::vector<int> community;               // per user
  std::vector<std::vector<int>> attr_labels;  // [attribute][user] -> label
  SynthConfig config;
};

namespace detail {

inline std::string padded_name(const char* prefix, int i, int max_value) {
  std::string digits = std::to_string(i);
  std::string width = std::to_string(max_value > 0 ? max_value - 1 : 0);
  std::string out = prefix;
  out.append(width.size() - digits.size(), '0');
  out += digits;
  return out;
}

}  // namespace detail

// Planted-partition graph plus block-topic text plus per-community
// attributes. Users are assigned round-robin to communities; every random
// choice comes from the seeded generator, so equal seeds reproduce the
// dataset exactly.
inline SynthDataset generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthDataset out;
  out.config = cfg;
  Rng rng(cfg.seed);

  out.community.resize(cfg.n_users);
  std::vector<std::string> user_names(cfg.n_users);
  for (int u = 0; u < cfg.n_users; ++u) {
    out.community[u] = u % cfg.n_communities;
    user_names[u] = detail::padded_name("u", u, cfg.n_users);
  }
  std::vector<std::string> token_names(cfg.vocab_size);
  for (int t = 0; t < cfg.vocab_size; ++t)
    token_names[t] = detail::padded_name("w", t, cfg.vocab_size);

  // Corpus assembled through the same code paths ingestion uses, so
  // emitting TSV files and re-ingesting them reproduces this corpus.
  for (const auto& name : user_names) out.corpus.users.add(name);

  for (int a = 0; a < cfg.n_users; ++a)
    for (int b = a + 1; b < cfg.n_users; ++b) {
      const double p =
          out.community[a] == out.community[b] ? cfg.p_in : cfg.p_out;
      if (rng.uniform() < p) out.corpus.edges.push_back({a, b});
    }

  // Community c owns the token block [c*V/C, (c+1)*V/C). With probability
  // topic_skew a token comes from the user's own block, otherwise uniformly
  // from the other blocks, so topic_skew == 1/C is exactly uninformative.
  std::unordered_map<std::string, long long> token_counts;
  std::vector<RawDocument> raw_docs;
  if (cfg.tokens_per_user > 0) {
    const auto block_lo = [&](int c) {
      return static_cast<long long>(c) * cfg.vocab_size / cfg.n_communities;
    };
    for (int u = 0; u < cfg.n_users; ++u) {
      const int c = out.community[u];
      const long long lo = block_lo(c);
      const long long hi = block_lo(c + 1);
      const long long block = hi - lo;
      const long long rest = cfg.vocab_size - block;
      RawDocument doc;
      doc.user = u;
      doc.tokens.reserve(cfg.tokens_per_user);
      for (int t = 0; t < cfg.tokens_per_user; ++t) {
        long long token;
        if (rest == 0 || rng.uniform() < cfg.topic_skew) {
          token = lo + static_cast<long long>(rng.below(block));
        } else {
          token = static_cast<long long>(rng.below(rest));
          if (token >= lo) token += block;
        }
        ++token_counts[token_names[token]];
        doc.tokens.push_back(token_names[token]);
      }
      raw_docs.push_back(std::move(doc));
    }
    out.corpus.vocab = build_vocabulary(token_counts, 1);
    for (const auto& doc : raw_docs) {
      Document indexed;
      indexed.user = doc.user;
      for (const auto& token : doc.tokens)
        indexed.tokens.push_back(*out.corpus.vocab.table.find(token));
      out.corpus.documents.push_back(std::move(indexed));
    }
  }

  for (const auto& attr : cfg.attributes) {
    const int rel = out.corpus.relations.add(attr.relation);
    std::vector<int> entity_ids;
    for (const auto& entity : attr.entities)
      entity_ids.push_back(out.corpus.entities.add(entity));
    std::vector<int> labels(cfg.n_users);
    for (int u = 0; u < cfg.n_users; ++u) {
      int label = out.community[u];
      if (cfg.n_communities > 1 && rng.uniform() < attr.noise) {
        int other = static_cast<int>(rng.below(cfg.n_communities - 1));
        if (other >= label) ++other;
        label = other;
      }
      labels[u] = label;
      out.corpus.triples.push_back({rel, u, entity_ids[label]});
    }
    out.attr_labels.push_back(std::move(labels));
  }
  return out;
}

inline std::string truth_tsv(const SynthDataset& dataset) {
  std::string out;
  const auto& cfg = dataset.config;
  for (int u = 0; u < cfg.n_users; ++u) {
    out += dataset.corpus.users.name(u);
    out += '\t';
    out += std::to_string(dataset.community[u]);
    out += '\t';
    for (std::size_t a = 0; a < cfg.attributes.size(); ++a) {
      if (a > 0) out += ',';
      out += cfg.attributes[a].relation;
      out += '=';
      out += cfg.attributes[a].entities[dataset.attr_labels[a][u]];
    }
    out += '\n';
  }
  return out;
}

// Writes documents.tsv, edges.tsv, triples.tsv and truth.tsv into `dir`.
inline void write_synth_dataset(const SynthDataset& dataset,
                                const std::string& dir) {
  write_file(dir + "/documents.tsv", documents_tsv(dataset.corpus));
  write_file(dir + "/edges.tsv", edges_tsv(dataset.corpus));
  write_file(dir + "/triples.tsv", triples_tsv(dataset.corpus));
  write_file(dir + "/truth.tsv", truth_tsv(dataset));
}

struct AttrPredicate {
  std::string relation;
  std::string entity;
};

namespace detail {

inline bool satisfies(const SynthDataset& dataset, int user,
                      const std::vector<AttrPredicate>& predicates) {
  for (const auto& pred : predicates) {
    bool found = false;
    for (std::size_t a = 0; a < dataset.config.attributes.size(); ++a) {
      const auto& attr = dataset.config.attributes[a];
      if (attr.relation != pred.relation) continue;
      found = true;
      const int label = dataset.attr_labels[a][user];
      if (attr.entities[label] != pred.entity) return false;
      break;
    }
    if (!found)
      throw InvalidArgumentError("unknown attribute '" + pred.relation + "'");
  }
  return true;
}

}  // namespace detail

// Brute-force ground truth for group queries:
// count(A and B) / count(A) over the planted labels.
inline double empirical_conditional(const SynthDataset& dataset,
                                    const std::vector<AttrPredicate>& given,
                                    const std::vector<AttrPredicate>& then) {
  long long count_given = 0;
  long long count_both = 0;
  for (int u = 0; u < dataset.config.n_users; ++u) {
    if (!detail::satisfies(dataset, u, given)) continue;
    ++count_given;
    if (detail::satisfies(dataset, u, then)) ++count_both;
  }
  if (count_given == 0)
    throw InvalidArgumentError("no user satisfies the given predicates");
  return static_cast<double>(count_both) / static_cast<double>(count_given);
}

}  // namespace socialvec
