#pragma once

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "socialvec/corpus.hpp"
#include "socialvec/error.hpp"
#include "socialvec/inference.hpp"
#include "socialvec/rng.hpp"
#include "socialvec/trainer.hpp"

namespace socialvec {

struct SplitSpec {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(train > 0.0 && dev > 0.0 && test > 0.0))
      throw InvalidArgumentError("split ratios must all be positive");
    const double sum = train + dev + test;
    if (std::fabs(sum - 1.0) > 1e-9)
      throw InvalidArgumentError("split ratios must sum to 1");
  }
};

struct Split {
  std::vector<int> train;
  std::vector<int> dev;
  std::vector<int> test;
};

// Disjoint covering split; dev and test sizes round down, the remainder
// goes to train.
inline Split split_indices(int n, const SplitSpec& spec) {
  spec.validate();
  // Nudge before flooring so ratios like 0.3 don't land one below the
  // intended size through floating-point rounding.
  const auto n_dev = static_cast<int>(n * spec.dev + 1e-9);
  const auto n_test = static_cast<int>(n * spec.test + 1e-9);
  if (n_dev < 1 || n_test < 1)
    throw InvalidArgumentError("split leaves dev or test empty");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix_seed(spec.seed, 4001));
  rng.shuffle(order);
  Split split;
  split.dev.assign(order.begin(), order.begin() + n_dev);
  split.test.assign(order.begin() + n_dev, order.begin() + n_dev + n_test);
  split.train.assign(order.begin() + n_dev + n_test, order.end());
  return split;
}

inline Split split_users(int n_users, const SplitSpec& spec) {
  if (n_users < 10)
    throw InvalidArgumentError("need at least 10 users to split");
  return split_indices(n_users, spec);
}

struct AblationVariant {
  std::string name;
  bool use_text = true;
  bool use_graph = true;
  bool use_relations = true;

  void validate() const {
    if (!use_text && !use_graph && !use_relations)
      throw InvalidArgumentError("variant '" + name + "' masks every signal");
  }
};

// The comparison set the evaluation tables are built around.
inline std::vector<AblationVariant> standard_variants() {
  return {{"All", true, true, true},
          {"OnlyNetwork", false, true, false},
          {"Network+Text", true, true, false},
          {"Network+Attribute", false, true, true}};
}

inline std::vector<AblationVariant> single_signal_variants() {
  return {{"OnlyText", true, false, false},
          {"OnlyNetwork", false, true, false},
          {"OnlyAttributes", false, false, true}};
}

struct TaskResult {
  std::string variant;
  std::string task;
  double accuracy = 0.0;
  int n_train = 0;
  int n_dev = 0;
  int n_test = 0;
  // Friend task only: the balanced pair set.
  int n_pos = 0;
  int n_neg = 0;
};

struct AttributeTask {
  std::vector<std::pair<int, int>> examples;  // (user index, label)
  std::vector<std::string> label_names;
  // Relation whose triples must not reach embedding training for dev/test
  // users (the relation the labels were read off). Empty = nothing to scrub.
  std::string source_relation;
  std::string task_name = "attr";
};

namespace detail {

inline SocialCorpus mask_corpus(SocialCorpus corpus,
                                const AblationVariant& variant) {
  variant.validate();
  if (!variant.use_text) {
    corpus.documents.clear();
    corpus.vocab = Vocabulary{};
  }
  if (!variant.use_graph) corpus.edges.clear();
  if (!variant.use_relations) corpus.triples.clear();
  return corpus;
}

inline void scrub_relation_for_users(SocialCorpus& corpus,
                                     const std::string& relation,
                                     const std::vector<bool>& scrub_user) {
  const auto rel = corpus.relations.find(relation);
  if (!rel) return;
  std::erase_if(corpus.triples, [&](const Triple& t) {
    return t.relation == *rel && scrub_user[t.user];
  });
}

template <typename Examples>
Examples pick_examples(const Examples& all, const std::vector<bool>& member) {
  Examples out;
  for (const auto& ex : all)
    if (member[ex.first]) out.push_back(ex);
  return out;
}

}  // namespace detail

// Trains the head for head_cfg.epochs and keeps the snapshot with the best
// dev accuracy (earliest epoch wins ties). Only train and dev examples are
// readable here; that is what keeps test labels out of model selection.
inline AttributeClassifier train_attr_head_with_dev_selection(
    const ModelParams& model, const IdTable& users,
    const std::vector<std::pair<int, int>>& train_examples,
    const std::vector<std::pair<int, int>>& dev_examples,
    const HeadConfig& cfg, std::vector<std::string> label_names,
    std::string name) {
  std::vector<int> labels;
  for (const auto& [user, label] : train_examples) labels.push_back(label);
  const int label_count = detail::checked_label_count(
      labels, static_cast<int>(label_names.size()));
  AttributeClassifier clf = attr_init(model, users, label_count, cfg,
                                      std::move(label_names), std::move(name));
  AttributeClassifier best = clf;
  double best_acc = -1.0;
  Rng rng(mix_seed(cfg.seed, 7002));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    attr_train_epoch(clf, train_examples, model, cfg, rng);
    const double acc = dev_examples.empty()
                           ? 0.0
                           : attr_accuracy(clf, model, dev_examples);
    if (acc > best_acc) {
      best_acc = acc;
      best = clf;
    }
  }
  return dev_examples.empty() ? clf : best;
}

inline RelationClassifier train_rel_head_with_dev_selection(
    const ModelParams& model, const IdTable& users,
    const std::vector<PairExample>& train_examples,
    const std::vector<PairExample>& dev_examples, const HeadConfig& cfg,
    std::vector<std::string> label_names, std::string name) {
  std::vector<int> labels;
  for (const auto& [a, b, label] : train_examples) labels.push_back(label);
  const int label_count = detail::checked_label_count(
      labels, static_cast<int>(label_names.size()));
  RelationClassifier clf = rel_init(model, users, label_count, cfg,
                                    std::move(label_names), std::move(name));
  RelationClassifier best = clf;
  double best_acc = -1.0;
  Rng rng(mix_seed(cfg.seed, 7004));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rel_train_epoch(clf, train_examples, model, cfg, rng);
    const double acc =
        dev_examples.empty() ? 0.0 : rel_accuracy(clf, model, dev_examples);
    if (acc > best_acc) {
      best_acc = acc;
      best = clf;
    }
  }
  return dev_examples.empty() ? clf : best;
}

// Retrains embeddings with the variant's streams, trains the attribute head
// on the train split with dev-selected epoch, reports test accuracy.
inline TaskResult run_attribute_task(const SocialCorpus& corpus,
                                     const AttributeTask& task,
                                     const AblationVariant& variant,
                                     const TrainConfig& train_cfg,
                                     const HeadConfig& head_cfg,
                                     const SplitSpec& split_spec) {
  {
    std::vector<int> labels;
    for (const auto& [user, label] : task.examples) labels.push_back(label);
    detail::checked_label_count(labels,
                                static_cast<int>(task.label_names.size()));
  }
  const Split split = split_users(corpus.users.size(), split_spec);
  std::vector<bool> in_dev_or_test(corpus.users.size(), false);
  for (int u : split.dev) in_dev_or_test[u] = true;
  for (int u : split.test) in_dev_or_test[u] = true;

  SocialCorpus masked = detail::mask_corpus(corpus, variant);
  if (!task.source_relation.empty())
    detail::scrub_relation_for_users(masked, task.source_relation,
                                     in_dev_or_test);
  const ModelParams model = train(masked, train_cfg).params;

  std::vector<bool> in_train(corpus.users.size(), false);
  for (int u : split.train) in_train[u] = true;
  std::vector<bool> in_dev(corpus.users.size(), false);
  for (int u : split.dev) in_dev[u] = true;
  std::vector<bool> in_test(corpus.users.size(), false);
  for (int u : split.test) in_test[u] = true;

  const auto train_ex = detail::pick_examples(task.examples, in_train);
  const auto dev_ex = detail::pick_examples(task.examples, in_dev);
  const auto test_ex = detail::pick_examples(task.examples, in_test);

  const AttributeClassifier clf = train_attr_head_with_dev_selection(
      model, corpus.users, train_ex, dev_ex, head_cfg, task.label_names,
      task.task_name);

  TaskResult result;
  result.variant = variant.name;
  result.task = task.task_name;
  result.accuracy = attr_accuracy(clf, model, test_ex);
  result.n_train = static_cast<int>(train_ex.size());
  result.n_dev = static_cast<int>(dev_ex.size());
  result.n_test = static_cast<int>(test_ex.size());
  return result;
}

struct FriendTaskData {
  SocialCorpus training_corpus;     // input corpus minus held-out edges
  std::vector<Edge> heldout;        // positives, absent from training_corpus
  std::vector<PairExample> pairs;   // balanced and shuffled, label 1=friend
};

// Removes 10% of the edges before embedding training and builds a balanced
// pair set from them plus uniformly sampled non-edges.
inline FriendTaskData prepare_friend_task(const SocialCorpus& corpus,
                                          std::uint64_t seed,
                                          double holdout_fraction = 0.1) {
  if (corpus.edges.size() < 20)
    throw InvalidArgumentError("friend task needs at least 20 edges");
  FriendTaskData data;
  Rng rng(mix_seed(seed, 5001));

  std::vector<int> order(corpus.edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);
  const auto n_held =
      static_cast<std::size_t>(corpus.edges.size() * holdout_fraction);
  std::vector<bool> held(corpus.edges.size(), false);
  for (std::size_t i = 0; i < n_held; ++i) {
    held[order[i]] = true;
    data.heldout.push_back(corpus.edges[order[i]]);
  }

  data.training_corpus = corpus;
  data.training_corpus.edges.clear();
  for (std::size_t i = 0; i < corpus.edges.size(); ++i)
    if (!held[i]) data.training_corpus.edges.push_back(corpus.edges[i]);

  const std::set<Edge> all_edges(corpus.edges.begin(), corpus.edges.end());
  const int n_users = corpus.users.size();
  const auto max_pairs = static_cast<std::size_t>(n_users) *
                         static_cast<std::size_t>(n_users - 1) / 2;
  if (max_pairs - all_edges.size() < data.heldout.size())
    throw InvalidArgumentError("not enough non-edges for a balanced pair set");
  std::set<Edge> sampled;
  while (sampled.size() < data.heldout.size()) {
    int a = static_cast<int>(rng.below(n_users));
    int b = static_cast<int>(rng.below(n_users));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const Edge e{a, b};
    if (all_edges.contains(e)) continue;
    sampled.insert(e);
  }

  for (const Edge& e : data.heldout) data.pairs.emplace_back(e.a, e.b, 1);
  for (const Edge& e : sampled) data.pairs.emplace_back(e.a, e.b, 0);
  rng.shuffle(data.pairs);
  return data;
}

inline TaskResult run_friend_task(const SocialCorpus& corpus,
                                  const AblationVariant& variant,
                                  const TrainConfig& train_cfg,
                                  const HeadConfig& head_cfg,
                                  const SplitSpec& split_spec) {
  FriendTaskData data = prepare_friend_task(corpus, split_spec.seed);
  const SocialCorpus masked =
      detail::mask_corpus(std::move(data.training_corpus), variant);
  const ModelParams model = train(masked, train_cfg).params;

  const Split split =
      split_indices(static_cast<int>(data.pairs.size()), split_spec);
  auto pick = [&](const std::vector<int>& idx) {
    std::vector<PairExample> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(data.pairs[i]);
    return out;
  };
  const auto train_ex = pick(split.train);
  const auto dev_ex = pick(split.dev);
  const auto test_ex = pick(split.test);

  const RelationClassifier clf = train_rel_head_with_dev_selection(
      model, corpus.users, train_ex, dev_ex, head_cfg,
      {"nonfriend", "friend"}, "friend");

  TaskResult result;
  result.variant = variant.name;
  result.task = "friend";
  result.accuracy = rel_accuracy(clf, model, test_ex);
  result.n_train = static_cast<int>(train_ex.size());
  result.n_dev = static_cast<int>(dev_ex.size());
  result.n_test = static_cast<int>(test_ex.size());
  result.n_pos = static_cast<int>(data.heldout.size());
  result.n_neg = static_cast<int>(data.pairs.size() - data.heldout.size());
  return result;
}

// Every (variant x task) cell under one shared base seed, sorted by
// variant then task.
inline std::vector<TaskResult> ablation_matrix(
    const SocialCorpus& corpus, const AttributeTask* attribute_task,
    bool run_friend, const std::vector<AblationVariant>& variants,
    const TrainConfig& train_cfg, const HeadConfig& head_cfg,
    const SplitSpec& split_spec) {
  if (variants.empty())
    throw InvalidArgumentError("ablation matrix needs at least one variant");
  if (attribute_task == nullptr && !run_friend)
    throw InvalidArgumentError("ablation matrix needs at least one task");
  std::vector<TaskResult> results;
  for (const auto& variant : variants) {
    if (attribute_task != nullptr)
      results.push_back(run_attribute_task(corpus, *attribute_task, variant,
                                           train_cfg, head_cfg, split_spec));
    if (run_friend)
      results.push_back(run_friend_task(corpus, variant, train_cfg, head_cfg,
                                        split_spec));
  }
  std::sort(results.begin(), results.end(),
            [](const TaskResult& a, const TaskResult& b) {
              if (a.variant != b.variant) return a.variant < b.variant;
              return a.task < b.task;
            });
  return results;
}

inline std::string results_tsv(const std::vector<TaskResult>& results) {
  std::string out;
  for (const auto& r : results) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.6f\t%d\t%d\t%d\n",
                  r.variant.c_str(), r.task.c_str(), r.accuracy, r.n_train,
                  r.n_dev, r.n_test);
    out += buf;
  }
  return out;
}

}  // namespace socialvec
