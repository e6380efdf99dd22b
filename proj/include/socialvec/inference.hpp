#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "socialvec/error.hpp"
#include "socialvec/math.hpp"
#include "socialvec/params.hpp"
#include "socialvec/rng.hpp"

namespace socialvec {

inline std::uint64_t user_table_fingerprint(const IdTable& users) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& name : users.names()) {
    for (unsigned char c : name) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1F;  // record separator
    h *= 1099511628211ULL;
  }
  return h;
}

namespace detail {

// y = M x for a row-major table (rows x width).
inline std::vector<double> matvec(const VecTable& m,
                                  std::span<const double> x) {
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x);
  return y;
}

// y += M^T x
inline void matvec_transposed_add(const VecTable& m, std::span<const double> x,
                                  std::vector<double>& y) {
  for (std::size_t i = 0; i < m.rows(); ++i) axpy(x[i], m.row(i), y);
}

// M += outer(a, b)
inline void add_outer(VecTable& m, std::span<const double> a,
                      std::span<const double> b) {
  for (std::size_t i = 0; i < m.rows(); ++i) axpy(a[i], b, m.row(i));
}

inline void tanh_inplace(std::vector<double>& v) {
  for (double& x : v) x = std::tanh(x);
}

inline VecTable xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  VecTable table(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : table.data()) v = rng.uniform(-limit, limit);
  return table;
}

// acc += g^2; theta -= eta * g / (sqrt(acc) + eps), elementwise.
inline void adagrad_update(VecTable& weights, VecTable& acc,
                           const VecTable& grad, double eta, double eps) {
  auto& w = weights.data();
  auto& a = acc.data();
  const auto& g = grad.data();
  for (std::size_t i = 0; i < w.size(); ++i) {
    a[i] += g[i] * g[i];
    w[i] -= eta * g[i] / (std::sqrt(a[i]) + eps);
  }
}

}  // namespace detail

struct HeadConfig {
  int hidden = 100;   // H
  int hidden2 = 50;   // H' (relation head only)
  int epochs = 50;
  double eta = 0.05;
  double eps = 1e-8;
  std::uint64_t seed = 1;
};

// ---------------------------------------------------------------------------
// Attribute head: p(label | e_v) = softmax(U tanh(W e_v)), no bias terms.

struct AttributeClassifier {
  std::string name;  // what this head predicts; resolves group queries
  int k = 0;
  int hidden = 0;
  int labels = 0;
  std::vector<std::string> label_names;
  VecTable w;      // hidden x K
  VecTable u;      // labels x hidden
  VecTable acc_w;  // AdaGrad accumulators
  VecTable acc_u;
  std::uint64_t fingerprint = 0;  // user table the embeddings came from
};

inline std::vector<double> attr_forward(const AttributeClassifier& clf,
                                        std::span<const double> e_v) {
  if (e_v.size() != static_cast<std::size_t>(clf.k))
    throw DimensionMismatchError("attr_forward: embedding width " +
                                 std::to_string(e_v.size()) +
                                 " does not match K=" + std::to_string(clf.k));
  std::vector<double> h = detail::matvec(clf.w, e_v);
  detail::tanh_inplace(h);
  std::vector<double> probs = detail::matvec(clf.u, h);
  softmax_inplace(probs);
  return probs;
}

struct AttrGrad {
  double loss = 0.0;  // cross entropy
  VecTable w;
  VecTable u;
};

inline AttrGrad attr_grad(const AttributeClassifier& clf,
                          std::span<const double> e_v, int label) {
  std::vector<double> h = detail::matvec(clf.w, e_v);
  detail::tanh_inplace(h);
  std::vector<double> probs = detail::matvec(clf.u, h);
  softmax_inplace(probs);

  AttrGrad grad;
  grad.loss = -std::log(probs[label]);
  std::vector<double>& d_s = probs;  // p - onehot(label)
  d_s[label] -= 1.0;

  grad.u = VecTable(clf.labels, clf.hidden);
  detail::add_outer(grad.u, d_s, h);

  std::vector<double> d_h(clf.hidden, 0.0);
  detail::matvec_transposed_add(clf.u, d_s, d_h);
  for (int j = 0; j < clf.hidden; ++j) d_h[j] *= 1.0 - h[j] * h[j];

  grad.w = VecTable(clf.hidden, clf.k);
  detail::add_outer(grad.w, d_h, e_v);
  return grad;
}

inline AttributeClassifier attr_init(const ModelParams& model,
                                     const IdTable& users, int labels,
                                     const HeadConfig& cfg,
                                     std::vector<std::string> label_names,
                                     std::string name) {
  AttributeClassifier clf;
  clf.name = std::move(name);
  clf.k = model.k;
  clf.hidden = cfg.hidden;
  clf.labels = labels;
  if (label_names.empty())
    for (int l = 0; l < labels; ++l) label_names.push_back(std::to_string(l));
  if (static_cast<int>(label_names.size()) != labels)
    throw InvalidArgumentError("label name count does not match label count");
  clf.label_names = std::move(label_names);
  Rng rng(mix_seed(cfg.seed, 7001));
  clf.w = detail::xavier_init(cfg.hidden, model.k, rng);
  // Zero top layer: label symmetry is broken by the data alone, which makes
  // relabeling permute the learned U rows exactly.
  clf.u = VecTable(labels, cfg.hidden);
  clf.acc_w = VecTable(cfg.hidden, model.k);
  clf.acc_u = VecTable(labels, cfg.hidden);
  clf.fingerprint = user_table_fingerprint(users);
  return clf;
}

// One AdaGrad pass over a shuffled copy of the examples.
inline void attr_train_epoch(AttributeClassifier& clf,
                             std::vector<std::pair<int, int>> examples,
                             const ModelParams& model, const HeadConfig& cfg,
                             Rng& rng) {
  rng.shuffle(examples);
  for (const auto& [user, label] : examples) {
    AttrGrad grad = attr_grad(clf, model.user(user), label);
    detail::adagrad_update(clf.u, clf.acc_u, grad.u, cfg.eta, cfg.eps);
    detail::adagrad_update(clf.w, clf.acc_w, grad.w, cfg.eta, cfg.eps);
  }
}

namespace detail {

inline int checked_label_count(const std::vector<int>& labels,
                               int declared) {
  if (labels.empty()) throw InvalidArgumentError("empty training set");
  int max_label = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidArgumentError("negative label");
    if (l > max_label) max_label = l;
  }
  const int count = declared > 0 ? declared : max_label + 1;
  if (max_label >= count)
    throw InvalidArgumentError("label out of declared range");
  std::vector<bool> seen(count, false);
  for (int l : labels) seen[l] = true;
  int distinct = 0;
  for (bool s : seen) distinct += s ? 1 : 0;
  if (distinct < 2)
    throw InvalidArgumentError(
        "training set covers a single class; softmax is degenerate");
  return count;
}

}  // namespace detail

// Trains on frozen user embeddings; the model is never modified.
inline AttributeClassifier attr_train(
    const std::vector<std::pair<int, int>>& examples, const ModelParams& model,
    const IdTable& users, const HeadConfig& cfg,
    std::vector<std::string> label_names = {}, std::string name = "") {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& [user, label] : examples) labels.push_back(label);
  const int label_count = detail::checked_label_count(
      labels, static_cast<int>(label_names.size()));
  AttributeClassifier clf = attr_init(model, users, label_count, cfg,
                                      std::move(label_names), std::move(name));
  Rng rng(mix_seed(cfg.seed, 7002));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    attr_train_epoch(clf, examples, model, cfg, rng);
  return clf;
}

inline double attr_accuracy(const AttributeClassifier& clf,
                            const ModelParams& model,
                            const std::vector<std::pair<int, int>>& examples) {
  if (examples.empty()) return 0.0;
  int correct = 0;
  for (const auto& [user, label] : examples) {
    const auto probs = attr_forward(clf, model.user(user));
    int best = 0;
    for (int l = 1; l < clf.labels; ++l)
      if (probs[l] > probs[best]) best = l;
    correct += best == label ? 1 : 0;
  }
  return static_cast<double>(correct) / examples.size();
}

// ---------------------------------------------------------------------------
// Relation head: compares two user embeddings through their elementwise
// product and absolute difference.

struct RelationClassifier {
  std::string name;
  int k = 0;
  int hidden = 0;   // H
  int hidden2 = 0;  // H'
  int labels = 0;
  std::vector<std::string> label_names;
  VecTable wa, wb;          // H x K
  VecTable w_diff, w_prod;  // H' x H
  VecTable w1, w2;          // H' x H
  VecTable u;               // labels x H'
  VecTable acc_wa, acc_wb, acc_w_diff, acc_w_prod, acc_w1, acc_w2, acc_u;
  std::uint64_t fingerprint = 0;
};

namespace detail {

struct RelActivations {
  std::vector<double> h1, h2, prod, diff, z, h, probs;
};

inline RelActivations rel_activations(const RelationClassifier& clf,
                                      std::span<const double> e1,
                                      std::span<const double> e2) {
  if (e1.size() != static_cast<std::size_t>(clf.k) ||
      e2.size() != static_cast<std::size_t>(clf.k))
    throw DimensionMismatchError("rel_forward: embedding width mismatch");
  RelActivations act;
  act.h1 = matvec(clf.wa, e1);
  tanh_inplace(act.h1);
  act.h2 = matvec(clf.wb, e2);
  tanh_inplace(act.h2);
  act.prod.resize(clf.hidden);
  act.diff.resize(clf.hidden);
  for (int j = 0; j < clf.hidden; ++j) {
    act.prod[j] = act.h1[j] * act.h2[j];
    act.diff[j] = std::fabs(act.h1[j] - act.h2[j]);
  }
  act.z = matvec(clf.w_diff, act.diff);
  std::vector<double> term = matvec(clf.w_prod, act.prod);
  for (int j = 0; j < clf.hidden2; ++j) act.z[j] += term[j];
  term = matvec(clf.w1, act.h1);
  for (int j = 0; j < clf.hidden2; ++j) act.z[j] += term[j];
  term = matvec(clf.w2, act.h2);
  for (int j = 0; j < clf.hidden2; ++j) act.z[j] += term[j];
  act.h = act.z;
  tanh_inplace(act.h);
  act.probs = matvec(clf.u, act.h);
  softmax_inplace(act.probs);
  return act;
}

}  // namespace detail

inline std::vector<double> rel_forward(const RelationClassifier& clf,
                                       std::span<const double> e1,
                                       std::span<const double> e2) {
  return detail::rel_activations(clf, e1, e2).probs;
}

struct RelGrad {
  double loss = 0.0;
  VecTable wa, wb, w_diff, w_prod, w1, w2, u;
};

inline RelGrad rel_grad(const RelationClassifier& clf,
                        std::span<const double> e1, std::span<const double> e2,
                        int label) {
  auto act = detail::rel_activations(clf, e1, e2);
  RelGrad grad;
  grad.loss = -std::log(act.probs[label]);

  std::vector<double>& d_s = act.probs;
  d_s[label] -= 1.0;

  grad.u = VecTable(clf.labels, clf.hidden2);
  detail::add_outer(grad.u, d_s, act.h);

  std::vector<double> d_z(clf.hidden2, 0.0);
  detail::matvec_transposed_add(clf.u, d_s, d_z);
  for (int j = 0; j < clf.hidden2; ++j) d_z[j] *= 1.0 - act.h[j] * act.h[j];

  grad.w_diff = VecTable(clf.hidden2, clf.hidden);
  detail::add_outer(grad.w_diff, d_z, act.diff);
  grad.w_prod = VecTable(clf.hidden2, clf.hidden);
  detail::add_outer(grad.w_prod, d_z, act.prod);
  grad.w1 = VecTable(clf.hidden2, clf.hidden);
  detail::add_outer(grad.w1, d_z, act.h1);
  grad.w2 = VecTable(clf.hidden2, clf.hidden);
  detail::add_outer(grad.w2, d_z, act.h2);

  std::vector<double> d_diff(clf.hidden, 0.0);
  detail::matvec_transposed_add(clf.w_diff, d_z, d_diff);
  std::vector<double> d_prod(clf.hidden, 0.0);
  detail::matvec_transposed_add(clf.w_prod, d_z, d_prod);

  std::vector<double> d_h1(clf.hidden, 0.0);
  detail::matvec_transposed_add(clf.w1, d_z, d_h1);
  std::vector<double> d_h2(clf.hidden, 0.0);
  detail::matvec_transposed_add(clf.w2, d_z, d_h2);
  for (int j = 0; j < clf.hidden; ++j) {
    const double delta = act.h1[j] - act.h2[j];
    const double sign = delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0);
    d_h1[j] += d_prod[j] * act.h2[j] + d_diff[j] * sign;
    d_h2[j] += d_prod[j] * act.h1[j] - d_diff[j] * sign;
    d_h1[j] *= 1.0 - act.h1[j] * act.h1[j];
    d_h2[j] *= 1.0 - act.h2[j] * act.h2[j];
  }

  grad.wa = VecTable(clf.hidden, clf.k);
  detail::add_outer(grad.wa, d_h1, e1);
  grad.wb = VecTable(clf.hidden, clf.k);
  detail::add_outer(grad.wb, d_h2, e2);
  return grad;
}

inline RelationClassifier rel_init(const ModelParams& model,
                                   const IdTable& users, int labels,
                                   const HeadConfig& cfg,
                                   std::vector<std::string> label_names,
                                   std::string name) {
  RelationClassifier clf;
  clf.name = std::move(name);
  clf.k = model.k;
  clf.hidden = cfg.hidden;
  clf.hidden2 = cfg.hidden2;
  clf.labels = labels;
  if (label_names.empty())
    for (int l = 0; l < labels; ++l) label_names.push_back(std::to_string(l));
  if (static_cast<int>(label_names.size()) != labels)
    throw InvalidArgumentError("label name count does not match label count");
  clf.label_names = std::move(label_names);
  Rng rng(mix_seed(cfg.seed, 7003));
  clf.wa = detail::xavier_init(cfg.hidden, model.k, rng);
  clf.wb = detail::xavier_init(cfg.hidden, model.k, rng);
  clf.w_diff = detail::xavier_init(cfg.hidden2, cfg.hidden, rng);
  clf.w_prod = detail::xavier_init(cfg.hidden2, cfg.hidden, rng);
  clf.w1 = detail::xavier_init(cfg.hidden2, cfg.hidden, rng);
  clf.w2 = detail::xavier_init(cfg.hidden2, cfg.hidden, rng);
  clf.u = VecTable(labels, cfg.hidden2);
  clf.acc_wa = VecTable(cfg.hidden, model.k);
  clf.acc_wb = VecTable(cfg.hidden, model.k);
  clf.acc_w_diff = VecTable(cfg.hidden2, cfg.hidden);
  clf.acc_w_prod = VecTable(cfg.hidden2, cfg.hidden);
  clf.acc_w1 = VecTable(cfg.hidden2, cfg.hidden);
  clf.acc_w2 = VecTable(cfg.hidden2, cfg.hidden);
  clf.acc_u = VecTable(labels, cfg.hidden2);
  clf.fingerprint = user_table_fingerprint(users);
  return clf;
}

using PairExample = std::tuple<int, int, int>;  // user, user, label

inline void rel_train_epoch(RelationClassifier& clf,
                            std::vector<PairExample> examples,
                            const ModelParams& model, const HeadConfig& cfg,
                            Rng& rng) {
  rng.shuffle(examples);
  for (const auto& [u1, u2, label] : examples) {
    RelGrad grad = rel_grad(clf, model.user(u1), model.user(u2), label);
    detail::adagrad_update(clf.u, clf.acc_u, grad.u, cfg.eta, cfg.eps);
    detail::adagrad_update(clf.w_diff, clf.acc_w_diff, grad.w_diff, cfg.eta,
                           cfg.eps);
    detail::adagrad_update(clf.w_prod, clf.acc_w_prod, grad.w_prod, cfg.eta,
                           cfg.eps);
    detail::adagrad_update(clf.w1, clf.acc_w1, grad.w1, cfg.eta, cfg.eps);
    detail::adagrad_update(clf.w2, clf.acc_w2, grad.w2, cfg.eta, cfg.eps);
    detail::adagrad_update(clf.wa, clf.acc_wa, grad.wa, cfg.eta, cfg.eps);
    detail::adagrad_update(clf.wb, clf.acc_wb, grad.wb, cfg.eta, cfg.eps);
  }
}

inline RelationClassifier rel_train(const std::vector<PairExample>& examples,
                                    const ModelParams& model,
                                    const IdTable& users, const HeadConfig& cfg,
                                    std::vector<std::string> label_names = {},
                                    std::string name = "") {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& [u1, u2, label] : examples) labels.push_back(label);
  const int label_count = detail::checked_label_count(
      labels, static_cast<int>(label_names.size()));
  RelationClassifier clf = rel_init(model, users, label_count, cfg,
                                    std::move(label_names), std::move(name));
  Rng rng(mix_seed(cfg.seed, 7004));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    rel_train_epoch(clf, examples, model, cfg, rng);
  return clf;
}

inline double rel_accuracy(const RelationClassifier& clf,
                           const ModelParams& model,
                           const std::vector<PairExample>& examples) {
  if (examples.empty()) return 0.0;
  int correct = 0;
  for (const auto& [u1, u2, label] : examples) {
    const auto probs = rel_forward(clf, model.user(u1), model.user(u2));
    int best = 0;
    for (int l = 1; l < clf.labels; ++l)
      if (probs[l] > probs[best]) best = l;
    correct += best == label ? 1 : 0;
  }
  return static_cast<double>(correct) / examples.size();
}

// ---------------------------------------------------------------------------
// Group inference: fit one embedding that makes a set of attribute
// conditions likely, then read other heads at that point.

struct GroupCondition {
  const AttributeClassifier* classifier = nullptr;
  int label = -1;
};

struct GroupFitConfig {
  int iterations = 500;
  double step = 0.1;
  double mu = 1e-3;  // L2 penalty keeping the logits from running away

  void validate() const {
    if (iterations < 1) throw InvalidArgumentError("iterations must be >= 1");
    if (mu < 0.0) throw InvalidArgumentError("mu must be nonnegative");
  }
};

struct GroupFitResult {
  std::vector<double> embedding;
  double objective = 0.0;
  std::vector<double> condition_probs;
};

namespace detail {

inline double group_objective(const std::vector<GroupCondition>& conditions,
                              std::span<const double> e, double mu,
                              std::vector<double>* probs_out) {
  double objective = 0.0;
  if (probs_out) probs_out->clear();
  for (const auto& cond : conditions) {
    const auto probs = attr_forward(*cond.classifier, e);
    objective += std::log(probs[cond.label]);
    if (probs_out) probs_out->push_back(probs[cond.label]);
  }
  objective -= mu * dot(e, e);
  return objective;
}

// d/de of sum_i log p_i(target | e) - mu ||e||^2
inline std::vector<double> group_gradient(
    const std::vector<GroupCondition>& conditions, std::span<const double> e,
    double mu) {
  std::vector<double> grad(e.size(), 0.0);
  for (const auto& cond : conditions) {
    const AttributeClassifier& clf = *cond.classifier;
    std::vector<double> h = matvec(clf.w, e);
    tanh_inplace(h);
    std::vector<double> d_s = matvec(clf.u, h);
    softmax_inplace(d_s);
    for (double& v : d_s) v = -v;
    d_s[cond.label] += 1.0;  // onehot(target) - p
    std::vector<double> d_h(clf.hidden, 0.0);
    matvec_transposed_add(clf.u, d_s, d_h);
    for (int j = 0; j < clf.hidden; ++j) d_h[j] *= 1.0 - h[j] * h[j];
    matvec_transposed_add(clf.w, d_h, grad);
  }
  axpy(-2.0 * mu, e, grad);
  return grad;
}

}  // namespace detail

// Gradient ascent from the mean user embedding, fixed iteration count;
// returns the best iterate seen, so the result never falls below the
// starting objective.
inline GroupFitResult fit_group_embedding(
    const std::vector<GroupCondition>& conditions, const ModelParams& model,
    const GroupFitConfig& cfg) {
  cfg.validate();
  if (conditions.empty())
    throw InvalidArgumentError("group fit needs at least one condition");
  for (const auto& cond : conditions) {
    if (cond.classifier == nullptr)
      throw InvalidArgumentError("null classifier in group condition");
    if (cond.classifier->k != model.k)
      throw DimensionMismatchError("group condition classifier K mismatch");
    if (cond.label < 0 || cond.label >= cond.classifier->labels)
      throw InvalidArgumentError("group condition label out of range");
  }

  std::vector<double> e(model.k, 0.0);
  if (model.user_vecs.rows() > 0) {
    for (std::size_t v = 0; v < model.user_vecs.rows(); ++v)
      axpy(1.0, model.user_vecs.row(v), e);
    for (double& x : e) x /= static_cast<double>(model.user_vecs.rows());
  }

  GroupFitResult best;
  best.embedding = e;
  best.objective =
      detail::group_objective(conditions, e, cfg.mu, &best.condition_probs);
  if (!std::isfinite(best.objective))
    throw TrainError("non-finite group objective at initialization");

  std::vector<double> probs;
  for (int it = 0; it < cfg.iterations; ++it) {
    const auto grad = detail::group_gradient(conditions, e, cfg.mu);
    axpy(cfg.step, grad, e);
    const double objective =
        detail::group_objective(conditions, e, cfg.mu, &probs);
    if (!std::isfinite(objective))
      throw TrainError("non-finite group objective at iteration " +
                       std::to_string(it + 1));
    if (objective > best.objective) {
      best.objective = objective;
      best.embedding = e;
      best.condition_probs = probs;
    }
  }
  return best;
}

struct GroupQuery {
  std::vector<GroupCondition> given;  // A: conditions the group satisfies
  std::vector<GroupCondition> then;   // B: conditions to score
};

struct GroupQueryResult {
  double probability = 0.0;
  std::vector<std::pair<std::string, double>> factors;
  GroupFitResult fit;
};

// P(B | A) = prod_j P(b_j | e_G) with e_G fitted on A.
inline GroupQueryResult group_query(const GroupQuery& query,
                                    const ModelParams& model,
                                    const GroupFitConfig& cfg) {
  if (query.given.empty())
    throw InvalidArgumentError("group query needs a nonempty IF clause");
  if (query.then.empty())
    throw InvalidArgumentError("group query needs a nonempty THEN clause");
  GroupQueryResult result;
  result.fit = fit_group_embedding(query.given, model, cfg);
  result.probability = 1.0;
  for (const auto& cond : query.then) {
    const auto probs = attr_forward(*cond.classifier, result.fit.embedding);
    const double p = probs[cond.label];
    result.probability *= p;
    result.factors.emplace_back(cond.classifier->name + "=" +
                                    cond.classifier->label_names[cond.label],
                                p);
  }
  return result;
}

inline double group_ratio(const GroupQuery& q1, const GroupQuery& q2,
                          const ModelParams& model, const GroupFitConfig& cfg) {
  const double p1 = group_query(q1, model, cfg).probability;
  const double p2 = group_query(q2, model, cfg).probability;
  if (p2 == 0.0) throw InvalidArgumentError("group ratio denominator is zero");
  return p1 / p2;
}

}  // namespace socialvec
