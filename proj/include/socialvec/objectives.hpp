#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "socialvec/error.hpp"
#include "socialvec/math.hpp"
#include "socialvec/params.hpp"

namespace socialvec {

// One training event per stream. Events are built by the trainer; the loss
// functions here are pure and never touch the parameters they read.

struct TextEvent {
  int user = -1;
  int target = -1;
  std::vector<int> context;    // nonempty
  std::vector<int> negatives;  // exclude target
};

struct GraphEvent {
  int anchor = -1;
  int positive = -1;           // != anchor
  std::vector<int> negatives;  // exclude positive
};

struct TripleEvent {
  int relation = -1;
  int user = -1;
  int positive_entity = -1;
  std::vector<int> negatives;  // exclude positive entity
};

struct LossWeights {
  double graph = 1.0;
  double relation = 1.0;
};

enum class TensorId : std::uint8_t {
  Users,
  WordsIn,
  WordsOut,
  Entities,
  Relations,
};

struct GradBlock {
  TensorId tensor;
  int index;
  std::vector<double> values;
};

// Sparse gradient: a handful of dense blocks, coalesced so each
// (tensor, index) pair appears at most once.
class SparseGrad {
 public:
  void accumulate(TensorId tensor, int index, std::span<const double> values) {
    for (auto& block : blocks_) {
      if (block.tensor == tensor && block.index == index) {
        axpy(1.0, values, block.values);
        return;
      }
    }
    blocks_.push_back({tensor, index,
                       std::vector<double>(values.begin(), values.end())});
  }

  void accumulate_scaled(TensorId tensor, int index, double scale,
                         std::span<const double> values) {
    for (auto& block : blocks_) {
      if (block.tensor == tensor && block.index == index) {
        axpy(scale, values, block.values);
        return;
      }
    }
    GradBlock block{tensor, index, std::vector<double>(values.size(), 0.0)};
    axpy(scale, values, block.values);
    blocks_.push_back(std::move(block));
  }

  void scale(double s) {
    for (auto& block : blocks_)
      for (double& v : block.values) v *= s;
  }

  bool finite() const {
    for (const auto& block : blocks_)
      if (!all_finite(block.values)) return false;
    return true;
  }

  const std::vector<GradBlock>& blocks() const { return blocks_; }
  std::vector<GradBlock>& blocks() { return blocks_; }

 private:
  std::vector<GradBlock> blocks_;
};

struct LossGrad {
  double loss = 0.0;
  SparseGrad grad;
};

// e_C = (sum of context in-vectors + user vector) / (|C| + 1)
inline std::vector<double> context_vector(const ModelParams& params, int user,
                                          std::span<const int> context) {
  if (context.empty())
    throw InvalidArgumentError("context_vector needs a nonempty context");
  std::vector<double> e_c(params.k, 0.0);
  for (int w : context) axpy(1.0, params.word_in(w), e_c);
  axpy(1.0, params.user(user), e_c);
  const double inv = 1.0 / (static_cast<double>(context.size()) + 1.0);
  for (double& v : e_c) v *= inv;
  return e_c;
}

// Negated negative-sampling log likelihood of the target word given the
// averaged context-plus-user vector:
//   loss = -log s(out(w) . e_C) - sum_neg log s(-out(w*) . e_C)
inline LossGrad text_loss_grad(const ModelParams& params,
                               const TextEvent& event) {
  LossGrad out;
  const std::vector<double> e_c =
      context_vector(params, event.user, event.context);
  std::vector<double> grad_ec(params.k, 0.0);

  auto score_pair = [&](int word, bool positive) {
    const auto out_vec = params.word_out(word);
    const double score = dot(out_vec, e_c);
    out.loss += positive ? -log_logistic(score) : -log_logistic(-score);
    // d loss / d score
    const double coeff =
        positive ? logistic(score) - 1.0 : logistic(score);
    out.grad.accumulate_scaled(TensorId::WordsOut, word, coeff, e_c);
    axpy(coeff, out_vec, grad_ec);
  };
  score_pair(event.target, true);
  for (int neg : event.negatives) score_pair(neg, false);

  // e_C averages the context in-vectors and the user vector equally.
  const double share =
      1.0 / (static_cast<double>(event.context.size()) + 1.0);
  for (int w : event.context)
    out.grad.accumulate_scaled(TensorId::WordsIn, w, share, grad_ec);
  out.grad.accumulate_scaled(TensorId::Users, event.user, share, grad_ec);
  return out;
}

//   loss = -log s(e_v . e_v') - sum_neg log s(-e_v . e_v*)
inline LossGrad graph_loss_grad(const ModelParams& params,
                                const GraphEvent& event) {
  LossGrad out;
  const auto anchor = params.user(event.anchor);
  auto score_pair = [&](int other, bool positive) {
    const auto other_vec = params.user(other);
    const double score = dot(anchor, other_vec);
    out.loss += positive ? -log_logistic(score) : -log_logistic(-score);
    const double coeff =
        positive ? logistic(score) - 1.0 : logistic(score);
    out.grad.accumulate_scaled(TensorId::Users, event.anchor, coeff,
                               other_vec);
    out.grad.accumulate_scaled(TensorId::Users, other, coeff, anchor);
  };
  score_pair(event.positive, true);
  for (int neg : event.negatives) score_pair(neg, false);
  return out;
}

//   loss = -log s(e_v^T R e_m) - sum_neg log s(-e_v^T R e_m*)
// Gradients: d/de_v = c R e_m, d/de_m = c R^T e_v, d/dR = c e_v e_m^T.
inline LossGrad relation_loss_grad(const ModelParams& params,
                                   const TripleEvent& event) {
  LossGrad out;
  const int k = params.k;
  const auto ku = static_cast<std::size_t>(k);
  const auto user = params.user(event.user);
  const auto rel = params.relation(event.relation);

  // R^T e_v, reused across the positive and all negatives.
  std::vector<double> rt_user(ku, 0.0);
  for (int i = 0; i < k; ++i) {
    const double ui = user[i];
    const auto row = rel.subspan(static_cast<std::size_t>(i) * ku, ku);
    for (int j = 0; j < k; ++j) rt_user[j] += ui * row[j];
  }

  std::vector<double> grad_user(ku, 0.0);
  std::vector<double> grad_rel(ku * ku, 0.0);
  std::vector<double> r_entity(ku);

  auto score_pair = [&](int entity, bool positive) {
    const auto ent = params.entity(entity);
    const double score = dot(rt_user, ent);
    out.loss += positive ? -log_logistic(score) : -log_logistic(-score);
    const double coeff =
        positive ? logistic(score) - 1.0 : logistic(score);
    // R e_m
    for (int i = 0; i < k; ++i) {
      const auto row = rel.subspan(static_cast<std::size_t>(i) * ku, ku);
      r_entity[i] = dot(row, ent);
    }
    axpy(coeff, r_entity, grad_user);
    out.grad.accumulate_scaled(TensorId::Entities, entity, coeff, rt_user);
    for (int i = 0; i < k; ++i) {
      const double scaled = coeff * user[i];
      for (int j = 0; j < k; ++j)
        grad_rel[static_cast<std::size_t>(i) * ku + j] += scaled * ent[j];
    }
  };
  score_pair(event.positive_entity, true);
  for (int neg : event.negatives) score_pair(neg, false);

  out.grad.accumulate(TensorId::Users, event.user, grad_user);
  out.grad.accumulate(TensorId::Relations, event.relation, grad_rel);
  return out;
}

// text + lambda1 * graph + lambda2 * relation; all parts already negated
// for minimization.
inline double joint_loss(double text, double graph, double relation,
                         const LossWeights& weights) {
  return text + weights.graph * graph + weights.relation * relation;
}

}  // namespace socialvec
