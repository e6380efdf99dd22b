#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "socialvec/corpus.hpp"
#include "socialvec/error.hpp"
#include "socialvec/objectives.hpp"
#include "socialvec/params.hpp"
#include "socialvec/rng.hpp"

namespace socialvec {

struct TrainConfig {
  int k = 500;
  int epochs = 3;
  double lambda_graph = 1.0;     // lambda1
  double lambda_relation = 1.0;  // lambda2
  // Sized for desk-scale corpora (~1e5 events): with word2vec's 0.025 the
  // three-epoch protocol never leaves the warm-up plateau.
  double lr0 = 0.2;
  double lr_min = 0.05;
  int text_negatives = 5;
  int graph_negatives = 5;
  int relation_negatives = 5;
  int window = 5;
  long long min_count = 5;  // applied at corpus build time, recorded here
  std::uint64_t seed = 1;
  int workers = 1;
  bool freeze_words = false;
  bool shared_word_table = false;
  std::string pretrained_words;  // optional path, loaded before training
  std::ostream* progress = &std::cerr;

  void validate() const {
    if (k < 1) throw InvalidArgumentError("k must be >= 1");
    if (epochs < 1) throw InvalidArgumentError("epochs must be >= 1");
    if (!(lr0 > lr_min && lr_min > 0.0))
      throw InvalidArgumentError("need lr0 > lr_min > 0");
    if (lambda_graph < 0.0 || lambda_relation < 0.0)
      throw InvalidArgumentError("lambda weights must be nonnegative");
    if (text_negatives < 0 || graph_negatives < 0 || relation_negatives < 0)
      throw InvalidArgumentError("negative counts must be nonnegative");
    if (window < 1) throw InvalidArgumentError("window must be >= 1");
    if (workers < 1) throw InvalidArgumentError("workers must be >= 1");
  }
};

struct StreamStat {
  double loss_sum = 0.0;
  long long events = 0;
  double mean() const { return events == 0 ? 0.0 : loss_sum / events; }
};

struct EpochReport {
  StreamStat text;
  StreamStat graph;
  StreamStat relation;
  double joint_mean = 0.0;
};

struct TrainReport {
  std::vector<EpochReport> epochs;
  long long total_events = 0;
  double wall_seconds = 0.0;
};

// Linear decay with a floor: lr0 * (1 - step/total), never below lr_min.
inline double lr_schedule(const TrainConfig& cfg, long long step,
                          long long total_steps) {
  if (total_steps <= 0 || step > total_steps)
    throw InvalidArgumentError("bad lr_schedule step");
  const double alpha =
      cfg.lr0 * (1.0 - static_cast<double>(step) / total_steps);
  return alpha > cfg.lr_min ? alpha : cfg.lr_min;
}

namespace detail {

inline std::span<double> grad_target(ModelParams& params, TensorId tensor,
                                     int index) {
  switch (tensor) {
    case TensorId::Users:
      return params.user(index);
    case TensorId::WordsIn:
      return params.word_in(index);
    case TensorId::WordsOut:
      return params.word_out(index);
    case TensorId::Entities:
      return params.entity(index);
    case TensorId::Relations:
      return params.relation(index);
  }
  throw InvalidArgumentError("unknown tensor id");
}

inline bool is_word_tensor(TensorId tensor) {
  return tensor == TensorId::WordsIn || tensor == TensorId::WordsOut;
}

}  // namespace detail

// Theta <- Theta - alpha * grad, touching only the referenced rows.
// Word blocks are skipped while params.words_frozen is set.
inline void apply_sparse(ModelParams& params, const SparseGrad& grad,
                         double alpha) {
  for (const auto& block : grad.blocks()) {
    if (params.words_frozen && detail::is_word_tensor(block.tensor)) continue;
    axpy(-alpha, block.values, detail::grad_target(params, block.tensor,
                                                   block.index));
  }
}

namespace detail {

// Relaxed-consistency variant for workers > 1: each scalar update is a
// word-atomic read-modify-write, so concurrent readers always observe some
// previously written value; colliding updates may still be lost as a whole.
inline void apply_sparse_relaxed(ModelParams& params, const SparseGrad& grad,
                                 double alpha) {
  for (const auto& block : grad.blocks()) {
    if (params.words_frozen && is_word_tensor(block.tensor)) continue;
    auto target = grad_target(params, block.tensor, block.index);
    for (std::size_t i = 0; i < block.values.size(); ++i)
      std::atomic_ref<double>(target[i])
          .fetch_add(-alpha * block.values[i], std::memory_order_relaxed);
  }
}

enum class Stream : std::uint8_t { Text = 0, Graph = 1, Relation = 2 };

struct ScheduledEvent {
  Stream stream;
  std::int32_t a;  // document / edge / triple index
  std::int32_t b;  // token position / orientation / unused
};

struct SingleExclude {
  std::size_t value;
  bool contains(std::size_t x) const { return x == value; }
  std::size_t size() const { return 1; }
};

struct Samplers {
  NegativeSampler words;
  NegativeSampler users;
  NegativeSampler entities;
};

inline const char* stream_name(Stream s) {
  switch (s) {
    case Stream::Text:
      return "text";
    case Stream::Graph:
      return "graph";
    case Stream::Relation:
      return "rel";
  }
  return "?";
}

// A scheduled event with its negatives drawn; fully determines which
// parameter rows the update will touch.
struct BuiltEvent {
  Stream stream;
  TextEvent text;
  GraphEvent graph;
  TripleEvent triple;
};

inline BuiltEvent build_event(const SocialCorpus& corpus,
                              const Samplers& samplers, const TrainConfig& cfg,
                              Rng& rng, const ScheduledEvent& ev) {
  BuiltEvent out;
  out.stream = ev.stream;
  switch (ev.stream) {
    case Stream::Text: {
      const Document& doc = corpus.documents[ev.a];
      out.text.user = doc.user;
      out.text.target = doc.tokens[ev.b];
      out.text.context = context_window(doc, ev.b, cfg.window);
      const SingleExclude exclude{static_cast<std::size_t>(out.text.target)};
      out.text.negatives.reserve(cfg.text_negatives);
      for (int i = 0; i < cfg.text_negatives; ++i)
        out.text.negatives.push_back(
            static_cast<int>(sample_negative(samplers.words, rng, exclude)));
      break;
    }
    case Stream::Graph: {
      const Edge& edge = corpus.edges[ev.a];
      out.graph.anchor = ev.b == 0 ? edge.a : edge.b;
      out.graph.positive = ev.b == 0 ? edge.b : edge.a;
      const SingleExclude exclude{
          static_cast<std::size_t>(out.graph.positive)};
      out.graph.negatives.reserve(cfg.graph_negatives);
      for (int i = 0; i < cfg.graph_negatives; ++i)
        out.graph.negatives.push_back(
            static_cast<int>(sample_negative(samplers.users, rng, exclude)));
      break;
    }
    case Stream::Relation: {
      const Triple& triple = corpus.triples[ev.a];
      out.triple.relation = triple.relation;
      out.triple.user = triple.user;
      out.triple.positive_entity = triple.entity;
      const SingleExclude exclude{
          static_cast<std::size_t>(out.triple.positive_entity)};
      out.triple.negatives.reserve(cfg.relation_negatives);
      for (int i = 0; i < cfg.relation_negatives; ++i)
        out.triple.negatives.push_back(static_cast<int>(
            sample_negative(samplers.entities, rng, exclude)));
      break;
    }
  }
  return out;
}

inline LossGrad event_loss_grad(const ModelParams& params,
                                const BuiltEvent& event) {
  switch (event.stream) {
    case Stream::Text:
      return text_loss_grad(params, event.text);
    case Stream::Graph:
      return graph_loss_grad(params, event.graph);
    case Stream::Relation:
      return relation_loss_grad(params, event.triple);
  }
  throw InvalidArgumentError("unknown stream");
}

template <typename Fn>
void for_each_touched_row(const BuiltEvent& event, Fn&& fn) {
  switch (event.stream) {
    case Stream::Text:
      fn(TensorId::Users, event.text.user);
      fn(TensorId::WordsOut, event.text.target);
      for (int w : event.text.negatives) fn(TensorId::WordsOut, w);
      for (int w : event.text.context) fn(TensorId::WordsIn, w);
      break;
    case Stream::Graph:
      fn(TensorId::Users, event.graph.anchor);
      fn(TensorId::Users, event.graph.positive);
      for (int v : event.graph.negatives) fn(TensorId::Users, v);
      break;
    case Stream::Relation:
      fn(TensorId::Users, event.triple.user);
      fn(TensorId::Relations, event.triple.relation);
      fn(TensorId::Entities, event.triple.positive_entity);
      for (int m : event.triple.negatives) fn(TensorId::Entities, m);
      break;
  }
}

inline LossGrad run_event(const ModelParams& params,
                          const SocialCorpus& corpus, const Samplers& samplers,
                          const TrainConfig& cfg, Rng& rng,
                          const ScheduledEvent& ev) {
  return event_loss_grad(params, build_event(corpus, samplers, cfg, rng, ev));
}

inline double stream_weight(const TrainConfig& cfg, Stream s) {
  switch (s) {
    case Stream::Text:
      return 1.0;
    case Stream::Graph:
      return cfg.lambda_graph;
    case Stream::Relation:
      return cfg.lambda_relation;
  }
  return 0.0;
}

}  // namespace detail

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

// Per-event SGD over a single schedule mixing all three evidence streams.
// Every document position with a nonempty context is one text event, every
// undirected edge two oriented graph events, every triple one event.
// Streams with zero weight contribute no events.
inline TrainResult train(const SocialCorpus& corpus, const TrainConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  using detail::ScheduledEvent;
  using detail::Stream;
  std::vector<ScheduledEvent> schedule;
  if (!corpus.documents.empty()) {
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      const auto len = corpus.documents[d].tokens.size();
      if (len < 2) continue;  // a lone token has no context
      for (std::size_t p = 0; p < len; ++p)
        schedule.push_back({Stream::Text, static_cast<std::int32_t>(d),
                            static_cast<std::int32_t>(p)});
    }
  }
  if (cfg.lambda_graph > 0.0) {
    for (std::size_t e = 0; e < corpus.edges.size(); ++e)
      for (std::int32_t orient = 0; orient < 2; ++orient)
        schedule.push_back(
            {Stream::Graph, static_cast<std::int32_t>(e), orient});
  }
  if (cfg.lambda_relation > 0.0) {
    for (std::size_t t = 0; t < corpus.triples.size(); ++t)
      schedule.push_back({Stream::Relation, static_cast<std::int32_t>(t), 0});
  }
  if (schedule.empty())
    throw InvalidArgumentError("corpus has no training events");

  TrainResult result;
  result.params = init_params(
      ModelSizes{corpus.users.size(), corpus.vocab.size(),
                 corpus.entities.size(), corpus.relations.size()},
      cfg.k, InitConfig{cfg.seed}, cfg.shared_word_table);
  if (!cfg.pretrained_words.empty())
    load_pretrained_words(result.params, corpus.vocab, cfg.pretrained_words);
  result.params.words_frozen = cfg.freeze_words;

  detail::Samplers samplers;
  if (!corpus.documents.empty()) {
    std::vector<double> freqs(corpus.vocab.freq.begin(),
                              corpus.vocab.freq.end());
    samplers.words = build_sampler(freqs, 0.75);
  }
  if (cfg.lambda_graph > 0.0 && !corpus.edges.empty())
    samplers.users = uniform_sampler(corpus.users.size());
  if (cfg.lambda_relation > 0.0 && !corpus.triples.empty())
    samplers.entities = uniform_sampler(corpus.entities.size());

  const long long per_epoch = static_cast<long long>(schedule.size());
  const long long total_steps = per_epoch * cfg.epochs;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(cfg.seed, 2000 + epoch));
    shuffle_rng.shuffle(schedule);

    EpochReport report;
    auto account = [&](EpochReport& rep, Stream s, double loss) {
      StreamStat& stat = s == Stream::Text    ? rep.text
                         : s == Stream::Graph ? rep.graph
                                              : rep.relation;
      stat.loss_sum += loss;
      stat.events += 1;
    };

    if (cfg.workers == 1) {
      Rng event_rng(mix_seed(cfg.seed, 1000 + epoch));
      for (long long i = 0; i < per_epoch; ++i) {
        const ScheduledEvent& ev = schedule[i];
        const long long step = static_cast<long long>(epoch) * per_epoch + i;
        const double alpha = lr_schedule(cfg, step, total_steps);
        LossGrad lg = detail::run_event(result.params, corpus, samplers, cfg,
                                        event_rng, ev);
        if (!std::isfinite(lg.loss) || !lg.grad.finite())
          throw TrainError("non-finite update at epoch " +
                           std::to_string(epoch + 1) + " step " +
                           std::to_string(i) + " (" +
                           detail::stream_name(ev.stream) + " event)");
        apply_sparse(result.params, lg.grad,
                     alpha * detail::stream_weight(cfg, ev.stream));
        account(report, ev.stream, lg.loss);
      }
    } else {
      const int workers = cfg.workers;
      std::vector<EpochReport> partial(workers);
      std::vector<std::thread> threads;
      std::atomic<bool> failed{false};
      // Worker-local mirrors of the shared tensors, cloned before any
      // worker starts writing. Touched rows are refreshed with relaxed
      // atomic loads before each event, so the pure loss code never reads
      // shared memory mid-update.
      std::vector<ModelParams> scratches(workers, result.params);
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          Rng event_rng(
              mix_seed(cfg.seed, 3000 + 1024ULL * epoch + w));
          ModelParams& scratch = scratches[w];
          const long long begin = per_epoch * w / workers;
          const long long end = per_epoch * (w + 1) / workers;
          for (long long i = begin; i < end && !failed.load(); ++i) {
            const ScheduledEvent& ev = schedule[i];
            const long long step =
                static_cast<long long>(epoch) * per_epoch + i;
            const double alpha = lr_schedule(cfg, step, total_steps);
            const detail::BuiltEvent event =
                detail::build_event(corpus, samplers, cfg, event_rng, ev);
            detail::for_each_touched_row(event, [&](TensorId t, int idx) {
              auto src = detail::grad_target(result.params, t, idx);
              auto dst = detail::grad_target(scratch, t, idx);
              for (std::size_t j = 0; j < src.size(); ++j)
                dst[j] = std::atomic_ref<double>(src[j]).load(
                    std::memory_order_relaxed);
            });
            LossGrad lg = detail::event_loss_grad(scratch, event);
            if (!std::isfinite(lg.loss) || !lg.grad.finite()) {
              failed.store(true);
              break;
            }
            detail::apply_sparse_relaxed(
                result.params, lg.grad,
                alpha * detail::stream_weight(cfg, ev.stream));
            account(partial[w], ev.stream, lg.loss);
          }
        });
      }
      for (auto& t : threads) t.join();
      if (failed.load())
        throw TrainError("non-finite update during parallel epoch " +
                         std::to_string(epoch + 1));
      for (const auto& p : partial) {
        report.text.loss_sum += p.text.loss_sum;
        report.text.events += p.text.events;
        report.graph.loss_sum += p.graph.loss_sum;
        report.graph.events += p.graph.events;
        report.relation.loss_sum += p.relation.loss_sum;
        report.relation.events += p.relation.events;
      }
    }

    const long long epoch_events =
        report.text.events + report.graph.events + report.relation.events;
    report.joint_mean =
        joint_loss(report.text.loss_sum, report.graph.loss_sum,
                   report.relation.loss_sum,
                   LossWeights{cfg.lambda_graph, cfg.lambda_relation}) /
        static_cast<double>(epoch_events);
    result.report.total_events += epoch_events;

    if (cfg.progress != nullptr) {
      auto line = [&](const char* name, const StreamStat& stat) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "epoch=%d stream=%s mean_loss=%.6f events=%lld\n",
                      epoch + 1, name, stat.mean(), stat.events);
        *cfg.progress << buf;
      };
      line("text", report.text);
      line("graph", report.graph);
      line("rel", report.relation);
    }
    result.report.epochs.push_back(report);
  }

  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace socialvec
