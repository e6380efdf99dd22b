#include <cmath>

#include "doctest.h"
#include "socialvec/synth.hpp"
#include "socialvec/trainer.hpp"
#include "support/test_util.hpp"

using namespace socialvec;

namespace {

// 20 users in two cliques plus a little text and the standard attributes.
SynthDataset tiny_dataset(std::uint64_t seed = 1) {
  SynthConfig cfg;
  cfg.n_users = 20;
  cfg.n_communities = 2;
  cfg.p_in = 1.0;
  cfg.p_out = 0.0;
  cfg.vocab_size = 50;
  cfg.tokens_per_user = 10;
  cfg.topic_skew = 0.9;
  cfg.attributes = default_attributes(2, 0.0, 0.1);
  cfg.seed = seed;
  return generate(cfg);
}

TrainConfig fast_config(int k = 8) {
  TrainConfig cfg;
  cfg.k = k;
  cfg.epochs = 3;
  cfg.progress = nullptr;
  return cfg;
}

bool same_tensors(const ModelParams& a, const ModelParams& b) {
  return a.user_vecs == b.user_vecs && a.word_in_vecs == b.word_in_vecs &&
         a.word_out_vecs == b.word_out_vecs &&
         a.entity_vecs == b.entity_vecs && a.relation_mats == b.relation_mats;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("lr_schedule decays linearly to the floor") {
  TrainConfig cfg;
  cfg.lr0 = 0.025;
  cfg.lr_min = 1e-4;
  CHECK(lr_schedule(cfg, 0, 1000) == 0.025);
  CHECK(lr_schedule(cfg, 1000, 1000) == 1e-4);
  CHECK(lr_schedule(cfg, 500, 1000) == doctest::Approx(0.0125).epsilon(1e-15));
}

TEST_CASE("defaults follow the protocol") {
  const TrainConfig cfg;
  CHECK(cfg.k == 500);
  CHECK(cfg.epochs == 3);
  CHECK(cfg.lambda_graph == 1.0);
  CHECK(cfg.lambda_relation == 1.0);
  CHECK(cfg.text_negatives == 5);
  CHECK(cfg.window == 5);
}

TEST_CASE("apply_sparse touches exactly the referenced rows") {
  ModelParams params = init_params(ModelSizes{4, 3, 2, 1}, 3, InitConfig{2});
  const ModelParams before = params;

  SUBCASE("zero gradient leaves everything unchanged") {
    SparseGrad grad;
    const std::vector<double> zero(3, 0.0);
    grad.accumulate(TensorId::Users, 1, zero);
    apply_sparse(params, grad, 0.5);
    CHECK(same_tensors(params, before));
  }
  SUBCASE("a single row block decrements that row exactly") {
    SparseGrad grad;
    const std::vector<double> g{1.0, -2.0, 3.0};
    grad.accumulate(TensorId::Users, 2, g);
    apply_sparse(params, grad, 1.0);
    for (int i = 0; i < 3; ++i)
      CHECK(params.user(2)[i] == before.user(2)[i] - g[i]);
    // every other row untouched
    for (int v : {0, 1, 3})
      for (int i = 0; i < 3; ++i)
        CHECK(params.user(v)[i] == before.user(v)[i]);
    CHECK(params.word_in_vecs == before.word_in_vecs);
    CHECK(params.entity_vecs == before.entity_vecs);
    CHECK(params.relation_mats == before.relation_mats);
  }
  SUBCASE("frozen words skip word blocks but not user blocks") {
    params.words_frozen = true;
    SparseGrad grad;
    const std::vector<double> g{1.0, 1.0, 1.0};
    grad.accumulate(TensorId::WordsIn, 0, g);
    grad.accumulate(TensorId::WordsOut, 1, g);
    grad.accumulate(TensorId::Users, 0, g);
    apply_sparse(params, grad, 1.0);
    CHECK(params.word_in_vecs == before.word_in_vecs);
    CHECK(params.word_out_vecs == before.word_out_vecs);
    CHECK(params.user(0)[0] == before.user(0)[0] - 1.0);
  }
}

TEST_CASE("training is bitwise deterministic with one worker") {
  const SynthDataset data = tiny_dataset();
  const TrainConfig cfg = fast_config();
  const TrainResult a = train(data.corpus, cfg);
  const TrainResult b = train(data.corpus, cfg);
  CHECK(same_tensors(a.params, b.params));
  CHECK(a.report.total_events == b.report.total_events);
  for (std::size_t e = 0; e < a.report.epochs.size(); ++e)
    CHECK(a.report.epochs[e].joint_mean == b.report.epochs[e].joint_mean);
}

TEST_CASE("joint mean loss strictly decreases on the tiny corpus") {
  const SynthDataset data = tiny_dataset();
  const TrainConfig cfg = fast_config();
  const TrainResult result = train(data.corpus, cfg);
  REQUIRE(result.report.epochs.size() == 3);
  CHECK(result.report.epochs[1].joint_mean <
        result.report.epochs[0].joint_mean);
  CHECK(result.report.epochs[2].joint_mean <
        result.report.epochs[1].joint_mean);
}

TEST_CASE("event accounting matches corpus content times epochs") {
  const SynthDataset data = tiny_dataset();
  const TrainConfig cfg = fast_config();
  const TrainResult result = train(data.corpus, cfg);
  long long text_positions = 0;
  for (const auto& doc : data.corpus.documents)
    if (doc.tokens.size() >= 2) text_positions += doc.tokens.size();
  const long long expected_per_epoch =
      text_positions + 2 * static_cast<long long>(data.corpus.edges.size()) +
      static_cast<long long>(data.corpus.triples.size());
  for (const auto& epoch : result.report.epochs) {
    CHECK(epoch.text.events == text_positions);
    CHECK(epoch.graph.events ==
          2 * static_cast<long long>(data.corpus.edges.size()));
    CHECK(epoch.relation.events ==
          static_cast<long long>(data.corpus.triples.size()));
  }
  CHECK(result.report.total_events == expected_per_epoch * cfg.epochs);
}

TEST_CASE("two cliques end up closer inside than across") {
  const SynthDataset data = tiny_dataset();
  TrainConfig cfg = fast_config();
  cfg.epochs = 10;
  const TrainResult result = train(data.corpus, cfg);
  double within = 0.0, across = 0.0;
  long long n_within = 0, n_across = 0;
  const int n = data.config.n_users;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double d = dot(result.params.user(a), result.params.user(b));
      if (data.community[a] == data.community[b]) {
        within += d;
        ++n_within;
      } else {
        across += d;
        ++n_across;
      }
    }
  CHECK(within / n_within > across / n_across);
}

TEST_CASE("zero-weight streams contribute no events") {
  const SynthDataset data = tiny_dataset();
  TrainConfig cfg = fast_config();
  cfg.lambda_graph = 0.0;
  const TrainResult result = train(data.corpus, cfg);
  for (const auto& epoch : result.report.epochs) {
    CHECK(epoch.graph.events == 0);
    CHECK(epoch.text.events > 0);
    CHECK(epoch.relation.events > 0);
  }
}

TEST_CASE("an event updates only the rows it references") {
  const SynthDataset data = tiny_dataset();
  ModelParams params = init_params(
      ModelSizes{data.corpus.users.size(), data.corpus.vocab.size(),
                 data.corpus.entities.size(), data.corpus.relations.size()},
      6, InitConfig{3});
  const ModelParams before = params;
  GraphEvent event{0, 2, {5, 7}};
  const LossGrad lg = graph_loss_grad(params, event);
  apply_sparse(params, lg.grad, 0.1);
  for (int v = 0; v < data.corpus.users.size(); ++v) {
    const bool referenced = v == 0 || v == 2 || v == 5 || v == 7;
    bool changed = false;
    for (int i = 0; i < 6; ++i)
      if (params.user(v)[i] != before.user(v)[i]) changed = true;
    CHECK(changed == referenced);
  }
  CHECK(params.word_in_vecs == before.word_in_vecs);
  CHECK(params.entity_vecs == before.entity_vecs);
}

TEST_CASE("exploding updates abort with diagnostics") {
  const SynthDataset data = tiny_dataset();
  TrainConfig cfg = fast_config();
  cfg.lr0 = 1e300;
  cfg.lr_min = 1e299;
  try {
    train(data.corpus, cfg);
    FAIL("expected TrainError");
  } catch (const TrainError& e) {
    const std::string what = e.what();
    CHECK(what.find("step") != std::string::npos);
    CHECK(what.find("epoch") != std::string::npos);
  }
}

TEST_CASE("empty corpus is rejected") {
  SocialCorpus corpus;
  corpus.users.add("a");
  corpus.users.add("b");
  CHECK_THROWS_AS(train(corpus, fast_config()), InvalidArgumentError);
}

TEST_CASE("parallel mode runs and keeps the event accounting") {
  const SynthDataset data = tiny_dataset();
  TrainConfig cfg = fast_config();
  cfg.workers = 2;
  const TrainResult result = train(data.corpus, cfg);
  CHECK(all_finite(result.params.user_vecs.data()));
  long long text_positions = 0;
  for (const auto& doc : data.corpus.documents)
    if (doc.tokens.size() >= 2) text_positions += doc.tokens.size();
  CHECK(result.report.epochs[0].text.events == text_positions);
}

TEST_CASE("frozen pretrained words survive training unchanged") {
  const SynthDataset data = tiny_dataset();
  testutil::TempDir tmp;
  // pretend the first two vocabulary tokens have external vectors
  std::string pretrained;
  pretrained += data.corpus.vocab.table.name(0) + " 0.25 0.5 0.75 1 1 1 1 1\n";
  pretrained += data.corpus.vocab.table.name(1) + " -1 -1 -1 -1 -1 -1 -1 -1\n";
  const auto path = tmp.file("vecs.txt");
  testutil::write_text(path, pretrained);
  TrainConfig cfg = fast_config(8);
  cfg.pretrained_words = path;
  cfg.freeze_words = true;
  const TrainResult result = train(data.corpus, cfg);
  CHECK(result.params.word_in(0)[0] == 0.25);
  CHECK(result.params.word_in(0)[3] == 1.0);
  CHECK(result.params.word_in(1)[0] == -1.0);
  // user vectors still moved
  const ModelParams fresh = init_params(
      ModelSizes{data.corpus.users.size(), data.corpus.vocab.size(),
                 data.corpus.entities.size(), data.corpus.relations.size()},
      8, InitConfig{cfg.seed});
  CHECK(result.params.user_vecs != fresh.user_vecs);
}


TEST_CASE("shared word table trains through the single table") {
  const SynthDataset data = tiny_dataset();
  TrainConfig cfg = fast_config();
  cfg.shared_word_table = true;
  const TrainResult result = train(data.corpus, cfg);
  CHECK(result.params.shared_word_table);
  CHECK(result.params.word_out_vecs.rows() == 0);
  CHECK(result.params.word_in_vecs.rows() ==
        static_cast<std::size_t>(data.corpus.vocab.size()));
  CHECK(all_finite(result.params.word_in_vecs.data()));
  // deterministic like the dual-table mode
  const TrainResult again = train(data.corpus, cfg);
  CHECK(result.params.word_in_vecs == again.params.word_in_vecs);
  // the in-table actually moved (it now receives the target-side updates)
  CHECK(result.params.word_in_vecs !=
        init_params(ModelSizes{data.corpus.users.size(),
                               data.corpus.vocab.size(),
                               data.corpus.entities.size(),
                               data.corpus.relations.size()},
                    cfg.k, InitConfig{cfg.seed}, true)
            .word_in_vecs);
}

}  // TEST_SUITE
