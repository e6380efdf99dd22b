#include <cmath>

#include "doctest.h"
#include "socialvec/classifier_io.hpp"
#include "socialvec/inference.hpp"
#include "socialvec/synth.hpp"
#include "socialvec/trainer.hpp"
#include "support/test_util.hpp"

using namespace socialvec;

namespace {

// Model whose user vectors form two separable Gaussian blobs.
ModelParams blob_model(int k, int n_per_blob, double spread,
                       std::uint64_t seed) {
  ModelParams model =
      init_params(ModelSizes{2 * n_per_blob, 0, 0, 0}, k, InitConfig{seed});
  Rng rng(mix_seed(seed, 55));
  for (int u = 0; u < 2 * n_per_blob; ++u) {
    const double center = u < n_per_blob ? 1.0 : -1.0;
    auto row = model.user(u);
    for (int i = 0; i < k; ++i)
      row[i] = center + spread * testutil::gaussian(rng);
  }
  return model;
}

std::vector<std::pair<int, int>> blob_labels(int n_per_blob) {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < 2 * n_per_blob; ++u)
    out.emplace_back(u, u < n_per_blob ? 0 : 1);
  return out;
}

AttributeClassifier random_attr_clf(int k, int hidden, int labels,
                                    std::uint64_t seed) {
  const ModelParams model =
      init_params(ModelSizes{2, 0, 0, 0}, k, InitConfig{seed});
  HeadConfig cfg;
  cfg.hidden = hidden;
  cfg.seed = seed;
  AttributeClassifier clf =
      attr_init(model, IdTable{}, labels, cfg, {}, "test");
  Rng rng(mix_seed(seed, 56));
  for (double& v : clf.u.data()) v = rng.uniform(-0.8, 0.8);
  return clf;
}

std::vector<double> random_vec(int k, Rng& rng, double half = 1.0) {
  std::vector<double> v(k);
  for (double& x : v) x = rng.uniform(-half, half);
  return v;
}

bool same_tensors(const ModelParams& a, const ModelParams& b) {
  return a.user_vecs == b.user_vecs && a.word_in_vecs == b.word_in_vecs &&
         a.word_out_vecs == b.word_out_vecs &&
         a.entity_vecs == b.entity_vecs && a.relation_mats == b.relation_mats;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("attr_forward basics") {
  SUBCASE("zero weights give the uniform distribution") {
    AttributeClassifier clf = random_attr_clf(3, 4, 2, 1);
    for (double& v : clf.w.data()) v = 0.0;
    for (double& v : clf.u.data()) v = 0.0;
    const std::vector<double> e{0.3, -0.1, 0.9};
    const auto probs = attr_forward(clf, e);
    CHECK(probs[0] == 0.5);
    CHECK(probs[1] == 0.5);
  }
  SUBCASE("probabilities sum to one and stay inside (0,1)") {
    Rng rng(7);
    const AttributeClassifier clf = random_attr_clf(6, 5, 4, 2);
    for (int trial = 0; trial < 200; ++trial) {
      const auto e = random_vec(6, rng, 3.0);
      const auto probs = attr_forward(clf, e);
      double sum = 0.0;
      for (double p : probs) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        sum += p;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-9);
    }
  }
  SUBCASE("injected logits (1,2,3) reproduce the softmax values") {
    // h = tanh(atanh(0.5)) = 0.5, U = (2,4,6)^T -> logits (1,2,3)
    const ModelParams model =
        init_params(ModelSizes{1, 0, 0, 0}, 1, InitConfig{1});
    HeadConfig cfg;
    cfg.hidden = 1;
    AttributeClassifier clf = attr_init(model, IdTable{}, 3, cfg, {}, "t");
    clf.w.data()[0] = std::atanh(0.5);
    clf.u.data() = {2.0, 4.0, 6.0};
    const std::vector<double> e{1.0};
    const auto probs = attr_forward(clf, e);
    CHECK(std::fabs(probs[0] - 0.0900) <= 1e-4);
    CHECK(std::fabs(probs[1] - 0.2447) <= 1e-4);
    CHECK(std::fabs(probs[2] - 0.6652) <= 1e-4);
    // direct evaluation of the softmax as an independent check
    const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
    CHECK(probs[0] == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(std::exp(2.0) / z).epsilon(1e-12));
    CHECK(probs[2] == doctest::Approx(std::exp(3.0) / z).epsilon(1e-12));
  }
  SUBCASE("width mismatch is an error") {
    const AttributeClassifier clf = random_attr_clf(4, 3, 2, 3);
    const std::vector<double> e{1.0, 2.0};
    CHECK_THROWS_AS(attr_forward(clf, e), DimensionMismatchError);
  }
  SUBCASE("shifting every logit by a constant changes nothing") {
    Rng rng(11);
    AttributeClassifier clf = random_attr_clf(5, 4, 3, 4);
    const auto e = random_vec(5, rng);
    const auto before = attr_forward(clf, e);
    // delta with delta . h = c shifts all logits by the same amount
    std::vector<double> h(clf.hidden, 0.0);
    for (int i = 0; i < clf.hidden; ++i)
      h[i] = std::tanh(dot(clf.w.row(i), std::span<const double>(e)));
    const double c = 7.5;
    const double hh = dot(h, h);
    REQUIRE(hh > 0.0);
    for (int l = 0; l < clf.labels; ++l)
      for (int j = 0; j < clf.hidden; ++j)
        clf.u.row(l)[j] += c * h[j] / hh;
    const auto after = attr_forward(clf, e);
    for (int l = 0; l < clf.labels; ++l)
      CHECK(std::fabs(after[l] - before[l]) <= 1e-12);
  }
}

TEST_CASE("attr gradient matches finite differences") {
  Rng rng(21);
  AttributeClassifier clf = random_attr_clf(6, 4, 3, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = random_vec(6, rng);
    const int label = static_cast<int>(rng.below(3));
    const AttrGrad grad = attr_grad(clf, e, label);
    auto loss = [&] { return -std::log(attr_forward(clf, e)[label]); };
    CHECK(testutil::check_table_gradient(clf.w, grad.w, loss).max_rel_error <
          1e-4);
    CHECK(testutil::check_table_gradient(clf.u, grad.u, loss).max_rel_error <
          1e-4);
  }
}

TEST_CASE("attr_train separates planted blobs and freezes embeddings") {
  const ModelParams model = blob_model(8, 30, 0.3, 9);
  const ModelParams before = model;
  const auto examples = blob_labels(30);
  HeadConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 50;
  const AttributeClassifier clf =
      attr_train(examples, model, IdTable{}, cfg, {"left", "right"}, "blob");
  CHECK(attr_accuracy(clf, model, examples) >= 0.98);
  CHECK(same_tensors(model, before));
  // deterministic under a fixed seed
  const AttributeClassifier again =
      attr_train(examples, model, IdTable{}, cfg, {"left", "right"}, "blob");
  CHECK(clf.w == again.w);
  CHECK(clf.u == again.u);
}

TEST_CASE("single-class training sets are rejected") {
  const ModelParams model = blob_model(4, 5, 0.2, 2);
  std::vector<std::pair<int, int>> examples;
  for (int u = 0; u < 10; ++u) examples.emplace_back(u, 0);
  HeadConfig cfg;
  CHECK_THROWS_AS(attr_train(examples, model, IdTable{}, cfg),
                  InvalidArgumentError);
}

TEST_CASE("rel_forward basics") {
  const ModelParams model = blob_model(5, 4, 0.2, 3);
  HeadConfig cfg;
  cfg.hidden = 4;
  cfg.hidden2 = 3;
  SUBCASE("zero weights give the uniform distribution") {
    RelationClassifier clf = rel_init(model, IdTable{}, 2, cfg, {}, "r");
    for (auto* t : {&clf.wa, &clf.wb, &clf.w_diff, &clf.w_prod, &clf.w1,
                    &clf.w2, &clf.u})
      for (double& v : t->data()) v = 0.0;
    const auto probs = rel_forward(clf, model.user(0), model.user(1));
    CHECK(probs[0] == 0.5);
    CHECK(probs[1] == 0.5);
  }
  SUBCASE("equal inputs through equal projections zero the diff feature") {
    RelationClassifier clf = rel_init(model, IdTable{}, 2, cfg, {}, "r");
    clf.wb = clf.wa;  // same projection on both sides
    for (double& v : clf.w_prod.data()) v = 0.0;
    for (double& v : clf.w1.data()) v = 0.0;
    for (double& v : clf.w2.data()) v = 0.0;
    Rng rng(4);
    for (double& v : clf.u.data()) v = rng.uniform(-1.0, 1.0);
    // only the diff path feeds the logits, and diff = |h1 - h1| = 0
    const auto probs = rel_forward(clf, model.user(2), model.user(2));
    CHECK(probs[0] == 0.5);
    CHECK(probs[1] == 0.5);
  }
}

TEST_CASE("rel gradient matches finite differences on all six blocks") {
  const ModelParams model = blob_model(5, 4, 0.4, 6);
  HeadConfig cfg;
  cfg.hidden = 4;
  cfg.hidden2 = 3;
  RelationClassifier clf = rel_init(model, IdTable{}, 3, cfg, {}, "r");
  Rng rng(31);
  for (double& v : clf.u.data()) v = rng.uniform(-0.8, 0.8);
  for (int trial = 0; trial < 12; ++trial) {
    const auto e1 = random_vec(5, rng);
    const auto e2 = random_vec(5, rng);
    const int label = static_cast<int>(rng.below(3));
    const RelGrad grad = rel_grad(clf, e1, e2, label);
    auto loss = [&] { return -std::log(rel_forward(clf, e1, e2)[label]); };
    CHECK(testutil::check_table_gradient(clf.wa, grad.wa, loss)
              .max_rel_error < 1e-4);
    CHECK(testutil::check_table_gradient(clf.wb, grad.wb, loss)
              .max_rel_error < 1e-4);
    CHECK(testutil::check_table_gradient(clf.w_diff, grad.w_diff, loss)
              .max_rel_error < 1e-4);
    CHECK(testutil::check_table_gradient(clf.w_prod, grad.w_prod, loss)
              .max_rel_error < 1e-4);
    CHECK(testutil::check_table_gradient(clf.w1, grad.w1, loss)
              .max_rel_error < 1e-4);
    CHECK(testutil::check_table_gradient(clf.w2, grad.w2, loss)
              .max_rel_error < 1e-4);
    CHECK(testutil::check_table_gradient(clf.u, grad.u, loss).max_rel_error <
          1e-4);
  }
}

TEST_CASE("rel_train learns planted friend pairs") {
  const ModelParams model = blob_model(6, 20, 0.3, 12);
  std::vector<PairExample> pairs;
  Rng rng(13);
  for (int trial = 0; trial < 120; ++trial) {
    const int a = static_cast<int>(rng.below(40));
    const int b = static_cast<int>(rng.below(40));
    if (a == b) continue;
    const bool same = (a < 20) == (b < 20);
    pairs.emplace_back(a, b, same ? 1 : 0);
  }
  HeadConfig cfg;
  cfg.hidden = 12;
  cfg.hidden2 = 8;
  cfg.epochs = 60;
  const RelationClassifier clf =
      rel_train(pairs, model, IdTable{}, cfg, {"no", "yes"}, "friend");
  CHECK(rel_accuracy(clf, model, pairs) >= 0.95);
  const RelationClassifier again =
      rel_train(pairs, model, IdTable{}, cfg, {"no", "yes"}, "friend");
  CHECK(clf.wa == again.wa);
  CHECK(clf.u == again.u);
}

TEST_CASE("binary relabeling permutes the outputs exactly") {
  const ModelParams model = blob_model(5, 10, 0.3, 17);
  std::vector<PairExample> pairs, flipped;
  Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const int a = static_cast<int>(rng.below(20));
    const int b = static_cast<int>(rng.below(20));
    if (a == b) continue;
    const int label = (a < 10) == (b < 10) ? 1 : 0;
    pairs.emplace_back(a, b, label);
    flipped.emplace_back(a, b, 1 - label);
  }
  HeadConfig cfg;
  cfg.hidden = 6;
  cfg.hidden2 = 4;
  cfg.epochs = 10;
  const RelationClassifier clf =
      rel_train(pairs, model, IdTable{}, cfg, {"a", "b"}, "r");
  const RelationClassifier mirror =
      rel_train(flipped, model, IdTable{}, cfg, {"a", "b"}, "r");
  for (int u = 0; u < 10; ++u) {
    const auto p = rel_forward(clf, model.user(u), model.user(u + 10));
    const auto q = rel_forward(mirror, model.user(u), model.user(u + 10));
    CHECK(p[0] == q[1]);
    CHECK(p[1] == q[0]);
  }
}

TEST_CASE("group fitting improves the objective and honors the oracle") {
  // near-linear two-class head on a 2-D model
  const ModelParams model =
      init_params(ModelSizes{4, 0, 0, 0}, 2, InitConfig{23});
  HeadConfig head_cfg;
  head_cfg.hidden = 2;
  AttributeClassifier clf = attr_init(model, IdTable{}, 2, head_cfg,
                                      {"yes", "no"}, "marker");
  clf.w.data() = {0.3, 0.0, 0.0, 0.3};
  clf.u.data() = {1.5, 0.4, -1.5, -0.4};

  GroupFitConfig cfg;
  cfg.mu = 0.05;
  cfg.step = 0.2;
  cfg.iterations = 1500;
  const std::vector<GroupCondition> conditions{{&clf, 0}};

  auto objective = [&](std::span<const double> e) {
    return std::log(attr_forward(clf, e)[0]) - cfg.mu * dot(e, e);
  };

  SUBCASE("final objective never falls below the starting point") {
    // starting point: mean user embedding
    std::vector<double> init(2, 0.0);
    for (int u = 0; u < 4; ++u) axpy(0.25, model.user(u), init);
    const GroupFitResult fit = fit_group_embedding(conditions, model, cfg);
    CHECK(fit.objective >= objective(init));
    CHECK(fit.condition_probs.size() == 1);
    CHECK(fit.condition_probs[0] ==
          doctest::Approx(attr_forward(clf, fit.embedding)[0])
              .epsilon(1e-12));
  }
  SUBCASE("matches a brute-force grid maximizer within 1e-3") {
    const GroupFitResult fit = fit_group_embedding(conditions, model, cfg);
    double best = -1e300;
    std::vector<double> e(2);
    for (int i = 0; i <= 600; ++i) {
      e[0] = -3.0 + 0.01 * i;
      for (int j = 0; j <= 600; ++j) {
        e[1] = -3.0 + 0.01 * j;
        const double obj = objective(e);
        if (obj > best) best = obj;
      }
    }
    CHECK(std::fabs(fit.objective - best) <= 1e-3);
  }
  SUBCASE("without the L2 penalty the embedding norm keeps growing") {
    GroupFitConfig free = cfg;
    free.mu = 0.0;
    free.step = 0.1;
    free.iterations = 100;
    const GroupFitResult short_run =
        fit_group_embedding(conditions, model, free);
    free.iterations = 400;
    const GroupFitResult long_run =
        fit_group_embedding(conditions, model, free);
    CHECK(std::sqrt(dot(long_run.embedding, long_run.embedding)) >
          std::sqrt(dot(short_run.embedding, short_run.embedding)));
    CHECK(long_run.objective >= short_run.objective);
  }
  SUBCASE("empty condition list is rejected") {
    CHECK_THROWS_AS(fit_group_embedding({}, model, cfg),
                    InvalidArgumentError);
  }
}

TEST_CASE("group queries compose head probabilities") {
  const ModelParams model =
      init_params(ModelSizes{5, 0, 0, 0}, 3, InitConfig{29});
  HeadConfig head_cfg;
  head_cfg.hidden = 3;
  AttributeClassifier strong = attr_init(model, IdTable{}, 2, head_cfg,
                                         {"in", "out"}, "marker");
  Rng rng(31);
  for (double& v : strong.u.data()) v = rng.uniform(-1.0, 1.0);

  AttributeClassifier coin =
      attr_init(model, IdTable{}, 2, head_cfg, {"h", "t"}, "coin");
  for (double& v : coin.w.data()) v = 0.0;
  for (double& v : coin.u.data()) v = 0.0;

  GroupFitConfig cfg;
  cfg.iterations = 200;

  SUBCASE("a zero-weight head always reports one half") {
    GroupQuery query;
    query.given = {{&strong, 0}};
    query.then = {{&coin, 1}};
    const auto result = group_query(query, model, cfg);
    CHECK(result.probability == 0.5);
    CHECK(result.factors.size() == 1);
    CHECK(result.factors[0].first == "coin=t");
  }
  SUBCASE("a single THEN condition equals the head at the fitted point") {
    GroupQuery query;
    query.given = {{&strong, 0}};
    query.then = {{&strong, 1}};
    const auto result = group_query(query, model, cfg);
    CHECK(result.probability ==
          attr_forward(strong, result.fit.embedding)[1]);
  }
  SUBCASE("two identical conditions multiply to p squared") {
    GroupQuery query;
    query.given = {{&strong, 0}};
    query.then = {{&strong, 1}, {&strong, 1}};
    const auto result = group_query(query, model, cfg);
    const double p = result.factors[0].second;
    CHECK(result.probability == p * p);
  }
  SUBCASE("empty clauses are rejected") {
    GroupQuery no_if;
    no_if.then = {{&strong, 0}};
    CHECK_THROWS_AS(group_query(no_if, model, cfg), InvalidArgumentError);
    GroupQuery no_then;
    no_then.given = {{&strong, 0}};
    CHECK_THROWS_AS(group_query(no_then, model, cfg), InvalidArgumentError);
  }
}

TEST_CASE("group ratios divide query probabilities") {
  const ModelParams model =
      init_params(ModelSizes{6, 0, 0, 0}, 2, InitConfig{37});
  HeadConfig head_cfg;
  head_cfg.hidden = 2;
  AttributeClassifier marker = attr_init(model, IdTable{}, 2, head_cfg,
                                         {"yes", "no"}, "marker");
  marker.w.data() = {0.4, 0.1, -0.2, 0.5};
  marker.u.data() = {1.0, -0.5, -1.0, 0.5};
  GroupFitConfig cfg;
  cfg.iterations = 300;

  SUBCASE("identical queries give exactly one") {
    GroupQuery query;
    query.given = {{&marker, 0}};
    query.then = {{&marker, 1}};
    CHECK(group_ratio(query, query, model, cfg) == 1.0);
  }
  SUBCASE("heads calibrated to 0.6 and 0.3 give ratio two") {
    GroupQuery base;
    base.given = {{&marker, 0}};
    base.then = {{&marker, 1}};
    const auto fit = fit_group_embedding(base.given, model, cfg);
    // one-hidden-unit heads tuned so P(label 0 | e_G) hits the target
    auto calibrated = [&](double target, const char* name) {
      HeadConfig one;
      one.hidden = 1;
      AttributeClassifier head =
          attr_init(model, IdTable{}, 2, one, {"x", "y"}, name);
      head.w.data() = {0.7, 0.2};
      const double h0 = std::tanh(
          dot(head.w.row(0), std::span<const double>(fit.embedding)));
      head.u.data() = {std::log(target / (1.0 - target)) / h0, 0.0};
      return head;
    };
    const AttributeClassifier head6 = calibrated(0.6, "likes6");
    const AttributeClassifier head3 = calibrated(0.3, "likes3");
    GroupQuery q1;
    q1.given = base.given;
    q1.then = {{&head6, 0}};
    GroupQuery q2;
    q2.given = base.given;
    q2.then = {{&head3, 0}};
    CHECK(group_ratio(q1, q2, model, cfg) ==
          doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("classifier files round-trip exactly") {
  testutil::TempDir tmp;
  const ModelParams model = blob_model(4, 6, 0.3, 41);
  IdTable users;
  for (int u = 0; u < 12; ++u) users.add("user" + std::to_string(u));
  HeadConfig cfg;
  cfg.hidden = 5;
  cfg.hidden2 = 3;
  cfg.epochs = 5;

  SUBCASE("attribute classifier") {
    const AttributeClassifier clf = attr_train(
        blob_labels(6), model, users, cfg, {"left", "right"}, "MemberOf");
    const auto path = tmp.file("attr.clf");
    save_classifier(clf, path);
    const AnyClassifier any = load_classifier(path);
    const auto* loaded = std::get_if<AttributeClassifier>(&any);
    REQUIRE(loaded != nullptr);
    CHECK(loaded->name == "MemberOf");
    CHECK(loaded->label_names == clf.label_names);
    CHECK(loaded->w == clf.w);
    CHECK(loaded->u == clf.u);
    CHECK(loaded->acc_w == clf.acc_w);
    CHECK(loaded->acc_u == clf.acc_u);
    CHECK(loaded->fingerprint == clf.fingerprint);
    CHECK(loaded->fingerprint == user_table_fingerprint(users));
  }
  SUBCASE("relation classifier") {
    std::vector<PairExample> pairs;
    for (int u = 0; u < 6; ++u) {
      pairs.emplace_back(u, (u + 1) % 6, 1);
      pairs.emplace_back(u, 6 + u, 0);
    }
    const RelationClassifier clf =
        rel_train(pairs, model, users, cfg, {"no", "yes"}, "friend");
    const auto path = tmp.file("rel.clf");
    save_classifier(clf, path);
    const AnyClassifier any = load_classifier(path);
    const auto* loaded = std::get_if<RelationClassifier>(&any);
    REQUIRE(loaded != nullptr);
    CHECK(loaded->wa == clf.wa);
    CHECK(loaded->wb == clf.wb);
    CHECK(loaded->w_diff == clf.w_diff);
    CHECK(loaded->w_prod == clf.w_prod);
    CHECK(loaded->w1 == clf.w1);
    CHECK(loaded->w2 == clf.w2);
    CHECK(loaded->u == clf.u);
    CHECK(loaded->acc_u == clf.acc_u);
  }
  SUBCASE("wrong header is a version mismatch") {
    const auto path = tmp.file("junk.clf");
    testutil::write_text(path, "SOCIALVEC-CLF 9\nTYPE ATTR\n");
    CHECK_THROWS_AS(load_classifier(path), VersionMismatchError);
  }
}

TEST_CASE("planted three-to-one preference shows up in the group ratio") {
  // community 0 carries the "fan" label three times as often as community 1
  SynthConfig scfg;
  scfg.n_users = 200;
  scfg.attributes = {{"MemberOf", {"group0", "group1"}, 0.0},
                     {"Fan", {"fan", "nofan"}, 0.25}};
  scfg.seed = 3;
  const SynthDataset data = generate(scfg);
  const double emp0 = empirical_conditional(data, {{"MemberOf", "group0"}},
                                            {{"Fan", "fan"}});
  const double emp1 = empirical_conditional(data, {{"MemberOf", "group1"}},
                                            {{"Fan", "fan"}});
  CHECK(emp0 / emp1 == doctest::Approx(3.0).epsilon(0.35));

  TrainConfig cfg;
  cfg.k = 4;  // wide embeddings let heads memorize the label noise
  cfg.progress = nullptr;
  const ModelParams model = train(data.corpus, cfg).params;
  HeadConfig head;
  std::vector<std::pair<int, int>> member_ex, fan_ex;
  for (int u = 0; u < scfg.n_users; ++u) {
    member_ex.emplace_back(u, data.attr_labels[0][u]);
    fan_ex.emplace_back(u, data.attr_labels[1][u]);
  }
  const AttributeClassifier member =
      attr_train(member_ex, model, data.corpus.users, head,
                 {"group0", "group1"}, "MemberOf");
  const AttributeClassifier fan = attr_train(
      fan_ex, model, data.corpus.users, head, {"fan", "nofan"}, "Fan");
  GroupQuery q0, q1;
  q0.given = {{&member, 0}};
  q0.then = {{&fan, 0}};
  q1.given = {{&member, 1}};
  q1.then = {{&fan, 0}};
  const double ratio = group_ratio(q0, q1, model, GroupFitConfig{});
  CHECK(ratio >= 2.0);
  CHECK(ratio <= 4.5);
}


TEST_CASE("group fit aborts on a non-finite objective") {
  const ModelParams model =
      init_params(ModelSizes{3, 0, 0, 0}, 2, InitConfig{5});
  HeadConfig head_cfg;
  head_cfg.hidden = 1;
  AttributeClassifier doom =
      attr_init(model, IdTable{}, 2, head_cfg, {"a", "b"}, "doom");
  // logits of +-900 underflow the loser's probability to exactly zero
  doom.w.data() = {50.0, 50.0};
  doom.u.data() = {900.0, -900.0};
  std::vector<double> probe{1.0, 1.0};
  CHECK(attr_forward(doom, probe)[1] == 0.0);
  GroupFitConfig cfg;
  cfg.iterations = 5;
  CHECK_THROWS_AS(fit_group_embedding({{&doom, 1}}, model, cfg), TrainError);

  // the same construction makes a query probability of exactly zero, which
  // a ratio cannot divide by
  GroupQuery numer, denom;
  AttributeClassifier fair =
      attr_init(model, IdTable{}, 2, head_cfg, {"a", "b"}, "fair");
  numer.given = {{&fair, 0}};
  numer.then = {{&fair, 0}};
  denom.given = {{&fair, 0}};
  denom.then = {{&doom, 1}};
  CHECK_THROWS_AS(group_ratio(numer, denom, model, cfg),
                  InvalidArgumentError);
}

}  // TEST_SUITE
