#include "incexc/tagger.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "incexc/corpus.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace incexc;
using oracles::enumerate_paths;
using oracles::random_instance;
using tagger::CrfModel;
using tagger::EmissionMatrix;
using tagger::TagArray;
using tagger::TransMatrix;

namespace {

// Tiny model over a fixed sentence for gradient and serialization tests.
CrfModel random_small_model(std::mt19937_64& rng,
                            const std::vector<LabeledSentence>& data,
                            double scale = 1.0) {
  CrfModel model;
  model.config.window = 1;
  model.config.use_affixes = false;
  model.config.use_shape = false;
  for (const LabeledSentence& ls : data) {
    for (int i = 0; i < ls.sentence.size(); ++i) {
      for (const auto& [name, value] :
           features::token_features(ls.sentence, i, model.config)) {
        model.symbols.intern(name);
      }
    }
  }
  std::uniform_real_distribution<double> dist(-scale, scale);
  model.unary.assign(model.symbols.size(), TagArray{});
  for (auto& row : model.unary) {
    for (double& w : row) w = dist(rng);
  }
  for (auto& row : model.trans) {
    for (double& w : row) w = dist(rng);
  }
  for (double& w : model.begin) w = dist(rng);
  for (double& w : model.end) w = dist(rng);
  return model;
}

}  // namespace

TEST_CASE("log_partition of the all-zero single-token chain is log 5") {
  EmissionMatrix em(1, TagArray{});
  TransMatrix trans{};
  TagArray zero{};
  CHECK(tagger::log_partition(em, trans, zero, zero) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("log_partition matches exhaustive enumeration") {
  std::mt19937_64 rng(1001);
  for (int n : {3, 8}) {
    for (int round = 0; round < 5; ++round) {
      auto inst = random_instance(rng, n);
      auto oracle = enumerate_paths(inst.em, inst.trans, inst.begin, inst.end);
      double lz = tagger::log_partition(inst.em, inst.trans, inst.begin,
                                        inst.end);
      CHECK(std::abs(lz - static_cast<double>(oracle.log_z)) <=
            1e-10 * std::max(1.0, std::abs(lz)));
    }
  }
}

TEST_CASE("posterior marginals match enumeration and normalize") {
  std::mt19937_64 rng(1002);
  for (int round = 0; round < 10; ++round) {
    int n = 1 + static_cast<int>(rng() % 6);
    auto inst = random_instance(rng, n);
    auto oracle = enumerate_paths(inst.em, inst.trans, inst.begin, inst.end);
    auto marg =
        tagger::posterior_marginals(inst.em, inst.trans, inst.begin, inst.end);

    for (int i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (int t = 0; t < kNumTags; ++t) {
        CHECK(std::abs(marg.node[i][t] -
                       static_cast<double>(oracle.node[i][t])) <= 1e-10);
        row_sum += marg.node[i][t];
      }
      CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (int i = 0; i + 1 < n; ++i) {
      double table_sum = 0.0;
      for (int a = 0; a < kNumTags; ++a) {
        for (int b = 0; b < kNumTags; ++b) {
          CHECK(std::abs(marg.edge[i][a][b] -
                         static_cast<double>(oracle.edge[i][a][b])) <= 1e-10);
          table_sum += marg.edge[i][a][b];
        }
      }
      CHECK(table_sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("edge marginal row/column sums equal node marginals") {
  std::mt19937_64 rng(1003);
  for (int round = 0; round < 20; ++round) {
    int n = 2 + static_cast<int>(rng() % 6);
    auto inst = random_instance(rng, n);
    auto marg =
        tagger::posterior_marginals(inst.em, inst.trans, inst.begin, inst.end);
    for (int i = 0; i + 1 < n; ++i) {
      for (int a = 0; a < kNumTags; ++a) {
        double row = 0.0, col = 0.0;
        for (int b = 0; b < kNumTags; ++b) {
          row += marg.edge[i][a][b];
          col += marg.edge[i][b][a];
        }
        CHECK(row == doctest::Approx(marg.node[i][a]).epsilon(1e-9));
        CHECK(col == doctest::Approx(marg.node[i + 1][a]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("uniform marginals under the all-zero model") {
  EmissionMatrix em(4, TagArray{});
  TransMatrix trans{};
  TagArray zero{};
  auto marg = tagger::posterior_marginals(em, trans, zero, zero);
  for (const TagArray& row : marg.node) {
    for (double v : row) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("viterbi matches exhaustive max and breaks ties low") {
  std::mt19937_64 rng(1004);
  for (int round = 0; round < 30; ++round) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto inst = random_instance(rng, n);
    auto oracle = enumerate_paths(inst.em, inst.trans, inst.begin, inst.end);
    auto path = tagger::viterbi(inst.em, inst.trans, inst.begin, inst.end);
    double score = tagger::path_score(path, inst.em, inst.trans, inst.begin,
                                      inst.end);
    CHECK(score == static_cast<double>(oracle.best_score));
  }

  // Ties everywhere: the lowest canonical tag wins at every decision.
  EmissionMatrix em(3, TagArray{});
  TransMatrix trans{};
  TagArray zero{};
  auto path = tagger::viterbi(em, trans, zero, zero);
  CHECK(path == std::vector<BioTag>{BioTag::BInc, BioTag::BInc, BioTag::BInc});
}

TEST_CASE("viterbi score is strictly below log_partition") {
  std::mt19937_64 rng(1005);
  for (int round = 0; round < 50; ++round) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto inst = random_instance(rng, n);
    auto path = tagger::viterbi(inst.em, inst.trans, inst.begin, inst.end);
    double best = tagger::path_score(path, inst.em, inst.trans, inst.begin,
                                     inst.end);
    double lz =
        tagger::log_partition(inst.em, inst.trans, inst.begin, inst.end);
    CHECK(best < lz);
  }
}

TEST_CASE("emission shift moves log_partition and leaves viterbi unchanged") {
  std::mt19937_64 rng(1006);
  for (int round = 0; round < 20; ++round) {
    int n = 2 + static_cast<int>(rng() % 6);
    auto inst = random_instance(rng, n);
    double lz =
        tagger::log_partition(inst.em, inst.trans, inst.begin, inst.end);
    auto path = tagger::viterbi(inst.em, inst.trans, inst.begin, inst.end);

    int i = static_cast<int>(rng() % n);
    double c = 0.75;
    auto shifted = inst.em;
    for (int t = 0; t < kNumTags; ++t) shifted[i][t] += c;

    double lz2 =
        tagger::log_partition(shifted, inst.trans, inst.begin, inst.end);
    CHECK(lz2 == doctest::Approx(lz + c).epsilon(1e-12));
    CHECK(tagger::viterbi(shifted, inst.trans, inst.begin, inst.end) == path);
  }
}

TEST_CASE("sequence_scores equals the naive dot product") {
  std::mt19937_64 rng(1007);
  auto data = testutil::random_corpus(rng, 3, 6);
  CrfModel model = random_small_model(rng, data);

  for (const LabeledSentence& ls : data) {
    auto em = tagger::sequence_scores(model, ls.sentence);
    REQUIRE(static_cast<int>(em.size()) == ls.sentence.size());
    for (int i = 0; i < ls.sentence.size(); ++i) {
      for (int t = 0; t < kNumTags; ++t) {
        double expected = 0.0;
        for (const auto& [name, value] :
             features::token_features(ls.sentence, i, model.config)) {
          if (auto fid = model.symbols.find(name)) {
            expected += value * model.unary[*fid][t];
          }
        }
        CHECK(std::abs(em[i][t] - expected) <= 1e-12);
      }
    }
  }

  // All-zero weights give an all-zero matrix.
  CrfModel zero = model;
  zero.unary.assign(zero.symbols.size(), TagArray{});
  auto em = tagger::sequence_scores(zero, data[0].sentence);
  for (const TagArray& row : em) {
    for (double v : row) CHECK(v == 0.0);
  }

  // A single bias weight fills one column.
  CrfModel biased = zero;
  if (auto fid = biased.symbols.find("bias")) {
    biased.unary[*fid][static_cast<int>(BioTag::BInc)] = 2.0;
  }
  auto em2 = tagger::sequence_scores(biased, data[0].sentence);
  for (const TagArray& row : em2) {
    CHECK(row[static_cast<int>(BioTag::BInc)] == 2.0);
    CHECK(row[static_cast<int>(BioTag::Inc)] == 0.0);
  }
}

TEST_CASE("nll at the zero model on a single-token sentence is log 5") {
  LabeledSentence ls;
  ls.sentence.id = "s0";
  ls.sentence.tokens = {"word"};
  ls.tags = {BioTag::Outside};

  CrfModel model;
  model.config.window = 0;
  model.symbols.intern("bias");
  model.unary.assign(1, TagArray{});

  auto res = tagger::nll_and_gradient(model, {ls}, 0.0);
  CHECK(res.nll == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("CRF gradient matches central finite differences") {
  std::mt19937_64 rng(1008);
  const double h = 1e-5;
  for (int round = 0; round < 10; ++round) {
    auto data = testutil::random_corpus(rng, 2, 4);
    CrfModel model = random_small_model(rng, data);
    double l2 = (round % 2 == 0) ? 0.0 : 0.3;

    auto res = tagger::nll_and_gradient(model, data, l2);

    auto check_weight = [&](double& w, double analytic) {
      double saved = w;
      w = saved + h;
      double up = tagger::nll_and_gradient(model, data, l2).nll;
      w = saved - h;
      double down = tagger::nll_and_gradient(model, data, l2).nll;
      w = saved;
      CHECK(std::abs(analytic - (up - down) / (2 * h)) <= 1e-6);
    };

    for (std::size_t f = 0; f < model.unary.size(); ++f) {
      for (int t = 0; t < kNumTags; ++t) {
        check_weight(model.unary[f][t], res.gradient.unary[f][t]);
      }
    }
    for (int a = 0; a < kNumTags; ++a) {
      for (int b = 0; b < kNumTags; ++b) {
        check_weight(model.trans[a][b], res.gradient.trans[a][b]);
      }
    }
    for (int t = 0; t < kNumTags; ++t) {
      check_weight(model.begin[t], res.gradient.begin[t]);
      check_weight(model.end[t], res.gradient.end[t]);
    }
  }
}

TEST_CASE("transition gradient equals expected minus empirical counts") {
  // No unary features at all: the transition gradient reduces to
  // marginal-expected counts minus gold counts, checked against the
  // enumeration oracle.
  LabeledSentence ls;
  ls.sentence.id = "s0";
  ls.sentence.tokens = {"a", "b", "c"};
  ls.tags = {BioTag::BInc, BioTag::Inc, BioTag::Outside};

  CrfModel model;  // empty symbol table: every feature is unknown
  std::mt19937_64 rng(1009);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& row : model.trans) {
    for (double& w : row) w = dist(rng);
  }

  EmissionMatrix em(3, TagArray{});
  auto oracle = enumerate_paths(em, model.trans, model.begin, model.end);
  auto res = tagger::nll_and_gradient(model, {ls}, 0.0);

  for (int a = 0; a < kNumTags; ++a) {
    for (int b = 0; b < kNumTags; ++b) {
      long double expected = oracle.edge[0][a][b] + oracle.edge[1][a][b];
      double empirical = 0.0;
      if (a == static_cast<int>(BioTag::BInc) &&
          b == static_cast<int>(BioTag::Inc)) {
        empirical += 1.0;
      }
      if (a == static_cast<int>(BioTag::Inc) &&
          b == static_cast<int>(BioTag::Outside)) {
        empirical += 1.0;
      }
      CHECK(std::abs(res.gradient.trans[a][b] -
                     (static_cast<double>(expected) - empirical)) <= 1e-9);
    }
  }
}

TEST_CASE("training learns a deterministic token->tag corpus") {
  auto corpus = testutil::synthetic_tag_corpus(200, 555);
  std::vector<LabeledSentence> train(corpus.begin(), corpus.begin() + 160);
  std::vector<LabeledSentence> test(corpus.begin() + 160, corpus.end());

  features::FeatureConfig fcfg;
  TrainConfig tcfg;
  tcfg.epochs = 30;

  auto initial = tagger::train(train, fcfg, TrainConfig{.epochs = 0});
  double nll_before = tagger::corpus_nll(initial, train, tcfg.l2);

  auto model = tagger::train(train, fcfg, tcfg);
  double nll_after = tagger::corpus_nll(model, train, tcfg.l2);
  CHECK(nll_after <= nll_before);

  long correct = 0, total = 0;
  for (const LabeledSentence& ls : test) {
    auto predicted = tagger::viterbi(model, ls.sentence);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      ++total;
      if (predicted[i] == ls.tags[i]) ++correct;
    }
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(total) >= 0.99);

  // Seen training sentence decodes to its gold tags.
  CHECK(tagger::viterbi(model, train[0].sentence) == train[0].tags);
}

TEST_CASE("training is deterministic and epochs=0 returns a zero model") {
  auto corpus = testutil::synthetic_tag_corpus(40, 7);
  features::FeatureConfig fcfg;
  TrainConfig tcfg;
  tcfg.epochs = 5;
  tcfg.seed = 1234;

  auto a = tagger::train(corpus, fcfg, tcfg);
  auto b = tagger::train(corpus, fcfg, tcfg);
  CHECK(tagger::save_model(a) == tagger::save_model(b));

  tcfg.seed = 99;
  auto c = tagger::train(corpus, fcfg, tcfg);
  CHECK(tagger::save_model(a) != tagger::save_model(c));

  auto zero = tagger::train(corpus, fcfg, TrainConfig{.epochs = 0});
  CHECK(zero.symbols.size() > 0);
  for (const TagArray& row : zero.unary) {
    for (double w : row) CHECK(w == 0.0);
  }

  CHECK_THROWS_AS((void)tagger::train({}, fcfg, tcfg), Error);
}

TEST_CASE("model save/load round trip") {
  SUBCASE("empty model") {
    CrfModel empty;
    auto loaded = tagger::load_model(tagger::save_model(empty));
    CHECK(loaded.symbols.size() == 0);
    CHECK(tagger::save_model(loaded) == tagger::save_model(empty));
  }

  SUBCASE("trained model preserves weights and predictions") {
    auto corpus = testutil::synthetic_tag_corpus(50, 11);
    features::FeatureConfig fcfg;
    TrainConfig tcfg;
    tcfg.epochs = 5;
    auto model = tagger::train(corpus, fcfg, tcfg);

    std::string text = tagger::save_model(model);
    auto loaded = tagger::load_model(text);
    CHECK(tagger::save_model(loaded) == text);  // canonical fixpoint
    CHECK(loaded.l2 == model.l2);
    CHECK(loaded.config.window == model.config.window);

    for (const LabeledSentence& ls : corpus) {
      CHECK(tagger::viterbi(loaded, ls.sentence) ==
            tagger::viterbi(model, ls.sentence));
    }
  }

  SUBCASE("feature names with spaces survive") {
    CrfModel model;
    int fid = model.symbols.intern("c3= a ");
    model.unary.assign(1, TagArray{});
    model.unary[fid][2] = -1.25;
    auto loaded = tagger::load_model(tagger::save_model(model));
    auto found = loaded.symbols.find("c3= a ");
    REQUIRE(found.has_value());
    CHECK(loaded.unary[*found][2] == -1.25);
  }
}

TEST_CASE("model load rejects bad input") {
  auto corpus = testutil::synthetic_tag_corpus(5, 3);
  auto model = tagger::train(corpus, {}, TrainConfig{.epochs = 1});
  std::string good = tagger::save_model(model);

  try {
    tagger::load_model("#version 99\n#type crf\n");
    FAIL("expected VersionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VersionMismatch);
  }

  auto expect_malformed = [](const std::string& text) {
    try {
      tagger::load_model(text);
      FAIL("expected MalformedModel for: ", text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedModel);
    }
  };
  expect_malformed("");
  expect_malformed("#version 1\n");
  expect_malformed("#version 1\n#type clf\n");
  expect_malformed("#version 1\n#type crf\n#tags A B\n");
  expect_malformed(good + "Z stray line\n");
  expect_malformed(good + "U incomplete\n");
  expect_malformed(good + "T B_INC NOPE 1.0\n");
}

TEST_CASE("parallel corpus kernels equal the serial reference") {
  auto corpus = testutil::synthetic_tag_corpus(120, 31);
  features::FeatureConfig fcfg;
  auto model = tagger::train(corpus, fcfg, TrainConfig{.epochs = 2});

  std::vector<Sentence> sentences;
  for (const auto& ls : corpus) sentences.push_back(ls.sentence);

  auto serial = tagger::tag_corpus_serial(model, sentences);
  auto parallel = tagger::tag_corpus(model, sentences, true);
  CHECK(serial == parallel);

  double nll_serial = tagger::corpus_nll(model, corpus, 0.1, false);
  double nll_parallel = tagger::corpus_nll(model, corpus, 0.1, true);
  CHECK(nll_serial == nll_parallel);

  auto batch = tagger::nll_and_gradient(model, corpus, 0.1);
  CHECK(nll_serial == doctest::Approx(batch.nll).epsilon(1e-12));
}
