#include "incexc/cli.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "incexc/corpus.hpp"
#include "test_util.hpp"

using namespace incexc;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult result;
  result.code = cli::run(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

struct TempDir {
  fs::path path;

  TempDir() {
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() /
           ("incexc_test_" + std::to_string(stamp));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string at(const std::string& name) const {
    return (path / name).string();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t sep = line.find(" = ");
    if (sep != std::string::npos) {
      kv[line.substr(0, sep)] = line.substr(sep + 3);
    }
  }
  return kv;
}

}  // namespace

TEST_CASE("usage errors exit with 2, help with 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"stats"}).code == 2);  // missing positional
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"stats", "/nonexistent/path.tsv"}).code == 2);
}

TEST_CASE("stats prints hand-counted histograms") {
  TempDir tmp;
  std::string path = tmp.file(
      "spans.tsv",
      "Great\tO\nfood\tB_INC\nhere\tINC\n\nqueue\tB_EXC\nbad\tEXC\n\n"
      "fine\tO\n");
  auto result = run({"stats", path});
  REQUIRE(result.code == 0);
  auto kv = parse_kv(result.out);
  CHECK(kv["kind"] == "spans");
  CHECK(kv["sentences"] == "3");
  CHECK(kv["tokens"] == "6");
  CHECK(kv["tag.B_INC"] == "1");
  CHECK(kv["tag.INC"] == "1");
  CHECK(kv["tag.B_EXC"] == "1");
  CHECK(kv["tag.EXC"] == "1");
  CHECK(kv["tag.O"] == "2");
  CHECK(kv["phrases.total"] == "2");
  CHECK(kv["phrases.inclusion"] == "1");
  CHECK(kv["phrases.exclusion"] == "1");

  std::string cats = tmp.file(
      "cats.tsv", "price\ttoo costly\nprice\texpensive\nqueues\tlong wait\n");
  auto cat_result = run({"stats", cats});
  REQUIRE(cat_result.code == 0);
  auto cat_kv = parse_kv(cat_result.out);
  CHECK(cat_kv["kind"] == "categories");
  CHECK(cat_kv["phrases.total"] == "3");
  CHECK(cat_kv["category.price"] == "2");
  CHECK(cat_kv["category.queues"] == "1");

  CHECK(run({"stats", tmp.file("empty.tsv", "")}).code == 2);
}

TEST_CASE("filter emits matched categories per sentence") {
  TempDir tmp;
  std::string sentences = tmp.file(
      "raw.txt", "It was so crowded!\nLovely view.\nCheap and crowded.\n");
  std::string lexicon =
      tmp.file("lex.tsv", "crowd\tcrowded\nprice\tcheap\n");
  auto result = run({"filter", sentences, lexicon});
  REQUIRE(result.code == 0);
  CHECK(result.out ==
        "crowd\tIt was so crowded !\n"
        "crowd,price\tCheap and crowded .\n");

  CHECK(run({"filter", sentences, tmp.file("bad.tsv", "nope\tx\n")}).code ==
        2);
}

TEST_CASE("train-tagger learns, reports held-out quality, deterministic") {
  TempDir tmp;
  auto corpus_data = testutil::synthetic_tag_corpus(200, 913);
  std::string train_path =
      tmp.file("train.tsv", corpus::serialize_dataset(corpus_data));

  std::vector<std::string> args = {
      "train-tagger", train_path,       "--out",  tmp.at("model_a.txt"),
      "--epochs",     "12",             "--seed", "42",
      "--format",     "kv"};
  auto a = run(args);
  REQUIRE(a.code == 0);
  auto kv = parse_kv(a.out);
  CHECK(kv.count("final_train_nll") == 1);
  CHECK(kv["train_sentences"] == "160");
  CHECK(kv["test_sentences"] == "40");
  CHECK(std::stod(kv["heldout.token_accuracy"]) >= 0.99);

  args[3] = tmp.at("model_b.txt");
  auto b = run(args);
  REQUIRE(b.code == 0);
  CHECK(read_file(tmp.at("model_a.txt")) == read_file(tmp.at("model_b.txt")));
  CHECK(a.out == b.out);

  CHECK(run({"train-tagger", tmp.at("missing.tsv"), "--out",
             tmp.at("x.txt")})
            .code == 2);
}

TEST_CASE("tag output parses and dominates proportionally") {
  TempDir tmp;
  auto corpus_data = testutil::synthetic_tag_corpus(120, 311);
  std::string train_path =
      tmp.file("train.tsv", corpus::serialize_dataset(corpus_data));
  std::string model_path = tmp.at("model.txt");
  REQUIRE(run({"train-tagger", train_path, "--out", model_path, "--epochs",
               "10", "--test-fraction", "0"})
              .code == 0);

  std::string pred_path = tmp.at("pred.tsv");
  REQUIRE(run({"tag", "--model", model_path, train_path, "--out", pred_path})
              .code == 0);

  // Output re-parses in the dataset format with aligned sentences.
  auto predicted = corpus::parse_dataset(read_file(pred_path));
  CHECK(predicted.size() == corpus_data.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    CHECK(predicted[i].sentence.tokens == corpus_data[i].sentence.tokens);
  }

  auto result =
      run({"eval", train_path, pred_path, "--mode", "spans", "--format", "kv"});
  REQUIRE(result.code == 0);
  auto kv = parse_kv(result.out);
  for (std::string pol : {"inclusion", "exclusion"}) {
    double bin = std::stod(kv["spans." + pol + ".binary.f1"]);
    double prop = std::stod(kv["spans." + pol + ".proportional.f1"]);
    CHECK(bin >= prop);
    CHECK(bin > 0.9);  // trained on this very data
  }

  // A classifier model file is not a tagger model.
  std::string clf_path = tmp.file(
      "clf.txt", "#version 1\n#type clf\n");
  CHECK(run({"tag", "--model", clf_path, train_path}).code == 2);
}

TEST_CASE("train-classifier and classify round trip") {
  TempDir tmp;
  std::string rows;
  for (int i = 0; i < 30; ++i) {
    rows += "price\tvery expensive\n";
    rows += "queues\thuge queue\n";
    rows += "crowd\ttotally crowded\n";
  }
  std::string train_path = tmp.file("cats.tsv", rows);
  std::string model_path = tmp.at("clf.txt");

  auto trained = run({"train-classifier", train_path, "--out", model_path,
                      "--epochs", "10", "--format", "kv"});
  REQUIRE(trained.code == 0);
  auto kv = parse_kv(trained.out);
  CHECK(std::stod(kv["classes.accuracy"]) == 1.0);

  std::string phrases = tmp.file(
      "phrases.txt", "very expensive\nhuge queue\ntotally crowded\n");
  auto classified = run({"classify", "--model", model_path, phrases,
                         "--input-format", "phrases"});
  REQUIRE(classified.code == 0);
  CHECK(classified.out ==
        "price\tvery expensive\nqueues\thuge queue\ncrowd\ttotally crowded\n");

  // classify also accepts category files, ignoring the gold column.
  auto from_rows = run({"classify", "--model", model_path, train_path,
                        "--input-format", "phrases"});
  REQUIRE(from_rows.code == 0);
  CHECK(from_rows.out.find("price\tvery expensive") != std::string::npos);
}

TEST_CASE("eval spans identity, fixture values and thresholds") {
  TempDir tmp;
  std::string gold = tmp.file(
      "gold.tsv", "t0\tO\nt1\tO\nt2\tB_INC\nt3\tINC\nt4\tINC\nt5\tO\nt6\tO\n");
  std::string pred = tmp.file(
      "pred.tsv", "t0\tO\nt1\tO\nt2\tO\nt3\tB_INC\nt4\tINC\nt5\tINC\nt6\tINC\n");

  auto identity =
      run({"eval", gold, gold, "--mode", "spans", "--format", "kv"});
  REQUIRE(identity.code == 0);
  auto id_kv = parse_kv(identity.out);
  CHECK(id_kv["spans.inclusion.binary.f1"] == "1");
  CHECK(id_kv["spans.inclusion.proportional.f1"] == "1");

  // gold [2,5) vs pred [3,7): proportional P=0.5, R=2/3.
  auto overlap = run({"eval", gold, pred, "--mode", "spans", "--format", "kv"});
  REQUIRE(overlap.code == 0);
  auto kv = parse_kv(overlap.out);
  CHECK(kv["spans.inclusion.proportional.precision"] == "0.5");
  CHECK(std::stod(kv["spans.inclusion.proportional.recall"]) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(kv["spans.inclusion.binary.f1"] == "1");

  // CI gate: a spurious extra phrase drops binary F1 to 2/3.
  std::string noisy = tmp.file(
      "noisy.tsv",
      "t0\tB_INC\nt1\tO\nt2\tB_INC\nt3\tINC\nt4\tINC\nt5\tO\nt6\tO\n");
  CHECK(run({"eval", gold, noisy, "--mode", "spans", "--min-f1", "0.99"})
            .code == 1);
  CHECK(run({"eval", gold, noisy, "--mode", "spans", "--min-f1", "0.5"})
            .code == 0);

  std::string short_pred = tmp.file("short.tsv", "t0\tO\n");
  CHECK(run({"eval", gold, short_pred, "--mode", "spans"}).code == 2);
}

TEST_CASE("eval classes and e2e modes") {
  TempDir tmp;
  std::string gold =
      tmp.file("gold.tsv", "price\texpensive\ncrowd\tpacked\nfood\tbland\n");
  std::string pred =
      tmp.file("pred.tsv", "price\texpensive\ncrowd\tpacked\nprice\tbland\n");

  auto classes =
      run({"eval", gold, pred, "--mode", "classes", "--format", "kv"});
  REQUIRE(classes.code == 0);
  auto kv = parse_kv(classes.out);
  CHECK(std::stod(kv["classes.accuracy"]) == doctest::Approx(2.0 / 3.0));
  CHECK(kv["classes.instances"] == "3");

  std::string too_few = tmp.file("few.tsv", "price\texpensive\n");
  CHECK(run({"eval", gold, too_few, "--mode", "classes"}).code == 2);

  std::string e2e_gold = tmp.file(
      "e2e_gold.txt",
      "#sent s0\n0\t3\tinclusion\tcrowd\t-\tplace was packed\n");
  std::string e2e_pred = tmp.file(
      "e2e_pred.txt",
      "#sent s0\n1\t4\tinclusion\tcrowd\t0.9\twas packed indeed\n"
      "6\t8\tinclusion\tprice\t0.5\tcheap too\n");
  auto e2e = run({"eval", e2e_gold, e2e_pred, "--mode", "e2e", "--format",
                  "kv"});
  REQUIRE(e2e.code == 0);
  auto e2e_kv = parse_kv(e2e.out);
  CHECK(e2e_kv["e2e.overall.precision"] == "0.5");
  CHECK(e2e_kv["e2e.overall.recall"] == "1");
  CHECK(e2e_kv["e2e.sink"] == "1");
}

TEST_CASE("pipeline runs end to end and equals tag then classify") {
  TempDir tmp;

  auto span_corpus = testutil::synthetic_tag_corpus(150, 2024);
  std::string span_path =
      tmp.file("spans.tsv", corpus::serialize_dataset(span_corpus));
  std::string tagger_path = tmp.at("tagger.txt");
  REQUIRE(run({"train-tagger", span_path, "--out", tagger_path, "--epochs",
               "10", "--test-fraction", "0"})
              .code == 0);

  std::string rows;
  for (int i = 0; i < 25; ++i) {
    rows += "price\texpensive fees\n";
    rows += "crowd\tcrowded lines\n";
    rows += "couples_family\twelcoming families\n";
    rows += "handicap\taccessible ramps\n";
  }
  std::string clf_train = tmp.file("cats.tsv", rows);
  std::string clf_path = tmp.at("clf.txt");
  REQUIRE(run({"train-classifier", clf_train, "--out", clf_path, "--epochs",
               "10", "--test-fraction", "0"})
              .code == 0);

  std::string input = tmp.file(
      "input.txt",
      "the place was expensive and crowded\nwe saw the view\n"
      "very welcoming families there\n");
  std::string out_path = tmp.at("pipeline.txt");
  REQUIRE(run({"pipeline", "--tagger", tagger_path, "--classifier", clf_path,
               input, "--out", out_path})
              .code == 0);

  // Output reparses under the provided reader.
  auto records = corpus::parse_phrase_file(read_file(out_path));
  REQUIRE(records.size() == 3);
  CHECK(records[1].phrases.empty());  // "we saw the view" has no phrases

  bool found_expensive = false;
  for (const auto& rec : records) {
    for (const auto& pr : rec.phrases) {
      CHECK(pr.probability.has_value());
      CHECK(*pr.probability >= 0.0);
      CHECK(*pr.probability <= 1.0);
      REQUIRE(pr.phrase.category.has_value());
      if (pr.phrase.text == "expensive") {
        found_expensive = true;
        CHECK(pr.phrase.polarity == Polarity::Exclusion);
        CHECK(*pr.phrase.category == Category::Price);
      }
    }
  }
  CHECK(found_expensive);

  // Composition: pipeline == tag | classify on the same input.
  std::string token_file;
  {
    std::istringstream in(read_file(input));
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      auto tokens = corpus::tokenize(line);
      if (tokens.empty()) continue;
      if (!first) token_file += '\n';
      for (const auto& t : tokens) token_file += t + "\n";
      first = false;
    }
  }
  std::string tokens_path = tmp.file("tokens.tsv", token_file);
  std::string tagged_path = tmp.at("tagged.tsv");
  REQUIRE(run({"tag", "--model", tagger_path, tokens_path, "--out",
               tagged_path})
              .code == 0);
  auto classified = run({"classify", "--model", clf_path, tagged_path});
  REQUIRE(classified.code == 0);

  std::string composed;
  for (const auto& rec : records) {
    for (const auto& pr : rec.phrases) {
      composed += category_name(*pr.phrase.category);
      composed += '\t';
      composed += pr.phrase.text;
      composed += '\n';
    }
  }
  CHECK(classified.out == composed);
}

TEST_CASE("tagging with an embeddings model requires the table") {
  TempDir tmp;
  auto corpus_data = testutil::synthetic_tag_corpus(40, 5);
  std::string train_path =
      tmp.file("train.tsv", corpus::serialize_dataset(corpus_data));
  std::string emb;
  for (const auto& word :
       {"the", "place", "was", "crowded", "expensive", "welcoming"}) {
    emb += std::string(word) + " 0.25 -0.5\n";
  }
  std::string emb_path = tmp.file("emb.txt", emb);
  std::string model_path = tmp.at("model.txt");

  REQUIRE(run({"train-tagger", train_path, "--out", model_path, "--epochs",
               "3", "--embeddings", emb_path, "--test-fraction", "0"})
              .code == 0);

  CHECK(run({"tag", "--model", model_path, train_path}).code == 2);
  CHECK(run({"tag", "--model", model_path, train_path, "--embeddings",
             emb_path})
            .code == 0);

  // Dimension mismatch is rejected.
  std::string bad_emb = tmp.file("bad_emb.txt", "the 1.0 2.0 3.0\n");
  CHECK(run({"tag", "--model", model_path, train_path, "--embeddings",
             bad_emb})
            .code == 2);
}

TEST_CASE("train, tag, eval is byte-identical across reruns") {
  TempDir tmp;
  auto corpus_data = testutil::synthetic_tag_corpus(80, 5150);
  std::string train_path =
      tmp.file("train.tsv", corpus::serialize_dataset(corpus_data));

  auto round = [&](const std::string& suffix) {
    std::string model = tmp.at("model" + suffix + ".txt");
    std::string pred = tmp.at("pred" + suffix + ".tsv");
    auto trained = run({"train-tagger", train_path, "--out", model,
                        "--epochs", "6", "--seed", "11", "--split-seed", "3",
                        "--format", "kv"});
    REQUIRE(trained.code == 0);
    auto tagged =
        run({"tag", "--model", model, train_path, "--out", pred});
    REQUIRE(tagged.code == 0);
    auto scored =
        run({"eval", train_path, pred, "--mode", "spans", "--format", "kv"});
    REQUIRE(scored.code == 0);
    return std::tuple<std::string, std::string, std::string>(
        read_file(model), read_file(pred), trained.out + scored.out);
  };

  auto first = round("_a");
  auto second = round("_b");
  CHECK(std::get<0>(first) == std::get<0>(second));
  CHECK(std::get<1>(first) == std::get<1>(second));
  CHECK(std::get<2>(first) == std::get<2>(second));
}
