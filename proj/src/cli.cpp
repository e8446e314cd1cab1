#include "incexc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "incexc/classifier.hpp"
#include "incexc/corpus.hpp"
#include "incexc/eval.hpp"
#include "incexc/features.hpp"
#include "incexc/tagger.hpp"
#include "incexc/types.hpp"

namespace incexc::cli {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::InvalidInput, "cannot read file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& content, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file || !(file << content)) {
    throw Error(ErrorKind::InvalidInput, "cannot write file: " + out_path);
  }
}

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

// Deterministic shuffled split; both parts keep the original corpus order.
Split make_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0) {
    throw Error(ErrorKind::InvalidInput,
                "--test-fraction must be in [0, 1)");
  }
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  auto n_test = static_cast<std::size_t>(
      test_fraction * static_cast<double>(n) + 0.5);

  Split split;
  split.test.assign(order.begin(), order.begin() + n_test);
  split.train.assign(order.begin() + n_test, order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

eval::ReportFormat parse_format(const std::string& name) {
  if (name == "text") return eval::ReportFormat::Text;
  if (name == "kv") return eval::ReportFormat::Kv;
  throw Error(ErrorKind::InvalidInput,
              "--format must be 'text' or 'kv', got '" + name + "'");
}

std::shared_ptr<const features::EmbeddingTable> load_embeddings_file(
    const std::string& path, std::optional<int> expected_dim) {
  return std::make_shared<features::EmbeddingTable>(
      features::load_embeddings(slurp(path), expected_dim));
}

// Attaches the embedding table a saved model was trained with.
void wire_embeddings(tagger::CrfModel& model, const std::string& path) {
  if (model.embedding_dim == 0) {
    if (!path.empty()) {
      throw Error(ErrorKind::InvalidInput,
                  "model was trained without embeddings; drop --embeddings");
    }
    return;
  }
  if (path.empty()) {
    throw Error(ErrorKind::InvalidInput,
                "model expects " + std::to_string(model.embedding_dim) +
                    "-dimensional embeddings; pass --embeddings");
  }
  model.config.embeddings = load_embeddings_file(path, model.embedding_dim);
}

// ---- stats -------------------------------------------------------------------

enum class DatasetKind { Spans, Categories };

DatasetKind sniff_kind(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.starts_with("#") && line.find('\t') == std::string_view::npos) {
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab != std::string_view::npos) {
      std::string_view second = line.substr(tab + 1);
      std::size_t tab2 = second.find('\t');
      if (tab2 != std::string_view::npos) second = second.substr(0, tab2);
      if (parse_tag(second)) return DatasetKind::Spans;
      if (parse_category(line.substr(0, tab))) return DatasetKind::Categories;
    }
    break;
  }
  return DatasetKind::Spans;  // let the span parser report the error
}

void cmd_stats(const std::string& path, const std::string& kind,
               std::ostream& out) {
  std::string text = slurp(path);
  DatasetKind resolved;
  if (kind == "spans") {
    resolved = DatasetKind::Spans;
  } else if (kind == "categories") {
    resolved = DatasetKind::Categories;
  } else {
    resolved = sniff_kind(text);
  }

  std::string report;
  if (resolved == DatasetKind::Spans) {
    auto stats = corpus::dataset_stats(corpus::parse_dataset(text));
    report += "kind = spans\n";
    report += "sentences = " + std::to_string(stats.sentences) + "\n";
    report += "tokens = " + std::to_string(stats.tokens) + "\n";
    for (BioTag tag : kAllTags) {
      report += "tag." + std::string(tag_name(tag)) + " = " +
                std::to_string(stats.tag_counts[static_cast<int>(tag)]) + "\n";
    }
    report += "phrases.total = " + std::to_string(stats.phrases_total) + "\n";
    report += "phrases.inclusion = " +
              std::to_string(stats.phrases_by_polarity[0]) + "\n";
    report += "phrases.exclusion = " +
              std::to_string(stats.phrases_by_polarity[1]) + "\n";
  } else {
    auto stats = corpus::category_stats(corpus::parse_category_file(text));
    report += "kind = categories\n";
    report += "phrases.total = " + std::to_string(stats.total) + "\n";
    for (Category c : kAllCategories) {
      report += "category." + std::string(category_name(c)) + " = " +
                std::to_string(stats.counts[static_cast<int>(c)]) + "\n";
    }
  }
  out << report;
}

// ---- filter ------------------------------------------------------------------

void cmd_filter(const std::string& sentences_path,
                const std::string& lexicon_path, const std::string& out_path,
                std::ostream& out) {
  KeywordLexicon lexicon = corpus::load_lexicon(slurp(lexicon_path));

  std::vector<Sentence> sentences;
  std::istringstream in(slurp(sentences_path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = corpus::tokenize(line);
    if (tokens.empty()) continue;
    Sentence s;
    s.id = "s" + std::to_string(sentences.size());
    s.tokens = std::move(tokens);
    sentences.push_back(std::move(s));
  }

  std::string result;
  for (const auto& fs : corpus::filter_sentences(sentences, lexicon)) {
    bool first = true;
    for (Category c : fs.categories) {
      if (!first) result += ',';
      result += category_name(c);
      first = false;
    }
    result += '\t';
    result += corpus::join_tokens(fs.sentence.tokens, 0,
                                  fs.sentence.size());
    result += '\n';
  }
  emit(result, out_path, out);
}

// ---- tagger training / tagging -------------------------------------------------

double token_accuracy(const std::vector<LabeledSentence>& gold,
                      const std::vector<std::vector<BioTag>>& pred) {
  long correct = 0, total = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t t = 0; t < gold[i].tags.size(); ++t) {
      ++total;
      if (gold[i].tags[t] == pred[i][t]) ++correct;
    }
  }
  return total == 0 ? 0.0
                    : static_cast<double>(correct) / static_cast<double>(total);
}

struct TrainTaggerOpts {
  std::string train_path;
  std::string out_model;
  std::string embeddings_path;
  std::string format = "kv";
  TrainConfig tcfg;
  int window = 1;
  bool no_affixes = false;
  bool no_shape = false;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 42;
};

void cmd_train_tagger(const TrainTaggerOpts& opts, std::ostream& out) {
  auto data = corpus::parse_dataset(slurp(opts.train_path));
  Split split = make_split(data.size(), opts.test_fraction, opts.split_seed);

  std::vector<LabeledSentence> train_data, test_data;
  for (int i : split.train) train_data.push_back(data[i]);
  for (int i : split.test) test_data.push_back(data[i]);

  features::FeatureConfig fcfg;
  fcfg.window = opts.window;
  fcfg.use_affixes = !opts.no_affixes;
  fcfg.use_shape = !opts.no_shape;
  if (!opts.embeddings_path.empty()) {
    fcfg.embeddings = load_embeddings_file(opts.embeddings_path, std::nullopt);
  }

  tagger::CrfModel model = tagger::train(train_data, fcfg, opts.tcfg);
  emit(tagger::save_model(model), opts.out_model, out);

  std::string report;
  report += "command = train-tagger\n";
  report += "train_sentences = " + std::to_string(train_data.size()) + "\n";
  report += "test_sentences = " + std::to_string(test_data.size()) + "\n";
  report += "split_seed = " + std::to_string(opts.split_seed) + "\n";
  report += "test_fraction = " + corpus::format_double(opts.test_fraction) +
            "\n";
  report += "seed = " + std::to_string(opts.tcfg.seed) + "\n";
  report += "final_train_nll = " +
            corpus::format_double(
                tagger::corpus_nll(model, train_data, opts.tcfg.l2)) +
            "\n";

  if (!test_data.empty()) {
    std::vector<Sentence> test_sentences;
    for (const auto& ls : test_data) test_sentences.push_back(ls.sentence);
    auto predicted = tagger::tag_corpus(model, test_sentences);

    report += "heldout.token_accuracy = " +
              corpus::format_double(token_accuracy(test_data, predicted)) +
              "\n";

    std::vector<Phrase> gold_phrases, pred_phrases;
    for (std::size_t i = 0; i < test_data.size(); ++i) {
      Sentence keyed = test_sentences[i];
      keyed.id = std::to_string(i);
      for (Phrase& p : corpus::decode_phrases(test_data[i].tags, keyed)) {
        gold_phrases.push_back(std::move(p));
      }
      for (Phrase& p : corpus::decode_phrases(predicted[i], keyed)) {
        pred_phrases.push_back(std::move(p));
      }
    }
    report += eval::render(eval::overlap_report(gold_phrases, pred_phrases),
                           parse_format(opts.format));
  }
  out << report;
}

void cmd_tag(const std::string& model_path, const std::string& input_path,
             const std::string& out_path, const std::string& embeddings_path,
             std::ostream& out) {
  tagger::CrfModel model = tagger::load_model(slurp(model_path));
  wire_embeddings(model, embeddings_path);

  auto sentences = corpus::parse_token_file(slurp(input_path));
  auto tags = tagger::tag_corpus(model, sentences);

  std::vector<LabeledSentence> tagged(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    tagged[i].sentence = std::move(sentences[i]);
    tagged[i].tags = std::move(tags[i]);
  }
  emit(corpus::serialize_dataset(tagged), out_path, out);
}

// ---- classifier training / classification --------------------------------------

struct TrainClassifierOpts {
  std::string train_path;
  std::string out_model;
  std::string format = "kv";
  TrainConfig tcfg;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 42;
};

void cmd_train_classifier(const TrainClassifierOpts& opts, std::ostream& out) {
  auto rows = corpus::parse_category_file(slurp(opts.train_path));
  Split split = make_split(rows.size(), opts.test_fraction, opts.split_seed);

  std::vector<classifier::TrainingPhrase> train_data, test_data;
  for (int i : split.train) {
    train_data.push_back(classifier::from_category_example(rows[i]));
  }
  for (int i : split.test) {
    test_data.push_back(classifier::from_category_example(rows[i]));
  }

  classifier::ClassifierModel model =
      classifier::train_classifier(train_data, opts.tcfg);
  emit(classifier::save_classifier(model), opts.out_model, out);

  std::string report;
  report += "command = train-classifier\n";
  report += "train_phrases = " + std::to_string(train_data.size()) + "\n";
  report += "test_phrases = " + std::to_string(test_data.size()) + "\n";
  report += "split_seed = " + std::to_string(opts.split_seed) + "\n";
  report += "test_fraction = " + corpus::format_double(opts.test_fraction) +
            "\n";
  report += "seed = " + std::to_string(opts.tcfg.seed) + "\n";
  report += "final_train_nll = " +
            corpus::format_double(
                classifier::corpus_nll(model, train_data, opts.tcfg.l2)) +
            "\n";

  if (!test_data.empty()) {
    std::vector<Category> gold, pred;
    for (const auto& ex : test_data) {
      gold.push_back(ex.category);
      Phrase phrase;
      phrase.start = ex.start;
      phrase.end = ex.end;
      pred.push_back(
          classifier::predict_category(model, phrase, ex.sentence).first);
    }
    report += eval::render(eval::classification_report(gold, pred),
                           parse_format(opts.format));
  }
  out << report;
}

void cmd_classify(const std::string& model_path, const std::string& input_path,
                  const std::string& out_path, const std::string& input_format,
                  std::ostream& out) {
  classifier::ClassifierModel model =
      classifier::load_classifier(slurp(model_path));
  std::string text = slurp(input_path);

  std::string result;
  auto classify_one = [&](const Phrase& phrase, const Sentence& sentence) {
    auto [category, probs] = classifier::predict_category(model, phrase, sentence);
    result += category_name(category);
    result += '\t';
    result += phrase.text;
    result += '\n';
  };

  if (input_format == "tags") {
    for (const LabeledSentence& ls : corpus::parse_dataset(text)) {
      for (const Phrase& p : corpus::decode_phrases(ls.tags, ls.sentence)) {
        classify_one(p, ls.sentence);
      }
    }
  } else if (input_format == "phrases") {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      // Accept "category<TAB>text" rows by taking the text after the tab.
      std::size_t tab = line.find('\t');
      std::string phrase_text =
          tab == std::string::npos ? line : line.substr(tab + 1);
      Sentence sentence;
      sentence.tokens = corpus::tokenize(phrase_text);
      if (sentence.tokens.empty()) continue;
      Phrase phrase;
      phrase.start = 0;
      phrase.end = sentence.size();
      phrase.text = phrase_text;
      classify_one(phrase, sentence);
    }
  } else {
    throw Error(ErrorKind::InvalidInput,
                "--input-format must be 'tags' or 'phrases'");
  }
  emit(result, out_path, out);
}

// ---- eval ----------------------------------------------------------------------

int cmd_eval(const std::string& gold_path, const std::string& pred_path,
             const std::string& mode, const std::string& format, double min_f1,
             std::ostream& out) {
  eval::ReportFormat rf = parse_format(format);
  std::string gold_text = slurp(gold_path);
  std::string pred_text = slurp(pred_path);

  double gate = 0.0;
  std::string report;
  if (mode == "spans") {
    eval::EvalReport r = eval::evaluate_tag_file(gold_text, pred_text);
    report = eval::render(r, rf);
    // Gate on the weakest polarity that has gold phrases at all.
    gate = 1.0;
    bool any_gold = false;
    for (Polarity p : {Polarity::Inclusion, Polarity::Exclusion}) {
      if (r.of(p).gold_count > 0) {
        any_gold = true;
        gate = std::min(gate, r.of(p).binary.f1);
      }
    }
    if (!any_gold) gate = 0.0;
  } else if (mode == "classes") {
    auto gold_rows = corpus::parse_category_file(gold_text);
    auto pred_rows = corpus::parse_category_file(pred_text);
    if (gold_rows.size() != pred_rows.size()) {
      throw Error(ErrorKind::Misaligned,
                  "phrase counts differ: " + std::to_string(gold_rows.size()) +
                      " gold vs " + std::to_string(pred_rows.size()) +
                      " pred");
    }
    std::vector<Category> gold, pred;
    for (const auto& row : gold_rows) gold.push_back(row.category);
    for (const auto& row : pred_rows) pred.push_back(row.category);
    eval::ClassReport r = eval::classification_report(gold, pred);
    report = eval::render(r, rf);
    gate = r.weighted.f1;
  } else if (mode == "e2e") {
    auto gold = corpus::flatten_phrases(corpus::parse_phrase_file(gold_text));
    auto pred = corpus::flatten_phrases(corpus::parse_phrase_file(pred_text));
    eval::E2eReport r = eval::end_to_end(gold, pred);
    report = eval::render(r, rf);
    gate = r.overall.f1;
  } else {
    throw Error(ErrorKind::InvalidInput,
                "--mode must be 'spans', 'classes' or 'e2e'");
  }

  out << report;
  if (min_f1 >= 0.0 && gate < min_f1) return 1;
  return 0;
}

// ---- pipeline ------------------------------------------------------------------

struct PipelineOpts {
  std::string tagger_model;
  std::string classifier_model;
  std::string input_path;
  std::string out_path;
  std::string input_format = "raw";
  std::string embeddings_path;
};

void cmd_pipeline(const PipelineOpts& opts, std::ostream& out) {
  tagger::CrfModel crf = tagger::load_model(slurp(opts.tagger_model));
  wire_embeddings(crf, opts.embeddings_path);
  classifier::ClassifierModel clf =
      classifier::load_classifier(slurp(opts.classifier_model));

  std::vector<Sentence> sentences;
  std::string text = slurp(opts.input_path);
  if (opts.input_format == "raw") {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto tokens = corpus::tokenize(line);
      if (tokens.empty()) continue;
      Sentence s;
      s.id = "s" + std::to_string(sentences.size());
      s.tokens = std::move(tokens);
      sentences.push_back(std::move(s));
    }
  } else if (opts.input_format == "tokens") {
    sentences = corpus::parse_token_file(text);
  } else {
    throw Error(ErrorKind::InvalidInput,
                "--input-format must be 'raw' or 'tokens'");
  }

  auto tags = tagger::tag_corpus(crf, sentences);

  std::vector<corpus::SentencePhrases> records(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    records[i].sentence_id = sentences[i].id;
    for (Phrase& p : corpus::decode_phrases(tags[i], sentences[i])) {
      auto [category, probs] =
          classifier::predict_category(clf, p, sentences[i]);
      corpus::PhraseRecord record;
      p.category = category;
      record.probability = probs[static_cast<int>(category)];
      record.phrase = std::move(p);
      records[i].phrases.push_back(std::move(record));
    }
  }
  emit(corpus::serialize_phrase_file(records), opts.out_path, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Inclusion/exclusion phrase mining toolkit"};
  app.require_subcommand(1);

  // stats
  std::string stats_path, stats_kind = "auto";
  auto* stats = app.add_subcommand("stats", "Print dataset histograms");
  stats->add_option("dataset", stats_path, "Dataset file")->required();
  stats->add_option("--kind", stats_kind, "auto|spans|categories");

  // filter
  std::string filter_sentences_path, filter_lexicon_path, filter_out;
  auto* filter =
      app.add_subcommand("filter", "Keep sentences matching lexicon keywords");
  filter->add_option("sentences", filter_sentences_path,
                     "Plain text, one sentence per line")
      ->required();
  filter->add_option("lexicon", filter_lexicon_path, "Keyword lexicon file")
      ->required();
  filter->add_option("--out", filter_out, "Output path (default stdout)");

  // train-tagger
  TrainTaggerOpts tt;
  auto* train_tagger =
      app.add_subcommand("train-tagger", "Train the CRF span tagger");
  train_tagger->add_option("train", tt.train_path, "Span dataset file")
      ->required();
  train_tagger->add_option("--out", tt.out_model, "Model output path")
      ->required();
  train_tagger->add_option("--epochs", tt.tcfg.epochs, "Training epochs");
  train_tagger->add_option("--l2", tt.tcfg.l2, "L2 regularization strength");
  train_tagger->add_option("--lr", tt.tcfg.learning_rate, "AdaGrad step size");
  train_tagger->add_option("--seed", tt.tcfg.seed, "Training PRNG seed");
  train_tagger->add_option("--window", tt.window, "Feature window (0-3)");
  train_tagger->add_flag("--no-affixes", tt.no_affixes,
                         "Disable prefix/suffix features");
  train_tagger->add_flag("--no-shape", tt.no_shape,
                         "Disable word shape features");
  train_tagger->add_option("--embeddings", tt.embeddings_path,
                           "Word embedding text file");
  train_tagger->add_option("--test-fraction", tt.test_fraction,
                           "Held-out fraction (0 trains on everything)");
  train_tagger->add_option("--split-seed", tt.split_seed, "Split PRNG seed");
  train_tagger->add_option("--format", tt.format,
                           "Held-out report format: text|kv");

  // tag
  std::string tag_model, tag_input, tag_out, tag_embeddings;
  auto* tag = app.add_subcommand("tag", "Tag sentences with a trained model");
  tag->add_option("--model", tag_model, "Tagger model file")->required();
  tag->add_option("input", tag_input, "Token or span dataset file")
      ->required();
  tag->add_option("--out", tag_out, "Output path (default stdout)");
  tag->add_option("--embeddings", tag_embeddings,
                  "Embeddings the model was trained with");

  // train-classifier
  TrainClassifierOpts tc;
  auto* train_classifier = app.add_subcommand(
      "train-classifier", "Train the 11-way phrase classifier");
  train_classifier->add_option("train", tc.train_path, "Category dataset file")
      ->required();
  train_classifier->add_option("--out", tc.out_model, "Model output path")
      ->required();
  train_classifier->add_option("--epochs", tc.tcfg.epochs, "Training epochs");
  train_classifier->add_option("--l2", tc.tcfg.l2,
                               "L2 regularization strength");
  train_classifier->add_option("--lr", tc.tcfg.learning_rate,
                               "AdaGrad step size");
  train_classifier->add_option("--seed", tc.tcfg.seed, "Training PRNG seed");
  train_classifier->add_option("--test-fraction", tc.test_fraction,
                               "Held-out fraction (0 trains on everything)");
  train_classifier->add_option("--split-seed", tc.split_seed,
                               "Split PRNG seed");
  train_classifier->add_option("--format", tc.format,
                               "Held-out report format: text|kv");

  // classify
  std::string clf_model, clf_input, clf_out, clf_format = "tags";
  auto* classify =
      app.add_subcommand("classify", "Categorize phrases with a trained model");
  classify->add_option("--model", clf_model, "Classifier model file")
      ->required();
  classify->add_option("input", clf_input, "Input file")->required();
  classify->add_option("--out", clf_out, "Output path (default stdout)");
  classify->add_option("--input-format", clf_format,
                       "tags (tagged dataset) | phrases (one per line)");

  // eval
  std::string eval_gold, eval_pred, eval_mode = "spans",
              eval_format = "text";
  double eval_min_f1 = -1.0;
  auto* evalc = app.add_subcommand("eval", "Score predictions against gold");
  evalc->add_option("gold", eval_gold, "Gold file")->required();
  evalc->add_option("pred", eval_pred, "Prediction file")->required();
  evalc->add_option("--mode", eval_mode, "spans|classes|e2e");
  evalc->add_option("--format", eval_format, "text|kv");
  evalc->add_option("--min-f1", eval_min_f1,
                    "Exit 1 when the mode's headline F1 is below this");

  // pipeline
  PipelineOpts pl;
  auto* pipeline = app.add_subcommand(
      "pipeline", "Mine and categorize phrases from sentences");
  pipeline->add_option("--tagger", pl.tagger_model, "Tagger model file")
      ->required();
  pipeline->add_option("--classifier", pl.classifier_model,
                       "Classifier model file")
      ->required();
  pipeline->add_option("input", pl.input_path, "Input file")->required();
  pipeline->add_option("--out", pl.out_path, "Output path (default stdout)");
  pipeline->add_option("--input-format", pl.input_format, "raw|tokens");
  pipeline->add_option("--embeddings", pl.embeddings_path,
                       "Embeddings the tagger was trained with");

  std::vector<const char*> argv;
  argv.push_back("incexc");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (stats->parsed()) {
      cmd_stats(stats_path, stats_kind, out);
    } else if (filter->parsed()) {
      cmd_filter(filter_sentences_path, filter_lexicon_path, filter_out, out);
    } else if (train_tagger->parsed()) {
      cmd_train_tagger(tt, out);
    } else if (tag->parsed()) {
      cmd_tag(tag_model, tag_input, tag_out, tag_embeddings, out);
    } else if (train_classifier->parsed()) {
      cmd_train_classifier(tc, out);
    } else if (classify->parsed()) {
      cmd_classify(clf_model, clf_input, clf_out, clf_format, out);
    } else if (evalc->parsed()) {
      return cmd_eval(eval_gold, eval_pred, eval_mode, eval_format,
                      eval_min_f1, out);
    } else if (pipeline->parsed()) {
      cmd_pipeline(pl, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace incexc::cli
