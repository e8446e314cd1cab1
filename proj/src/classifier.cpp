#include "incexc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace incexc::classifier {

namespace {

constexpr double kAdaGradEps = 1e-8;

CategoryScores softmax(const CategoryScores& scores) {
  double m = scores[0];
  for (int c = 1; c < kNumCategories; ++c) m = std::max(m, scores[c]);
  CategoryScores probs{};
  double sum = 0.0;
  for (int c = 0; c < kNumCategories; ++c) {
    probs[c] = std::exp(scores[c] - m);
    sum += probs[c];
  }
  for (int c = 0; c < kNumCategories; ++c) probs[c] /= sum;
  return probs;
}

features::FeatureVector example_features(const TrainingPhrase& ex) {
  return features::phrase_features(ex.sentence.tokens, ex.start, ex.end);
}

struct CachedExample {
  std::vector<std::pair<int, double>> feats;  // (feature id, value)
  int label = 0;
};

CategoryScores scores_of(const std::vector<std::pair<int, double>>& feats,
                         const std::vector<CategoryScores>& weights) {
  CategoryScores scores{};
  for (const auto& [fid, value] : feats) {
    for (int c = 0; c < kNumCategories; ++c) {
      scores[c] += value * weights[fid][c];
    }
  }
  return scores;
}

void shuffle_indices(std::vector<int>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

TrainingPhrase from_category_example(const corpus::CategoryExample& row) {
  TrainingPhrase ex;
  ex.sentence.tokens = row.tokens;
  ex.start = 0;
  ex.end = static_cast<int>(row.tokens.size());
  ex.category = row.category;
  return ex;
}

ClassifierModel train_classifier(const std::vector<TrainingPhrase>& data,
                                 const TrainConfig& cfg) {
  std::set<Category> distinct;
  for (const TrainingPhrase& ex : data) distinct.insert(ex.category);
  if (distinct.size() < 2) {
    throw Error(ErrorKind::DegenerateData,
                "need at least 2 distinct categories, got " +
                    std::to_string(distinct.size()));
  }

  ClassifierModel model;
  model.l2 = cfg.l2;

  std::vector<CachedExample> cache(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    cache[i].label = static_cast<int>(data[i].category);
    for (const auto& [name, value] : example_features(data[i])) {
      cache[i].feats.emplace_back(model.symbols.intern(name), value);
    }
  }

  model.weights.assign(model.symbols.size(), CategoryScores{});
  if (cfg.epochs <= 0) return model;

  std::vector<CategoryScores> accum(model.symbols.size(), CategoryScores{});
  double reg = cfg.l2 / static_cast<double>(data.size());

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (int idx : order) {
      const CachedExample& ex = cache[idx];
      CategoryScores probs = softmax(scores_of(ex.feats, model.weights));
      probs[ex.label] -= 1.0;  // dloss/dscore

      for (const auto& [fid, value] : ex.feats) {
        for (int c = 0; c < kNumCategories; ++c) {
          double g = value * probs[c] + reg * model.weights[fid][c];
          accum[fid][c] += g * g;
          model.weights[fid][c] -=
              cfg.learning_rate * g / (std::sqrt(accum[fid][c]) + kAdaGradEps);
        }
      }
    }
  }
  return model;
}

CategoryScores category_scores(const ClassifierModel& model,
                               const features::FeatureVector& fv) {
  CategoryScores scores{};
  for (const auto& [name, value] : fv) {
    if (auto fid = model.symbols.find(name)) {
      for (int c = 0; c < kNumCategories; ++c) {
        scores[c] += value * model.weights[*fid][c];
      }
    }
  }
  return softmax(scores);
}

std::pair<Category, CategoryScores> predict_category(
    const ClassifierModel& model, const Phrase& phrase,
    const Sentence& sentence) {
  CategoryScores probs =
      category_scores(model, features::phrase_features(phrase, sentence));
  int best = 0;
  for (int c = 1; c < kNumCategories; ++c) {
    if (probs[c] > probs[best]) best = c;  // ties keep the lower index
  }
  return {static_cast<Category>(best), probs};
}

ClfNllResult nll_and_gradient(const ClassifierModel& model,
                              const std::vector<TrainingPhrase>& batch,
                              double l2) {
  ClfNllResult res;
  res.gradient.weights.assign(model.weights.size(), CategoryScores{});

  for (const TrainingPhrase& ex : batch) {
    std::vector<std::pair<int, double>> feats;
    for (const auto& [name, value] : example_features(ex)) {
      if (auto fid = model.symbols.find(name)) {
        feats.emplace_back(*fid, value);
      }
    }
    CategoryScores probs = softmax(scores_of(feats, model.weights));
    int label = static_cast<int>(ex.category);
    res.nll -= std::log(probs[label]);
    probs[label] -= 1.0;
    for (const auto& [fid, value] : feats) {
      for (int c = 0; c < kNumCategories; ++c) {
        res.gradient.weights[fid][c] += value * probs[c];
      }
    }
  }

  double sq = 0.0;
  for (std::size_t f = 0; f < model.weights.size(); ++f) {
    for (int c = 0; c < kNumCategories; ++c) {
      sq += model.weights[f][c] * model.weights[f][c];
      res.gradient.weights[f][c] += l2 * model.weights[f][c];
    }
  }
  res.nll += 0.5 * l2 * sq;
  return res;
}

double corpus_nll(const ClassifierModel& model,
                  const std::vector<TrainingPhrase>& batch, double l2) {
  double nll = 0.0;
  for (const TrainingPhrase& ex : batch) {
    std::vector<std::pair<int, double>> feats;
    for (const auto& [name, value] : example_features(ex)) {
      if (auto fid = model.symbols.find(name)) {
        feats.emplace_back(*fid, value);
      }
    }
    CategoryScores probs = softmax(scores_of(feats, model.weights));
    nll -= std::log(probs[static_cast<int>(ex.category)]);
  }
  double sq = 0.0;
  for (const CategoryScores& row : model.weights) {
    for (double w : row) sq += w * w;
  }
  return nll + 0.5 * l2 * sq;
}

// ---- Model file format ------------------------------------------------------

namespace {

std::string classes_header() {
  std::string line = "#classes";
  for (Category c : kAllCategories) {
    line += ' ';
    line += category_name(c);
  }
  return line;
}

}  // namespace

std::string save_classifier(const ClassifierModel& model) {
  std::string out;
  out += "#version 1\n";
  out += "#type clf\n";
  out += classes_header();
  out += '\n';
  out += "#config l2 " + corpus::format_double(model.l2) + "\n";
  for (int f = 0; f < model.symbols.size(); ++f) {
    const std::string& name = model.symbols.name(f);
    if (name.find('\t') != std::string::npos ||
        name.find('\n') != std::string::npos) {
      throw Error(ErrorKind::InvalidInput,
                  "feature name contains a tab or newline: '" + name + "'");
    }
    for (int c = 0; c < kNumCategories; ++c) {
      double w = model.weights[f][c];
      if (w == 0.0) continue;
      out += "U ";
      out += name;
      out += ' ';
      out += category_name(static_cast<Category>(c));
      out += ' ';
      out += corpus::format_double(w);
      out += '\n';
    }
  }
  return out;
}

ClassifierModel load_classifier(std::string_view text) {
  ClassifierModel model;

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  if (lines.empty() || !lines[0].starts_with("#version ")) {
    throw Error(ErrorKind::MalformedModel, "missing #version header", 1);
  }
  if (lines[0] != "#version 1") {
    throw Error(ErrorKind::VersionMismatch,
                "unsupported model version '" +
                    std::string(lines[0].substr(9)) + "'",
                1);
  }
  if (lines.size() < 2 || lines[1] != "#type clf") {
    throw Error(ErrorKind::MalformedModel, "expected '#type clf'", 2);
  }
  if (lines.size() < 3 || lines[2] != classes_header()) {
    throw Error(ErrorKind::MalformedModel, "unexpected class list", 3);
  }

  for (std::size_t li = 3; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty()) continue;
    if (line.starts_with("#config ")) {
      std::string_view rest = line.substr(8);
      std::size_t sp = rest.find(' ');
      if (sp == std::string_view::npos) {
        throw Error(ErrorKind::MalformedModel, "malformed #config line",
                    lineno);
      }
      if (rest.substr(0, sp) == "l2") {
        model.l2 = corpus::parse_double(rest.substr(sp + 1), lineno);
      }
      continue;
    }
    if (line.starts_with("#")) continue;
    if (!line.starts_with("U ")) {
      throw Error(ErrorKind::MalformedModel,
                  "unrecognized line '" + std::string(line) + "'", lineno);
    }

    std::string_view rest = line.substr(2);
    std::size_t wpos = rest.rfind(' ');
    if (wpos == std::string_view::npos || wpos == 0) {
      throw Error(ErrorKind::MalformedModel, "malformed weight line", lineno);
    }
    std::string_view wstr = rest.substr(wpos + 1);
    std::size_t cpos = rest.rfind(' ', wpos - 1);
    if (cpos == std::string_view::npos || cpos == 0) {
      throw Error(ErrorKind::MalformedModel, "malformed weight line", lineno);
    }
    std::string_view cstr = rest.substr(cpos + 1, wpos - cpos - 1);
    std::string name(rest.substr(0, cpos));
    if (name.empty()) {
      throw Error(ErrorKind::MalformedModel, "empty feature name", lineno);
    }
    auto category = parse_category(cstr);
    if (!category) {
      throw Error(ErrorKind::MalformedModel,
                  "unknown class '" + std::string(cstr) + "'", lineno);
    }
    int fid = model.symbols.intern(name);
    if (fid >= static_cast<int>(model.weights.size())) {
      model.weights.resize(fid + 1, CategoryScores{});
    }
    model.weights[fid][static_cast<int>(*category)] =
        corpus::parse_double(wstr, lineno);
  }
  return model;
}

}  // namespace incexc::classifier
