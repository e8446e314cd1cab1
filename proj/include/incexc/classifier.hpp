#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "incexc/corpus.hpp"
#include "incexc/features.hpp"
#include "incexc/types.hpp"

namespace incexc::classifier {

// Probabilities over the 11 categories in canonical order; sums to 1.
using CategoryScores = std::array<double, kNumCategories>;

// A labeled phrase in its carrier sentence. Examples loaded from a category
// file have the phrase as the whole sentence (no surrounding context).
struct TrainingPhrase {
  Sentence sentence;
  int start = 0;
  int end = 0;
  Category category = Category::AgeHeight;
};

TrainingPhrase from_category_example(const corpus::CategoryExample& row);

// Multinomial logistic regression over sparse phrase features.
struct ClassifierModel {
  features::SymbolTable symbols;
  std::vector<CategoryScores> weights;  // one row per interned feature
  double l2 = 0.0;
};

// AdaGrad over per-example gradients, example order reshuffled every epoch
// with a PRNG seeded from cfg.seed. Requires at least two distinct
// categories in the data.
ClassifierModel train_classifier(const std::vector<TrainingPhrase>& data,
                                 const TrainConfig& cfg);

CategoryScores category_scores(const ClassifierModel& model,
                               const features::FeatureVector& fv);

// Softmax argmax; ties prefer the lower canonical category index.
std::pair<Category, CategoryScores> predict_category(
    const ClassifierModel& model, const Phrase& phrase,
    const Sentence& sentence);

struct ClfGradient {
  std::vector<CategoryScores> weights;
};

struct ClfNllResult {
  double nll = 0.0;
  ClfGradient gradient;
};

// Regularized multinomial logistic loss of the batch and its exact dense
// gradient.
ClfNllResult nll_and_gradient(const ClassifierModel& model,
                              const std::vector<TrainingPhrase>& batch,
                              double l2);

double corpus_nll(const ClassifierModel& model,
                  const std::vector<TrainingPhrase>& batch, double l2);

std::string save_classifier(const ClassifierModel& model);
ClassifierModel load_classifier(std::string_view text);

}  // namespace incexc::classifier
