#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "incexc/features.hpp"
#include "incexc/types.hpp"

namespace incexc::tagger {

using TagArray = std::array<double, kNumTags>;
using EmissionMatrix = std::vector<TagArray>;            // n x 5
using TransMatrix = std::array<TagArray, kNumTags>;      // [from][to]
using NodeMarginals = std::vector<TagArray>;             // n x 5
using EdgeMarginals = std::vector<TransMatrix>;          // (n-1) x 5 x 5

// Linear-chain CRF over the five BIO tags. Immutable after training.
struct CrfModel {
  features::SymbolTable symbols;
  std::vector<TagArray> unary;  // one row per interned feature
  TransMatrix trans{};          // trans[a][b]: score of tag a followed by b
  TagArray begin{};
  TagArray end{};
  double l2 = 0.0;
  features::FeatureConfig config;  // extraction settings used at training
  int embedding_dim = 0;           // 0 when trained without embeddings
};

// ---- Chain primitives over explicit score matrices -------------------------
// Path score: begin[t0] + sum(emissions) + sum(trans) + end[t_last].

double path_score(std::span<const BioTag> path, const EmissionMatrix& emissions,
                  const TransMatrix& trans, const TagArray& begin,
                  const TagArray& end);

double log_partition(const EmissionMatrix& emissions, const TransMatrix& trans,
                     const TagArray& begin, const TagArray& end);

struct Marginals {
  NodeMarginals node;
  EdgeMarginals edge;
  double log_z = 0.0;
};

Marginals posterior_marginals(const EmissionMatrix& emissions,
                              const TransMatrix& trans, const TagArray& begin,
                              const TagArray& end);

// Max-scoring path; ties prefer the lower canonical tag index at every
// backpointer decision.
std::vector<BioTag> viterbi(const EmissionMatrix& emissions,
                            const TransMatrix& trans, const TagArray& begin,
                            const TagArray& end);

// ---- Model-level operations -------------------------------------------------

// Emission score matrix: entry (i, t) is the dot product of token i's
// features with the unary weight column of tag t; unknown features score 0.
EmissionMatrix sequence_scores(const CrfModel& model, const Sentence& sentence);

double log_partition(const CrfModel& model, const Sentence& sentence);
Marginals posterior_marginals(const CrfModel& model, const Sentence& sentence);
std::vector<BioTag> viterbi(const CrfModel& model, const Sentence& sentence);

struct CrfGradient {
  std::vector<TagArray> unary;
  TransMatrix trans{};
  TagArray begin{};
  TagArray end{};
};

struct NllResult {
  double nll = 0.0;
  CrfGradient gradient;
};

// Regularized negative log-likelihood of the batch and its exact dense
// gradient with respect to every model weight.
NllResult nll_and_gradient(const CrfModel& model,
                           const std::vector<LabeledSentence>& batch,
                           double l2);

// Batch NLL only; per-sentence terms may be computed in parallel, the
// reduction is ordered so the result is identical to the serial path.
double corpus_nll(const CrfModel& model,
                  const std::vector<LabeledSentence>& batch, double l2,
                  bool parallel = true);

// AdaGrad over per-sentence gradients, sentence order reshuffled every epoch
// with a PRNG seeded from cfg.seed. Deterministic for a fixed seed.
CrfModel train(const std::vector<LabeledSentence>& data,
               const features::FeatureConfig& feature_cfg,
               const TrainConfig& cfg);

// ---- Corpus tagging ----------------------------------------------------------

std::vector<std::vector<BioTag>> tag_corpus_serial(
    const CrfModel& model, const std::vector<Sentence>& sentences);

// OpenMP over sentences; output order matches input, results are identical
// to the serial kernel.
std::vector<std::vector<BioTag>> tag_corpus(
    const CrfModel& model, const std::vector<Sentence>& sentences,
    bool parallel = true);

// ---- Serialization -----------------------------------------------------------

std::string save_model(const CrfModel& model);
CrfModel load_model(std::string_view text);

}  // namespace incexc::tagger
