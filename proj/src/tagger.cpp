#include "incexc/tagger.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "incexc/corpus.hpp"

namespace incexc::tagger {

namespace {

constexpr double kAdaGradEps = 1e-8;

double log_sum_exp(const TagArray& scores) {
  double m = scores[0];
  for (int t = 1; t < kNumTags; ++t) m = std::max(m, scores[t]);
  double sum = 0.0;
  for (int t = 0; t < kNumTags; ++t) sum += std::exp(scores[t] - m);
  return m + std::log(sum);
}

void require_nonempty(int n) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidInput, "sentence has no tokens");
  }
}

// Per-token sparse features, interned against a symbol table. `fid` indexes
// the model's unary rows, `local` indexes the sentence's touched-feature
// list (used by the sparse training updates).
struct CachedFeature {
  int fid = 0;
  int local = 0;
  double value = 0.0;
};

struct CachedSentence {
  std::vector<std::vector<CachedFeature>> tokens;
  std::vector<int> touched;  // local -> fid, ascending
  std::vector<BioTag> gold;
};

std::vector<std::vector<std::pair<int, double>>> lookup_features(
    const features::SymbolTable& symbols, const Sentence& sentence,
    const features::FeatureConfig& cfg) {
  std::vector<std::vector<std::pair<int, double>>> out(sentence.size());
  for (int i = 0; i < sentence.size(); ++i) {
    for (const auto& [name, value] : features::token_features(sentence, i, cfg)) {
      if (auto fid = symbols.find(name)) {
        out[i].emplace_back(*fid, value);
      }
    }
  }
  return out;
}

EmissionMatrix emissions_from(
    const std::vector<std::vector<std::pair<int, double>>>& feats,
    const std::vector<TagArray>& unary) {
  EmissionMatrix em(feats.size(), TagArray{});
  for (std::size_t i = 0; i < feats.size(); ++i) {
    for (const auto& [fid, value] : feats[i]) {
      for (int t = 0; t < kNumTags; ++t) {
        em[i][t] += value * unary[fid][t];
      }
    }
  }
  return em;
}

std::vector<TagArray> forward(const EmissionMatrix& em,
                              const TransMatrix& trans,
                              const TagArray& begin) {
  std::size_t n = em.size();
  std::vector<TagArray> alpha(n);
  for (int t = 0; t < kNumTags; ++t) alpha[0][t] = begin[t] + em[0][t];
  for (std::size_t i = 1; i < n; ++i) {
    for (int t = 0; t < kNumTags; ++t) {
      TagArray prev;
      for (int a = 0; a < kNumTags; ++a) {
        prev[a] = alpha[i - 1][a] + trans[a][t];
      }
      alpha[i][t] = em[i][t] + log_sum_exp(prev);
    }
  }
  return alpha;
}

std::vector<TagArray> backward(const EmissionMatrix& em,
                               const TransMatrix& trans, const TagArray& end) {
  std::size_t n = em.size();
  std::vector<TagArray> beta(n);
  beta[n - 1] = end;
  for (std::size_t i = n - 1; i > 0; --i) {
    for (int a = 0; a < kNumTags; ++a) {
      TagArray next;
      for (int b = 0; b < kNumTags; ++b) {
        next[b] = trans[a][b] + em[i][b] + beta[i][b];
      }
      beta[i - 1][a] = log_sum_exp(next);
    }
  }
  return beta;
}

}  // namespace

double path_score(std::span<const BioTag> path, const EmissionMatrix& emissions,
                  const TransMatrix& trans, const TagArray& begin,
                  const TagArray& end) {
  std::size_t n = emissions.size();
  if (path.size() != n) {
    throw Error(ErrorKind::LengthMismatch, "path length != sequence length");
  }
  require_nonempty(static_cast<int>(n));
  double score = begin[static_cast<int>(path[0])];
  score += emissions[0][static_cast<int>(path[0])];
  for (std::size_t i = 1; i < n; ++i) {
    score += trans[static_cast<int>(path[i - 1])][static_cast<int>(path[i])];
    score += emissions[i][static_cast<int>(path[i])];
  }
  score += end[static_cast<int>(path[n - 1])];
  return score;
}

double log_partition(const EmissionMatrix& emissions, const TransMatrix& trans,
                     const TagArray& begin, const TagArray& end) {
  require_nonempty(static_cast<int>(emissions.size()));
  auto alpha = forward(emissions, trans, begin);
  TagArray last;
  for (int t = 0; t < kNumTags; ++t) last[t] = alpha.back()[t] + end[t];
  return log_sum_exp(last);
}

Marginals posterior_marginals(const EmissionMatrix& emissions,
                              const TransMatrix& trans, const TagArray& begin,
                              const TagArray& end) {
  std::size_t n = emissions.size();
  require_nonempty(static_cast<int>(n));
  auto alpha = forward(emissions, trans, begin);
  auto beta = backward(emissions, trans, end);

  Marginals m;
  TagArray last;
  for (int t = 0; t < kNumTags; ++t) last[t] = alpha[n - 1][t] + end[t];
  m.log_z = log_sum_exp(last);

  m.node.assign(n, TagArray{});
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < kNumTags; ++t) {
      m.node[i][t] = std::exp(alpha[i][t] + beta[i][t] - m.log_z);
    }
  }

  if (n > 1) m.edge.assign(n - 1, TransMatrix{});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int a = 0; a < kNumTags; ++a) {
      for (int b = 0; b < kNumTags; ++b) {
        m.edge[i][a][b] = std::exp(alpha[i][a] + trans[a][b] +
                                   emissions[i + 1][b] + beta[i + 1][b] -
                                   m.log_z);
      }
    }
  }
  return m;
}

std::vector<BioTag> viterbi(const EmissionMatrix& emissions,
                            const TransMatrix& trans, const TagArray& begin,
                            const TagArray& end) {
  std::size_t n = emissions.size();
  require_nonempty(static_cast<int>(n));

  std::vector<TagArray> delta(n);
  std::vector<std::array<int, kNumTags>> backptr(n);
  for (int t = 0; t < kNumTags; ++t) delta[0][t] = begin[t] + emissions[0][t];
  for (std::size_t i = 1; i < n; ++i) {
    for (int t = 0; t < kNumTags; ++t) {
      int best_a = 0;
      double best = delta[i - 1][0] + trans[0][t];
      for (int a = 1; a < kNumTags; ++a) {
        double s = delta[i - 1][a] + trans[a][t];
        if (s > best) {  // ties keep the lower tag index
          best = s;
          best_a = a;
        }
      }
      delta[i][t] = emissions[i][t] + best;
      backptr[i][t] = best_a;
    }
  }

  int best_t = 0;
  double best = delta[n - 1][0] + end[0];
  for (int t = 1; t < kNumTags; ++t) {
    double s = delta[n - 1][t] + end[t];
    if (s > best) {
      best = s;
      best_t = t;
    }
  }

  std::vector<BioTag> path(n);
  path[n - 1] = static_cast<BioTag>(best_t);
  for (std::size_t i = n - 1; i > 0; --i) {
    best_t = backptr[i][best_t];
    path[i - 1] = static_cast<BioTag>(best_t);
  }
  return path;
}

EmissionMatrix sequence_scores(const CrfModel& model, const Sentence& sentence) {
  require_nonempty(sentence.size());
  return emissions_from(lookup_features(model.symbols, sentence, model.config),
                        model.unary);
}

double log_partition(const CrfModel& model, const Sentence& sentence) {
  return log_partition(sequence_scores(model, sentence), model.trans,
                       model.begin, model.end);
}

Marginals posterior_marginals(const CrfModel& model, const Sentence& sentence) {
  return posterior_marginals(sequence_scores(model, sentence), model.trans,
                             model.begin, model.end);
}

std::vector<BioTag> viterbi(const CrfModel& model, const Sentence& sentence) {
  return viterbi(sequence_scores(model, sentence), model.trans, model.begin,
                 model.end);
}

NllResult nll_and_gradient(const CrfModel& model,
                           const std::vector<LabeledSentence>& batch,
                           double l2) {
  NllResult res;
  res.gradient.unary.assign(model.unary.size(), TagArray{});

  for (const LabeledSentence& ls : batch) {
    const Sentence& sentence = ls.sentence;
    if (static_cast<int>(ls.tags.size()) != sentence.size()) {
      throw Error(ErrorKind::LengthMismatch,
                  "tags/tokens length mismatch in sentence '" + sentence.id +
                      "'");
    }
    require_nonempty(sentence.size());
    auto feats = lookup_features(model.symbols, sentence, model.config);
    auto em = emissions_from(feats, model.unary);
    auto marg = posterior_marginals(em, model.trans, model.begin, model.end);

    res.nll += marg.log_z -
               path_score(ls.tags, em, model.trans, model.begin, model.end);

    std::size_t n = em.size();
    for (int t = 0; t < kNumTags; ++t) {
      res.gradient.begin[t] += marg.node[0][t];
      res.gradient.end[t] += marg.node[n - 1][t];
    }
    res.gradient.begin[static_cast<int>(ls.tags[0])] -= 1.0;
    res.gradient.end[static_cast<int>(ls.tags[n - 1])] -= 1.0;

    for (std::size_t i = 0; i < n; ++i) {
      int gold = static_cast<int>(ls.tags[i]);
      for (const auto& [fid, value] : feats[i]) {
        for (int t = 0; t < kNumTags; ++t) {
          res.gradient.unary[fid][t] += value * marg.node[i][t];
        }
        res.gradient.unary[fid][gold] -= value;
      }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (int a = 0; a < kNumTags; ++a) {
        for (int b = 0; b < kNumTags; ++b) {
          res.gradient.trans[a][b] += marg.edge[i][a][b];
        }
      }
      res.gradient.trans[static_cast<int>(ls.tags[i])]
                        [static_cast<int>(ls.tags[i + 1])] -= 1.0;
    }
  }

  // l2 term over every weight.
  double sq = 0.0;
  for (std::size_t f = 0; f < model.unary.size(); ++f) {
    for (int t = 0; t < kNumTags; ++t) {
      sq += model.unary[f][t] * model.unary[f][t];
      res.gradient.unary[f][t] += l2 * model.unary[f][t];
    }
  }
  for (int a = 0; a < kNumTags; ++a) {
    for (int b = 0; b < kNumTags; ++b) {
      sq += model.trans[a][b] * model.trans[a][b];
      res.gradient.trans[a][b] += l2 * model.trans[a][b];
    }
  }
  for (int t = 0; t < kNumTags; ++t) {
    sq += model.begin[t] * model.begin[t] + model.end[t] * model.end[t];
    res.gradient.begin[t] += l2 * model.begin[t];
    res.gradient.end[t] += l2 * model.end[t];
  }
  res.nll += 0.5 * l2 * sq;
  return res;
}

double corpus_nll(const CrfModel& model,
                  const std::vector<LabeledSentence>& batch, double l2,
                  bool parallel) {
  long n = static_cast<long>(batch.size());
  for (const LabeledSentence& ls : batch) {
    require_nonempty(ls.sentence.size());
    if (ls.tags.size() != ls.sentence.tokens.size()) {
      throw Error(ErrorKind::LengthMismatch,
                  "tags/tokens length mismatch in sentence '" +
                      ls.sentence.id + "'");
    }
  }

  std::vector<double> per_sentence(batch.size(), 0.0);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (long i = 0; i < n; ++i) {
    const LabeledSentence& ls = batch[i];
    auto feats = lookup_features(model.symbols, ls.sentence, model.config);
    auto em = emissions_from(feats, model.unary);
    per_sentence[i] =
        log_partition(em, model.trans, model.begin, model.end) -
        path_score(ls.tags, em, model.trans, model.begin, model.end);
  }
  (void)parallel;

  double nll = 0.0;
  for (double v : per_sentence) nll += v;  // ordered reduction

  double sq = 0.0;
  for (const TagArray& row : model.unary) {
    for (double w : row) sq += w * w;
  }
  for (const TagArray& row : model.trans) {
    for (double w : row) sq += w * w;
  }
  for (double w : model.begin) sq += w * w;
  for (double w : model.end) sq += w * w;
  return nll + 0.5 * l2 * sq;
}

namespace {

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this one is pinned.
void shuffle_indices(std::vector<int>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

struct AdaGradState {
  std::vector<TagArray> unary;
  TransMatrix trans{};
  TagArray begin{};
  TagArray end{};
};

inline void adagrad_step(double& weight, double& accum, double grad,
                         double lr) {
  accum += grad * grad;
  weight -= lr * grad / (std::sqrt(accum) + kAdaGradEps);
}

}  // namespace

CrfModel train(const std::vector<LabeledSentence>& data,
               const features::FeatureConfig& feature_cfg,
               const TrainConfig& cfg) {
  if (data.empty()) {
    throw Error(ErrorKind::EmptyData, "no training sentences");
  }

  CrfModel model;
  model.config = feature_cfg;
  model.l2 = cfg.l2;
  model.embedding_dim =
      feature_cfg.embeddings ? feature_cfg.embeddings->dimension : 0;

  // Intern every feature seen in the training data, in corpus order, and
  // cache per-sentence sparse features.
  std::vector<CachedSentence> cache(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    const LabeledSentence& ls = data[s];
    require_nonempty(ls.sentence.size());
    if (ls.tags.size() != ls.sentence.tokens.size()) {
      throw Error(ErrorKind::LengthMismatch,
                  "tags/tokens length mismatch in sentence '" +
                      ls.sentence.id + "'");
    }
    CachedSentence& cs = cache[s];
    cs.gold = ls.tags;
    cs.tokens.resize(ls.sentence.size());
    for (int i = 0; i < ls.sentence.size(); ++i) {
      for (const auto& [name, value] :
           features::token_features(ls.sentence, i, feature_cfg)) {
        CachedFeature cf;
        cf.fid = model.symbols.intern(name);
        cf.value = value;
        cs.tokens[i].push_back(cf);
      }
    }
    cs.touched.reserve(16);
    for (const auto& tok : cs.tokens) {
      for (const CachedFeature& cf : tok) cs.touched.push_back(cf.fid);
    }
    std::sort(cs.touched.begin(), cs.touched.end());
    cs.touched.erase(std::unique(cs.touched.begin(), cs.touched.end()),
                     cs.touched.end());
    for (auto& tok : cs.tokens) {
      for (CachedFeature& cf : tok) {
        cf.local = static_cast<int>(
            std::lower_bound(cs.touched.begin(), cs.touched.end(), cf.fid) -
            cs.touched.begin());
      }
    }
  }

  model.unary.assign(model.symbols.size(), TagArray{});
  if (cfg.epochs <= 0) return model;

  AdaGradState state;
  state.unary.assign(model.symbols.size(), TagArray{});

  double reg = cfg.l2 / static_cast<double>(data.size());

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  std::vector<TagArray> g_unary;  // indexed by the sentence's local ids
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (int idx : order) {
      const CachedSentence& cs = cache[idx];
      std::size_t n = cs.tokens.size();

      EmissionMatrix em(n, TagArray{});
      for (std::size_t i = 0; i < n; ++i) {
        for (const CachedFeature& cf : cs.tokens[i]) {
          for (int t = 0; t < kNumTags; ++t) {
            em[i][t] += cf.value * model.unary[cf.fid][t];
          }
        }
      }
      auto marg = posterior_marginals(em, model.trans, model.begin, model.end);

      g_unary.assign(cs.touched.size(), TagArray{});
      TransMatrix g_trans{};
      TagArray g_begin{}, g_end{};

      for (int t = 0; t < kNumTags; ++t) {
        g_begin[t] = marg.node[0][t];
        g_end[t] = marg.node[n - 1][t];
      }
      g_begin[static_cast<int>(cs.gold[0])] -= 1.0;
      g_end[static_cast<int>(cs.gold[n - 1])] -= 1.0;

      for (std::size_t i = 0; i < n; ++i) {
        int gold = static_cast<int>(cs.gold[i]);
        for (const CachedFeature& cf : cs.tokens[i]) {
          for (int t = 0; t < kNumTags; ++t) {
            g_unary[cf.local][t] += cf.value * marg.node[i][t];
          }
          g_unary[cf.local][gold] -= cf.value;
        }
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (int a = 0; a < kNumTags; ++a) {
          for (int b = 0; b < kNumTags; ++b) {
            g_trans[a][b] += marg.edge[i][a][b];
          }
        }
        g_trans[static_cast<int>(cs.gold[i])]
               [static_cast<int>(cs.gold[i + 1])] -= 1.0;
      }

      // Per-sentence share of the l2 term, applied to the parameters this
      // sentence touches (transitions and boundaries are always touched).
      for (std::size_t k = 0; k < cs.touched.size(); ++k) {
        int fid = cs.touched[k];
        for (int t = 0; t < kNumTags; ++t) {
          double g = g_unary[k][t] + reg * model.unary[fid][t];
          adagrad_step(model.unary[fid][t], state.unary[fid][t], g,
                       cfg.learning_rate);
        }
      }
      for (int a = 0; a < kNumTags; ++a) {
        for (int b = 0; b < kNumTags; ++b) {
          double g = g_trans[a][b] + reg * model.trans[a][b];
          adagrad_step(model.trans[a][b], state.trans[a][b], g,
                       cfg.learning_rate);
        }
      }
      for (int t = 0; t < kNumTags; ++t) {
        double gb = g_begin[t] + reg * model.begin[t];
        adagrad_step(model.begin[t], state.begin[t], gb, cfg.learning_rate);
        double ge = g_end[t] + reg * model.end[t];
        adagrad_step(model.end[t], state.end[t], ge, cfg.learning_rate);
      }
    }
  }
  return model;
}

std::vector<std::vector<BioTag>> tag_corpus_serial(
    const CrfModel& model, const std::vector<Sentence>& sentences) {
  std::vector<std::vector<BioTag>> out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out[i] = viterbi(model, sentences[i]);
  }
  return out;
}

std::vector<std::vector<BioTag>> tag_corpus(
    const CrfModel& model, const std::vector<Sentence>& sentences,
    bool parallel) {
  for (const Sentence& s : sentences) require_nonempty(s.size());

  std::vector<std::vector<BioTag>> out(sentences.size());
  long n = static_cast<long>(sentences.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (long i = 0; i < n; ++i) {
    out[i] = viterbi(model, sentences[i]);
  }
  (void)parallel;
  return out;
}

// ---- Model file format ------------------------------------------------------

namespace {

constexpr std::string_view kTagsHeader = "#tags B_INC INC B_EXC EXC O";

void append_weight_line(std::string& out, std::string_view kind,
                        std::string_view rest, double w) {
  if (w == 0.0) return;
  out += kind;
  out += ' ';
  out += rest;
  out += ' ';
  out += corpus::format_double(w);
  out += '\n';
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && line[p] == ' ') ++p;
    if (p >= line.size()) break;
    std::size_t e = p;
    while (e < line.size() && line[e] != ' ') ++e;
    fields.push_back(line.substr(p, e - p));
    p = e;
  }
  return fields;
}

int parse_tag_field(std::string_view field, int lineno) {
  auto tag = parse_tag(field);
  if (!tag) {
    throw Error(ErrorKind::MalformedModel,
                "unknown tag '" + std::string(field) + "'", lineno);
  }
  return static_cast<int>(*tag);
}

}  // namespace

std::string save_model(const CrfModel& model) {
  std::string out;
  out += "#version 1\n";
  out += "#type crf\n";
  out += kTagsHeader;
  out += '\n';
  out += "#config window " + std::to_string(model.config.window) + "\n";
  out += "#config affixes " + std::to_string(model.config.use_affixes ? 1 : 0) +
         "\n";
  out += "#config shape " + std::to_string(model.config.use_shape ? 1 : 0) +
         "\n";
  out += "#config emb_dim " + std::to_string(model.embedding_dim) + "\n";
  out += "#config l2 " + corpus::format_double(model.l2) + "\n";

  for (int t = 0; t < kNumTags; ++t) {
    append_weight_line(out, "B", tag_name(static_cast<BioTag>(t)),
                       model.begin[t]);
  }
  for (int t = 0; t < kNumTags; ++t) {
    append_weight_line(out, "E", tag_name(static_cast<BioTag>(t)),
                       model.end[t]);
  }
  for (int a = 0; a < kNumTags; ++a) {
    for (int b = 0; b < kNumTags; ++b) {
      std::string rest(tag_name(static_cast<BioTag>(a)));
      rest += ' ';
      rest += tag_name(static_cast<BioTag>(b));
      append_weight_line(out, "T", rest, model.trans[a][b]);
    }
  }
  for (int f = 0; f < model.symbols.size(); ++f) {
    const std::string& name = model.symbols.name(f);
    if (name.find('\t') != std::string::npos ||
        name.find('\n') != std::string::npos) {
      throw Error(ErrorKind::InvalidInput,
                  "feature name contains a tab or newline: '" + name + "'");
    }
    for (int t = 0; t < kNumTags; ++t) {
      std::string rest = name;
      rest += ' ';
      rest += tag_name(static_cast<BioTag>(t));
      append_weight_line(out, "U", rest, model.unary[f][t]);
    }
  }
  return out;
}

CrfModel load_model(std::string_view text) {
  CrfModel model;

  std::vector<std::string_view> lines;
  {
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
  if (lines.size() < 2 || lines[1] != "#type crf") {
    throw Error(ErrorKind::MalformedModel, "expected '#type crf'", 2);
  }
  if (lines.size() < 3 || lines[2] != kTagsHeader) {
    throw Error(ErrorKind::MalformedModel, "unexpected tag set", 3);
  }

  for (std::size_t li = 3; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty()) continue;
    if (line.starts_with("#config ")) {
      auto fields = split_spaces(line.substr(8));
      if (fields.size() != 2) {
        throw Error(ErrorKind::MalformedModel, "malformed #config line",
                    lineno);
      }
      if (fields[0] == "window") {
        model.config.window = static_cast<int>(
            corpus::parse_double(fields[1], lineno));
      } else if (fields[0] == "affixes") {
        model.config.use_affixes = fields[1] != "0";
      } else if (fields[0] == "shape") {
        model.config.use_shape = fields[1] != "0";
      } else if (fields[0] == "emb_dim") {
        model.embedding_dim =
            static_cast<int>(corpus::parse_double(fields[1], lineno));
      } else if (fields[0] == "l2") {
        model.l2 = corpus::parse_double(fields[1], lineno);
      }
      // Unknown keys are ignored.
      continue;
    }
    if (line.starts_with("#")) continue;

    if (line.starts_with("B ") || line.starts_with("E ")) {
      auto fields = split_spaces(line);
      if (fields.size() != 3) {
        throw Error(ErrorKind::MalformedModel, "malformed boundary line",
                    lineno);
      }
      int t = parse_tag_field(fields[1], lineno);
      double w = corpus::parse_double(fields[2], lineno);
      (line[0] == 'B' ? model.begin : model.end)[t] = w;
      continue;
    }
    if (line.starts_with("T ")) {
      auto fields = split_spaces(line);
      if (fields.size() != 4) {
        throw Error(ErrorKind::MalformedModel, "malformed transition line",
                    lineno);
      }
      int a = parse_tag_field(fields[1], lineno);
      int b = parse_tag_field(fields[2], lineno);
      model.trans[a][b] = corpus::parse_double(fields[3], lineno);
      continue;
    }
    if (line.starts_with("U ")) {
      // Feature names may contain spaces; the tag and weight are the last
      // two space-separated fields.
      std::string_view rest = line.substr(2);
      std::size_t wpos = rest.rfind(' ');
      if (wpos == std::string_view::npos || wpos == 0) {
        throw Error(ErrorKind::MalformedModel, "malformed unary line", lineno);
      }
      std::string_view wstr = rest.substr(wpos + 1);
      std::size_t tpos = rest.rfind(' ', wpos - 1);
      if (tpos == std::string_view::npos || tpos == 0) {
        throw Error(ErrorKind::MalformedModel, "malformed unary line", lineno);
      }
      std::string_view tstr = rest.substr(tpos + 1, wpos - tpos - 1);
      std::string name(rest.substr(0, tpos));
      if (name.empty()) {
        throw Error(ErrorKind::MalformedModel, "empty feature name", lineno);
      }
      int t = parse_tag_field(tstr, lineno);
      int fid = model.symbols.intern(name);
      if (fid >= static_cast<int>(model.unary.size())) {
        model.unary.resize(fid + 1, TagArray{});
      }
      model.unary[fid][t] = corpus::parse_double(wstr, lineno);
      continue;
    }
    throw Error(ErrorKind::MalformedModel,
                "unrecognized line '" + std::string(line) + "'", lineno);
  }
  return model;
}

}  // namespace incexc::tagger
