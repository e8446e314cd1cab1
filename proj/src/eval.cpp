#include "incexc/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "incexc/corpus.hpp"

namespace incexc::eval {

namespace {

using Span = std::pair<int, int>;  // [start, end)

// sentence_id -> spans of the given polarity
std::map<std::string, std::vector<Span>> group_spans(
    std::span<const Phrase> phrases, Polarity polarity) {
  std::map<std::string, std::vector<Span>> groups;
  for (const Phrase& p : phrases) {
    if (p.polarity == polarity) {
      groups[p.sentence_id].emplace_back(p.start, p.end);
    }
  }
  return groups;
}

std::vector<Span> merge_spans(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> merged;
  for (const Span& s : spans) {
    if (!merged.empty() && s.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, s.second);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

int covered_tokens(const Span& span, const std::vector<Span>& merged) {
  int covered = 0;
  for (const Span& m : merged) {
    covered += std::max(0, std::min(span.second, m.second) -
                               std::max(span.first, m.first));
  }
  return covered;
}

// Shared scaffolding of the two overlap metrics: `credit` maps (covered
// token count, span length) to this span's score contribution. Credits are
// summed in input order of the scored side.
template <typename Credit>
SpanPRF overlap_metric(std::span<const Phrase> gold,
                       std::span<const Phrase> pred, Polarity polarity,
                       Credit credit) {
  auto side = [&](std::span<const Phrase> scored,
                  std::span<const Phrase> other) {
    std::map<std::string, std::vector<Span>> merged;
    for (auto& [sid, spans] : group_spans(other, polarity)) {
      merged[sid] = merge_spans(std::move(spans));
    }

    double total_credit = 0.0;
    long count = 0;
    static const std::vector<Span> kNoSpans;
    for (const Phrase& p : scored) {
      if (p.polarity != polarity) continue;
      ++count;
      auto it = merged.find(p.sentence_id);
      const std::vector<Span>& spans = it == merged.end() ? kNoSpans : it->second;
      total_credit += credit(covered_tokens({p.start, p.end}, spans),
                             p.end - p.start);
    }
    return count == 0 ? 0.0 : total_credit / static_cast<double>(count);
  };

  return make_prf(side(pred, gold), side(gold, pred));
}

long count_polarity(std::span<const Phrase> phrases, Polarity polarity) {
  long n = 0;
  for (const Phrase& p : phrases) {
    if (p.polarity == polarity) ++n;
  }
  return n;
}

ClassReport build_class_report(
    const std::vector<std::pair<int, int>>& instances,
    std::vector<std::string> class_names) {
  int k = static_cast<int>(class_names.size());
  ClassReport report;
  report.class_names = std::move(class_names);
  report.confusion.assign(k, std::vector<long>(k, 0));
  report.instances = static_cast<long>(instances.size());

  for (const auto& [gold, pred] : instances) {
    ++report.confusion[gold][pred];
  }

  std::vector<long> pred_count(k, 0);
  report.support.assign(k, 0);
  long correct = 0;
  for (int g = 0; g < k; ++g) {
    for (int p = 0; p < k; ++p) {
      report.support[g] += report.confusion[g][p];
      pred_count[p] += report.confusion[g][p];
    }
    correct += report.confusion[g][g];
  }
  report.accuracy = report.instances == 0
                        ? 0.0
                        : static_cast<double>(correct) /
                              static_cast<double>(report.instances);

  report.per_class.resize(k);
  double wp = 0.0, wr = 0.0, wf = 0.0;
  double mp = 0.0, mr = 0.0, mf = 0.0;
  for (int c = 0; c < k; ++c) {
    long tp = report.confusion[c][c];
    double precision =
        pred_count[c] == 0
            ? 0.0
            : static_cast<double>(tp) / static_cast<double>(pred_count[c]);
    double recall =
        report.support[c] == 0
            ? 0.0
            : static_cast<double>(tp) / static_cast<double>(report.support[c]);
    report.per_class[c] = make_prf(precision, recall);
    wp += report.support[c] * report.per_class[c].precision;
    wr += report.support[c] * report.per_class[c].recall;
    wf += report.support[c] * report.per_class[c].f1;
    mp += report.per_class[c].precision;
    mr += report.per_class[c].recall;
    mf += report.per_class[c].f1;
  }
  if (report.instances > 0) {
    double n = static_cast<double>(report.instances);
    report.weighted = SpanPRF{wp / n, wr / n, wf / n};
  }
  report.macro = SpanPRF{mp / k, mr / k, mf / k};
  return report;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void kv_prf(std::string& out, const std::string& prefix, const SpanPRF& prf) {
  out += prefix + ".precision = " + corpus::format_double(prf.precision) + "\n";
  out += prefix + ".recall = " + corpus::format_double(prf.recall) + "\n";
  out += prefix + ".f1 = " + corpus::format_double(prf.f1) + "\n";
}

}  // namespace

SpanPRF make_prf(double precision, double recall) {
  SpanPRF prf;
  prf.precision = precision;
  prf.recall = recall;
  prf.f1 = (precision + recall) == 0.0
               ? 0.0
               : 2.0 * precision * recall / (precision + recall);
  return prf;
}

SpanPRF binary_overlap(std::span<const Phrase> gold,
                       std::span<const Phrase> pred, Polarity polarity) {
  return overlap_metric(gold, pred, polarity, [](int covered, int) {
    return covered > 0 ? 1.0 : 0.0;
  });
}

SpanPRF proportional_overlap(std::span<const Phrase> gold,
                             std::span<const Phrase> pred, Polarity polarity) {
  return overlap_metric(gold, pred, polarity, [](int covered, int length) {
    return static_cast<double>(covered) / static_cast<double>(length);
  });
}

EvalReport overlap_report(std::span<const Phrase> gold,
                          std::span<const Phrase> pred) {
  EvalReport report;
  for (Polarity polarity : {Polarity::Inclusion, Polarity::Exclusion}) {
    PolarityEval& pe = report.of(polarity);
    pe.binary = binary_overlap(gold, pred, polarity);
    pe.proportional = proportional_overlap(gold, pred, polarity);
    pe.gold_count = count_polarity(gold, polarity);
    pe.pred_count = count_polarity(pred, polarity);
  }
  return report;
}

EvalReport evaluate_tag_file(std::string_view gold_text,
                             std::string_view pred_text) {
  auto gold_data = corpus::parse_dataset(gold_text);
  auto pred_data = corpus::parse_dataset(pred_text);
  if (gold_data.size() != pred_data.size()) {
    throw Error(ErrorKind::Misaligned,
                "sentence counts differ: " + std::to_string(gold_data.size()) +
                    " gold vs " + std::to_string(pred_data.size()) + " pred");
  }

  std::vector<Phrase> gold_phrases, pred_phrases;
  for (std::size_t i = 0; i < gold_data.size(); ++i) {
    if (gold_data[i].tags.size() != pred_data[i].tags.size()) {
      throw Error(ErrorKind::Misaligned,
                  "sentence " + std::to_string(i) + " lengths differ: " +
                      std::to_string(gold_data[i].tags.size()) + " gold vs " +
                      std::to_string(pred_data[i].tags.size()) + " pred");
    }
    // Sentences correspond by position regardless of their ids.
    Sentence keyed = gold_data[i].sentence;
    keyed.id = std::to_string(i);
    for (Phrase& p : corpus::decode_phrases(gold_data[i].tags, keyed)) {
      gold_phrases.push_back(std::move(p));
    }
    for (Phrase& p : corpus::decode_phrases(pred_data[i].tags, keyed)) {
      pred_phrases.push_back(std::move(p));
    }
  }
  return overlap_report(gold_phrases, pred_phrases);
}

ClassReport classification_report(std::span<const Category> gold,
                                  std::span<const Category> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "gold has " + std::to_string(gold.size()) + " labels, pred " +
                    std::to_string(pred.size()));
  }
  if (gold.empty()) {
    throw Error(ErrorKind::EmptyInput, "no labels to score");
  }
  std::vector<std::pair<int, int>> instances;
  instances.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    instances.emplace_back(static_cast<int>(gold[i]),
                           static_cast<int>(pred[i]));
  }
  std::vector<std::string> names;
  for (Category c : kAllCategories) names.emplace_back(category_name(c));
  return build_class_report(instances, std::move(names));
}

E2eReport end_to_end(std::span<const Phrase> gold,
                     std::span<const Phrase> pred) {
  for (const Phrase& p : gold) {
    if (!p.category) {
      throw Error(ErrorKind::InvalidInput,
                  "gold phrase without category in sentence '" +
                      p.sentence_id + "'");
    }
  }
  for (const Phrase& p : pred) {
    if (!p.category) {
      throw Error(ErrorKind::InvalidInput,
                  "predicted phrase without category in sentence '" +
                      p.sentence_id + "'");
    }
  }

  // sentence_id -> gold phrase indices, ordered by start for the tie-break.
  std::map<std::string, std::vector<std::size_t>> gold_index;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    gold_index[gold[g].sentence_id].push_back(g);
  }
  for (auto& [sid, indices] : gold_index) {
    std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      if (gold[a].start != gold[b].start) return gold[a].start < gold[b].start;
      return gold[a].end < gold[b].end;
    });
  }

  constexpr int kSink = kNumCategories;
  std::vector<bool> recalled(gold.size(), false);
  std::vector<std::pair<int, int>> instances;
  instances.reserve(pred.size());

  E2eReport report;
  report.gold_count = static_cast<long>(gold.size());
  report.pred_count = static_cast<long>(pred.size());

  std::array<long, 2> correct_by_polarity{};
  std::array<long, 2> pred_by_polarity{};
  std::array<long, 2> gold_by_polarity{};
  std::array<long, 2> recalled_by_polarity{};
  for (const Phrase& g : gold) {
    ++gold_by_polarity[static_cast<int>(g.polarity)];
  }

  for (const Phrase& p : pred) {
    ++pred_by_polarity[static_cast<int>(p.polarity)];

    int best_intersection = 0;
    std::size_t best_g = gold.size();
    auto it = gold_index.find(p.sentence_id);
    if (it != gold_index.end()) {
      for (std::size_t g : it->second) {
        if (gold[g].polarity != p.polarity) continue;
        int intersection = std::min(p.end, gold[g].end) -
                           std::max(p.start, gold[g].start);
        if (intersection > best_intersection) {  // ties keep smaller start
          best_intersection = intersection;
          best_g = g;
        }
      }
    }

    if (best_g == gold.size()) {
      ++report.sink;
      instances.emplace_back(kSink, static_cast<int>(*p.category));
      continue;
    }
    int assigned = static_cast<int>(*gold[best_g].category);
    instances.emplace_back(assigned, static_cast<int>(*p.category));
    if (assigned == static_cast<int>(*p.category)) {
      ++report.correct;
      ++correct_by_polarity[static_cast<int>(p.polarity)];
      recalled[best_g] = true;
    }
  }

  long recalled_total = 0;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (recalled[g]) {
      ++recalled_total;
      ++recalled_by_polarity[static_cast<int>(gold[g].polarity)];
    }
  }

  auto prf = [](long correct, long preds, long hit, long golds) {
    double precision =
        preds == 0 ? 0.0
                   : static_cast<double>(correct) / static_cast<double>(preds);
    double recall =
        golds == 0 ? 0.0
                   : static_cast<double>(hit) / static_cast<double>(golds);
    return make_prf(precision, recall);
  };

  report.overall =
      prf(report.correct, report.pred_count, recalled_total, report.gold_count);
  report.inclusion = prf(correct_by_polarity[0], pred_by_polarity[0],
                         recalled_by_polarity[0], gold_by_polarity[0]);
  report.exclusion = prf(correct_by_polarity[1], pred_by_polarity[1],
                         recalled_by_polarity[1], gold_by_polarity[1]);

  std::vector<std::string> names;
  for (Category c : kAllCategories) names.emplace_back(category_name(c));
  names.emplace_back("sink");
  report.classes = build_class_report(instances, std::move(names));
  return report;
}

// ---- Rendering ---------------------------------------------------------------

namespace {

void render_eval_kv(std::string& out, const EvalReport& report) {
  for (Polarity polarity : {Polarity::Inclusion, Polarity::Exclusion}) {
    const PolarityEval& pe = report.of(polarity);
    std::string base = "spans." + std::string(polarity_name(polarity));
    out += base + ".gold = " + std::to_string(pe.gold_count) + "\n";
    out += base + ".pred = " + std::to_string(pe.pred_count) + "\n";
    kv_prf(out, base + ".binary", pe.binary);
    kv_prf(out, base + ".proportional", pe.proportional);
  }
}

void render_eval_text(std::string& out, const EvalReport& report) {
  out += "polarity   metric        precision  recall     f1         gold   pred\n";
  for (Polarity polarity : {Polarity::Inclusion, Polarity::Exclusion}) {
    const PolarityEval& pe = report.of(polarity);
    for (const auto& [label, prf] :
         {std::pair<const char*, const SpanPRF&>{"binary", pe.binary},
          std::pair<const char*, const SpanPRF&>{"proportional",
                                                 pe.proportional}}) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%-10s %-13s %-10s %-10s %-10s %-6ld %-6ld\n",
                    polarity_name(polarity).data(), label,
                    fmt4(prf.precision).c_str(), fmt4(prf.recall).c_str(),
                    fmt4(prf.f1).c_str(), pe.gold_count, pe.pred_count);
      out += buf;
    }
  }
}

void render_class_kv(std::string& out, const ClassReport& report,
                     const std::string& prefix) {
  out += prefix + ".instances = " + std::to_string(report.instances) + "\n";
  out += prefix + ".accuracy = " + corpus::format_double(report.accuracy) +
         "\n";
  kv_prf(out, prefix + ".weighted", report.weighted);
  kv_prf(out, prefix + ".macro", report.macro);
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    std::string base = prefix + "." + report.class_names[c];
    kv_prf(out, base, report.per_class[c]);
    out += base + ".support = " + std::to_string(report.support[c]) + "\n";
  }
  for (std::size_t g = 0; g < report.class_names.size(); ++g) {
    for (std::size_t p = 0; p < report.class_names.size(); ++p) {
      if (report.confusion[g][p] != 0) {
        out += prefix + ".confusion." + report.class_names[g] + "." +
               report.class_names[p] + " = " +
               std::to_string(report.confusion[g][p]) + "\n";
      }
    }
  }
}

void render_class_text(std::string& out, const ClassReport& report) {
  out += "class            precision  recall     f1         support\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s %-10s %-10s %-10s %ld\n",
                  report.class_names[c].c_str(),
                  fmt4(report.per_class[c].precision).c_str(),
                  fmt4(report.per_class[c].recall).c_str(),
                  fmt4(report.per_class[c].f1).c_str(), report.support[c]);
    out += buf;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "weighted         %-10s %-10s %-10s %ld\n",
                fmt4(report.weighted.precision).c_str(),
                fmt4(report.weighted.recall).c_str(),
                fmt4(report.weighted.f1).c_str(), report.instances);
  out += buf;
  std::snprintf(buf, sizeof(buf), "macro            %-10s %-10s %-10s\n",
                fmt4(report.macro.precision).c_str(),
                fmt4(report.macro.recall).c_str(),
                fmt4(report.macro.f1).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "accuracy         %s\n",
                fmt4(report.accuracy).c_str());
  out += buf;
}

}  // namespace

std::string render(const EvalReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Kv) {
    render_eval_kv(out, report);
  } else {
    render_eval_text(out, report);
  }
  return out;
}

std::string render(const ClassReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Kv) {
    render_class_kv(out, report, "classes");
  } else {
    render_class_text(out, report);
  }
  return out;
}

std::string render(const E2eReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Kv) {
    out += "e2e.gold = " + std::to_string(report.gold_count) + "\n";
    out += "e2e.pred = " + std::to_string(report.pred_count) + "\n";
    out += "e2e.correct = " + std::to_string(report.correct) + "\n";
    out += "e2e.sink = " + std::to_string(report.sink) + "\n";
    kv_prf(out, "e2e.overall", report.overall);
    kv_prf(out, "e2e.inclusion", report.inclusion);
    kv_prf(out, "e2e.exclusion", report.exclusion);
    render_class_kv(out, report.classes, "e2e.classes");
  } else {
    out += "partition  precision  recall     f1\n";
    for (const auto& [label, prf] :
         {std::pair<const char*, const SpanPRF&>{"overall", report.overall},
          std::pair<const char*, const SpanPRF&>{"inclusion", report.inclusion},
          std::pair<const char*, const SpanPRF&>{"exclusion",
                                                 report.exclusion}}) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%-10s %-10s %-10s %-10s\n", label,
                    fmt4(prf.precision).c_str(), fmt4(prf.recall).c_str(),
                    fmt4(prf.f1).c_str());
      out += buf;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "pred %ld  gold %ld  correct %ld  sink %ld\n",
                  report.pred_count, report.gold_count, report.correct,
                  report.sink);
    out += buf;
    out += "\n";
    render_class_text(out, report.classes);
  }
  return out;
}

}  // namespace incexc::eval
