#pragma once

#include <span>
#include <string>
#include <vector>

#include "incexc/types.hpp"

namespace incexc::eval {

struct SpanPRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// f1 = 2PR/(P+R), 0 when P+R == 0.
SpanPRF make_prf(double precision, double recall);

// Any token overlap between a predicted and a gold span counts as a full
// match. Only phrases of the given polarity participate; spans only match
// within the same sentence_id. Empty denominators yield 0.
SpanPRF binary_overlap(std::span<const Phrase> gold,
                       std::span<const Phrase> pred, Polarity polarity);

// Each span earns credit equal to the fraction of its tokens covered by the
// other side's token union.
SpanPRF proportional_overlap(std::span<const Phrase> gold,
                             std::span<const Phrase> pred, Polarity polarity);

struct PolarityEval {
  SpanPRF binary;
  SpanPRF proportional;
  long gold_count = 0;
  long pred_count = 0;
};

struct EvalReport {
  PolarityEval inclusion;
  PolarityEval exclusion;

  PolarityEval& of(Polarity p) {
    return p == Polarity::Inclusion ? inclusion : exclusion;
  }
  const PolarityEval& of(Polarity p) const {
    return p == Polarity::Inclusion ? inclusion : exclusion;
  }
};

EvalReport overlap_report(std::span<const Phrase> gold,
                          std::span<const Phrase> pred);

// Both files in the span dataset format; sentences correspond by position
// and token counts must agree.
EvalReport evaluate_tag_file(std::string_view gold_text,
                             std::string_view pred_text);

// Per-class metrics with support-weighted and macro aggregates. For the
// end-to-end protocol the class list grows by a final "sink" class.
struct ClassReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<long>> confusion;  // [gold][pred]
  std::vector<SpanPRF> per_class;
  std::vector<long> support;  // gold count per class
  long instances = 0;
  double accuracy = 0.0;
  SpanPRF weighted;
  SpanPRF macro;
};

ClassReport classification_report(std::span<const Category> gold,
                                  std::span<const Category> pred);

// End-to-end scoring of mined-and-categorized phrases: every predicted
// phrase is assigned the gold label of the same-sentence, same-polarity gold
// phrase with maximum token intersection (ties -> smaller gold start);
// zero-intersection predictions fall into the sink class and only hurt
// precision. A gold phrase counts as recalled when some correctly-labeled
// prediction is assigned to it.
struct E2eReport {
  SpanPRF overall;
  SpanPRF inclusion;
  SpanPRF exclusion;
  long gold_count = 0;
  long pred_count = 0;
  long correct = 0;
  long sink = 0;
  ClassReport classes;  // 12 classes, "sink" last
};

E2eReport end_to_end(std::span<const Phrase> gold, std::span<const Phrase> pred);

enum class ReportFormat { Text, Kv };

std::string render(const EvalReport& report, ReportFormat format);
std::string render(const ClassReport& report, ReportFormat format);
std::string render(const E2eReport& report, ReportFormat format);

}  // namespace incexc::eval
