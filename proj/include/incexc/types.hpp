#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace incexc {

inline constexpr int kNumTags = 5;
inline constexpr int kNumCategories = 11;

// Canonical tag order; used for tie-breaking and serialization.
enum class BioTag : std::uint8_t {
  BInc = 0,
  Inc = 1,
  BExc = 2,
  Exc = 3,
  Outside = 4,
};

enum class Polarity : std::uint8_t {
  Inclusion = 0,
  Exclusion = 1,
};

// Canonical category order.
enum class Category : std::uint8_t {
  AgeHeight = 0,
  Claustrophobia = 1,
  CouplesFamily = 2,
  Crowd = 3,
  Food = 4,
  Handicap = 5,
  Hygiene = 6,
  Parking = 7,
  Price = 8,
  Queues = 9,
  Time = 10,
};

inline constexpr std::array<BioTag, kNumTags> kAllTags = {
    BioTag::BInc, BioTag::Inc, BioTag::BExc, BioTag::Exc, BioTag::Outside};

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::AgeHeight, Category::Claustrophobia, Category::CouplesFamily,
    Category::Crowd,     Category::Food,           Category::Handicap,
    Category::Hygiene,   Category::Parking,        Category::Price,
    Category::Queues,    Category::Time};

std::string_view tag_name(BioTag tag);
std::optional<BioTag> parse_tag(std::string_view name);
bool is_begin_tag(BioTag tag);
std::optional<Polarity> tag_polarity(BioTag tag);
BioTag begin_tag(Polarity polarity);
BioTag inside_tag(Polarity polarity);

std::string_view polarity_name(Polarity polarity);
std::optional<Polarity> parse_polarity(std::string_view name);

std::string_view category_name(Category category);
std::optional<Category> parse_category(std::string_view name);

struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  std::string source_spot;  // empty when unknown

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

struct LabeledSentence {
  Sentence sentence;
  std::vector<BioTag> tags;  // one per token

  bool operator==(const LabeledSentence&) const = default;
};

// Contiguous token span [start, end) with polarity and optional category.
struct Phrase {
  std::string sentence_id;
  int start = 0;
  int end = 0;
  Polarity polarity = Polarity::Inclusion;
  std::optional<Category> category;
  std::string text;  // space-joined tokens of the span

  int length() const { return end - start; }
  bool operator==(const Phrase&) const = default;
};

struct KeywordLexicon {
  // Indexed by canonical category order; keywords are lowercase, trimmed.
  std::array<std::set<std::string>, kNumCategories> keywords;

  std::set<std::string>& of(Category c) {
    return keywords[static_cast<int>(c)];
  }
  const std::set<std::string>& of(Category c) const {
    return keywords[static_cast<int>(c)];
  }
  std::size_t total_keywords() const {
    std::size_t n = 0;
    for (const auto& s : keywords) n += s.size();
    return n;
  }
};

enum class ErrorKind {
  MalformedLine,
  UnknownTag,
  EmptyDataset,
  UnknownCategory,
  DimensionMismatch,
  UnparsableNumber,
  LengthMismatch,
  OverlappingPhrases,
  OutOfBounds,
  IndexOutOfRange,
  VersionMismatch,
  MalformedModel,
  Misaligned,
  DegenerateData,
  EmptyData,
  EmptyInput,
  InvalidInput,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0);

  ErrorKind kind() const { return kind_; }
  // 1-based line in the offending input, 0 when not applicable.
  int line() const { return line_; }

 private:
  ErrorKind kind_;
  int line_;
};

// Shared trainer settings (AdaGrad with per-example updates).
struct TrainConfig {
  double l2 = 0.1;
  int epochs = 50;
  double learning_rate = 0.1;
  std::uint64_t seed = 42;
};

}  // namespace incexc
