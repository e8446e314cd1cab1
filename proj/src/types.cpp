#include "incexc/types.hpp"

namespace incexc {

namespace {

constexpr std::array<std::string_view, kNumTags> kTagNames = {
    "B_INC", "INC", "B_EXC", "EXC", "O"};

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "age_height", "claustrophobia", "couples_family", "crowd",
    "food",       "handicap",       "hygiene",        "parking",
    "price",      "queues",         "time"};

}  // namespace

std::string_view tag_name(BioTag tag) {
  return kTagNames[static_cast<int>(tag)];
}

std::optional<BioTag> parse_tag(std::string_view name) {
  for (int i = 0; i < kNumTags; ++i) {
    if (kTagNames[i] == name) return static_cast<BioTag>(i);
  }
  return std::nullopt;
}

bool is_begin_tag(BioTag tag) {
  return tag == BioTag::BInc || tag == BioTag::BExc;
}

std::optional<Polarity> tag_polarity(BioTag tag) {
  switch (tag) {
    case BioTag::BInc:
    case BioTag::Inc:
      return Polarity::Inclusion;
    case BioTag::BExc:
    case BioTag::Exc:
      return Polarity::Exclusion;
    case BioTag::Outside:
      return std::nullopt;
  }
  return std::nullopt;
}

BioTag begin_tag(Polarity polarity) {
  return polarity == Polarity::Inclusion ? BioTag::BInc : BioTag::BExc;
}

BioTag inside_tag(Polarity polarity) {
  return polarity == Polarity::Inclusion ? BioTag::Inc : BioTag::Exc;
}

std::string_view polarity_name(Polarity polarity) {
  return polarity == Polarity::Inclusion ? "inclusion" : "exclusion";
}

std::optional<Polarity> parse_polarity(std::string_view name) {
  if (name == "inclusion") return Polarity::Inclusion;
  if (name == "exclusion") return Polarity::Exclusion;
  return std::nullopt;
}

std::string_view category_name(Category category) {
  return kCategoryNames[static_cast<int>(category)];
}

std::optional<Category> parse_category(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::UnknownTag: return "UnknownTag";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnparsableNumber: return "UnparsableNumber";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::OverlappingPhrases: return "OverlappingPhrases";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::MalformedModel: return "MalformedModel";
    case ErrorKind::Misaligned: return "Misaligned";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

namespace {

std::string build_message(ErrorKind kind, const std::string& message,
                          int line) {
  std::string out(error_kind_name(kind));
  out += ": ";
  out += message;
  if (line > 0) {
    out += " (line ";
    out += std::to_string(line);
    out += ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, int line)
    : std::runtime_error(build_message(kind, message, line)),
      kind_(kind),
      line_(line) {}

}  // namespace incexc
