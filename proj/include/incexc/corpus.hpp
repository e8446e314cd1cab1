#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incexc/types.hpp"

namespace incexc::corpus {

// --- Span dataset files (CoNLL-style "token<TAB>tag" lines) ---------------

std::vector<LabeledSentence> parse_dataset(std::string_view text);
std::string serialize_dataset(const std::vector<LabeledSentence>& sentences);

// Same block layout, tag column optional and ignored. Used for inputs that
// only carry tokens (e.g. text to be tagged).
std::vector<Sentence> parse_token_file(std::string_view text);

// --- Category dataset files ("category<TAB>phrase text" lines) ------------

struct CategoryExample {
  Category category = Category::AgeHeight;
  std::string text;                 // phrase text as written
  std::vector<std::string> tokens;  // whitespace-split phrase tokens
};

std::vector<CategoryExample> parse_category_file(std::string_view text);
std::string serialize_category_file(const std::vector<CategoryExample>& rows);

// --- Keyword lexicon -------------------------------------------------------

KeywordLexicon load_lexicon(std::string_view text);

struct FilteredSentence {
  Sentence sentence;
  std::set<Category> categories;  // every category with a matching keyword
};

// Keeps sentences where some token, lowercased, exactly equals a lexicon
// keyword. Input order preserved.
std::vector<FilteredSentence> filter_sentences(
    const std::vector<Sentence>& sentences, const KeywordLexicon& lexicon);

// --- BIO tags <-> phrase spans ---------------------------------------------

// Turns a tag sequence into phrases. Structurally invalid sequences are
// repaired: an inside tag with no compatible open phrase acts as a begin
// tag, and a begin tag closes whatever phrase is open.
std::vector<Phrase> decode_phrases(std::span<const BioTag> tags,
                                   const Sentence& sentence);

// Inverse of decode_phrases for pairwise-disjoint spans within [0, length).
std::vector<BioTag> encode_tags(std::span<const Phrase> phrases, int length);

// --- Statistics ------------------------------------------------------------

struct TagStats {
  long sentences = 0;
  long tokens = 0;
  std::array<long, kNumTags> tag_counts{};
  long phrases_total = 0;
  std::array<long, 2> phrases_by_polarity{};  // indexed by Polarity
};

TagStats dataset_stats(const std::vector<LabeledSentence>& sentences);

struct CategoryStats {
  long total = 0;
  std::array<long, kNumCategories> counts{};
};

CategoryStats category_stats(const std::vector<CategoryExample>& rows);

// --- Tokenization for raw text ---------------------------------------------

// Splits on whitespace, then peels leading/trailing ASCII punctuation into
// separate single-character tokens.
std::vector<std::string> tokenize(std::string_view text);

// --- Phrase files (pipeline output / end-to-end gold) ----------------------
//
// Line-oriented: a "#sent <id>" line starts each sentence record, followed
// by one tab-separated line per phrase:
//   <start>\t<end>\t<polarity>\t<category>\t<probability>\t<text>
// The probability field may be "-" when unknown.

struct PhraseRecord {
  Phrase phrase;
  std::optional<double> probability;
};

struct SentencePhrases {
  std::string sentence_id;
  std::vector<PhraseRecord> phrases;
};

std::vector<SentencePhrases> parse_phrase_file(std::string_view text);
std::string serialize_phrase_file(const std::vector<SentencePhrases>& records);

// All phrases of all records, in file order.
std::vector<Phrase> flatten_phrases(const std::vector<SentencePhrases>& records);

// --- Small shared helpers ---------------------------------------------------

std::string to_lower(std::string_view s);  // ASCII lowercasing
std::string join_tokens(std::span<const std::string> tokens, int start, int end);

// Round-trip-exact decimal formatting/parsing for doubles.
std::string format_double(double value);
double parse_double(std::string_view text, int line);

}  // namespace incexc::corpus
