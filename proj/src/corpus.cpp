#include "incexc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

namespace incexc::corpus {

namespace {

// Keeps empty lines; a trailing newline does not produce a final empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
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
  return lines;
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::string synthetic_id(std::size_t index) {
  return "s" + std::to_string(index);
}

int parse_int(std::string_view field, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorKind::MalformedLine,
                "expected an integer, got '" + std::string(field) + "'", line);
  }
  return value;
}

std::vector<std::string_view> split_on_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

// Shared walker for span dataset / token files. Calls on_token(token, tag,
// line) per token line; tag is empty when the column is absent.
template <typename OnSentence, typename OnToken>
void walk_blocks(std::string_view text, bool require_tag,
                 OnSentence&& on_sentence_done, OnToken&& on_token) {
  auto lines = split_lines(text);
  bool in_sentence = false;
  std::string pending_id;

  auto finish = [&](int line) {
    if (in_sentence) on_sentence_done(line);
    in_sentence = false;
    pending_id.clear();
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty()) {
      finish(lineno);
      continue;
    }
    if (line.find('\t') == std::string_view::npos) {
      if (line.starts_with("#id ")) {
        pending_id = std::string(line.substr(4));
        continue;
      }
      if (line.starts_with("#")) continue;  // stray comment
      if (!require_tag) {
        // Token-only line.
        if (has_whitespace(line)) {
          throw Error(ErrorKind::MalformedLine,
                      "token contains whitespace", lineno);
        }
        on_token(line, std::string_view{}, lineno, pending_id, in_sentence);
        in_sentence = true;
        continue;
      }
      throw Error(ErrorKind::MalformedLine,
                  "expected 'token<TAB>tag', got '" + std::string(line) + "'",
                  lineno);
    }
    auto fields = split_on_tabs(line);
    if (fields.size() != 2 || fields[0].empty()) {
      throw Error(ErrorKind::MalformedLine,
                  "expected 'token<TAB>tag', got '" + std::string(line) + "'",
                  lineno);
    }
    if (has_whitespace(fields[0])) {
      throw Error(ErrorKind::MalformedLine, "token contains whitespace",
                  lineno);
    }
    on_token(fields[0], fields[1], lineno, pending_id, in_sentence);
    in_sentence = true;
  }
  finish(static_cast<int>(lines.size()));
}

}  // namespace

std::vector<LabeledSentence> parse_dataset(std::string_view text) {
  std::vector<LabeledSentence> out;
  LabeledSentence current;

  walk_blocks(
      text, /*require_tag=*/true,
      [&](int) {
        if (current.sentence.id.empty()) {
          current.sentence.id = synthetic_id(out.size());
        }
        out.push_back(std::move(current));
        current = LabeledSentence{};
      },
      [&](std::string_view token, std::string_view tag, int lineno,
          std::string& pending_id, bool in_sentence) {
        if (!in_sentence && !pending_id.empty()) {
          current.sentence.id = pending_id;
        }
        auto parsed = parse_tag(tag);
        if (!parsed) {
          throw Error(ErrorKind::UnknownTag,
                      "unknown tag '" + std::string(tag) + "'", lineno);
        }
        current.sentence.tokens.emplace_back(token);
        current.tags.push_back(*parsed);
      });

  if (out.empty()) {
    throw Error(ErrorKind::EmptyDataset, "no sentences in input");
  }
  return out;
}

std::string serialize_dataset(const std::vector<LabeledSentence>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const LabeledSentence& ls = sentences[i];
    if (i > 0) out += '\n';
    if (ls.sentence.id != synthetic_id(i)) {
      out += "#id ";
      out += ls.sentence.id;
      out += '\n';
    }
    for (std::size_t t = 0; t < ls.sentence.tokens.size(); ++t) {
      out += ls.sentence.tokens[t];
      out += '\t';
      out += tag_name(ls.tags[t]);
      out += '\n';
    }
  }
  return out;
}

std::vector<Sentence> parse_token_file(std::string_view text) {
  std::vector<Sentence> out;
  Sentence current;

  walk_blocks(
      text, /*require_tag=*/false,
      [&](int) {
        if (current.id.empty()) current.id = synthetic_id(out.size());
        out.push_back(std::move(current));
        current = Sentence{};
      },
      [&](std::string_view token, std::string_view, int,
          std::string& pending_id, bool in_sentence) {
        if (!in_sentence && !pending_id.empty()) current.id = pending_id;
        current.tokens.emplace_back(token);
      });

  return out;
}

std::vector<CategoryExample> parse_category_file(std::string_view text) {
  std::vector<CategoryExample> out;
  auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty()) continue;
    if (line.starts_with("#") && line.find('\t') == std::string_view::npos) {
      continue;
    }
    auto fields = split_on_tabs(line);
    if (fields.size() != 2 || fields[1].empty()) {
      throw Error(ErrorKind::MalformedLine,
                  "expected 'category<TAB>phrase text'", lineno);
    }
    auto category = parse_category(fields[0]);
    if (!category) {
      throw Error(ErrorKind::UnknownCategory,
                  "unknown category '" + std::string(fields[0]) + "'", lineno);
    }
    CategoryExample row;
    row.category = *category;
    row.text = std::string(fields[1]);
    row.tokens = tokenize(row.text);
    if (row.tokens.empty()) {
      throw Error(ErrorKind::MalformedLine, "phrase text has no tokens",
                  lineno);
    }
    out.push_back(std::move(row));
  }
  if (out.empty()) {
    throw Error(ErrorKind::EmptyDataset, "no phrases in input");
  }
  return out;
}

std::string serialize_category_file(const std::vector<CategoryExample>& rows) {
  std::string out;
  for (const CategoryExample& row : rows) {
    out += category_name(row.category);
    out += '\t';
    out += row.text;
    out += '\n';
  }
  return out;
}

KeywordLexicon load_lexicon(std::string_view text) {
  KeywordLexicon lexicon;
  auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty() || line.starts_with("#")) continue;
    auto fields = split_on_tabs(line);
    if (fields.size() != 2) {
      throw Error(ErrorKind::MalformedLine,
                  "expected 'category<TAB>keyword'", lineno);
    }
    auto category = parse_category(fields[0]);
    if (!category) {
      throw Error(ErrorKind::UnknownCategory,
                  "unknown category '" + std::string(fields[0]) + "'", lineno);
    }
    std::string_view keyword = fields[1];
    while (!keyword.empty() && std::isspace((unsigned char)keyword.front())) {
      keyword.remove_prefix(1);
    }
    while (!keyword.empty() && std::isspace((unsigned char)keyword.back())) {
      keyword.remove_suffix(1);
    }
    if (keyword.empty()) {
      throw Error(ErrorKind::MalformedLine, "empty keyword", lineno);
    }
    lexicon.of(*category).insert(to_lower(keyword));
  }
  return lexicon;
}

std::vector<FilteredSentence> filter_sentences(
    const std::vector<Sentence>& sentences, const KeywordLexicon& lexicon) {
  // keyword -> categories it belongs to
  std::unordered_map<std::string_view, std::vector<Category>> index;
  for (Category c : kAllCategories) {
    for (const std::string& kw : lexicon.of(c)) {
      index[kw].push_back(c);
    }
  }

  std::vector<FilteredSentence> out;
  for (const Sentence& sentence : sentences) {
    std::set<Category> matched;
    for (const std::string& token : sentence.tokens) {
      auto it = index.find(std::string_view(to_lower(token)));
      if (it != index.end()) {
        matched.insert(it->second.begin(), it->second.end());
      }
    }
    if (!matched.empty()) {
      out.push_back(FilteredSentence{sentence, std::move(matched)});
    }
  }
  return out;
}

std::vector<Phrase> decode_phrases(std::span<const BioTag> tags,
                                   const Sentence& sentence) {
  if (static_cast<int>(tags.size()) != sentence.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "tag sequence length " + std::to_string(tags.size()) +
                    " != token count " + std::to_string(sentence.size()));
  }

  std::vector<Phrase> out;
  int open_start = -1;
  Polarity open_polarity = Polarity::Inclusion;

  auto close = [&](int end) {
    if (open_start < 0) return;
    Phrase p;
    p.sentence_id = sentence.id;
    p.start = open_start;
    p.end = end;
    p.polarity = open_polarity;
    p.text = join_tokens(sentence.tokens, p.start, p.end);
    out.push_back(std::move(p));
    open_start = -1;
  };

  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    BioTag tag = tags[i];
    auto polarity = tag_polarity(tag);
    if (!polarity) {  // O
      close(i);
      continue;
    }
    if (is_begin_tag(tag)) {
      close(i);
      open_start = i;
      open_polarity = *polarity;
      continue;
    }
    // Inside tag: extends a compatible open phrase, otherwise repaired to
    // act as a begin tag.
    if (open_start >= 0 && open_polarity == *polarity) continue;
    close(i);
    open_start = i;
    open_polarity = *polarity;
  }
  close(static_cast<int>(tags.size()));
  return out;
}

std::vector<BioTag> encode_tags(std::span<const Phrase> phrases, int length) {
  if (length < 0) {
    throw Error(ErrorKind::OutOfBounds, "negative length");
  }
  std::vector<BioTag> tags(static_cast<std::size_t>(length), BioTag::Outside);
  std::vector<bool> claimed(static_cast<std::size_t>(length), false);
  for (const Phrase& p : phrases) {
    if (p.start < 0 || p.end > length || p.start >= p.end) {
      throw Error(ErrorKind::OutOfBounds,
                  "span [" + std::to_string(p.start) + ", " +
                      std::to_string(p.end) + ") not within [0, " +
                      std::to_string(length) + ")");
    }
    for (int i = p.start; i < p.end; ++i) {
      if (claimed[i]) {
        throw Error(ErrorKind::OverlappingPhrases,
                    "token " + std::to_string(i) +
                        " is covered by two phrases");
      }
      claimed[i] = true;
      tags[i] = (i == p.start) ? begin_tag(p.polarity)
                               : inside_tag(p.polarity);
    }
  }
  return tags;
}

TagStats dataset_stats(const std::vector<LabeledSentence>& sentences) {
  TagStats stats;
  stats.sentences = static_cast<long>(sentences.size());
  for (const LabeledSentence& ls : sentences) {
    stats.tokens += ls.tags.size();
    for (BioTag tag : ls.tags) {
      ++stats.tag_counts[static_cast<int>(tag)];
    }
    for (const Phrase& p : decode_phrases(ls.tags, ls.sentence)) {
      ++stats.phrases_total;
      ++stats.phrases_by_polarity[static_cast<int>(p.polarity)];
    }
  }
  return stats;
}

CategoryStats category_stats(const std::vector<CategoryExample>& rows) {
  CategoryStats stats;
  stats.total = static_cast<long>(rows.size());
  for (const CategoryExample& row : rows) {
    ++stats.counts[static_cast<int>(row.category)];
  }
  return stats;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  auto is_ascii_punct = [](char c) {
    return std::ispunct((unsigned char)c) != 0 &&
           static_cast<unsigned char>(c) < 0x80;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace((unsigned char)text[end])) ++end;
    std::string_view chunk = text.substr(pos, end - pos);
    pos = end;

    std::size_t lo = 0, hi = chunk.size();
    while (lo < hi && is_ascii_punct(chunk[lo])) ++lo;
    while (hi > lo && is_ascii_punct(chunk[hi - 1])) --hi;
    for (std::size_t i = 0; i < lo; ++i) tokens.emplace_back(1, chunk[i]);
    if (lo < hi) tokens.emplace_back(chunk.substr(lo, hi - lo));
    for (std::size_t i = hi; i < chunk.size(); ++i) {
      tokens.emplace_back(1, chunk[i]);
    }
  }
  return tokens;
}

std::vector<SentencePhrases> parse_phrase_file(std::string_view text) {
  std::vector<SentencePhrases> out;
  auto lines = split_lines(text);
  bool have_sentence = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty()) continue;
    if (line.starts_with("#sent ")) {
      SentencePhrases record;
      record.sentence_id = std::string(line.substr(6));
      if (record.sentence_id.empty()) {
        throw Error(ErrorKind::MalformedLine, "empty sentence id", lineno);
      }
      out.push_back(std::move(record));
      have_sentence = true;
      continue;
    }
    if (line.starts_with("#")) continue;
    if (!have_sentence) {
      throw Error(ErrorKind::MalformedLine,
                  "phrase line before any '#sent' line", lineno);
    }
    auto fields = split_on_tabs(line);
    if (fields.size() != 6) {
      throw Error(ErrorKind::MalformedLine,
                  "expected 6 tab-separated fields, got " +
                      std::to_string(fields.size()),
                  lineno);
    }
    PhraseRecord record;
    record.phrase.sentence_id = out.back().sentence_id;
    record.phrase.start = parse_int(fields[0], lineno);
    record.phrase.end = parse_int(fields[1], lineno);
    if (record.phrase.start < 0 || record.phrase.end <= record.phrase.start) {
      throw Error(ErrorKind::MalformedLine, "invalid span", lineno);
    }
    auto polarity = parse_polarity(fields[2]);
    if (!polarity) {
      throw Error(ErrorKind::MalformedLine,
                  "unknown polarity '" + std::string(fields[2]) + "'", lineno);
    }
    record.phrase.polarity = *polarity;
    if (fields[3] != "-") {
      auto category = parse_category(fields[3]);
      if (!category) {
        throw Error(ErrorKind::UnknownCategory,
                    "unknown category '" + std::string(fields[3]) + "'",
                    lineno);
      }
      record.phrase.category = *category;
    }
    if (fields[4] != "-") {
      record.probability = parse_double(fields[4], lineno);
    }
    record.phrase.text = std::string(fields[5]);
    out.back().phrases.push_back(std::move(record));
  }
  return out;
}

std::string serialize_phrase_file(
    const std::vector<SentencePhrases>& records) {
  std::string out;
  for (const SentencePhrases& record : records) {
    out += "#sent ";
    out += record.sentence_id;
    out += '\n';
    for (const PhraseRecord& pr : record.phrases) {
      out += std::to_string(pr.phrase.start);
      out += '\t';
      out += std::to_string(pr.phrase.end);
      out += '\t';
      out += polarity_name(pr.phrase.polarity);
      out += '\t';
      out += pr.phrase.category ? category_name(*pr.phrase.category) : "-";
      out += '\t';
      out += pr.probability ? format_double(*pr.probability) : "-";
      out += '\t';
      out += pr.phrase.text;
      out += '\n';
    }
  }
  return out;
}

std::vector<Phrase> flatten_phrases(
    const std::vector<SentencePhrases>& records) {
  std::vector<Phrase> out;
  for (const SentencePhrases& record : records) {
    for (const PhraseRecord& pr : record.phrases) {
      out.push_back(pr.phrase);
    }
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower((unsigned char)c));
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens, int start,
                        int end) {
  std::string out;
  for (int i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, int line) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::UnparsableNumber,
                "cannot parse '" + std::string(text) + "' as a number", line);
  }
  return value;
}

}  // namespace incexc::corpus
