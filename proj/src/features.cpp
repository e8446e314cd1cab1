#include "incexc/features.hpp"

#include <cctype>
#include <charconv>

#include "incexc/corpus.hpp"

namespace incexc::features {

namespace {

// Byte slices per UTF-8 codepoint; malformed bytes fall back to length 1.
std::vector<std::string_view> utf8_chars(std::string_view s) {
  std::vector<std::string_view> chars;
  std::size_t pos = 0;
  while (pos < s.size()) {
    unsigned char lead = static_cast<unsigned char>(s[pos]);
    std::size_t len = 1;
    if ((lead & 0xE0) == 0xC0) len = 2;
    else if ((lead & 0xF0) == 0xE0) len = 3;
    else if ((lead & 0xF8) == 0xF0) len = 4;
    if (pos + len > s.size()) len = 1;
    chars.push_back(s.substr(pos, len));
    pos += len;
  }
  return chars;
}

std::string offset_str(int off) {
  if (off > 0) return "+" + std::to_string(off);
  return std::to_string(off);
}

void add_window_features(FeatureVector& fv, const Sentence& sentence, int i,
                         int window) {
  int n = sentence.size();
  for (int off = -window; off <= window; ++off) {
    int j = i + off;
    std::string ostr = offset_str(off);
    if (j < 0) {
      fv["w" + ostr + "=<BOS>"] = 1.0;
    } else if (j >= n) {
      fv["w" + ostr + "=<EOS>"] = 1.0;
    } else {
      fv["w" + ostr + "=" + sentence.tokens[j]] = 1.0;
      fv["low" + ostr + "=" + corpus::to_lower(sentence.tokens[j])] = 1.0;
    }
  }
}

void add_affix_features(FeatureVector& fv, std::string_view token) {
  auto chars = utf8_chars(token);
  for (std::size_t len : {std::size_t{2}, std::size_t{3}}) {
    if (chars.size() < len) continue;
    std::string prefix, suffix;
    for (std::size_t k = 0; k < len; ++k) {
      prefix += chars[k];
      suffix += chars[chars.size() - len + k];
    }
    fv["pre" + std::to_string(len) + "=" + prefix] = 1.0;
    fv["suf" + std::to_string(len) + "=" + suffix] = 1.0;
  }
}

void add_embedding_features(FeatureVector& fv, const EmbeddingTable& table,
                            const std::string& lowercase_word) {
  const std::vector<double>* vec = table.find(lowercase_word);
  if (vec == nullptr) {
    fv["emb_oov"] = 1.0;
    return;
  }
  for (std::size_t j = 0; j < vec->size(); ++j) {
    if ((*vec)[j] != 0.0) {
      fv["emb" + std::to_string(j)] = (*vec)[j];
    }
  }
}

}  // namespace

std::string word_shape(std::string_view token) {
  std::string shape;
  char last = '\0';
  for (std::string_view ch : utf8_chars(token)) {
    char cls = '.';
    if (ch.size() == 1) {
      unsigned char c = static_cast<unsigned char>(ch[0]);
      if (std::isupper(c)) cls = 'X';
      else if (std::islower(c)) cls = 'x';
      else if (std::isdigit(c)) cls = 'd';
    }
    if (cls != last) {
      shape += cls;
      last = cls;
    }
  }
  return shape;
}

FeatureVector token_features(const Sentence& sentence, int i,
                             const FeatureConfig& cfg) {
  int n = sentence.size();
  if (i < 0 || i >= n) {
    throw Error(ErrorKind::IndexOutOfRange,
                "token index " + std::to_string(i) + " not in [0, " +
                    std::to_string(n) + ")");
  }
  if (cfg.window < 0 || cfg.window > 3) {
    throw Error(ErrorKind::InvalidInput,
                "feature window must be in [0, 3], got " +
                    std::to_string(cfg.window));
  }

  FeatureVector fv;
  fv["bias"] = 1.0;
  add_window_features(fv, sentence, i, cfg.window);
  if (cfg.use_affixes) add_affix_features(fv, sentence.tokens[i]);
  if (cfg.use_shape) {
    fv["shape0=" + word_shape(sentence.tokens[i])] = 1.0;
  }
  if (cfg.embeddings) {
    add_embedding_features(fv, *cfg.embeddings,
                           corpus::to_lower(sentence.tokens[i]));
  }
  return fv;
}

FeatureVector phrase_features(std::span<const std::string> tokens, int start,
                              int end) {
  int n = static_cast<int>(tokens.size());
  if (start < 0 || end > n || start >= end) {
    throw Error(ErrorKind::OutOfBounds,
                "span [" + std::to_string(start) + ", " +
                    std::to_string(end) + ") not within [0, " +
                    std::to_string(n) + ")");
  }

  FeatureVector fv;
  fv["bias"] = 1.0;

  std::vector<std::string> lower(end - start);
  for (int i = start; i < end; ++i) {
    lower[i - start] = corpus::to_lower(tokens[i]);
  }
  for (const std::string& w : lower) fv["uni=" + w] += 1.0;
  for (std::size_t k = 0; k + 1 < lower.size(); ++k) {
    fv["bi=" + lower[k] + "_" + lower[k + 1]] += 1.0;
  }

  std::string padded = " ";
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (k > 0) padded += ' ';
    padded += lower[k];
  }
  padded += ' ';
  auto chars = utf8_chars(padded);
  for (std::size_t len : {std::size_t{3}, std::size_t{4}, std::size_t{5}}) {
    if (chars.size() < len) continue;
    for (std::size_t pos = 0; pos + len <= chars.size(); ++pos) {
      std::string gram;
      for (std::size_t k = 0; k < len; ++k) gram += chars[pos + k];
      fv["c" + std::to_string(len) + "=" + gram] += 1.0;
    }
  }

  for (int j = std::max(0, start - 2); j < start; ++j) {
    fv["ctx=" + corpus::to_lower(tokens[j])] += 1.0;
  }
  for (int j = end; j < std::min(n, end + 2); ++j) {
    fv["ctx=" + corpus::to_lower(tokens[j])] += 1.0;
  }
  return fv;
}

FeatureVector phrase_features(const Phrase& phrase, const Sentence& sentence) {
  return phrase_features(sentence.tokens, phrase.start, phrase.end);
}

EmbeddingTable load_embeddings(std::string_view text,
                               std::optional<int> expected_dim) {
  EmbeddingTable table;
  if (expected_dim) table.dimension = *expected_dim;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

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
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw Error(ErrorKind::DimensionMismatch,
                  "line has no vector components", lineno);
    }

    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      vec.push_back(corpus::parse_double(fields[k], lineno));
    }
    if (table.dimension == 0 && table.vectors.empty() && !expected_dim) {
      table.dimension = static_cast<int>(vec.size());
    }
    if (static_cast<int>(vec.size()) != table.dimension) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(table.dimension) +
                      " components, got " + std::to_string(vec.size()),
                  lineno);
    }
    table.vectors[corpus::to_lower(fields[0])] = std::move(vec);
  }
  return table;
}

}  // namespace incexc::features
