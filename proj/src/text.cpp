#include "capscore/text.hpp"

#include <algorithm>
#include <array>

#include "capscore/corpus.hpp"
#include "capscore/error.hpp"

namespace capscore {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::CocoLite:
      return "coco-lite";
    case Scheme::IntlLite:
      return "intl-lite";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "coco-lite") return Scheme::CocoLite;
  if (name == "intl-lite") return Scheme::IntlLite;
  throw UsageError("unknown tokenizer scheme '" + std::string(name) + "'");
}

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `pos`, advancing it. Invalid sequences
// decode to U+FFFD one byte at a time.
char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  int extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + extra >= s.size()) {
    ++pos;
    return kReplacement;
  }
  for (int i = 1; i <= extra; ++i) {
    const auto c = static_cast<unsigned char>(s[pos + i]);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137) return cp | 1u;  // even code points are capitals
  if (cp >= 0x139 && cp <= 0x148) return (cp & 1u) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp | 1u;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp & 1u) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  return cp;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

struct Range {
  char32_t lo;
  char32_t hi;
};

// Unicode general category P*, restricted to the blocks a caption is likely
// to contain.
constexpr std::array kPunctuation{
    Range{0x21, 0x23},     Range{0x25, 0x2A},     Range{0x2C, 0x2F},     Range{0x3A, 0x3B},
    Range{0x3F, 0x40},     Range{0x5B, 0x5D},     Range{0x5F, 0x5F},     Range{0x7B, 0x7B},
    Range{0x7D, 0x7D},     Range{0xA1, 0xA1},     Range{0xA7, 0xA7},     Range{0xAB, 0xAB},
    Range{0xB6, 0xB7},     Range{0xBB, 0xBB},     Range{0xBF, 0xBF},     Range{0x37E, 0x37E},
    Range{0x387, 0x387},   Range{0x55A, 0x55F},   Range{0x589, 0x58A},   Range{0x5BE, 0x5BE},
    Range{0x5C0, 0x5C0},   Range{0x5C3, 0x5C3},   Range{0x5C6, 0x5C6},   Range{0x5F3, 0x5F4},
    Range{0x609, 0x60A},   Range{0x60C, 0x60D},   Range{0x61B, 0x61B},   Range{0x61E, 0x61F},
    Range{0x66A, 0x66D},   Range{0x6D4, 0x6D4},   Range{0x964, 0x965},   Range{0x970, 0x970},
    Range{0xE4F, 0xE4F},   Range{0xE5A, 0xE5B},   Range{0x2010, 0x2027}, Range{0x2030, 0x2043},
    Range{0x2045, 0x2051}, Range{0x2053, 0x205E}, Range{0x2E00, 0x2E4F}, Range{0x3001, 0x3003},
    Range{0x3008, 0x3011}, Range{0x3014, 0x301F}, Range{0x3030, 0x3030}, Range{0x303D, 0x303D},
    Range{0x30FB, 0x30FB}, Range{0xFE10, 0xFE19}, Range{0xFE30, 0xFE52}, Range{0xFE54, 0xFE61},
    Range{0xFE63, 0xFE63}, Range{0xFE68, 0xFE68}, Range{0xFE6A, 0xFE6B}, Range{0xFF01, 0xFF03},
    Range{0xFF05, 0xFF0A}, Range{0xFF0C, 0xFF0F}, Range{0xFF1A, 0xFF1B}, Range{0xFF1F, 0xFF20},
    Range{0xFF3B, 0xFF3D}, Range{0xFF3F, 0xFF3F}, Range{0xFF5B, 0xFF5B}, Range{0xFF5D, 0xFF5D},
    Range{0xFF5F, 0xFF65},
};

bool is_punctuation(char32_t cp) {
  return std::any_of(kPunctuation.begin(), kPunctuation.end(),
                     [cp](Range r) { return cp >= r.lo && cp <= r.hi; });
}

bool is_coco_stripped(char32_t cp) {
  switch (cp) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '"': case '\'': case '(': case ')': case '[': case ']':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string utf8_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) encode_utf8(lower(decode_utf8(text, pos)), out);
  return out;
}

std::vector<Token> tokenize_words(std::string_view text, Scheme scheme) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const char32_t cp = lower(decode_utf8(text, pos));
    if (is_space(cp)) {
      flush();
      continue;
    }
    if (scheme == Scheme::CocoLite) {
      if (!is_coco_stripped(cp)) encode_utf8(cp, current);
    } else if (is_punctuation(cp)) {
      flush();
      encode_utf8(cp, current);
      flush();
    } else {
      encode_utf8(cp, current);
    }
  }
  flush();
  return tokens;
}

TokenizedCaption tokenize(std::string_view text, Scheme scheme, std::string caption_id) {
  return TokenizedCaption{std::move(caption_id), scheme, tokenize_words(text, scheme)};
}

// ---------------------------------------------------------------------------
// Porter stemmer

namespace {

class PorterWord {
 public:
  explicit PorterWord(std::string word) : w_(std::move(word)) {}

  std::string take() && { return std::move(w_); }
  const std::string& str() const { return w_; }

  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 || !consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in w_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // consonant-vowel-consonant ending where the last consonant is not w, x or y
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) const { return w_.ends_with(suffix); }
  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    w_.resize(stem_len(suffix));
    w_.append(with);
  }

 private:
  std::string w_;
};

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Applies the first (longest) rule whose suffix matches, if the stem measure
// exceeds `min_measure`. Returns whether a suffix matched at all.
template <std::size_t N>
bool apply_rules(PorterWord& w, const std::array<Rule, N>& rules, int min_measure) {
  for (const auto& rule : rules) {
    if (w.ends(rule.suffix)) {
      if (w.measure(w.stem_len(rule.suffix)) > min_measure)
        w.replace_suffix(rule.suffix, rule.replacement);
      return true;
    }
  }
  return false;
}

void step1a(PorterWord& w) {
  if (w.ends("sses")) w.replace_suffix("sses", "ss");
  else if (w.ends("ies")) w.replace_suffix("ies", "i");
  else if (w.ends("ss")) return;
  else if (w.ends("s")) w.replace_suffix("s", "");
}

void step1b(PorterWord& w) {
  if (w.ends("eed")) {
    if (w.measure(w.stem_len("eed")) > 0) w.replace_suffix("eed", "ee");
    return;
  }
  bool stripped = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (w.ends(suffix) && w.has_vowel(w.stem_len(suffix))) {
      w.replace_suffix(suffix, "");
      stripped = true;
      break;
    }
  }
  if (!stripped) return;
  if (w.ends("at")) w.replace_suffix("at", "ate");
  else if (w.ends("bl")) w.replace_suffix("bl", "ble");
  else if (w.ends("iz")) w.replace_suffix("iz", "ize");
  else if (const std::size_t n = w.str().size(); w.double_consonant(n)) {
    const char last = w.str().back();
    if (last != 'l' && last != 's' && last != 'z') w.replace_suffix(w.str().substr(n - 1), "");
  } else if (w.measure(n) == 1 && w.cvc(n)) {
    w.replace_suffix("", "e");
  }
}

void step1c(PorterWord& w) {
  if (w.ends("y") && w.has_vowel(w.stem_len("y"))) w.replace_suffix("y", "i");
}

constexpr std::array kStep2{
    Rule{"ational", "ate"}, Rule{"ization", "ize"}, Rule{"iveness", "ive"},
    Rule{"fulness", "ful"}, Rule{"ousness", "ous"}, Rule{"tional", "tion"},
    Rule{"biliti", "ble"},  Rule{"entli", "ent"},   Rule{"ousli", "ous"},
    Rule{"ation", "ate"},   Rule{"alism", "al"},    Rule{"aliti", "al"},
    Rule{"iviti", "ive"},   Rule{"enci", "ence"},   Rule{"anci", "ance"},
    Rule{"izer", "ize"},    Rule{"abli", "able"},   Rule{"alli", "al"},
    Rule{"ator", "ate"},    Rule{"eli", "e"},
};

constexpr std::array kStep3{
    Rule{"icate", "ic"}, Rule{"ative", ""}, Rule{"alize", "al"}, Rule{"iciti", "ic"},
    Rule{"ical", "ic"},  Rule{"ness", ""},  Rule{"ful", ""},
};

void step4(PorterWord& w) {
  static constexpr std::array<std::string_view, 19> suffixes{
      "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism", "ate",
      "iti",   "ous",  "ive",  "ize",  "ion",  "al",   "er",  "ic",  "ou"};
  for (std::string_view suffix : suffixes) {
    if (!w.ends(suffix)) continue;
    const std::size_t stem = w.stem_len(suffix);
    if (w.measure(stem) <= 1) return;
    if (suffix == "ion") {
      const char before = stem > 0 ? w.str()[stem - 1] : '\0';
      if (before != 's' && before != 't') return;
    }
    w.replace_suffix(suffix, "");
    return;
  }
}

void step5(PorterWord& w) {
  if (w.ends("e")) {
    const std::size_t stem = w.stem_len("e");
    const int m = w.measure(stem);
    if (m > 1 || (m == 1 && !w.cvc(stem))) w.replace_suffix("e", "");
  }
  const std::size_t n = w.str().size();
  if (w.measure(n) > 1 && w.double_consonant(n) && w.str().back() == 'l')
    w.replace_suffix("l", "");
}

}  // namespace

Token porter_stem(std::string_view token) {
  if (token.size() <= 2) return Token(token);
  for (unsigned char c : token)
    if (c >= 0x80 || (c >= 'A' && c <= 'Z')) return Token(token);
  PorterWord w{std::string(token)};
  step1a(w);
  step1b(w);
  step1c(w);
  apply_rules(w, kStep2, 0);
  apply_rules(w, kStep3, 0);
  step4(w);
  step5(w);
  return std::move(w).take();
}

std::vector<Token> stem_all(std::span<const Token> tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(porter_stem(t));
  return out;
}

// ---------------------------------------------------------------------------

int NGramCounts::total() const {
  int sum = 0;
  for (const auto& [key, c] : counts) sum += c;
  return sum;
}

int NGramCounts::count(std::string_view key) const {
  auto it = counts.find(std::string(key));
  return it == counts.end() ? 0 : it->second;
}

std::string join_tokens(std::span<const Token> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

NGramCounts ngram_counts(std::span<const Token> tokens, int n) {
  if (n < 1) throw UsageError("n-gram order must be >= 1");
  NGramCounts out;
  out.n = n;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return out;
  out.counts.reserve(tokens.size() - order + 1);
  std::string key;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    key.clear();
    for (std::size_t j = i; j < i + order; ++j) {
      if (j > i) key.push_back(' ');
      key.append(tokens[j]);
    }
    ++out.counts[key];
  }
  return out;
}

// ---------------------------------------------------------------------------

void SynonymTable::add(std::string word, std::vector<std::string> classes) {
  auto& slot = entries_[std::move(word)];
  slot.insert(slot.end(), std::make_move_iterator(classes.begin()),
              std::make_move_iterator(classes.end()));
  std::sort(slot.begin(), slot.end());
  slot.erase(std::unique(slot.begin(), slot.end()), slot.end());
}

std::span<const std::string> SynonymTable::classes(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return {};
  return it->second;
}

bool SynonymTable::are_synonyms(std::string_view a, std::string_view b) const {
  auto ca = classes(a);
  auto cb = classes(b);
  // both sorted
  std::size_t i = 0, j = 0;
  while (i < ca.size() && j < cb.size()) {
    if (ca[i] == cb[j]) return true;
    if (ca[i] < cb[j]) ++i;
    else ++j;
  }
  return false;
}

SynonymTable parse_synonym_table(std::string_view document) {
  SynonymTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < document.size()) {
    std::size_t end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    std::string_view line = document.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto fail = [line_no](const std::string& why) {
      return ParseError("synonym table line " + std::to_string(line_no) + ": " + why);
    };
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw fail("expected word<TAB>class-ids");
    std::string word = utf8_lower(line.substr(0, tab));
    if (word.empty() || is_blank(word) ||
        word.find_first_of(" \t") != std::string::npos)
      throw fail("invalid word");
    std::vector<std::string> classes;
    std::string_view ids = line.substr(tab + 1);
    std::size_t pos = 0;
    while (pos <= ids.size()) {
      std::size_t comma = ids.find(',', pos);
      if (comma == std::string_view::npos) comma = ids.size();
      std::string_view id = ids.substr(pos, comma - pos);
      while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
      while (!id.empty() && id.back() == ' ') id.remove_suffix(1);
      if (id.empty()) throw fail("empty class id");
      classes.emplace_back(id);
      pos = comma + 1;
    }
    table.add(std::move(word), std::move(classes));
  }
  return table;
}

SynonymTable load_synonym_table(const std::filesystem::path& path) {
  return parse_synonym_table(read_file(path));
}

}  // namespace capscore
