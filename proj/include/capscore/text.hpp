#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace capscore {

/// Registered tokenizer schemes.
///   coco-lite: lowercase, drop the characters .,!?;:"'()[] and split on
///              whitespace.
///   intl-lite: lowercase, every unicode punctuation character becomes its
///              own token, split on whitespace.
enum class Scheme : std::uint8_t { CocoLite, IntlLite };

std::string_view scheme_name(Scheme scheme);
/// Throws UsageError for unknown names.
Scheme parse_scheme(std::string_view name);

using Token = std::string;

struct TokenizedCaption {
  std::string caption_id;
  Scheme scheme = Scheme::CocoLite;
  std::vector<Token> tokens;

  bool operator==(const TokenizedCaption&) const = default;
};

std::vector<Token> tokenize_words(std::string_view text, Scheme scheme);
TokenizedCaption tokenize(std::string_view text, Scheme scheme, std::string caption_id = {});

/// Lowercases one UTF-8 string (ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic letters); other code points pass through.
std::string utf8_lower(std::string_view text);

/// Porter (1980) suffix stripper. Tokens with non-ASCII or uppercase bytes
/// and tokens of length <= 2 come back unchanged.
Token porter_stem(std::string_view token);

std::vector<Token> stem_all(std::span<const Token> tokens);

/// Multiset of contiguous n-token windows. Keys are the tokens joined with a
/// single space, which is unambiguous because tokens carry no whitespace.
struct NGramCounts {
  int n = 1;
  std::unordered_map<std::string, int> counts;

  /// Sum of multiplicities.
  int total() const;
  int count(std::string_view key) const;
};

/// Throws UsageError when n < 1.
NGramCounts ngram_counts(std::span<const Token> tokens, int n);

std::string join_tokens(std::span<const Token> tokens, std::string_view sep = " ");

/// word -> synonym classes. Two words are synonyms when their class sets
/// intersect.
class SynonymTable {
 public:
  SynonymTable() = default;

  void add(std::string word, std::vector<std::string> classes);
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool are_synonyms(std::string_view a, std::string_view b) const;
  /// Sorted class ids for `word`; empty when unknown.
  std::span<const std::string> classes(std::string_view word) const;

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

/// Format: one `word<TAB>id,id,...` entry per line. Blank lines and lines
/// starting with '#' are skipped.
SynonymTable parse_synonym_table(std::string_view document);
SynonymTable load_synonym_table(const std::filesystem::path& path);

}  // namespace capscore
