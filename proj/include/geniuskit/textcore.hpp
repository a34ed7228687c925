#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geniuskit {

struct Token {
  std::string surface;
  std::string folded;  // case-folded surface, used for all matching
  std::size_t char_start = 0;  // UTF-8 byte offsets into Document::raw
  std::size_t char_end = 0;
  bool is_word = false;
};

/// Half-open range of token indices.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// Half-open range of token indices forming one sentence.
using Sentence = Span;

struct NGram {
  Span span;
  int n = 0;  // word tokens in span
  std::string surface;  // folded words joined by single spaces
};

/// Raw text with an offset-preserving decomposition into tokens and sentences.
///
/// Token spans are strictly increasing and non-overlapping, sentences partition
/// the token sequence, and concatenating tokens with the text between them
/// reproduces `raw` byte for byte.
struct Document {
  std::string raw;
  std::vector<Token> tokens;
  std::vector<Sentence> sentences;
  std::size_t length_words = 0;  // word tokens only; the "l" of topk rules

  /// Verbatim source text covering the tokens of `span`.
  std::string_view text_of(Span span) const;
  std::size_t words_in(Span span) const;
  /// Index of the sentence containing token `token_index`.
  std::size_t sentence_of(std::size_t token_index) const;
};

/// Word tokens are maximal runs of letters, digits and apostrophes; any other
/// non-space code point is a single punctuation token.
Document tokenize(std::string text);

/// Sentence boundaries follow a token ending in '.', '!' or '?' when the next
/// token starts with an uppercase letter after whitespace, or at end of text.
/// A newline between two tokens is always a boundary.
std::vector<Sentence> split_sentences(const Document& document);

/// Contiguous word n-grams, n in [n_min, n_max], in document order. N-grams stay
/// inside one sentence and never step over a punctuation token.
std::vector<NGram> enumerate_ngrams(const Document& document, int n_min, int n_max);

/// Sorted, disjoint, non-adjacent spans covering exactly the union of `spans`.
std::vector<Span> merge_spans(std::vector<Span> spans);

/// Word-level longest common subsequence length.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Case-folded surfaces of every token (words and punctuation).
std::vector<std::string> folded_tokens(std::string_view text);

}  // namespace geniuskit
