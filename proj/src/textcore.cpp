#include "geniuskit/textcore.hpp"

#include <algorithm>

#include "geniuskit/error.hpp"
#include "geniuskit/unicode.hpp"

namespace geniuskit {

std::string_view Document::text_of(Span span) const {
  if (span.start >= span.end || span.end > tokens.size()) return {};
  const std::size_t begin = tokens[span.start].char_start;
  const std::size_t end = tokens[span.end - 1].char_end;
  return std::string_view(raw).substr(begin, end - begin);
}

std::size_t Document::words_in(Span span) const {
  std::size_t n = 0;
  for (std::size_t i = span.start; i < span.end && i < tokens.size(); ++i) n += tokens[i].is_word;
  return n;
}

std::size_t Document::sentence_of(std::size_t token_index) const {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), token_index,
                             [](std::size_t idx, const Sentence& s) { return idx < s.end; });
  if (it == sentences.end()) throw InvalidArgument("token index out of range");
  return static_cast<std::size_t>(it - sentences.begin());
}

Document tokenize(std::string text) {
  Document doc;
  doc.raw = std::move(text);
  const std::string_view raw = doc.raw;

  auto push = [&](std::size_t begin, std::size_t end, bool word) {
    Token t;
    t.surface = std::string(raw.substr(begin, end - begin));
    t.folded = unicode::fold_case(t.surface);
    t.char_start = begin;
    t.char_end = end;
    t.is_word = word;
    doc.tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < raw.size()) {
    const auto [cp, len] = unicode::decode(raw, i);
    if (unicode::is_space(cp)) {
      i += len;
      continue;
    }
    if (unicode::is_alnum(cp) || unicode::is_apostrophe(cp)) {
      std::size_t j = i;
      bool has_alnum = false;
      while (j < raw.size()) {
        const auto d = unicode::decode(raw, j);
        if (unicode::is_alnum(d.cp)) {
          has_alnum = true;
        } else if (!unicode::is_apostrophe(d.cp)) {
          break;
        }
        j += d.len;
      }
      if (has_alnum) {
        push(i, j, true);
        i = j;
        continue;
      }
      // A run of bare apostrophes is quoting, not a word.
    }
    push(i, i + len, false);
    i += len;
  }

  for (const auto& t : doc.tokens) doc.length_words += t.is_word;
  doc.sentences = split_sentences(doc);
  return doc;
}

std::vector<Sentence> split_sentences(const Document& document) {
  std::vector<Sentence> out;
  const auto& tokens = document.tokens;
  if (tokens.empty()) return out;
  const std::string_view raw = document.raw;

  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string_view gap =
        raw.substr(tokens[i].char_end, tokens[i + 1].char_start - tokens[i].char_end);
    bool boundary = gap.find('\n') != std::string_view::npos;
    if (!boundary && !gap.empty()) {
      const char last = tokens[i].surface.back();
      boundary = (last == '.' || last == '!' || last == '?') &&
                 unicode::starts_upper(tokens[i + 1].surface);
    }
    if (boundary) {
      out.push_back({start, i + 1});
      start = i + 1;
    }
  }
  out.push_back({start, tokens.size()});
  return out;
}

std::vector<NGram> enumerate_ngrams(const Document& document, int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) throw InvalidArgument("enumerate_ngrams: need 1 <= n_min <= n_max");
  std::vector<NGram> out;
  const auto& tokens = document.tokens;
  for (const auto& sentence : document.sentences) {
    // Walk punctuation-free word runs inside the sentence.
    std::size_t i = sentence.start;
    while (i < sentence.end) {
      if (!tokens[i].is_word) {
        ++i;
        continue;
      }
      std::size_t run_end = i;
      while (run_end < sentence.end && tokens[run_end].is_word) ++run_end;
      for (std::size_t s = i; s < run_end; ++s) {
        std::string surface;
        for (int n = 1; n <= n_max && s + n <= run_end; ++n) {
          if (n > 1) surface.push_back(' ');
          surface += tokens[s + n - 1].folded;
          if (n >= n_min) out.push_back({{s, s + n}, n, surface});
        }
      }
      i = run_end;
    }
  }
  // Document order: by start, then by length.
  std::stable_sort(out.begin(), out.end(), [](const NGram& a, const NGram& b) {
    return a.span.start != b.span.start ? a.span.start < b.span.start : a.n < b.n;
  });
  return out;
}

std::vector<Span> merge_spans(std::vector<Span> spans) {
  std::erase_if(spans, [](const Span& s) { return s.start >= s.end; });
  std::sort(spans.begin(), spans.end());
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start <= out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> folded_tokens(std::string_view text) {
  auto doc = tokenize(std::string(text));
  std::vector<std::string> out;
  out.reserve(doc.tokens.size());
  for (auto& t : doc.tokens) out.push_back(std::move(t.folded));
  return out;
}

}  // namespace geniuskit
