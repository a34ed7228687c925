#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "geniuskit/error.hpp"
#include "geniuskit/stopwords.hpp"
#include "geniuskit/textcore.hpp"
#include "geniuskit/unicode.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace geniuskit;

namespace {

std::vector<std::string> surfaces(const Document& d) {
  std::vector<std::string> out;
  for (const auto& t : d.tokens) out.push_back(t.surface);
  return out;
}

std::string random_text(std::mt19937_64& rng, std::size_t len) {
  static const std::vector<std::string> pieces = {"a", "B", "z", "7", " ", " ", "  ", "\n", ".", ",", "!", "?", "'",
                                                  "’", "é", "É", "α", "Ж", "—", "\t",
                                                  "(", ")", "\"", "-", "\xff"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += pieces[pick(rng)];
  return s;
}

}  // namespace

TEST_CASE("tokenize: empty input") {
  const auto d = tokenize("");
  CHECK(d.tokens.empty());
  CHECK(d.length_words == 0);
  CHECK(d.sentences.empty());
}

TEST_CASE("tokenize: short sentence hand count") {
  const auto d = tokenize("NLP is widely used.");
  REQUIRE(d.tokens.size() == 5);
  CHECK(d.length_words == 4);
  CHECK(d.sentences.size() == 1);
  CHECK(surfaces(d) == std::vector<std::string>{"NLP", "is", "widely", "used", "."});
  CHECK(d.tokens[0].folded == "nlp");
  CHECK_FALSE(d.tokens[4].is_word);
}

TEST_CASE("tokenize: apostrophes stay inside words") {
  const auto d = tokenize("Germany 's rock'n'roll ''");
  CHECK(surfaces(d) == std::vector<std::string>{"Germany", "'s", "rock'n'roll", "'", "'"});
  CHECK(d.length_words == 3);
}

TEST_CASE("tokenize: non-ASCII letters and case folding") {
  const auto d = tokenize("ÉCOLE ЖИЗНЬ Σοφία");
  REQUIRE(d.length_words == 3);
  CHECK(d.tokens[0].folded == "école");
  CHECK(d.tokens[1].folded == "жизнь");
  CHECK(d.tokens[2].folded == "σοφία");
}

TEST_CASE("tokenize: reference passage frozen counts") {
  const auto d = tokenize(std::string(fixtures::kReferencePassage));
  CHECK(d.length_words == 21);
  CHECK(d.tokens.size() == 25);
  REQUIRE(d.sentences.size() == 2);
  CHECK(d.text_of(d.sentences[1]) == "NLP is widely used in our lives.");
}

TEST_CASE("tokenize: offsets reproduce the raw text (property)") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 500; ++iter) {
    const std::string text = random_text(rng, 1 + iter % 40);
    const auto d = tokenize(text);
    std::string rebuilt;
    std::size_t pos = 0;
    std::size_t words = 0;
    for (const auto& t : d.tokens) {
      REQUIRE(t.char_start >= pos);
      REQUIRE(t.char_end > t.char_start);
      CHECK(text.substr(t.char_start, t.char_end - t.char_start) == t.surface);
      rebuilt += text.substr(pos, t.char_start - pos);
      rebuilt += t.surface;
      pos = t.char_end;
      words += t.is_word ? 1 : 0;
    }
    rebuilt += text.substr(pos);
    CHECK(rebuilt == text);
    CHECK(words == d.length_words);
    // Sentences partition the tokens.
    std::size_t next = 0;
    for (const auto& s : d.sentences) {
      CHECK(s.start == next);
      CHECK(s.end > s.start);
      next = s.end;
    }
    CHECK(next == d.tokens.size());
  }
}

TEST_CASE("split_sentences") {
  CHECK(tokenize("A. B.").sentences.size() == 2);
  CHECK(tokenize("Dr. Smith left.").sentences.size() == 2);
  CHECK(tokenize("one two\nthree four").sentences.size() == 2);
  CHECK(tokenize("It costs 3.5 dollars. cheap").sentences.size() == 1);
  CHECK(tokenize("Really? Yes! Fine.").sentences.size() == 3);
  CHECK(tokenize("no terminal punctuation here").sentences.size() == 1);

  const auto d = tokenize("First one. Second one.");
  CHECK(d.sentence_of(0) == 0);
  CHECK(d.sentence_of(2) == 0);
  CHECK(d.sentence_of(3) == 1);
}

TEST_CASE("enumerate_ngrams: small cases") {
  const auto d = tokenize("a b c");
  const auto grams = enumerate_ngrams(d, 1, 2);
  std::vector<std::string> got;
  for (const auto& g : grams) got.push_back(g.surface);
  CHECK(got == std::vector<std::string>{"a", "a b", "b", "b c", "c"});

  CHECK(enumerate_ngrams(tokenize("word"), 1, 3).size() == 1);
  CHECK(enumerate_ngrams(tokenize(""), 1, 3).empty());
  CHECK_THROWS_AS(enumerate_ngrams(d, 0, 2), InvalidArgument);
  CHECK_THROWS_AS(enumerate_ngrams(d, 3, 2), InvalidArgument);
}

TEST_CASE("enumerate_ngrams: agrees with a brute-force enumerator") {
  std::vector<std::string> texts = {std::string(fixtures::kReferencePassage),
                                    "Hello, world. This is it! one-two three (four five) six",
                                    "a b c d e f g. h i j, k l"};
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) texts.push_back(random_text(rng, 30));
  for (const auto& text : texts) {
    const auto d = tokenize(text);
    for (int n_max = 1; n_max <= 4; ++n_max) {
      std::vector<std::pair<Span, int>> expected;
      for (std::size_t s = 0; s < d.tokens.size(); ++s) {
        for (std::size_t e = s + 1; e <= d.tokens.size() && e - s <= static_cast<std::size_t>(n_max); ++e) {
          bool ok = d.sentence_of(s) == d.sentence_of(e - 1);
          for (std::size_t k = s; k < e && ok; ++k) ok = d.tokens[k].is_word;
          if (ok) expected.push_back({{s, e}, static_cast<int>(e - s)});
        }
      }
      const auto grams = enumerate_ngrams(d, 1, n_max);
      REQUIRE(grams.size() == expected.size());
      for (std::size_t k = 0; k < grams.size(); ++k) {
        CHECK(grams[k].span == expected[k].first);
        CHECK(grams[k].n == expected[k].second);
      }
    }
  }
  CHECK(enumerate_ngrams(tokenize(std::string(fixtures::kReferencePassage)), 1, 3).size() == 51);
}

TEST_CASE("merge_spans: examples") {
  CHECK(merge_spans({{0, 2}, {1, 3}}) == std::vector<Span>{{0, 3}});
  CHECK(merge_spans({{0, 2}, {2, 4}}) == std::vector<Span>{{0, 4}});
  CHECK(merge_spans({{0, 1}, {5, 6}}) == std::vector<Span>{{0, 1}, {5, 6}});
  CHECK(merge_spans({{5, 6}, {0, 1}, {3, 3}}) == std::vector<Span>{{0, 1}, {5, 6}});
  CHECK(merge_spans({}).empty());
}

TEST_CASE("merge_spans: bitmap oracle and idempotence (property)") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pos(0, 30), len(0, 6), count(0, 12);
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<Span> spans;
    std::vector<std::pair<std::size_t, std::size_t>> raw;
    for (std::size_t k = count(rng); k > 0; --k) {
      const std::size_t s = pos(rng);
      const std::size_t e = s + len(rng);
      spans.push_back({s, e});
      raw.emplace_back(s, e);
    }
    const auto merged = merge_spans(spans);
    const auto expected = oracle::merge_by_bitmap(raw);
    REQUIRE(merged.size() == expected.size());
    for (std::size_t k = 0; k < merged.size(); ++k) {
      CHECK(merged[k].start == expected[k].first);
      CHECK(merged[k].end == expected[k].second);
    }
    CHECK(merge_spans(merged) == merged);
  }
}

TEST_CASE("lcs_length: examples and brute-force oracle") {
  const std::vector<std::string> x = {"a", "b", "c", "d"};
  CHECK(lcs_length(x, x) == 4);
  CHECK(lcs_length(std::vector<std::string>{"a", "b", "c"}, std::vector<std::string>{"c", "b", "a"}) == 1);
  CHECK(lcs_length(x, std::vector<std::string>{}) == 0);

  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> len(0, 12), sym(0, 4);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<std::string> a, b;
    for (int k = len(rng); k > 0; --k) a.push_back(std::string(1, static_cast<char>('a' + sym(rng))));
    for (int k = len(rng); k > 0; --k) b.push_back(std::string(1, static_cast<char>('a' + sym(rng))));
    CHECK(lcs_length(a, b) == oracle::brute_lcs(a, b));
    CHECK(lcs_length(a, b) == lcs_length(b, a));
  }
}

TEST_CASE("folded_tokens") {
  CHECK(folded_tokens("The EU, again.") == std::vector<std::string>{"the", "eu", ",", "again", "."});
}

TEST_CASE("unicode offsets round-trip") {
  const std::string s = "aé—b\U0001F600c";
  CHECK(unicode::codepoint_count(s) == 6);
  for (std::size_t cp = 0; cp <= 6; ++cp) {
    CHECK(unicode::codepoint_offset_of_byte(s, unicode::byte_offset_of_codepoint(s, cp)) == cp);
  }
  CHECK(unicode::byte_offset_of_codepoint(s, 99) == s.size());
  CHECK(unicode::is_acronym("NLP"));
  CHECK_FALSE(unicode::is_acronym("A"));
  CHECK(unicode::starts_upper("École"));
}

TEST_CASE("stopwords") {
  const auto& en = StopwordSet::english();
  CHECK(en.contains("the"));
  CHECK(en.contains("more"));
  CHECK_FALSE(en.contains("ai"));
  CHECK_FALSE(en.contains("science"));
}
