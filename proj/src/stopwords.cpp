#include "geniuskit/stopwords.hpp"

#include <array>
#include <fstream>

#include "geniuskit/error.hpp"
#include "geniuskit/unicode.hpp"

namespace geniuskit {

namespace {

constexpr std::array kEnglish = {
    "a",       "about",   "above",   "after",    "again",   "against", "all",     "am",
    "an",      "and",     "any",     "are",      "aren't",  "as",      "at",      "be",
    "because", "been",    "before",  "being",    "below",   "between", "both",    "but",
    "by",      "can",     "cannot",  "could",    "couldn't", "did",    "didn't",  "do",
    "does",    "doesn't", "doing",   "don't",    "down",    "during",  "each",    "few",
    "for",     "from",    "further", "had",      "hadn't",  "has",     "hasn't",  "have",
    "haven't", "having",  "he",      "he'd",     "he'll",   "he's",    "her",     "here",
    "here's",  "hers",    "herself", "him",      "himself", "his",     "how",     "how's",
    "i",       "i'd",     "i'll",    "i'm",      "i've",    "if",      "in",      "into",
    "is",      "isn't",   "it",      "it's",     "its",     "itself",  "let's",   "me",
    "more",    "most",    "mustn't", "my",       "myself",  "no",      "nor",     "not",
    "of",      "off",     "on",      "once",     "only",    "or",      "other",   "ought",
    "our",     "ours",    "ourselves", "out",    "over",    "own",     "same",    "shan't",
    "she",     "she'd",   "she'll",  "she's",    "should",  "shouldn't", "so",    "some",
    "such",    "than",    "that",    "that's",   "the",     "their",   "theirs",  "them",
    "themselves", "then", "there",   "there's",  "these",   "they",    "they'd",  "they'll",
    "they're", "they've", "this",    "those",    "through", "to",      "too",     "under",
    "until",   "up",      "very",    "was",      "wasn't",  "we",      "we'd",    "we'll",
    "we're",   "we've",   "were",    "weren't",  "what",    "what's",  "when",    "when's",
    "where",   "where's", "which",   "while",    "who",     "who's",   "whom",    "why",
    "why's",   "will",    "with",    "won't",    "would",   "wouldn't", "you",    "you'd",
    "you'll",  "you're",  "you've",  "your",     "yours",   "yourself", "yourselves", "also",
    "may",     "might",   "must",    "shall",    "just",    "now",     "s",       "t",
    "said",    "says",    "say",     "like",     "even",    "however", "yet",     "still",
    "one",     "two",     "us",      "many",     "much",    "every",   "another", "within",
    "without", "upon",    "via",     "per",      "among",   "across",  "around",  "since",
};

}  // namespace

StopwordSet::StopwordSet(std::unordered_set<std::string> words) : words_(std::move(words)) {}

const StopwordSet& StopwordSet::english() {
  static const StopwordSet set = [] {
    std::unordered_set<std::string> words(kEnglish.begin(), kEnglish.end());
    return StopwordSet(std::move(words));
  }();
  return set;
}

StopwordSet StopwordSet::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open stopword file: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    words.insert(unicode::fold_case(line.substr(first)));
  }
  return StopwordSet(std::move(words));
}

bool StopwordSet::contains(std::string_view folded_word) const {
  return words_.find(std::string(folded_word)) != words_.end();
}

}  // namespace geniuskit
