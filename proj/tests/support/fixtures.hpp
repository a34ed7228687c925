#pragma once

// Texts and expected strings quoted from the reference examples.

#include <string>
#include <string_view>
#include <vector>

#include "geniuskit/augmenters.hpp"

namespace fixtures {

inline constexpr std::string_view kReferencePassage =
    "NLP is a branch of computer science—and more specifically, a branch of AI. NLP is widely used in our lives.";

inline const std::vector<std::string>& reference_keywords() {
  static const std::vector<std::string> k = {"NLP", "branch of AI", "computer science"};
  return k;
}

inline constexpr std::string_view kReferenceT1 = "NLP branch of AI computer science";
inline constexpr std::string_view kReferenceT2 = "NLP computer science branch of AI";
inline constexpr std::string_view kReferenceT3 = "NLP computer science branch of AI NLP";
inline constexpr std::string_view kReferenceT4 = "NLP <mask> computer science <mask> branch of AI <mask> NLP <mask>";

inline constexpr std::string_view kSportsText =
    "I only have eight myself, but I know a few people who have at least 15. They have played a lot of leagues, "
    "even in a short amount of years, but in various sports.";

inline geniuskit::NerSequence ner_sequence(std::string id, std::vector<std::string> tokens,
                                           std::vector<std::string> tags) {
  geniuskit::NerSequence s;
  s.id = std::move(id);
  s.tokens = std::move(tokens);
  s.tags = std::move(tags);
  return s;
}

// The two original CoNLL rows of the NER examples table.
inline std::vector<geniuskit::NerSequence> conll_rows() {
  return {
      ner_sequence("eu", {"EU", "rejects", "German", "call", "to", "boycott", "British", "lamb", "."},
                   {"B-ORG", "O", "B-MISC", "O", "O", "O", "B-MISC", "O", "O"}),
      ner_sequence("germany",
                   {"Germany", "'s", "representative", "to", "the", "European", "Union", "'s", "veterinary",
                    "committee", "Werner", "Zwingmann", "said", "on", "Wednesday"},
                   {"B-LOC", "O", "O", "O", "O", "B-ORG", "I-ORG", "O", "O", "O", "B-PER", "I-PER", "O", "O", "O"}),
  };
}

inline const std::vector<std::string>& generated_ner_tokens() {
  static const std::vector<std::string> t = {"The", "German", "government", "says", "the", "idea", "is",
                                             "unacceptable", "and", "that", "the", "EU", "should", "reject",
                                             "it", "."};
  return t;
}

inline constexpr std::string_view kSquadParagraph =
    "Architecturally, the school has a Catholic character. Atop the Main Building's gold dome is a golden statue "
    "of the Virgin Mary. Immediately in front of the Main Building and facing it, is a copper statue of Christ "
    "with arms upraised with the legend \"Venite Ad Me Omnes\". Next to the Main Building is the Basilica of the "
    "Sacred Heart. Immediately behind the basilica is the Grotto, a Marian place of prayer and reflection. It is "
    "a replica of the grotto at Lourdes, France where the Virgin Mary reputedly appeared to Saint Bernadette "
    "Soubirous in 1858. At the end of the main drive (and in a direct line that connects through 3 statues and "
    "the Gold Dome), is a simple, modern stone statue of Mary.";

inline constexpr std::string_view kSquadAnswerSentence =
    "It is a replica of the grotto at Lourdes, France where the Virgin Mary reputedly appeared to Saint Bernadette "
    "Soubirous in 1858.";

inline geniuskit::MrcExample squad_example() {
  geniuskit::MrcExample e;
  e.id = "squad0";
  e.paragraph = std::string(kSquadParagraph);
  e.question = "To whom did the Virgin Mary allegedly appear in 1858 in Lourdes France?";
  e.answer = "Saint Bernadette Soubirous";
  e.answer_start = e.paragraph.find(e.answer);
  return e;
}

}  // namespace fixtures
