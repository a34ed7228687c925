#include "geniuskit/extractors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "geniuskit/error.hpp"
#include "geniuskit/unicode.hpp"

namespace geniuskit {

std::size_t TopkRule::operator()(std::size_t l) const {
  switch (kind) {
    case Kind::kCeilFifth:
      return std::max((l + 4) / 5, minimum);
    case Kind::kFloorFifth:
      return std::max(l / 5, minimum);
    case Kind::kFixed:
      return fixed;
  }
  return minimum;
}

TopkRule TopkRule::parse(const std::string& text) {
  TopkRule rule;
  if (text == "ceil") return rule;
  if (text == "floor") {
    rule.kind = Kind::kFloorFifth;
    return rule;
  }
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 1) {
    throw InvalidArgument("topk rule must be \"ceil\", \"floor\" or a positive integer, got \"" + text + "\"");
  }
  rule.kind = Kind::kFixed;
  rule.fixed = static_cast<std::size_t>(value);
  return rule;
}

void ExtractorConfig::validate() const {
  if (max_ngram < 1) throw InvalidArgument("max_ngram must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) throw InvalidArgument("keep_ratio must lie in (0, 1]");
  if (stopwords == nullptr) throw InvalidArgument("stopword set is required");
}

namespace {

bool has_letter(std::string_view folded) {
  for (std::size_t i = 0; i < folded.size();) {
    const auto [cp, len] = unicode::decode(folded, i);
    if (unicode::is_alnum(cp) && !(cp >= U'0' && cp <= U'9')) return true;
    i += len;
  }
  return false;
}

std::string spaced_surface(const Document& doc, Span span) {
  std::string out;
  for (std::size_t i = span.start; i < span.end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += doc.tokens[i].surface;
  }
  return out;
}

// ceil(ratio * count) that does not overshoot on products like 0.2 * 15.
std::size_t ceil_fraction(double ratio, std::size_t count) {
  return static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(count) - 1e-9));
}

}  // namespace

std::vector<Candidate> collect_candidates(const Document& document, const ExtractorConfig& config) {
  config.validate();
  std::vector<Candidate> out;
  std::unordered_map<std::string, std::size_t> index;
  const auto& tokens = document.tokens;
  auto usable_edge = [&](const Token& t) {
    return !config.stopwords->contains(t.folded) && has_letter(t.folded);
  };
  for (auto& g : enumerate_ngrams(document, 1, config.max_ngram)) {
    if (!usable_edge(tokens[g.span.start]) || !usable_edge(tokens[g.span.end - 1])) continue;
    auto [it, inserted] = index.try_emplace(g.surface, out.size());
    if (inserted) {
      out.push_back({g.surface, spaced_surface(document, g.span), g.span, g.n, 0});
    }
    ++out[it->second].count;
  }
  return out;
}

namespace {

struct TermStats {
  std::size_t tf = 0;
  std::size_t capitalized = 0;
  std::size_t acronym = 0;
  std::vector<std::size_t> sentence_ids;
  std::unordered_map<std::string_view, std::size_t> left, right;
  std::size_t left_total = 0, right_total = 0;
};

double median(std::vector<std::size_t> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 ? static_cast<double>(values[n / 2])
               : 0.5 * static_cast<double>(values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<Keyword> yake_extract(const Document& document, const ExtractorConfig& config) {
  config.validate();
  if (document.length_words == 0) return {};
  const auto& tokens = document.tokens;
  const StopwordSet& stop = *config.stopwords;

  std::unordered_map<std::string_view, TermStats> terms;
  for (std::size_t s = 0; s < document.sentences.size(); ++s) {
    const Sentence& sentence = document.sentences[s];
    bool first_word = true;
    for (std::size_t i = sentence.start; i < sentence.end; ++i) {
      const Token& t = tokens[i];
      if (!t.is_word) continue;
      TermStats& st = terms[t.folded];
      ++st.tf;
      st.sentence_ids.push_back(s);
      if (unicode::is_acronym(t.surface)) {
        ++st.acronym;
      } else if (!first_word && unicode::starts_upper(t.surface)) {
        ++st.capitalized;
      }
      first_word = false;
      if (i > sentence.start && tokens[i - 1].is_word) {
        ++st.left[tokens[i - 1].folded];
        ++st.left_total;
      }
      if (i + 1 < sentence.end && tokens[i + 1].is_word) {
        ++st.right[tokens[i + 1].folded];
        ++st.right_total;
      }
    }
  }

  // Frequency statistics over content terms.
  std::vector<double> content_tf;
  for (const auto& [word, st] : terms) {
    if (!stop.contains(word)) content_tf.push_back(static_cast<double>(st.tf));
  }
  if (content_tf.empty()) return {};
  const double mean_tf = std::accumulate(content_tf.begin(), content_tf.end(), 0.0) / content_tf.size();
  double var = 0.0;
  for (double x : content_tf) var += (x - mean_tf) * (x - mean_tf);
  const double std_tf = std::sqrt(var / content_tf.size());
  const double max_tf = *std::max_element(content_tf.begin(), content_tf.end());
  const double sentence_count = static_cast<double>(document.sentences.size());

  std::unordered_map<std::string_view, double> term_score;
  for (const auto& [word, st] : terms) {
    if (stop.contains(word)) continue;
    const double tf = static_cast<double>(st.tf);
    const double casing = static_cast<double>(std::max(st.capitalized, st.acronym)) / (1.0 + std::log(tf));
    const double position = std::log(std::log(3.0 + median(st.sentence_ids)));
    const double frequency = tf / (mean_tf + std_tf);
    const double left_ratio = st.left_total ? static_cast<double>(st.left.size()) / st.left_total : 0.0;
    const double right_ratio = st.right_total ? static_cast<double>(st.right.size()) / st.right_total : 0.0;
    const double relatedness = 1.0 + (left_ratio + right_ratio) * tf / max_tf;
    std::unordered_set<std::size_t> distinct(st.sentence_ids.begin(), st.sentence_ids.end());
    const double spread = static_cast<double>(distinct.size()) / sentence_count;
    term_score[word] =
        (relatedness * position) / (casing + frequency / relatedness + spread / relatedness);
  }

  struct Scored {
    const Candidate* candidate;
    double score;
  };
  const auto candidates = collect_candidates(document, config);
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    double product = 1.0, sum = 0.0;
    for (std::size_t i = c.first.start; i < c.first.end; ++i) {
      const auto it = term_score.find(tokens[i].folded);
      if (it == term_score.end()) continue;  // interior stopword
      product *= it->second;
      sum += it->second;
    }
    scored.push_back({&c, product / (static_cast<double>(c.count) * (1.0 + sum))});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.candidate->first.start != b.candidate->first.start) {
      return a.candidate->first.start < b.candidate->first.start;
    }
    return a.candidate->n < b.candidate->n;
  });

  const std::size_t budget = config.topk(document.length_words);
  std::vector<Keyword> out;
  for (const auto& s : scored) {
    if (out.size() >= budget) break;
    const bool near_duplicate = std::any_of(out.begin(), out.end(), [&](const Keyword& k) {
      return edit_similarity(k.folded, s.candidate->folded) >= config.dedup_similarity;
    });
    if (near_duplicate) continue;
    out.push_back({s.candidate->surface, s.candidate->folded, s.score, out.size()});
  }
  return out;
}

std::vector<Span> random_extract(const Document& document, const ExtractorConfig& config) {
  config.validate();
  const std::size_t l = document.length_words;
  if (l == 0) return {};
  const std::size_t target = (l + 4) / 5;

  std::vector<std::vector<Span>> pools(static_cast<std::size_t>(config.max_ngram) + 1);
  for (const auto& g : enumerate_ngrams(document, 1, config.max_ngram)) {
    pools[static_cast<std::size_t>(g.n)].push_back(g.span);
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> pick_n(1, config.max_ngram);
  std::vector<bool> taken(document.tokens.size(), false);
  std::vector<Span> chosen;
  std::size_t kept = 0;
  auto free = [&](Span s) {
    for (std::size_t i = s.start; i < s.end; ++i) {
      if (taken[i]) return false;
    }
    return true;
  };
  auto take = [&](Span s) {
    for (std::size_t i = s.start; i < s.end; ++i) taken[i] = true;
    chosen.push_back(s);
    kept += s.size();  // n-grams hold word tokens only
  };

  const std::size_t max_attempts = 64 * l + 64;
  for (std::size_t attempt = 0; attempt < max_attempts && kept < target; ++attempt) {
    const auto& pool = pools[static_cast<std::size_t>(pick_n(rng))];
    if (pool.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const Span s = pool[pick(rng)];
    if (free(s)) take(s);
  }
  // Crowded documents: fill from the remaining free words in order.
  for (const Span& s : pools[1]) {
    if (kept >= target) break;
    if (free(s)) take(s);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Embedding fuse_embeddings(const Embedding& doc, const Embedding& target, double lambda) {
  if (doc.size() != target.size()) throw DimensionMismatch(doc.size(), target.size());
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
  Embedding out(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) out[i] = lambda * doc[i] + (1.0 - lambda) * target[i];
  return out;
}

double cosine(const Embedding& u, const Embedding& v) {
  if (u.size() != v.size()) throw DimensionMismatch(u.size(), v.size());
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::vector<Keyword> target_aware_extract(const Document& document, const TargetInfo& tri,
                                          Embedder& embedder, const ExtractorConfig& config) {
  config.validate();
  if (tri.text.empty()) throw InvalidArgument("target-related information must be non-empty");
  const auto candidates = collect_candidates(document, config);
  if (candidates.empty()) return {};

  std::vector<std::string> texts;
  texts.reserve(candidates.size() + 2);
  texts.push_back(document.raw);
  texts.push_back(tri.text);
  for (const auto& c : candidates) texts.push_back(c.surface);
  const auto vectors = embed(texts, embedder);
  const Embedding fused = fuse_embeddings(vectors[0], vectors[1], config.lambda);

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) ranked.emplace_back(cosine(fused, vectors[i + 2]), i);
  // Scores are compared at 1e-12 resolution so rounding noise (e.g. from
  // rescaled embeddings) falls through to the tie rules.
  auto bucket = [](double score) { return std::llround(score * 1e12); };
  std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (bucket(a.first) != bucket(b.first)) return bucket(a.first) > bucket(b.first);
    const Candidate& ca = candidates[a.second];
    const Candidate& cb = candidates[b.second];
    if (ca.first.start != cb.first.start) return ca.first.start < cb.first.start;
    return ca.n < cb.n;
  });

  const std::size_t keep = std::max<std::size_t>(1, ceil_fraction(config.keep_ratio, candidates.size()));
  std::vector<Keyword> out;
  for (std::size_t r = 0; r < keep && r < ranked.size(); ++r) {
    const Candidate& c = candidates[ranked[r].second];
    out.push_back({c.surface, c.folded, ranked[r].first, r});
  }
  return out;
}

double edit_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

}  // namespace geniuskit
