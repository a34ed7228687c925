#include "geniuskit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "geniuskit/error.hpp"
#include "geniuskit/parallel.hpp"

namespace geniuskit::metrics {

namespace {

using Tokens = std::vector<std::string>;

std::map<std::vector<std::string>, std::size_t> ngram_counts(std::span<const std::string> tokens, int n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= tokens.size(); ++i) ++counts[Tokens(tokens.begin() + i, tokens.begin() + i + len)];
  return counts;
}

std::size_t clipped_matches(std::span<const std::string> reference, std::span<const std::string> candidate, int n) {
  const auto ref = ngram_counts(reference, n);
  const auto cand = ngram_counts(candidate, n);
  std::size_t matched = 0;
  for (const auto& [gram, count] : ref) {
    const auto it = cand.find(gram);
    if (it != cand.end()) matched += std::min(count, it->second);
  }
  return matched;
}

double f1(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

double sketch_lost_tokens(const std::vector<Tokens>& fragments, const Tokens& generated) {
  if (fragments.empty()) throw InvalidArgument("sketch-lost is undefined for a sketch without fragments");
  const std::unordered_set<std::string> present(generated.begin(), generated.end());
  std::unordered_set<std::string> words;
  for (const auto& f : fragments) words.insert(f.begin(), f.end());
  std::size_t missing_words = 0;
  for (const auto& w : words) missing_words += present.count(w) == 0;
  std::size_t missing_fragments = 0;
  for (const auto& f : fragments) missing_fragments += !contains_run(generated, f);
  const double word_level = words.empty() ? 0.0 : static_cast<double>(missing_words) / words.size();
  const double fragment_level = static_cast<double>(missing_fragments) / fragments.size();
  return 100.0 * 0.5 * (word_level + fragment_level);
}

std::vector<Tokens> tokenized_fragments(const std::vector<std::string>& fragments) {
  std::vector<Tokens> out;
  for (const auto& f : fragments) {
    auto t = folded_tokens(f);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::size_t word_count(std::string_view text) { return tokenize(std::string(text)).length_words; }

}  // namespace

bool contains_run(std::span<const std::string> haystack, std::span<const std::string> needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

double ngram_recall(std::span<const std::string> original, std::span<const std::string> generated, int n) {
  if (original.size() < static_cast<std::size_t>(n)) return 0.0;
  const std::size_t total = original.size() - static_cast<std::size_t>(n) + 1;
  return static_cast<double>(clipped_matches(original, generated, n)) / static_cast<double>(total);
}

double sketch_lost(std::string_view sketch_text, std::string_view generated, std::string_view mask_token) {
  return sketch_lost_tokens(tokenized_fragments(sketch_fragments(sketch_text, mask_token)), folded_tokens(generated));
}

double sketch_lost(const Sketch& sketch, std::string_view generated) {
  return sketch_lost_tokens(tokenized_fragments(sketch.fragments()), folded_tokens(generated));
}

double recall(std::string_view original, std::string_view generated) {
  const Tokens o = folded_tokens(original);
  if (o.empty()) throw InvalidArgument("recall needs a non-empty original");
  const Tokens g = folded_tokens(generated);
  const double uni = ngram_recall(o, g, 1);
  const double bi = o.size() < 2 ? 0.0 : ngram_recall(o, g, 2);
  const double lcs = static_cast<double>(lcs_length(o, g)) / static_cast<double>(o.size());
  return 100.0 * (uni + bi + lcs) / 3.0;
}

double diversity(std::string_view original, std::string_view generated) {
  const Tokens g = folded_tokens(generated);
  if (g.empty()) return 0.0;
  const Tokens o = folded_tokens(original);
  const std::unordered_set<std::string> original_vocab(o.begin(), o.end());
  const std::unordered_set<std::string> generated_vocab(g.begin(), g.end());
  std::size_t fresh = 0;
  for (const auto& w : generated_vocab) fresh += original_vocab.count(w) == 0;
  return 100.0 * static_cast<double>(fresh) / static_cast<double>(generated_vocab.size());
}

double length_ratio(std::string_view original, std::string_view generated) {
  const std::size_t o = folded_tokens(original).size();
  if (o == 0) throw InvalidArgument("length ratio needs a non-empty original");
  return static_cast<double>(folded_tokens(generated).size()) / static_cast<double>(o);
}

RougeScore rouge_n(std::string_view reference, std::string_view candidate, int n) {
  if (n != 1 && n != 2) throw InvalidArgument("rouge_n supports n = 1 or 2");
  const Tokens ref = folded_tokens(reference);
  if (ref.empty()) throw InvalidArgument("ROUGE needs a non-empty reference");
  const Tokens cand = folded_tokens(candidate);
  const auto len = static_cast<std::size_t>(n);
  const std::size_t matched = clipped_matches(ref, cand, n);
  RougeScore s;
  if (ref.size() >= len) s.recall = 100.0 * matched / static_cast<double>(ref.size() - len + 1);
  if (cand.size() >= len) s.precision = 100.0 * matched / static_cast<double>(cand.size() - len + 1);
  s.f1 = f1(s.precision, s.recall);
  return s;
}

RougeScore rouge_l(std::string_view reference, std::string_view candidate) {
  const Tokens ref = folded_tokens(reference);
  if (ref.empty()) throw InvalidArgument("ROUGE needs a non-empty reference");
  const Tokens cand = folded_tokens(candidate);
  const auto lcs = static_cast<double>(lcs_length(ref, cand));
  RougeScore s;
  s.recall = 100.0 * lcs / static_cast<double>(ref.size());
  s.precision = cand.empty() ? 0.0 : 100.0 * lcs / static_cast<double>(cand.size());
  s.f1 = f1(s.precision, s.recall);
  return s;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["sketch_lost"] = sketch_lost;
  j["recall"] = recall;
  j["diversity"] = diversity;
  j["length_ratio"] = length_ratio;
  j["masking_ratio_mean"] = masking_ratio_mean;
  j["masking_ratio_std"] = masking_ratio_std;
  j["n"] = n;
  j["perplexity"] = perplexity ? nlohmann::json(*perplexity) : nlohmann::json(nullptr);
  j["clf_error"] = clf_error ? nlohmann::json(*clf_error) : nlohmann::json(nullptr);
  return j;
}

std::string strip_masks(std::string_view text, std::string_view mask_token) {
  if (mask_token.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (std::size_t hit = text.find(mask_token); hit != std::string_view::npos; hit = text.find(mask_token, pos)) {
    out.append(text.substr(pos, hit - pos));
    out.push_back(' ');
    pos = hit + mask_token.size();
  }
  out.append(text.substr(pos));
  return out;
}

RecordScores score_record(const EvalRecord& record, std::string_view mask_token) {
  RecordScores s;
  const std::string generated = strip_masks(record.generated, mask_token);
  s.sketch_lost = sketch_lost(record.sketch, generated, mask_token);
  s.recall = recall(record.original, generated);
  s.diversity = diversity(record.original, generated);
  s.length_ratio = length_ratio(record.original, generated);

  const std::size_t original_words = word_count(record.original);
  std::size_t kept = 0;
  for (const auto& f : sketch_fragments(record.sketch, mask_token)) kept += word_count(f);
  s.masking_ratio = original_words == 0
                        ? 0.0
                        : 100.0 * std::clamp(1.0 - static_cast<double>(kept) / original_words, 0.0, 1.0);
  return s;
}

MetricReport evaluate_corpus(std::span<const EvalRecord> records, std::string_view mask_token, int workers) {
  if (records.empty()) throw InvalidArgument("evaluate_corpus needs at least one record");
  const auto scores =
      parallel::map_ordered(records.size(), workers, [&](std::size_t i) { return score_record(records[i], mask_token); });

  MetricReport report;
  report.n = scores.size();
  const double n = static_cast<double>(scores.size());
  for (const auto& s : scores) {
    report.sketch_lost += s.sketch_lost;
    report.recall += s.recall;
    report.diversity += s.diversity;
    report.length_ratio += s.length_ratio;
    report.masking_ratio_mean += s.masking_ratio;
  }
  report.sketch_lost /= n;
  report.recall /= n;
  report.diversity /= n;
  report.length_ratio /= n;
  report.masking_ratio_mean /= n;
  double var = 0.0;
  for (const auto& s : scores) var += (s.masking_ratio - report.masking_ratio_mean) * (s.masking_ratio - report.masking_ratio_mean);
  report.masking_ratio_std = std::sqrt(var / n);
  return report;
}

}  // namespace geniuskit::metrics
