#include "geniuskit/augmenters.hpp"

#include <algorithm>
#include <map>

#include "geniuskit/error.hpp"
#include "geniuskit/parallel.hpp"
#include "geniuskit/unicode.hpp"

namespace geniuskit {

bool MrcExample::answer_matches() const {
  return !answer.empty() && answer_start <= paragraph.size() &&
         std::string_view(paragraph).substr(answer_start, answer.size()) == answer;
}

RunReport& RunReport::operator+=(const RunReport& other) {
  attempted += other.attempted;
  emitted += other.emitted;
  discarded += other.discarded;
  failed += other.failed;
  return *this;
}

nlohmann::json RunReport::to_json() const {
  return {{"attempted", attempted}, {"emitted", emitted}, {"discarded", discarded}, {"failed", failed}};
}

std::uint64_t output_seed(std::uint64_t root, std::size_t record_index, std::size_t output_index) {
  auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  return mix(mix(root ^ mix(record_index)) ^ output_index);
}

namespace {

std::size_t skip_space(std::string_view s, std::size_t pos) {
  while (pos < s.size()) {
    const auto d = unicode::decode(s, pos);
    if (!unicode::is_space(d.cp)) break;
    pos += d.len;
  }
  return pos;
}

std::string trim(std::string_view s) {
  const std::size_t begin = skip_space(s, 0);
  std::size_t end = s.size();
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\n' || s[end - 1] == '\r')) --end;
  return std::string(s.substr(begin, end - begin));
}

GenerationRequest make_request(const AugmentOptions& options, std::string sketch, std::optional<std::string> prompt,
                               std::uint64_t seed, std::string request_id, int max_new_tokens) {
  GenerationRequest r;
  r.sketch_text = std::move(sketch);
  r.prompt = std::move(prompt);
  r.n = 1;
  r.max_new_tokens = max_new_tokens;
  r.num_beams = options.num_beams;
  r.do_sample = options.do_sample;
  r.top_k = options.top_k;
  r.top_p = options.top_p;
  r.seed = seed;
  r.request_id = std::move(request_id);
  return r;
}

std::optional<std::string> label_prompt(const AugmentOptions& options, const std::string& label) {
  if (!options.attribute_control) return std::nullopt;
  return label + options.separator;
}

std::string finish_text(const AugmentOptions& options, const std::string& label, std::string_view generated) {
  if (!options.attribute_control) return trim(generated);
  return trim(strip_prompt(generated, label, options.separator));
}

}  // namespace

std::string strip_prompt(std::string_view generated, std::string_view prompt, std::string_view separator) {
  std::size_t pos = skip_space(generated, 0);
  if (prompt.empty() || generated.substr(pos, prompt.size()) != prompt) return std::string(generated);
  pos = skip_space(generated, pos + prompt.size());
  if (!separator.empty()) {
    if (generated.substr(pos, separator.size()) != separator) return std::string(generated);
    pos = skip_space(generated, pos + separator.size());
  }
  return std::string(generated.substr(pos));
}

Sketch target_aware_sketch(std::string_view text, const TargetInfo& tri, Embedder& embedder,
                           const ExtractorConfig& config, std::string_view mask_token) {
  const Document doc = tokenize(std::string(text));
  const auto keywords = target_aware_extract(doc, tri, embedder, config);
  const Projection projection = project(doc, keywords);
  return render(projection, SketchTemplate::kT4, mask_token);
}

// ---- classification -------------------------------------------------------

ClassificationOutput augment_classification(const ClassificationRecord& record, std::size_t record_index,
                                            std::size_t multiplier, const AugmentOptions& options,
                                            Generator& generator, Embedder& embedder) {
  ClassificationOutput out;
  out.report.attempted = multiplier;
  std::string sketch;
  try {
    sketch = target_aware_sketch(record.text, {record.label, TargetInfo::Kind::kClassLabel}, embedder,
                                 options.extractor, options.mask_token)
                 .text();
  } catch (const Error&) {
    out.report.failed = multiplier;
    return out;
  }
  for (std::size_t j = 0; j < multiplier; ++j) {
    try {
      const auto request = make_request(options, sketch, label_prompt(options, record.label),
                                        output_seed(options.seed, record_index, j),
                                        record.id + ":" + std::to_string(j), options.max_new_tokens);
      const auto response = generate(request, generator);
      ClassificationRecord aug;
      aug.id = record.id + "-aug" + std::to_string(j);
      aug.text = finish_text(options, record.label, response.texts.front());
      aug.label = record.label;
      aug.provenance = {record.id};
      out.records.push_back(std::move(aug));
      ++out.report.emitted;
    } catch (const Error&) {
      ++out.report.failed;
    }
  }
  return out;
}

namespace {

ClassificationOutput augment_mixup_record(std::span<const ClassificationRecord> records,
                                          std::span<const std::vector<std::string>> fragments,
                                          const std::vector<std::size_t>& group, std::size_t member,
                                          std::size_t multiplier, const AugmentOptions& options, Generator& generator) {
  ClassificationOutput out;
  out.report.attempted = multiplier;
  const std::size_t self = group[member];
  std::vector<std::size_t> others;
  for (std::size_t g : group) {
    if (g != self) others.push_back(g);
  }
  const std::size_t partners = std::min(options.mixup_k - 1, others.size());
  for (std::size_t j = 0; j < multiplier; ++j) {
    std::vector<MixupInput> inputs;
    inputs.push_back({records[self].id, records[self].label, fragments[self]});
    for (std::size_t t = 0; t < partners; ++t) {
      const std::size_t o = others[(member + j * partners + t) % others.size()];
      inputs.push_back({records[o].id, records[o].label, fragments[o]});
    }
    Sketch sketch;
    try {
      sketch = mixup_sketch(inputs, options.mask_token);
    } catch (const InvalidArgument&) {
      ++out.report.discarded;  // not enough fragments to mix
      continue;
    }
    try {
      const auto request = make_request(options, sketch.text(), label_prompt(options, records[self].label),
                                        output_seed(options.seed, self, j),
                                        records[self].id + ":mix:" + std::to_string(j), options.max_new_tokens);
      const auto response = generate(request, generator);
      ClassificationRecord aug;
      aug.id = records[self].id + "-mix" + std::to_string(j);
      aug.text = finish_text(options, records[self].label, response.texts.front());
      aug.label = records[self].label;
      aug.provenance = sketch.source_ids;
      out.records.push_back(std::move(aug));
      ++out.report.emitted;
    } catch (const Error&) {
      ++out.report.failed;
    }
  }
  return out;
}

}  // namespace

ClassificationOutput augment_classification_corpus(std::span<const ClassificationRecord> records,
                                                   std::size_t multiplier, const AugmentOptions& options,
                                                   Generator& generator, Embedder& embedder) {
  std::vector<ClassificationOutput> parts;
  if (options.mixup_k >= 2) {
    const auto fragments = parallel::map_ordered(records.size(), options.workers, [&](std::size_t i) {
      try {
        return target_aware_sketch(records[i].text, {records[i].label, TargetInfo::Kind::kClassLabel}, embedder,
                                   options.extractor, options.mask_token)
            .fragments();
      } catch (const Error&) {
        return std::vector<std::string>{};
      }
    });
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) groups[records[i].label].push_back(i);
    std::vector<std::pair<const std::vector<std::size_t>*, std::size_t>> membership(records.size());
    for (const auto& [label, members] : groups) {
      for (std::size_t m = 0; m < members.size(); ++m) membership[members[m]] = {&members, m};
    }
    parts = parallel::map_ordered(records.size(), options.workers, [&](std::size_t i) {
      const auto& [group, member] = membership[i];
      if (group->size() < 2) return augment_classification(records[i], i, multiplier, options, generator, embedder);
      return augment_mixup_record(records, fragments, *group, member, multiplier, options, generator);
    });
  } else {
    parts = parallel::map_ordered(records.size(), options.workers, [&](std::size_t i) {
      return augment_classification(records[i], i, multiplier, options, generator, embedder);
    });
  }
  ClassificationOutput out;
  for (auto& p : parts) {
    out.report += p.report;
    std::move(p.records.begin(), p.records.end(), std::back_inserter(out.records));
  }
  return out;
}

// ---- NER -------------------------------------------------------------------

namespace {

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string tag_type(std::string_view tag) { return tag.size() > 2 ? std::string(tag.substr(2)) : std::string(); }

}  // namespace

void Gazetteer::add(std::span<const std::string> tokens, const std::string& type) {
  if (tokens.empty() || type.empty()) return;
  const std::string surface = join_tokens(tokens);
  auto [it, inserted] = counts_.try_emplace(surface);
  if (inserted) order_.push_back(surface);
  ++it->second[type];
  max_tokens_ = std::max(max_tokens_, tokens.size());

  // Recompute the winner: highest count, first-seen type on ties.
  auto& winner = types_[surface];
  if (winner.empty() || it->second[type] > it->second[winner]) winner = type;
}

Gazetteer Gazetteer::build(std::span<const NerSequence> training) {
  Gazetteer g;
  for (const auto& seq : training) {
    for (const auto& [span, type] : bio_entities(seq.tags)) {
      g.add(std::span(seq.tokens).subspan(span.start, span.size()), type);
    }
  }
  return g;
}

std::optional<std::string> Gazetteer::type_of(std::string_view surface) const {
  const auto it = types_.find(std::string(surface));
  if (it == types_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<Span, std::string>> bio_entities(std::span<const std::string> tags) {
  std::vector<std::pair<Span, std::string>> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    const bool begin = tag.rfind("B-", 0) == 0;
    const bool inside = tag.rfind("I-", 0) == 0;
    if (!begin && !inside) continue;
    const std::string type = tag_type(tag);
    if (inside && !out.empty() && out.back().first.end == i && out.back().second == type) {
      out.back().first.end = i + 1;
    } else {
      out.push_back({{i, i + 1}, type});
    }
  }
  return out;
}

bool bio_well_formed(std::span<const std::string> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O" || tag == "X") continue;
    if (tag.rfind("B-", 0) == 0 && tag.size() > 2) continue;
    if (tag.rfind("I-", 0) != 0 || tag.size() <= 2 || i == 0) return false;
    const std::string& prev = tags[i - 1];
    if ((prev.rfind("B-", 0) != 0 && prev.rfind("I-", 0) != 0) || tag_type(prev) != tag_type(tag)) return false;
  }
  return true;
}

std::vector<std::string> relabel(std::span<const std::string> tokens, const Gazetteer& gazetteer, RelabelMode mode) {
  const std::string outside = mode == RelabelMode::kConservative ? "X" : "O";
  std::vector<std::string> tags(tokens.size(), outside);
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    std::string type;
    for (std::size_t len = std::min(gazetteer.max_tokens(), tokens.size() - i); len >= 1; --len) {
      if (auto t = gazetteer.type_of(join_tokens(tokens.subspan(i, len)))) {
        matched = len;
        type = std::move(*t);
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    tags[i] = "B-" + type;
    for (std::size_t k = 1; k < matched; ++k) tags[i + k] = "I-" + type;
    i += matched;
  }
  return tags;
}

std::vector<Passage> concat_sequences(std::span<const NerSequence> sequences, std::size_t max_words) {
  std::vector<Passage> out;
  Passage current;
  auto flush = [&] {
    if (!current.tokens.empty()) out.push_back(std::move(current));
    current = Passage{};
  };
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& seq = sequences[s];
    if (seq.tokens.size() != seq.tags.size()) throw InvalidArgument("NER sequence " + seq.id + " has mismatched tags");
    if (seq.tokens.empty()) continue;
    if (!current.tokens.empty() && current.tokens.size() + seq.tokens.size() > max_words) flush();
    for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
      current.tokens.push_back(seq.tokens[t]);
      current.tags.push_back(seq.tags[t]);
      current.source.push_back({s, t});
    }
    current.source_ids.push_back(seq.id);
  }
  flush();
  return out;
}

NerOutput augment_ner(std::span<const Passage> passages, const Gazetteer& gazetteer, std::size_t multiplier,
                      const AugmentOptions& options, Generator& generator, Embedder& embedder) {
  auto parts = parallel::map_ordered(passages.size(), options.workers, [&](std::size_t p) {
    NerOutput out;
    const Passage& passage = passages[p];
    out.report.attempted = multiplier;
    const std::string text = join_tokens(passage.tokens);
    std::vector<std::string> entities;
    for (const auto& [span, type] : bio_entities(passage.tags)) {
      std::string surface = join_tokens(std::span(passage.tokens).subspan(span.start, span.size()));
      if (std::find(entities.begin(), entities.end(), surface) == entities.end()) entities.push_back(std::move(surface));
    }
    // Passages without entities fall back to their own text as target information.
    const TargetInfo tri{entities.empty() ? text : join_tokens(entities), TargetInfo::Kind::kEntityList};
    std::string sketch;
    try {
      sketch = target_aware_sketch(text, tri, embedder, options.extractor, options.mask_token).text();
    } catch (const Error&) {
      out.report.failed = multiplier;
      return out;
    }
    const std::string base_id = passage.source_ids.empty() ? "passage" + std::to_string(p) : passage.source_ids.front();
    for (std::size_t j = 0; j < multiplier; ++j) {
      try {
        const auto request = make_request(options, sketch, std::nullopt, output_seed(options.seed, p, j),
                                          base_id + ":ner:" + std::to_string(j), options.max_new_tokens);
        const auto response = generate(request, generator);
        const Document generated = tokenize(response.texts.front());
        NerSequence seq;
        seq.id = base_id + "-aug" + std::to_string(j);
        for (const auto& t : generated.tokens) seq.tokens.push_back(t.surface);
        seq.tags = relabel(seq.tokens, gazetteer, options.relabel_mode);
        const bool informative =
            std::any_of(seq.tags.begin(), seq.tags.end(), [](const std::string& t) { return t.rfind("B-", 0) == 0; });
        if (!informative) {
          ++out.report.discarded;
          continue;
        }
        seq.provenance = passage.source_ids;
        out.sequences.push_back(std::move(seq));
        ++out.report.emitted;
      } catch (const Error&) {
        ++out.report.failed;
      }
    }
    return out;
  });
  NerOutput out;
  for (auto& p : parts) {
    out.report += p.report;
    std::move(p.sequences.begin(), p.sequences.end(), std::back_inserter(out.sequences));
  }
  return out;
}

// ---- MRC -------------------------------------------------------------------

namespace {

struct AnswerSentence {
  std::size_t begin = 0;  // byte range of the sentence(s) holding the answer
  std::size_t end = 0;
};

AnswerSentence locate_answer_sentence(const Document& doc, std::size_t answer_begin, std::size_t answer_end) {
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    if (t.char_end > answer_begin && t.char_start < answer_end) {
      if (!first) first = i;
      last = i;
    }
  }
  if (!first) throw InvalidArgument("answer does not cover any token");
  const Sentence& s_first = doc.sentences[doc.sentence_of(*first)];
  const Sentence& s_last = doc.sentences[doc.sentence_of(*last)];
  return {doc.tokens[s_first.start].char_start, doc.tokens[s_last.end - 1].char_end};
}

std::string context_sketch(std::string_view text, const std::string& question, const AugmentOptions& options,
                           Embedder& embedder) {
  const Document doc = tokenize(std::string(text));
  if (doc.length_words == 0) return {};
  const auto keywords = target_aware_extract(doc, {question, TargetInfo::Kind::kQuestion}, embedder, options.extractor);
  return render(project(doc, keywords), SketchTemplate::kT4, options.mask_token).text();
}

}  // namespace

MrcSketch mrc_sketch(const MrcExample& example, const AugmentOptions& options, Embedder& embedder) {
  if (!example.answer_matches()) throw InvalidArgument("MRC example " + example.id + ": answer not at answer_start");
  const Document doc = tokenize(example.paragraph);
  const AnswerSentence sa = locate_answer_sentence(doc, example.answer_start, example.answer_start + example.answer.size());
  const std::string_view paragraph = example.paragraph;

  MrcSketch out;
  out.answer_sentence = std::string(paragraph.substr(sa.begin, sa.end - sa.begin));
  const std::string pre = context_sketch(paragraph.substr(0, sa.begin), example.question, options, embedder);
  const std::string post = context_sketch(paragraph.substr(sa.end), example.question, options, embedder);
  for (const std::string* part : std::initializer_list<const std::string*>{&pre, &out.answer_sentence, &post}) {
    if (part->empty()) continue;
    if (!out.sketch.empty()) out.sketch.push_back(' ');
    out.sketch += *part;
  }
  return out;
}

MrcOutput augment_mrc(const MrcExample& example, std::size_t example_index, std::size_t multiplier,
                      const AugmentOptions& options, Generator& generator, Embedder& embedder) {
  MrcOutput out;
  out.report.attempted = multiplier;
  MrcSketch sketch;
  try {
    sketch = mrc_sketch(example, options, embedder);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error&) {
    out.report.failed = multiplier;
    return out;
  }
  for (std::size_t j = 0; j < multiplier; ++j) {
    try {
      const auto request = make_request(options, sketch.sketch, std::nullopt, output_seed(options.seed, example_index, j),
                                        example.id + ":mrc:" + std::to_string(j), options.max_new_tokens);
      const auto response = generate(request, generator);
      const std::string& paragraph = response.texts.front();

      std::size_t start = std::string::npos;
      const std::size_t copy = paragraph.find(sketch.answer_sentence);
      if (copy != std::string::npos) {
        const std::size_t hit = paragraph.find(example.answer, copy);
        if (hit != std::string::npos && hit + example.answer.size() <= copy + sketch.answer_sentence.size()) start = hit;
      }
      if (start == std::string::npos) start = paragraph.find(example.answer);
      if (start == std::string::npos) {
        ++out.report.discarded;
        continue;
      }
      MrcExample aug;
      aug.id = example.id + "-aug" + std::to_string(j);
      aug.paragraph = paragraph;
      aug.question = example.question;
      aug.answer = example.answer;
      aug.answer_start = start;
      aug.provenance = {example.id};
      out.examples.push_back(std::move(aug));
      ++out.report.emitted;
    } catch (const Error&) {
      ++out.report.failed;
    }
  }
  return out;
}

MrcOutput augment_mrc_corpus(std::span<const MrcExample> examples, std::size_t multiplier,
                             const AugmentOptions& options, Generator& generator, Embedder& embedder) {
  auto parts = parallel::map_ordered(examples.size(), options.workers, [&](std::size_t i) {
    return augment_mrc(examples[i], i, multiplier, options, generator, embedder);
  });
  MrcOutput out;
  for (auto& p : parts) {
    out.report += p.report;
    std::move(p.examples.begin(), p.examples.end(), std::back_inserter(out.examples));
  }
  return out;
}

// ---- fine-tuning pairs -----------------------------------------------------

std::vector<SketchTextPair> build_finetune_pairs(std::span<const ClassificationRecord> records,
                                                 const AugmentOptions& options, Embedder& embedder) {
  return parallel::map_ordered(records.size(), options.workers, [&](std::size_t i) {
    const auto& r = records[i];
    std::string sketch = target_aware_sketch(r.text, {r.label, TargetInfo::Kind::kClassLabel}, embedder,
                                             options.extractor, options.mask_token)
                             .text();
    if (options.attribute_control) sketch = r.label + options.separator + " " + sketch;
    return SketchTextPair{std::move(sketch), r.text};
  });
}

}  // namespace geniuskit
