#include "geniuskit/sketcher.hpp"

#include <algorithm>
#include <unordered_map>

#include "geniuskit/error.hpp"
#include "geniuskit/unicode.hpp"

namespace geniuskit {

std::string_view to_string(SketchTemplate t) {
  switch (t) {
    case SketchTemplate::kT1:
      return "t1";
    case SketchTemplate::kT2:
      return "t2";
    case SketchTemplate::kT3:
      return "t3";
    case SketchTemplate::kT4:
      return "t4";
    case SketchTemplate::kT4Random:
      return "t4random";
  }
  return "t4";
}

SketchTemplate parse_template(std::string_view name) {
  const std::string folded = unicode::fold_case(name);
  if (folded == "t1") return SketchTemplate::kT1;
  if (folded == "t2") return SketchTemplate::kT2;
  if (folded == "t3") return SketchTemplate::kT3;
  if (folded == "t4") return SketchTemplate::kT4;
  if (folded == "t4random" || folded == "t4-random" || folded == "t4_random") return SketchTemplate::kT4Random;
  throw InvalidArgument("unknown sketch template: " + std::string(name));
}

std::size_t Projection::kept_words() const {
  std::size_t n = 0;
  for (const Span& s : kept_spans) n += document->words_in(s);
  return n;
}

std::string Sketch::text() const {
  std::string out;
  for (const auto& e : elements) {
    if (!out.empty()) out.push_back(' ');
    if (const auto* f = std::get_if<Fragment>(&e)) {
      out += f->text;
    } else {
      out += mask_token;
    }
  }
  return out;
}

std::vector<std::string> Sketch::fragments() const {
  std::vector<std::string> out;
  for (const auto& e : elements) {
    if (const auto* f = std::get_if<Fragment>(&e)) out.push_back(f->text);
  }
  return out;
}

std::size_t Sketch::mask_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(), [](const auto& e) { return std::holds_alternative<Mask>(e); }));
}

std::vector<std::string> sketch_fragments(std::string_view sketch_text, std::string_view mask_token) {
  std::vector<std::string> out;
  auto push_trimmed = [&](std::string_view piece) {
    const auto first = piece.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return;
    const auto last = piece.find_last_not_of(" \t\r\n");
    out.emplace_back(piece.substr(first, last - first + 1));
  };
  if (mask_token.empty()) {
    push_trimmed(sketch_text);
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    const auto hit = sketch_text.find(mask_token, pos);
    if (hit == std::string_view::npos) break;
    push_trimmed(sketch_text.substr(pos, hit - pos));
    pos = hit + mask_token.size();
  }
  push_trimmed(sketch_text.substr(pos));
  return out;
}

nlohmann::json to_json(const SketchTextPair& pair) {
  nlohmann::json j;
  j["sketch"] = pair.sketch;
  j["text"] = pair.text;
  return j;
}

std::string to_jsonl_line(const SketchTextPair& pair) {
  return to_json(pair).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::vector<Keyword> keywords_from_strings(std::span<const std::string> surfaces) {
  std::vector<Keyword> out;
  for (const auto& s : surfaces) {
    Keyword k;
    k.surface = s;
    k.folded = unicode::fold_case(s);
    k.rank = out.size();
    k.score = static_cast<double>(out.size());
    out.push_back(std::move(k));
  }
  return out;
}

Projection project(const Document& document, std::span<const Keyword> keywords) {
  Projection p;
  p.document = &document;
  const auto& tokens = document.tokens;

  std::unordered_map<std::string_view, std::vector<std::size_t>> positions;
  for (std::size_t i = 0; i < tokens.size(); ++i) positions[tokens[i].folded].push_back(i);

  std::vector<Span> occurrences;
  for (const Keyword& kw : keywords) {
    const Document pattern = tokenize(kw.surface);
    const auto& needle = pattern.tokens;
    std::optional<Span> first;
    if (!needle.empty()) {
      const auto it = positions.find(needle.front().folded);
      if (it != positions.end()) {
        for (std::size_t start : it->second) {
          const std::size_t end = start + needle.size();
          if (end > tokens.size()) break;
          bool match = true;
          for (std::size_t k = 1; k < needle.size() && match; ++k) match = tokens[start + k].folded == needle[k].folded;
          if (!match || document.sentence_of(start) != document.sentence_of(end - 1)) continue;
          occurrences.push_back({start, end});
          if (!first) first = Span{start, end};
        }
      }
    }
    if (!first) {
      p.warnings.push_back("keyword \"" + kw.surface + "\" has no occurrence in the document");
      continue;
    }
    Keyword kept = kw;
    kept.rank = p.keyword_order.size();
    p.keyword_order.push_back(std::move(kept));
    p.keyword_first.push_back(*first);
  }
  p.kept_spans = merge_spans(std::move(occurrences));
  return p;
}

Projection project_spans(const Document& document, std::vector<Span> spans) {
  Projection p;
  p.document = &document;
  for (const Span& s : spans) {
    if (s.start >= s.end || s.end > document.tokens.size()) throw InvalidArgument("span outside document");
  }
  p.kept_spans = merge_spans(std::move(spans));
  return p;
}

namespace {

std::string spaced_words(const Document& doc, Span span) {
  std::string out;
  for (std::size_t i = span.start; i < span.end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += doc.tokens[i].surface;
  }
  return out;
}

}  // namespace

Sketch render(const Projection& projection, SketchTemplate kind, std::string_view mask_token) {
  if (projection.document == nullptr) throw InvalidArgument("projection has no document");
  const Document& doc = *projection.document;
  Sketch sketch;
  sketch.kind = kind;
  sketch.mask_token = std::string(mask_token);

  switch (kind) {
    case SketchTemplate::kT1:
      for (const Span& first : projection.keyword_first) sketch.elements.emplace_back(Fragment{spaced_words(doc, first)});
      break;
    case SketchTemplate::kT2: {
      std::vector<std::size_t> order(projection.keyword_first.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return projection.keyword_first[a] < projection.keyword_first[b];
      });
      for (std::size_t i : order) sketch.elements.emplace_back(Fragment{spaced_words(doc, projection.keyword_first[i])});
      break;
    }
    case SketchTemplate::kT3:
      for (const Span& s : projection.kept_spans) sketch.elements.emplace_back(Fragment{std::string(doc.text_of(s))});
      break;
    case SketchTemplate::kT4:
    case SketchTemplate::kT4Random: {
      const auto& spans = projection.kept_spans;
      if (spans.empty()) {
        sketch.elements.emplace_back(Mask{});
        break;
      }
      if (spans.front().start > 0) sketch.elements.emplace_back(Mask{});
      for (std::size_t i = 0; i < spans.size(); ++i) {
        if (i > 0) sketch.elements.emplace_back(Mask{});  // merged spans always leave a gap
        sketch.elements.emplace_back(Fragment{std::string(doc.text_of(spans[i]))});
      }
      if (spans.back().end < doc.tokens.size()) sketch.elements.emplace_back(Mask{});
      break;
    }
  }
  return sketch;
}

double masking_ratio(const Projection& projection) { return 1.0 - kept_fraction(projection); }

double kept_fraction(const Projection& projection) {
  if (projection.document == nullptr || projection.document->length_words == 0) {
    throw InvalidArgument("masking ratio is undefined for a document without words");
  }
  return static_cast<double>(projection.kept_words()) / static_cast<double>(projection.document->length_words);
}

Sketch mixup_sketch(std::span<const MixupInput> inputs, std::string_view mask_token) {
  std::vector<const MixupInput*> usable;
  for (const auto& in : inputs) {
    if (!in.fragments.empty()) usable.push_back(&in);
  }
  if (usable.size() < 2) throw InvalidArgument("sketch mixup needs at least two records with fragments");
  for (const auto* in : usable) {
    if (in->label != usable.front()->label) throw InvalidArgument("sketch mixup records must share one label");
  }

  Sketch sketch;
  sketch.kind = SketchTemplate::kT4;
  sketch.mask_token = std::string(mask_token);
  for (const auto* in : usable) sketch.source_ids.push_back(in->id);

  sketch.elements.emplace_back(Mask{});
  std::size_t longest = 0;
  for (const auto* in : usable) longest = std::max(longest, in->fragments.size());
  for (std::size_t round = 0; round < longest; ++round) {
    for (const auto* in : usable) {
      if (round >= in->fragments.size()) continue;
      sketch.elements.emplace_back(Fragment{in->fragments[round]});
      sketch.elements.emplace_back(Mask{});
    }
  }
  return sketch;
}

PairOutcome build_pair(const Document& document, const PairConfig& config) {
  PairOutcome outcome;
  const std::size_t l = document.length_words;
  if (l == 0) {
    outcome.skip_reason = "empty";
    return outcome;
  }
  if (l < config.min_words || l > config.max_words) {
    outcome.skip_reason = "length";
    return outcome;
  }
  if (config.max_sentences > 0 && document.sentences.size() > config.max_sentences) {
    outcome.skip_reason = "sentences";
    return outcome;
  }

  Projection projection;
  if (config.kind == SketchTemplate::kT4Random) {
    projection = project_spans(document, random_extract(document, config.extractor));
  } else if (!config.keyword_override.empty()) {
    projection = project(document, keywords_from_strings(config.keyword_override));
  } else {
    projection = project(document, yake_extract(document, config.extractor));
  }
  outcome.masking_ratio = masking_ratio(projection);
  outcome.pair = SketchTextPair{render(projection, config.kind, config.mask_token).text(), document.raw};
  return outcome;
}

}  // namespace geniuskit
