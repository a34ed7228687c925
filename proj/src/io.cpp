#include "geniuskit/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "geniuskit/error.hpp"
#include "geniuskit/unicode.hpp"

namespace geniuskit::io {

using nlohmann::json;

namespace {

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json parse_line(const std::string& line, std::size_t line_number) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError("line " + std::to_string(line_number) + ": " + e.what());
  }
}

std::string required_string(const json& j, const char* key, std::size_t line_number) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw ParseError("line " + std::to_string(line_number) + ": missing string field \"" + key + "\"");
  }
  return j[key].get<std::string>();
}

std::string optional_id(const json& j, const std::string& fallback) {
  if (!j.contains("id") || j["id"].is_null()) return fallback;
  if (j["id"].is_string()) return j["id"].get<std::string>();
  return j["id"].dump();
}

json provenance_json(const std::vector<std::string>& ids) { return ids; }

}  // namespace

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_lines(in);
}

ClassificationRecord classification_from_json(const json& j, std::size_t line_number) {
  ClassificationRecord r;
  r.text = required_string(j, "text", line_number);
  r.label = required_string(j, "label", line_number);
  r.id = optional_id(j, "rec" + std::to_string(line_number));
  if (j.contains("provenance") && j["provenance"].is_array()) {
    for (const auto& p : j["provenance"]) r.provenance.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  }
  return r;
}

json to_json(const ClassificationRecord& record) {
  json j;
  j["text"] = record.text;
  j["label"] = record.label;
  j["id"] = record.id;
  if (!record.provenance.empty()) j["provenance"] = provenance_json(record.provenance);
  return j;
}

std::vector<ClassificationRecord> read_classification(std::istream& in) {
  std::vector<ClassificationRecord> out;
  std::size_t n = 0;
  for (const auto& line : read_lines(in)) {
    ++n;
    out.push_back(classification_from_json(parse_line(line, n), n));
  }
  return out;
}

void write_classification(std::ostream& out, const std::vector<ClassificationRecord>& records) {
  for (const auto& r : records) out << dump_line(to_json(r)) << '\n';
}

std::vector<NerSequence> read_conll(std::istream& in) {
  std::vector<NerSequence> out;
  NerSequence current;
  auto flush = [&] {
    if (!current.tokens.empty()) {
      current.id = "seq" + std::to_string(out.size());
      out.push_back(std::move(current));
    }
    current = NerSequence{};
  };
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream cols(line);
    std::vector<std::string> fields;
    for (std::string f; cols >> f;) fields.push_back(std::move(f));
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields.front() == "-DOCSTART-") continue;
    current.tokens.push_back(fields.front());
    current.tags.push_back(fields.size() > 1 ? fields.back() : "O");
  }
  flush();
  return out;
}

void write_conll(std::ostream& out, const std::vector<NerSequence>& sequences) {
  for (const auto& s : sequences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) out << s.tokens[i] << ' ' << s.tags[i] << '\n';
    out << '\n';
  }
}

std::vector<MrcExample> read_mrc(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  std::vector<json> items;
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  if (content[first] == '[') {
    json all;
    try {
      all = json::parse(content);
    } catch (const json::exception& e) {
      throw ParseError(std::string("MRC file: ") + e.what());
    }
    for (auto& item : all) items.push_back(std::move(item));
  } else {
    std::istringstream lines(content);
    std::size_t n = 0;
    for (const auto& line : read_lines(lines)) items.push_back(parse_line(line, ++n));
  }

  std::vector<MrcExample> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const json& j = items[i];
    MrcExample e;
    e.paragraph = required_string(j, "paragraph", i + 1);
    e.question = required_string(j, "question", i + 1);
    e.answer = required_string(j, "answer", i + 1);
    if (!j.contains("answer_start") || !j["answer_start"].is_number_integer()) {
      throw ParseError("record " + std::to_string(i + 1) + ": missing integer \"answer_start\"");
    }
    e.answer_start = unicode::byte_offset_of_codepoint(e.paragraph, j["answer_start"].get<std::size_t>());
    e.id = optional_id(j, "mrc" + std::to_string(i));
    if (!e.answer_matches()) {
      throw ParseError("record " + std::to_string(i + 1) + ": answer does not occur at answer_start");
    }
    out.push_back(std::move(e));
  }
  return out;
}

json to_json(const MrcExample& example) {
  json j;
  j["id"] = example.id;
  j["paragraph"] = example.paragraph;
  j["question"] = example.question;
  j["answer"] = example.answer;
  j["answer_start"] = unicode::codepoint_offset_of_byte(example.paragraph, example.answer_start);
  if (!example.provenance.empty()) j["provenance"] = provenance_json(example.provenance);
  return j;
}

void write_mrc(std::ostream& out, const std::vector<MrcExample>& examples) {
  json all = json::array();
  for (const auto& e : examples) all.push_back(to_json(e));
  out << all.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
}

std::vector<metrics::EvalRecord> read_eval_records(std::istream& in) {
  std::vector<metrics::EvalRecord> out;
  std::size_t n = 0;
  for (const auto& line : read_lines(in)) {
    const json j = parse_line(line, ++n);
    out.push_back({required_string(j, "original", n), required_string(j, "sketch", n), required_string(j, "generated", n)});
  }
  return out;
}

void write_pairs(std::ostream& out, const std::vector<SketchTextPair>& pairs) {
  for (const auto& p : pairs) out << to_jsonl_line(p) << '\n';
}

std::vector<std::string> read_keyword_file(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (auto& line : read_lines(path)) {
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

}  // namespace geniuskit::io
