#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "geniuskit/augmenters.hpp"
#include "geniuskit/metrics.hpp"
#include "geniuskit/sketcher.hpp"

// File formats: JSON Lines for classification records, sketch pairs and
// evaluation records; CoNLL columns for NER; a JSON array (or JSON Lines) of
// SQuAD-style records for MRC. All text is UTF-8.
namespace geniuskit::io {

/// Non-blank lines of a stream, trailing '\r' removed.
std::vector<std::string> read_lines(std::istream& in);
std::vector<std::string> read_lines(const std::filesystem::path& path);

ClassificationRecord classification_from_json(const nlohmann::json& j, std::size_t line_number);
nlohmann::json to_json(const ClassificationRecord& record);
std::vector<ClassificationRecord> read_classification(std::istream& in);
void write_classification(std::ostream& out, const std::vector<ClassificationRecord>& records);

/// Token in the first column, tag in the last; blank lines separate sequences;
/// -DOCSTART- lines are skipped. Single-column lines get tag "O".
std::vector<NerSequence> read_conll(std::istream& in);
void write_conll(std::ostream& out, const std::vector<NerSequence>& sequences);

/// answer_start in files counts code points (SQuAD convention); in memory it is a byte offset.
std::vector<MrcExample> read_mrc(std::istream& in);
nlohmann::json to_json(const MrcExample& example);
void write_mrc(std::ostream& out, const std::vector<MrcExample>& examples);

std::vector<metrics::EvalRecord> read_eval_records(std::istream& in);

void write_pairs(std::ostream& out, const std::vector<SketchTextPair>& pairs);

/// One keyword per line; blank lines and '#' comments ignored.
std::vector<std::string> read_keyword_file(const std::filesystem::path& path);

}  // namespace geniuskit::io
