#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

namespace geniuskit {

/// Case-folded stopword set.
class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::unordered_set<std::string> words);

  /// Built-in English list.
  static const StopwordSet& english();
  /// One word per line, UTF-8; blank lines and lines starting with '#' are ignored.
  static StopwordSet from_file(const std::filesystem::path& path);

  bool contains(std::string_view folded_word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

}  // namespace geniuskit
