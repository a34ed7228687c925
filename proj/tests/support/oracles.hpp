#pragma once

// Slow, obviously-correct reference implementations for cross-checking the
// library kernels. Independent of the library code paths on purpose.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

// LCS length by enumerating every subsequence of `a` (exponential; |a| <= ~16).
inline std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
    if (bits <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = bits;
  }
  return best;
}

// All contiguous n-grams as a multiset.
inline std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& w, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) ++out[std::vector<std::string>(w.begin() + i, w.begin() + i + n)];
  return out;
}

inline std::size_t clipped_overlap(const std::vector<std::string>& ref, const std::vector<std::string>& cand, std::size_t n) {
  const auto r = ngram_counts(ref, n);
  const auto c = ngram_counts(cand, n);
  std::size_t m = 0;
  for (const auto& [g, k] : r) {
    auto it = c.find(g);
    if (it != c.end()) m += std::min(k, it->second);
  }
  return m;
}

inline std::size_t ngram_total(const std::vector<std::string>& w, std::size_t n) {
  return w.size() >= n ? w.size() - n + 1 : 0;
}

// Merge of half-open integer intervals by marking a bitmap.
inline std::vector<std::pair<std::size_t, std::size_t>> merge_by_bitmap(
    const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
  std::size_t hi = 0;
  for (const auto& [s, e] : spans) hi = std::max(hi, e);
  std::vector<int> covered(hi + 1, 0);
  for (const auto& [s, e] : spans) {
    for (std::size_t i = s; i < e; ++i) covered[i] = 1;
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < hi) {
    if (!covered[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < hi && covered[j]) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

// Plain Levenshtein distance, full matrix.
inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

// BIO validity straight from the definition: every I-X continues a B-X or I-X.
inline bool bio_valid(const std::vector<std::string>& tags) {
  std::string prev = "O";
  for (const auto& t : tags) {
    if (t == "O" || t == "X") {
      prev = "O";
      continue;
    }
    if (t.size() < 3 || t[1] != '-' || (t[0] != 'B' && t[0] != 'I')) return false;
    if (t[0] == 'I') {
      if (prev == "O" || prev.substr(2) != t.substr(2)) return false;
    }
    prev = t;
  }
  return true;
}

}  // namespace oracle
