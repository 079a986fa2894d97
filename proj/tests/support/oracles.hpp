#pragma once

// Slow, obviously-correct reference computations used as test oracles, and
// small test helpers. Nothing here shares code with the library beyond value
// types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "adoptrace/aspects.hpp"
#include "adoptrace/evalkit.hpp"
#include "adoptrace/trend.hpp"

namespace oracle {

inline std::string data_dir() { return ADOPTRACE_DATA_DIR; }
inline std::string test_data_dir() { return ADOPTRACE_TEST_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adoptrace-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline bool word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

// For each term: scan every occurrence with find(), keep the first one whose
// neighbours are not word characters.
inline std::vector<adoptrace::AspectMention> naive_extract(const std::string& view,
                                                           const std::vector<std::string>& terms) {
  std::vector<adoptrace::AspectMention> out;
  for (const auto& t : terms) {
    for (auto pos = view.find(t); pos != std::string::npos; pos = view.find(t, pos + 1)) {
      const bool left = pos == 0 || !word_char(view[pos - 1]);
      const auto end = pos + t.size();
      const bool right = end == view.size() || !word_char(view[end]);
      if (left && right) {
        out.push_back({t, "", pos, end});
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Krippendorff's nominal alpha from explicit pairs: observed disagreement is
// the per-unit share of disagreeing ordered pairs, expected disagreement the
// share over all ordered pairs of pairable values.
inline double brute_alpha(const std::vector<std::vector<int>>& units) {
  std::vector<int> pooled;
  double n = 0, d_o = 0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    const double m = static_cast<double>(u.size());
    double dis = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j && u[i] != u[j]) dis += 1;
    d_o += dis / (m - 1);
    n += m;
    pooled.insert(pooled.end(), u.begin(), u.end());
  }
  d_o /= n;
  double dis = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < pooled.size(); ++j)
      if (i != j && pooled[i] != pooled[j]) dis += 1;
  const double d_e = dis / (n * (n - 1));
  return d_e == 0 ? 1.0 : 1.0 - d_o / d_e;
}

struct NaiveCell {
  std::array<std::uint64_t, 3> counts{};
  std::array<long double, 3> sums{};
};

// Cell statistics recomputed from scratch in long double.
inline std::map<adoptrace::CellKey, NaiveCell> naive_cells(
    const std::vector<adoptrace::ScoredMention>& rows) {
  std::map<adoptrace::CellKey, NaiveCell> out;
  for (const auto& r : rows) {
    auto& c = out[{r.term, r.period}];
    const auto k = adoptrace::index(r.polarity);
    ++c.counts[k];
    c.sums[k] += std::fabs(static_cast<long double>(r.compound));
  }
  return out;
}

inline std::array<double, 3> naive_means(const NaiveCell& c) {
  std::array<double, 3> m{};
  for (int k = 0; k < 3; ++k)
    m[k] = c.counts[k] ? static_cast<double>(c.sums[k] / c.counts[k]) : 0.0;
  return m;
}

// Random lowercase text drawn from a small vocabulary that includes partial
// and overlapping forms of the given terms.
inline std::string random_text(std::mt19937_64& rng, const std::vector<std::string>& terms,
                               std::size_t words) {
  static const std::vector<std::string> filler = {
      "the", "a", "of", "clouds", "data", "native", "x", "5g", "network", "-", ",", "learning",
      "smart", "homes", "é", "über", "co-op", "ai", "iot.", "!"};
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out += (rng() % 7 == 0) ? "-" : (rng() % 11 == 0 ? "," : " ");
    if (rng() % 3 == 0 && !terms.empty())
      out += terms[rng() % terms.size()] + ((rng() % 5 == 0) ? "s" : "");
    else
      out += filler[rng() % filler.size()];
  }
  return out;
}

}  // namespace oracle
