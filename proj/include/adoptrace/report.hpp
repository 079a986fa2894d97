#pragma once

// Presentation artifacts: term-frequency rankings, aspect x period polarity
// grids, sector-filtered record subsets, and CSV / SVG heatmap export.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "adoptrace/aspects.hpp"
#include "adoptrace/corpus.hpp"
#include "adoptrace/textprep.hpp"
#include "adoptrace/trend.hpp"
#include "adoptrace/util/text.hpp"

namespace adoptrace {

struct TermFrequency {
  std::string term;
  std::size_t frequency = 0;

  bool operator==(const TermFrequency&) const = default;
};

// Record-level frequency: a term counts once per record. Sorted by
// descending frequency, then term.
inline std::vector<TermFrequency> top_terms(const std::vector<AspectMention>& mentions,
                                            std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_terms: k must be at least 1");
  std::set<std::pair<std::string, std::string>> seen;
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& m : mentions)
    if (seen.emplace(m.term, m.record_id).second) ++freq[m.term];
  std::vector<TermFrequency> out;
  out.reserve(freq.size());
  for (auto& [t, f] : freq) out.push_back({t, f});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.term < b.term;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

struct GridCell {
  Polarity label = Polarity::kNeutral;
  std::array<std::uint64_t, 3> counts{};

  bool operator==(const GridCell&) const = default;
};

// Every (aspect, period) position either holds a cell or is "no data".
struct TimelineGrid {
  std::vector<std::string> aspects;
  std::vector<Period> periods;
  std::map<CellKey, GridCell> cells;

  const GridCell* at(const std::string& aspect, Period p) const {
    const auto it = cells.find({aspect, p});
    return it == cells.end() ? nullptr : &it->second;
  }
  std::size_t positions() const { return aspects.size() * periods.size(); }
  std::size_t no_data_count() const { return positions() - cells.size(); }
  bool empty() const { return aspects.empty() || periods.empty(); }

  bool operator==(const TimelineGrid&) const = default;
};

struct PeriodRange {
  Period from;
  Period to;
};

struct GridResult {
  TimelineGrid grid;
  std::vector<std::string> warnings;
};

namespace detail {

inline Period align(Period p, bool daily, bool upper) {
  if (daily == p.is_day()) return p;
  if (!daily) return {p.year, p.month, 0};
  if (!upper) return {p.year, p.month, 1};
  const std::chrono::year_month_day_last last{
      std::chrono::year{p.year},
      std::chrono::month_day_last{std::chrono::month{static_cast<unsigned>(p.month)}}};
  return {p.year, p.month, static_cast<int>(static_cast<unsigned>(last.day()))};
}

}  // namespace detail

// Restricts `cells` to the requested aspects (in request order; all aspects
// sorted otherwise) and periods. Without a range, the grid spans the first to
// last period present. Requested aspects with no cells are dropped.
inline GridResult build_grid(const CellMap& cells,
                             const std::optional<std::vector<std::string>>& aspect_filter = {},
                             const std::optional<PeriodRange>& range = {}) {
  GridResult out;
  std::set<std::string> present;
  bool daily = false;
  for (const auto& [k, c] : cells) {
    present.insert(k.first);
    daily = daily || k.second.is_day();
  }

  std::vector<std::string> aspects;
  if (aspect_filter) {
    std::set<std::string> added;
    for (const auto& raw : *aspect_filter) {
      const auto a = detail::normalize_phrase(raw);
      if (!added.insert(a).second) continue;
      if (present.count(a))
        aspects.push_back(a);
      else
        out.warnings.push_back("aspect '" + a + "' has no data");
    }
  } else {
    aspects.assign(present.begin(), present.end());
  }

  std::optional<Period> lo, hi;
  if (range) {
    lo = detail::align(range->from, daily, false);
    hi = detail::align(range->to, daily, true);
  } else {
    const std::set<std::string> chosen(aspects.begin(), aspects.end());
    for (const auto& [k, c] : cells) {
      if (!chosen.count(k.first)) continue;
      if (!lo || k.second < *lo) lo = k.second;
      if (!hi || *hi < k.second) hi = k.second;
    }
  }

  std::vector<Period> periods;
  if (lo && hi)
    for (Period p = *lo; !(*hi < p); p = p.next()) periods.push_back(p);

  if (aspects.empty() || periods.empty()) {
    out.warnings.push_back("grid is empty: no aspects or periods in the requested range");
    return out;
  }
  out.grid.aspects = std::move(aspects);
  out.grid.periods = std::move(periods);
  const Period first = out.grid.periods.front(), last = out.grid.periods.back();
  for (const auto& a : out.grid.aspects) {
    for (auto it = cells.lower_bound({a, first}); it != cells.end() && it->first.first == a &&
                                                  !(last < it->first.second);
         ++it)
      out.grid.cells.emplace(it->first, GridCell{it->second.label, it->second.counts});
  }
  return out;
}

class SectorFilter {
 public:
  // Keywords match as whole words, also in simple plural form (+s / +es).
  SectorFilter(std::string name, std::vector<std::string> keywords)
      : name_(std::move(name)), keywords_(std::move(keywords)), index_(expand(keywords_)) {
    if (index_.empty()) throw std::invalid_argument("sector filter '" + name_ + "' has no keywords");
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& keywords() const { return keywords_; }

  bool matches(std::string_view matching_view) const {
    return !extract(matching_view, index_).empty();
  }

 private:
  static TermIndex expand(const std::vector<std::string>& keywords) {
    std::vector<std::string> all;
    for (const auto& k : keywords) {
      const auto n = detail::normalize_phrase(k);
      if (n.empty()) continue;
      all.push_back(n);
      all.push_back(n + "s");
      all.push_back(n + "es");
    }
    return TermIndex(all);
  }

  std::string name_;
  std::vector<std::string> keywords_;
  TermIndex index_;
};

// "[name]" on the first non-comment line, then one keyword per line.
inline SectorFilter load_sector(const std::filesystem::path& path) {
  const std::string content = text::read_file(path.string());
  std::string name;
  std::vector<std::string> keywords;
  for (auto l : text::lines(content)) {
    const auto t = text::trim(l);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[' && t.back() == ']' && name.empty())
      name = std::string(t.substr(1, t.size() - 2));
    else
      keywords.emplace_back(t);
  }
  if (name.empty()) name = path.stem().string();
  return SectorFilter(name, keywords);
}

inline std::vector<TweetRecord> sector_view(const std::vector<TweetRecord>& records,
                                            const SectorFilter& filter,
                                            const PrepConfig& prep) {
  std::vector<TweetRecord> out;
  for (const auto& r : records)
    if (filter.matches(normalize(r.text, prep).matching_view)) out.push_back(r);
  return out;
}

// --- export --------------------------------------------------------------

inline constexpr std::string_view kNoData = "no-data";

inline std::string grid_to_csv(const TimelineGrid& grid) {
  std::string out = "aspect,period,label,n_positive,n_negative,n_neutral\n";
  for (const auto& a : grid.aspects) {
    for (const auto& p : grid.periods) {
      out += text::csv_field(a) + "," + p.str() + ",";
      if (const auto* c = grid.at(a, p)) {
        out += std::string(to_string(c->label));
        for (auto n : c->counts) out += "," + std::to_string(n);
      } else {
        out += std::string(kNoData) + ",,,";
      }
      out += "\n";
    }
  }
  return out;
}

inline TimelineGrid grid_from_csv(std::string_view content) {
  TimelineGrid g;
  const auto ls = text::lines(content);
  if (ls.empty() || ls.front() != "aspect,period,label,n_positive,n_negative,n_neutral")
    throw ParseError(1, "unexpected grid header");
  std::set<std::string> seen_aspects;
  std::set<Period> seen_periods;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].empty()) continue;
    const auto f = text::parse_csv_line(ls[i]);
    if (f.size() != 6) throw ParseError(i + 1, "expected 6 fields");
    const auto p = Period::parse(f[1]);
    if (!p) throw ParseError(i + 1, "bad period '" + f[1] + "'");
    if (seen_aspects.insert(f[0]).second) g.aspects.push_back(f[0]);
    if (seen_periods.insert(*p).second) g.periods.push_back(*p);
    if (f[2] == kNoData) continue;
    const auto label = parse_polarity(f[2]);
    if (!label) throw ParseError(i + 1, "bad label '" + f[2] + "'");
    GridCell c{*label, {}};
    try {
      for (std::size_t j = 0; j < 3; ++j) c.counts[j] = std::stoull(f[3 + j]);
    } catch (const std::exception&) {
      throw ParseError(i + 1, "non-numeric count");
    }
    g.cells.emplace(CellKey{f[0], *p}, c);
  }
  return g;
}

inline constexpr std::string_view color_of(Polarity p) {
  switch (p) {
    case Polarity::kPositive: return "#2e9e44";  // green
    case Polarity::kNeutral: return "#f39c12";   // orange
    case Polarity::kNegative: return "#d62c2c";  // red
  }
  return "#000000";
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Heatmap: one row per aspect, one column per period. Cells are filled
// green / orange / red by label; "no data" positions are left blank.
inline std::string grid_to_svg(const TimelineGrid& grid, std::string_view title = {}) {
  constexpr int kCell = 14, kGap = 2, kTop = 40, kFont = 11;
  std::size_t longest = 0;
  for (const auto& a : grid.aspects) longest = std::max(longest, utf8::length(a));
  const int left = 16 + static_cast<int>(longest) * 7;
  const int label_room = grid.periods.empty() ? 0 : (grid.periods.front().is_day() ? 76 : 56);
  const int width =
      left + static_cast<int>(grid.periods.size()) * (kCell + kGap) + 20 < 320
          ? 320
          : left + static_cast<int>(grid.periods.size()) * (kCell + kGap) + 20;
  const int rows_h = static_cast<int>(grid.aspects.size()) * (kCell + kGap);
  const int height = kTop + rows_h + label_room + 40;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"" +
       std::to_string(kFont) + "\">\n";
  s += "<text x=\"8\" y=\"20\" font-size=\"14\">" + detail::xml_escape(title) + "</text>\n";
  for (std::size_t r = 0; r < grid.aspects.size(); ++r) {
    const int y = kTop + static_cast<int>(r) * (kCell + kGap);
    s += "<text class=\"aspect\" x=\"" + std::to_string(left - 6) + "\" y=\"" +
         std::to_string(y + kCell - 3) + "\" text-anchor=\"end\">" +
         detail::xml_escape(grid.aspects[r]) + "</text>\n";
    for (std::size_t c = 0; c < grid.periods.size(); ++c) {
      const auto* cell = grid.at(grid.aspects[r], grid.periods[c]);
      if (!cell) continue;
      const int x = left + static_cast<int>(c) * (kCell + kGap);
      s += "<rect class=\"cell " + std::string(to_string(cell->label)) + "\" x=\"" +
           std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) + "\" fill=\"" +
           std::string(color_of(cell->label)) + "\"><title>" +
           detail::xml_escape(grid.aspects[r]) + " " + grid.periods[c].str() + ": " +
           std::string(to_string(cell->label)) + " (" + std::to_string(cell->counts[0]) + "/" +
           std::to_string(cell->counts[1]) + "/" + std::to_string(cell->counts[2]) +
           ")</title></rect>\n";
    }
  }
  const int axis_y = kTop + rows_h + 4;
  for (std::size_t c = 0; c < grid.periods.size(); ++c) {
    const int x = left + static_cast<int>(c) * (kCell + kGap) + kCell / 2 + 4;
    s += "<text class=\"period\" transform=\"translate(" + std::to_string(x) + "," +
         std::to_string(axis_y) + ") rotate(-90)\" text-anchor=\"end\">" +
         grid.periods[c].str() + "</text>\n";
  }
  int lx = 8;
  const int ly = height - 16;
  for (Polarity p : kPolarities) {
    s += "<rect class=\"legend\" x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly - 10) +
         "\" width=\"10\" height=\"10\" fill=\"" + std::string(color_of(p)) + "\"/>\n";
    s += "<text x=\"" + std::to_string(lx + 14) + "\" y=\"" + std::to_string(ly) + "\">" +
         std::string(to_string(p)) + "</text>\n";
    lx += 80;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace adoptrace
