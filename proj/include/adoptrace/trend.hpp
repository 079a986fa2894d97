#pragma once

// Per-(aspect, period) aggregation of scored mentions. Each cell keeps, per
// polarity class, the tweet count and the mean |compound| of the tweets in
// that class; the cell label is the class with the highest mean.
//
// Magnitudes are accumulated as exact 2^-62 fixed-point sums, so partial
// aggregates merge in any order to bit-identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/period.hpp"
#include "adoptrace/polarity.hpp"
#include "adoptrace/util/parallel.hpp"
#include "adoptrace/util/text.hpp"

namespace adoptrace {

// One (record, term) pair with the record's score.
struct ScoredMention {
  std::string record_id;
  std::string term;
  Period period;
  double compound = 0;
  double pos = 0, neg = 0, neu = 1;
  Polarity polarity = Polarity::kNeutral;

  bool operator==(const ScoredMention&) const = default;
};

struct AspectMonthCell {
  std::string term;
  Period period;
  std::array<std::uint64_t, 3> counts{};
  std::array<double, 3> mean_magnitude{};
  Polarity label = Polarity::kNeutral;

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2]; }
  bool operator==(const AspectMonthCell&) const = default;
};

// Strict argmax over the class means; any tie for the maximum is neutral.
inline Polarity label_from_means(const std::array<double, 3>& means) {
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t c = 1; c < 3; ++c) {
    if (means[c] > means[best]) {
      best = c;
      tie = false;
    } else if (means[c] == means[best]) {
      tie = true;
    }
  }
  return tie ? Polarity::kNeutral : static_cast<Polarity>(best);
}

class CellAccumulator {
 public:
  static constexpr int kScaleBits = 62;

  void add(double compound, Polarity p) {
    const double mag = std::fabs(compound);
    if (!(mag <= 1.0)) throw std::invalid_argument("compound score outside [-1, 1]");
    auto& c = classes_[index(p)];
    ++c.count;
    c.sum += static_cast<std::uint64_t>(std::nearbyint(std::ldexp(mag, kScaleBits)));
  }

  void merge(const CellAccumulator& other) {
    for (std::size_t i = 0; i < 3; ++i) {
      classes_[i].count += other.classes_[i].count;
      classes_[i].sum += other.classes_[i].sum;
    }
  }

  AspectMonthCell finish(std::string term, Period period) const {
    AspectMonthCell cell;
    cell.term = std::move(term);
    cell.period = period;
    for (std::size_t i = 0; i < 3; ++i) {
      cell.counts[i] = classes_[i].count;
      cell.mean_magnitude[i] = mean(classes_[i]);
    }
    cell.label = label_from_means(cell.mean_magnitude);
    return cell;
  }

 private:
  struct ClassSum {
    std::uint64_t count = 0;
    unsigned __int128 sum = 0;
  };

  static double mean(const ClassSum& c) {
    if (c.count == 0) return 0.0;
    const long double m = static_cast<long double>(c.sum) / static_cast<long double>(c.count);
    return static_cast<double>(std::ldexp(m, -kScaleBits));
  }

  std::array<ClassSum, 3> classes_{};
};

using CellKey = std::pair<std::string, Period>;
using CellMap = std::map<CellKey, AspectMonthCell>;

class TrendAggregator {
 public:
  void add(const std::string& term, Period period, double compound, Polarity p) {
    acc_[{term, period}].add(compound, p);
  }
  void add(const ScoredMention& m) { add(m.term, m.period, m.compound, m.polarity); }

  void merge(const TrendAggregator& other) {
    for (const auto& [k, a] : other.acc_) acc_[k].merge(a);
  }

  CellMap cells() const {
    CellMap out;
    for (const auto& [k, a] : acc_) out.emplace(k, a.finish(k.first, k.second));
    return out;
  }

 private:
  std::map<CellKey, CellAccumulator> acc_;
};

inline CellMap aggregate(const std::vector<ScoredMention>& rows) {
  TrendAggregator agg;
  for (const auto& r : rows) agg.add(r);
  return agg.cells();
}

// Partial aggregates over contiguous chunks, merged pairwise.
inline CellMap aggregate_parallel(const std::vector<ScoredMention>& rows, unsigned threads) {
  const auto ranges = chunk_ranges(rows.size(), threads);
  auto parts = parallel_map<TrendAggregator>(ranges.size(), threads, [&](std::size_t i) {
    TrendAggregator agg;
    for (std::size_t r = ranges[i].first; r < ranges[i].second; ++r) agg.add(rows[r]);
    return agg;
  });
  while (parts.size() > 1) {
    std::vector<TrendAggregator> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      parts[i].merge(parts[i + 1]);
      next.push_back(std::move(parts[i]));
    }
    if (parts.size() % 2) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return parts.empty() ? CellMap{} : parts.front().cells();
}

// --- delimited files ---------------------------------------------------

inline const std::string kScoredHeader =
    "record_id\tperiod\tterm\tcompound\tpos\tneg\tneu\tpolarity";

inline std::string format_scored_row(const ScoredMention& m) {
  return text::tsv_field(m.record_id) + "\t" + m.period.str() + "\t" + text::tsv_field(m.term) +
         "\t" + text::fixed(m.compound, 4) + "\t" + text::fixed(m.pos, 3) + "\t" +
         text::fixed(m.neg, 3) + "\t" + text::fixed(m.neu, 3) + "\t" +
         std::string(to_string(m.polarity));
}

inline std::vector<ScoredMention> parse_scored(std::string_view content) {
  std::vector<ScoredMention> out;
  const auto ls = text::lines(content);
  if (ls.empty() || ls.front() != kScoredHeader) throw ParseError(1, "unexpected scored-file header");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].empty()) continue;
    const auto f = text::split(ls[i], '\t');
    if (f.size() != 8) throw ParseError(i + 1, "expected 8 fields");
    ScoredMention m;
    m.record_id = std::string(f[0]);
    const auto period = Period::parse(f[1]);
    const auto pol = parse_polarity(f[7]);
    if (!period || !pol) throw ParseError(i + 1, "bad period or polarity");
    m.period = *period;
    m.term = std::string(f[2]);
    try {
      m.compound = std::stod(std::string(f[3]));
      m.pos = std::stod(std::string(f[4]));
      m.neg = std::stod(std::string(f[5]));
      m.neu = std::stod(std::string(f[6]));
    } catch (const std::exception&) {
      throw ParseError(i + 1, "non-numeric score");
    }
    m.polarity = *pol;
    out.push_back(std::move(m));
  }
  return out;
}

inline const std::string kCellsHeader =
    "term\tperiod\tn_positive\tn_negative\tn_neutral\tmean_positive\tmean_negative\tmean_"
    "neutral\tlabel";

inline std::string format_cells(const CellMap& cells) {
  std::string out = kCellsHeader + "\n";
  for (const auto& [k, c] : cells) {
    out += text::tsv_field(c.term) + "\t" + c.period.str();
    for (auto n : c.counts) out += "\t" + std::to_string(n);
    for (auto m : c.mean_magnitude) out += "\t" + text::fixed(m, 4);
    out += "\t" + std::string(to_string(c.label)) + "\n";
  }
  return out;
}

inline CellMap parse_cells(std::string_view content) {
  CellMap out;
  const auto ls = text::lines(content);
  if (ls.empty() || ls.front() != kCellsHeader) throw ParseError(1, "unexpected cells-file header");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].empty()) continue;
    const auto f = text::split(ls[i], '\t');
    if (f.size() != 9) throw ParseError(i + 1, "expected 9 fields");
    AspectMonthCell c;
    c.term = std::string(f[0]);
    const auto period = Period::parse(f[1]);
    const auto label = parse_polarity(f[8]);
    if (!period || !label) throw ParseError(i + 1, "bad period or label");
    c.period = *period;
    c.label = *label;
    try {
      for (std::size_t j = 0; j < 3; ++j) {
        c.counts[j] = std::stoull(std::string(f[2 + j]));
        c.mean_magnitude[j] = std::stod(std::string(f[5 + j]));
      }
    } catch (const std::exception&) {
      throw ParseError(i + 1, "non-numeric cell statistic");
    }
    out.emplace(CellKey{c.term, c.period}, std::move(c));
  }
  return out;
}

}  // namespace adoptrace
