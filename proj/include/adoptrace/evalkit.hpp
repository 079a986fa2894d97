#pragma once

// Ground-truth machinery: stratified sampling of automatically labelled
// records, inter-annotator agreement (Krippendorff's alpha, nominal),
// majority gold labels with escalation of ties, and the confusion matrix
// between automated and gold labels.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/polarity.hpp"
#include "adoptrace/util/text.hpp"
#include "json.hpp"

namespace adoptrace {

struct AnnotationRecord {
  std::string sample_id;
  std::string annotator_id;
  Polarity label = Polarity::kNeutral;
  std::string submitted_at;

  bool operator==(const AnnotationRecord&) const = default;
};

// A record with its automated label, as sampled for annotation.
struct ScoredRecord {
  std::string id;
  std::string text;
  std::vector<std::string> terms;
  double compound = 0;
  Polarity polarity = Polarity::kNeutral;

  bool operator==(const ScoredRecord&) const = default;

  nlohmann::ordered_json to_json() const {
    return {{"sample_id", id},
            {"text", text},
            {"terms", terms},
            {"compound", compound},
            {"polarity", std::string(to_string(polarity))}};
  }

  static ScoredRecord from_json(const nlohmann::json& j) {
    ScoredRecord r;
    r.id = j.at("sample_id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.terms = j.value("terms", std::vector<std::string>{});
    r.compound = j.value("compound", 0.0);
    const auto p = parse_polarity(j.at("polarity").get<std::string>());
    if (!p) throw DataError("sample '" + r.id + "' has an invalid polarity");
    r.polarity = *p;
    return r;
  }
};

// Uniform integer in [0, bound) from a 64-bit engine, without modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

// Exactly `per_class` records of each automated polarity, drawn without
// replacement. Output: positives, negatives, neutrals, each in draw order.
inline std::vector<ScoredRecord> stratified_sample(const std::vector<ScoredRecord>& records,
                                                   std::size_t per_class, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 3> pools;
  for (std::size_t i = 0; i < records.size(); ++i) pools[index(records[i].polarity)].push_back(i);
  for (Polarity p : kPolarities) {
    if (pools[index(p)].size() < per_class)
      throw DataError("insufficient " + std::string(to_string(p)) + " records: " +
                      std::to_string(pools[index(p)].size()) + " available, " +
                      std::to_string(per_class) + " required");
  }
  std::mt19937_64 rng(seed);
  std::vector<ScoredRecord> out;
  out.reserve(3 * per_class);
  for (Polarity p : kPolarities) {
    auto& pool = pools[index(p)];
    for (std::size_t k = 0; k < per_class; ++k) {
      const std::size_t j = k + uniform_below(rng, pool.size() - k);
      std::swap(pool[k], pool[j]);
      out.push_back(records[pool[k]]);
    }
  }
  return out;
}

struct AgreementReport {
  double alpha = 1.0;
  std::size_t n_units = 0;
  std::size_t n_pairable_units = 0;  // units with at least two annotations
  std::size_t n_annotations = 0;
  std::size_t full_agreement_count = 0;
  double full_agreement_rate = 0.0;
};

// Nominal alpha over units of category indices in [0, categories).
// Units with fewer than two values are ignored. Throws DataError when no
// unit is pairable; returns 1 when every pairable value is one category.
inline double nominal_alpha(const std::vector<std::vector<std::size_t>>& units,
                            std::size_t categories) {
  std::vector<double> o(categories * categories, 0.0);
  bool pairable = false;
  std::vector<std::size_t> counts(categories);
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    pairable = true;
    std::fill(counts.begin(), counts.end(), 0);
    for (auto v : u) ++counts.at(v);
    const double w = 1.0 / static_cast<double>(u.size() - 1);
    for (std::size_t c = 0; c < categories; ++c) {
      if (!counts[c]) continue;
      for (std::size_t k = 0; k < categories; ++k) {
        const double pairs = static_cast<double>(counts[c]) *
                             static_cast<double>(c == k ? counts[k] - 1 : counts[k]);
        o[c * categories + k] += pairs * w;
      }
    }
  }
  if (!pairable) throw DataError("alpha undefined: no unit has two or more annotations");

  std::vector<double> marginal(categories, 0.0);
  double n = 0, observed = 0;
  for (std::size_t c = 0; c < categories; ++c)
    for (std::size_t k = 0; k < categories; ++k) {
      marginal[c] += o[c * categories + k];
      if (c != k) observed += o[c * categories + k];
    }
  for (double m : marginal) n += m;
  double expected = 0;
  for (std::size_t c = 0; c < categories; ++c)
    for (std::size_t k = 0; k < categories; ++k)
      if (c != k) expected += marginal[c] * marginal[k];
  if (expected == 0) return 1.0;
  return 1.0 - (n - 1.0) * observed / expected;
}

namespace detail {

inline std::map<std::string, std::vector<const AnnotationRecord*>> group_by_sample(
    const std::vector<AnnotationRecord>& annotations) {
  std::map<std::string, std::vector<const AnnotationRecord*>> units;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : annotations) {
    if (!seen.emplace(a.sample_id, a.annotator_id).second)
      throw DataError("annotator '" + a.annotator_id + "' labelled sample '" + a.sample_id +
                      "' more than once");
    units[a.sample_id].push_back(&a);
  }
  return units;
}

}  // namespace detail

inline AgreementReport krippendorff_alpha(const std::vector<AnnotationRecord>& annotations) {
  const auto grouped = detail::group_by_sample(annotations);
  AgreementReport r;
  r.n_units = grouped.size();
  r.n_annotations = annotations.size();
  std::vector<std::vector<std::size_t>> units;
  units.reserve(grouped.size());
  for (const auto& [id, recs] : grouped) {
    std::vector<std::size_t> u;
    for (const auto* a : recs) u.push_back(index(a->label));
    if (u.size() >= 2) {
      ++r.n_pairable_units;
      if (std::all_of(u.begin(), u.end(), [&](auto v) { return v == u.front(); }))
        ++r.full_agreement_count;
    }
    units.push_back(std::move(u));
  }
  r.alpha = nominal_alpha(units, 3);
  r.full_agreement_rate =
      r.n_units ? static_cast<double>(r.full_agreement_count) / static_cast<double>(r.n_units) : 0;
  return r;
}

enum class GoldMethod { kMajority, kEscalated };

constexpr std::string_view to_string(GoldMethod m) {
  return m == GoldMethod::kMajority ? "majority" : "escalated";
}

struct GoldLabel {
  std::string sample_id;
  Polarity label = Polarity::kNeutral;
  GoldMethod method = GoldMethod::kMajority;

  bool operator==(const GoldLabel&) const = default;
};

struct GoldResult {
  std::vector<GoldLabel> gold;          // ordered by sample id
  std::vector<std::string> tie_queue;   // samples still awaiting a resolution
};

// A label wins when it holds at least half of the sample's annotations and
// no other label holds as many. Otherwise the supplied resolution (if any)
// becomes the escalated gold label.
inline GoldResult gold_standard(const std::vector<AnnotationRecord>& annotations,
                                const std::map<std::string, Polarity>& resolutions = {}) {
  const auto grouped = detail::group_by_sample(annotations);
  for (const auto& [id, label] : resolutions)
    if (!grouped.count(id)) throw DataError("resolution for unknown sample '" + id + "'");

  GoldResult out;
  for (const auto& [id, recs] : grouped) {
    std::array<std::size_t, 3> counts{};
    for (const auto* a : recs) ++counts[index(a->label)];
    std::optional<Polarity> majority;
    for (Polarity p : kPolarities) {
      const auto c = counts[index(p)];
      if (2 * c < recs.size()) continue;
      const bool unique = std::all_of(kPolarities.begin(), kPolarities.end(), [&](Polarity q) {
        return q == p || counts[index(q)] < c;
      });
      if (unique) majority = p;
    }
    const auto res = resolutions.find(id);
    if (majority) {
      if (res != resolutions.end())
        throw DataError("resolution supplied for sample '" + id + "' which has a majority label");
      out.gold.push_back({id, *majority, GoldMethod::kMajority});
    } else if (res != resolutions.end()) {
      out.gold.push_back({id, res->second, GoldMethod::kEscalated});
    } else {
      out.tie_queue.push_back(id);
    }
  }
  return out;
}

struct ConfusionReport {
  // rows: automated label, columns: gold label, in Polarity order.
  std::array<std::array<std::size_t, 3>, 3> matrix{};
  std::size_t total = 0;
  std::size_t agreement_count = 0;
  double agreement_rate = 0.0;
};

inline ConfusionReport confusion(const std::vector<GoldLabel>& gold,
                                 const std::map<std::string, Polarity>& automated) {
  ConfusionReport r;
  for (const auto& g : gold) {
    const auto it = automated.find(g.sample_id);
    if (it == automated.end())
      throw DataError("sample '" + g.sample_id + "' has no automated label");
    ++r.matrix[index(it->second)][index(g.label)];
    ++r.total;
  }
  for (std::size_t i = 0; i < 3; ++i) r.agreement_count += r.matrix[i][i];
  r.agreement_rate =
      r.total ? static_cast<double>(r.agreement_count) / static_cast<double>(r.total) : 0.0;
  return r;
}

// --- files -----------------------------------------------------------------

inline const std::string kAnnotationHeader = "sample_id\tannotator_id\tlabel\tsubmitted_at";

inline std::string format_annotation(const AnnotationRecord& a) {
  return text::tsv_field(a.sample_id) + "\t" + text::tsv_field(a.annotator_id) + "\t" +
         std::string(to_string(a.label)) + "\t" + text::tsv_field(a.submitted_at);
}

inline std::string format_annotations(const std::vector<AnnotationRecord>& records) {
  std::string out = kAnnotationHeader + "\n";
  for (const auto& a : records) out += format_annotation(a) + "\n";
  return out;
}

inline std::vector<AnnotationRecord> parse_annotations(std::string_view content) {
  const auto ls = text::lines(content);
  if (ls.empty() || ls.front() != kAnnotationHeader)
    throw ParseError(1, "unexpected annotation-file header");
  std::vector<AnnotationRecord> out;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].empty()) continue;
    const auto f = text::split(ls[i], '\t');
    if (f.size() != 4) throw ParseError(i + 1, "expected 4 fields");
    const auto label = parse_polarity(f[2]);
    if (!label) throw ParseError(i + 1, "invalid label '" + std::string(f[2]) + "'");
    out.push_back({std::string(f[0]), std::string(f[1]), *label, std::string(f[3])});
  }
  return out;
}

// "sample_id<TAB>label" lines, optional header.
inline std::map<std::string, Polarity> parse_label_map(std::string_view content) {
  std::map<std::string, Polarity> out;
  std::size_t n = 0;
  for (auto l : text::lines(content)) {
    ++n;
    if (text::trim(l).empty()) continue;
    const auto f = text::split(l, '\t');
    if (f.size() < 2) throw ParseError(n, "expected sample_id and label");
    const auto label = parse_polarity(text::trim(f[1]));
    if (!label) {
      if (n == 1) continue;  // header
      throw ParseError(n, "invalid label '" + std::string(f[1]) + "'");
    }
    out[std::string(f[0])] = *label;
  }
  return out;
}

inline std::string format_agreement(const AgreementReport& r) {
  return "krippendorff_alpha\t" + text::fixed(r.alpha, 4) + "\nunits\t" +
         std::to_string(r.n_units) + "\npairable_units\t" + std::to_string(r.n_pairable_units) +
         "\nannotations\t" + std::to_string(r.n_annotations) + "\nfull_agreement\t" +
         std::to_string(r.full_agreement_count) + "\nfull_agreement_rate\t" +
         text::fixed(r.full_agreement_rate * 100, 1) + "%\n";
}

inline std::string format_confusion(const ConfusionReport& r) {
  std::string s = "automated\\gold\tpositive\tnegative\tneutral\n";
  for (Polarity p : kPolarities) {
    s += std::string(to_string(p));
    for (auto n : r.matrix[index(p)]) s += "\t" + std::to_string(n);
    s += "\n";
  }
  s += "agreement\t" + std::to_string(r.agreement_count) + "/" + std::to_string(r.total) + " (" +
       text::fixed(r.agreement_rate * 100, 1) + "%)\n";
  return s;
}

}  // namespace adoptrace
