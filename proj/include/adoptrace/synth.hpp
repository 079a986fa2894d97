#pragma once

// Synthetic corpus generator. Writes newline-delimited records together with
// a manifest of everything it planted: per-month kept counts, per-term
// record frequencies, sector keyword hits and the injected duplicate, repost
// and foreign-language lines. The manifest is the expected-value source for
// fixture-based tests.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "adoptrace/corpus.hpp"
#include "adoptrace/evalkit.hpp"
#include "adoptrace/period.hpp"
#include "json.hpp"

namespace adoptrace::synth {

// No vocabulary term occurs as a whole word inside another term, a filler
// word or a sector phrase.
inline const std::vector<std::string> kTerms = {
    "blockchain",      "5g network",       "machine learning", "smart home",
    "edge computing",  "cloud native",     "quantum computing", "wearables",
    "drones",          "digital twin",     "robotics",         "autonomous vehicles",
    "augmented reality", "smart grid",     "biometrics",       "cryptocurrency",
    "3d printing",     "chatbots",         "smart contracts",  "nanotechnology",
    "big data",        "voice assistants", "self-driving cars", "telemedicine",
    "smart city"};

inline const std::vector<std::string> kHealthcarePhrases = {
    "at the hospital", "for patients", "in every clinic", "for our nurses"};
inline const std::vector<std::string> kEducationPhrases = {
    "in schools", "for students", "at the university", "in the classroom"};

struct Options {
  std::size_t records = 1000;  // kept records
  std::uint64_t seed = 42;
  MonthKey from{2016, 1};
  MonthKey to{2021, 12};
  MonthKey peak{2017, 11};
  double duplicate_rate = 0.03;
  double repost_rate = 0.04;
  double foreign_rate = 0.02;
};

struct Manifest {
  std::size_t kept = 0;
  std::size_t lines = 0;
  std::size_t duplicates = 0;
  std::size_t reposts = 0;
  std::size_t foreign = 0;
  std::size_t records_with_terms = 0;
  std::size_t mention_rows = 0;
  std::size_t max_terms_per_record = 0;
  std::map<MonthKey, std::size_t> month_counts;
  std::map<std::string, std::size_t> term_counts;
  std::map<std::string, std::size_t> sector_counts;  // "healthcare", "education"

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json months, terms;
    for (const auto& [m, n] : month_counts) months[m.str()] = n;
    for (const auto& [t, n] : term_counts) terms[t] = n;
    return {{"kept", kept},
            {"lines", lines},
            {"duplicates", duplicates},
            {"reposts", reposts},
            {"foreign", foreign},
            {"records_with_terms", records_with_terms},
            {"mention_rows", mention_rows},
            {"max_terms_per_record", max_terms_per_record},
            {"month_counts", months},
            {"term_counts", terms},
            {"sector_counts", sector_counts}};
  }
};

struct Output {
  std::string jsonl;
  Manifest manifest;
};

namespace detail {

inline std::vector<std::size_t> allocate_months(const Options& opt,
                                                const std::vector<MonthKey>& months) {
  const auto months_between = [](MonthKey a, MonthKey b) {
    return (b.year - a.year) * 12 + (b.month - a.month);
  };
  const int peak = months_between(opt.from, opt.peak);
  std::vector<double> w(months.size());
  for (std::size_t t = 0; t < months.size(); ++t) {
    const double d = static_cast<double>(static_cast<int>(t) - peak);
    w[t] = 1.0 + 6.0 * std::exp(-d * d / 200.0);
    if (static_cast<int>(t) == peak) w[t] += 1.0;
  }
  w.back() = 0.4;
  double total = 0;
  for (double x : w) total += x;
  std::vector<std::size_t> counts(months.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t t = 0; t < w.size(); ++t) {
    const double exact = static_cast<double>(opt.records) * w[t] / total;
    counts[t] = static_cast<std::size_t>(exact);
    assigned += counts[t];
    rem.emplace_back(-(exact - static_cast<double>(counts[t])), t);
  }
  std::sort(rem.begin(), rem.end());
  for (std::size_t i = 0; assigned < opt.records; ++i, ++assigned) ++counts[rem[i].second];
  return counts;
}

}  // namespace detail

inline Output generate(const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  const auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  const auto pick = [&](const auto& v) -> const auto& { return v[uniform_below(rng, v.size())]; };

  std::vector<MonthKey> months;
  for (MonthKey m = opt.from; !(opt.to < m); m = m.next()) months.push_back(m);
  const auto counts = detail::allocate_months(opt, months);

  // Zipf-like term popularity.
  std::vector<double> term_w;
  for (std::size_t i = 0; i < kTerms.size(); ++i) term_w.push_back(1.0 / (1.0 + 0.35 * i));
  std::discrete_distribution<std::size_t> term_dist(term_w.begin(), term_w.end());

  static const std::vector<std::string> openers = {
      "Just read about", "Everyone is talking about", "Thinking about", "A new report on",
      "Our team tested", "Interesting thread on", "Today we discussed", "Watching a demo of"};
  static const std::vector<std::string> connectors = {"and", "plus", "together with", "alongside"};
  static const std::vector<std::string> positive = {
      "and I love it", "which is amazing", "great progress!", "so exciting and useful",
      "this is a brilliant win", "really impressive results"};
  static const std::vector<std::string> negative = {
      "and it is terrible", "what a disaster", "I hate the risks", "awful security problems",
      "this is a scary failure", "so many ugly bugs"};
  static const std::vector<std::string> neutral = {
      "this week", "on the agenda", "in the latest newsletter", "according to the report",
      "for the next quarter", "in a long article"};
  static const std::vector<std::string> hashtags = {"#tech", "#innovation", "#future", "#AI"};
  static const std::vector<std::string> keywords = {"IoT", "iot", "Internet of Things",
                                                    "internet of things", "#IoT"};

  Output out;
  Manifest& man = out.manifest;
  std::size_t next_id = 1;

  const auto write_line = [&](const TweetRecord& r) {
    out.jsonl += serialize_record(r);
    out.jsonl += "\n";
    ++man.lines;
  };

  for (std::size_t t = 0; t < months.size(); ++t) {
    const MonthKey m = months[t];
    const unsigned days = static_cast<unsigned>(
        std::chrono::year_month_day_last{std::chrono::year{m.year},
                                         std::chrono::month_day_last{
                                             std::chrono::month{static_cast<unsigned>(m.month)}}}
            .day());
    for (std::size_t k = 0; k < counts[t]; ++k) {
      TweetRecord r;
      r.id = std::to_string(1000000 + next_id++);
      const auto day = 1 + uniform_below(rng, days);
      const auto secs = uniform_below(rng, 86400);
      r.created_at = *Timestamp::parse(m.str() + "-" + adoptrace::detail::pad(static_cast<int>(day), 2));
      r.created_at.seconds += static_cast<std::int64_t>(secs);
      if (coin(0.5)) r.lang = "en";

      const double u = std::uniform_real_distribution<double>(0, 1)(rng);
      const std::size_t n_terms = u < 0.3 ? 0 : u < 0.7 ? 1 : u < 0.9 ? 2 : 3;
      std::vector<std::string> chosen;
      while (chosen.size() < n_terms) {
        const auto& term = kTerms[term_dist(rng)];
        if (std::find(chosen.begin(), chosen.end(), term) == chosen.end()) chosen.push_back(term);
      }

      std::string text = pick(openers);
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (i) text += " " + pick(connectors);
        std::string shown = chosen[i];
        if (coin(0.3))
          for (auto& c : shown) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        text += " " + shown;
      }
      if (chosen.empty()) text += " the future of gadgets";
      const int mood = static_cast<int>(uniform_below(rng, 3));
      text += " " + (mood == 0 ? pick(positive) : mood == 1 ? pick(negative) : pick(neutral));

      if (coin(0.10)) {
        text += " " + pick(kHealthcarePhrases);
        ++man.sector_counts["healthcare"];
      } else if (coin(0.08)) {
        text += " " + pick(kEducationPhrases);
        ++man.sector_counts["education"];
      }
      if (coin(0.5)) text += " " + pick(keywords);
      if (coin(0.2)) text += " @user" + std::to_string(uniform_below(rng, 500));
      if (coin(0.2)) text += " " + pick(hashtags);
      if (coin(0.2)) text += " https://t.co/x" + std::to_string(uniform_below(rng, 100000));
      r.text = std::move(text);

      write_line(r);
      ++man.kept;
      ++man.month_counts[m];
      for (const auto& term : chosen) ++man.term_counts[term];
      man.mention_rows += chosen.size();
      if (!chosen.empty()) ++man.records_with_terms;
      man.max_terms_per_record = std::max(man.max_terms_per_record, chosen.size());

      if (coin(opt.duplicate_rate)) {
        TweetRecord dup = r;
        dup.text = "duplicate delivery of an earlier record about robotics";
        write_line(dup);
        ++man.duplicates;
      }
      if (coin(opt.repost_rate)) {
        TweetRecord rp = r;
        rp.id = std::to_string(1000000 + next_id++);
        rp.is_repost = true;
        write_line(rp);
        ++man.reposts;
      }
      if (coin(opt.foreign_rate)) {
        TweetRecord fr = r;
        fr.id = std::to_string(1000000 + next_id++);
        fr.lang = "es";
        fr.text = "me encanta la robotics";
        write_line(fr);
        ++man.foreign;
      }
    }
  }
  return out;
}

}  // namespace adoptrace::synth
