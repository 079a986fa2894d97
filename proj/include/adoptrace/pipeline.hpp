#pragma once

// File-based stages and the manifest-driven end-to-end run.
//
//   ingest     corpus file      -> partition dir (YYYY-MM.jsonl + ingest_stats.json)
//   extract    partition dir    -> mentions.jsonl (+ extract_stats.json)
//   score      mentions.jsonl   -> scored.tsv
//   aggregate  scored.tsv       -> cells.tsv
//   report     cells/scored/mentions -> top_terms.tsv, grid.csv, grid.svg, sector_*.{csv,svg}
//   sample     mentions + scored -> campaign.jsonl (optional)
//
// Every stage output is a pure function of its inputs and configuration; the
// thread count only changes how the work is split.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adoptrace/aspects.hpp"
#include "adoptrace/corpus.hpp"
#include "adoptrace/error.hpp"
#include "adoptrace/evalkit.hpp"
#include "adoptrace/period.hpp"
#include "adoptrace/report.hpp"
#include "adoptrace/textprep.hpp"
#include "adoptrace/trend.hpp"
#include "adoptrace/util/parallel.hpp"
#include "adoptrace/util/sha256.hpp"
#include "adoptrace/util/text.hpp"
#include "adoptrace/valence.hpp"
#include "json.hpp"

namespace adoptrace::pipeline {

namespace fs = std::filesystem;

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// --- mentions file -----------------------------------------------------------

// A record with at least one extracted aspect, plus its prepared views.
struct MentionRecord {
  std::string id;
  Timestamp created_at;
  std::string text;
  std::string matching_view;
  std::string sentiment_view;
  std::vector<AspectMention> mentions;

  bool operator==(const MentionRecord&) const = default;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json ms = nlohmann::ordered_json::array();
    for (const auto& m : mentions) ms.push_back({{"term", m.term}, {"begin", m.begin}, {"end", m.end}});
    return {{"id", id},
            {"created_at", created_at.iso()},
            {"text", text},
            {"matching_view", matching_view},
            {"sentiment_view", sentiment_view},
            {"mentions", ms}};
  }

  static MentionRecord from_json(const nlohmann::json& j) {
    MentionRecord r;
    r.id = j.at("id").get<std::string>();
    const auto ts = Timestamp::parse(j.at("created_at").get<std::string>());
    if (!ts) throw DataError("record '" + r.id + "' has an invalid created_at");
    r.created_at = *ts;
    r.text = j.at("text").get<std::string>();
    r.matching_view = j.at("matching_view").get<std::string>();
    r.sentiment_view = j.at("sentiment_view").get<std::string>();
    for (const auto& m : j.at("mentions"))
      r.mentions.push_back({m.at("term").get<std::string>(), r.id, m.at("begin").get<std::size_t>(),
                            m.at("end").get<std::size_t>()});
    return r;
  }
};

inline std::string format_mentions(const std::vector<MentionRecord>& records) {
  std::string out;
  for (const auto& r : records)
    out += r.to_json().dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  return out;
}

inline std::vector<MentionRecord> parse_mentions(std::string_view content) {
  std::vector<MentionRecord> out;
  std::size_t n = 0;
  for (auto l : text::lines(content)) {
    ++n;
    if (text::trim(l).empty()) continue;
    const auto j = nlohmann::json::parse(l, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(n, "malformed mentions entry");
    try {
      out.push_back(MentionRecord::from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(n, e.what());
    }
  }
  return out;
}

struct ExtractStats {
  std::size_t records = 0;
  std::size_t records_with_terms = 0;
  std::size_t mention_rows = 0;
  std::size_t distinct_terms = 0;
  std::size_t max_terms_per_record = 0;
  std::size_t index_size = 0;

  nlohmann::ordered_json to_json() const {
    return {{"records", records},
            {"records_with_terms", records_with_terms},
            {"records_without_terms", records - records_with_terms},
            {"mention_rows", mention_rows},
            {"distinct_terms", distinct_terms},
            {"max_terms_per_record", max_terms_per_record},
            {"index_size", index_size}};
  }
};

struct ExtractResult {
  std::vector<MentionRecord> records;
  ExtractStats stats;
};

// Records without any mention are counted but not kept.
inline ExtractResult extract_records(const std::vector<TweetRecord>& records,
                                     const TermIndex& index, const PrepConfig& prep,
                                     unsigned threads = 1) {
  if (index.empty()) throw std::invalid_argument("extract_records: empty term index");
  auto all = parallel_map<MentionRecord>(records.size(), threads, [&](std::size_t i) {
    const auto& r = records[i];
    auto clean = normalize(r.text, prep);
    MentionRecord m{r.id, r.created_at, r.text, std::move(clean.matching_view),
                    std::move(clean.sentiment_view), {}};
    m.mentions = extract(m.matching_view, index, r.id);
    return m;
  });
  ExtractResult out;
  out.stats.records = records.size();
  out.stats.index_size = index.size();
  std::set<std::string> distinct;
  for (auto& m : all) {
    if (m.mentions.empty()) continue;
    ++out.stats.records_with_terms;
    out.stats.mention_rows += m.mentions.size();
    out.stats.max_terms_per_record = std::max(out.stats.max_terms_per_record, m.mentions.size());
    for (const auto& a : m.mentions) distinct.insert(a.term);
    out.records.push_back(std::move(m));
  }
  out.stats.distinct_terms = distinct.size();
  return out;
}

// One row per (record, term); all rows of a record share its score.
inline std::vector<ScoredMention> score_mentions(const std::vector<MentionRecord>& records,
                                                 const Lexicon& lexicon,
                                                 const ValenceConfig& config,
                                                 Granularity granularity = Granularity::kMonth,
                                                 unsigned threads = 1) {
  const auto scores = parallel_map<ValenceScore>(records.size(), threads, [&](std::size_t i) {
    return score(records[i].sentiment_view, lexicon, config);
  });
  std::vector<ScoredMention> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& s = scores[i];
    const auto period = Period::of(r.created_at, granularity);
    for (const auto& m : r.mentions)
      out.push_back({r.id, m.term, period, s.compound, s.pos, s.neg, s.neu, classify(s.compound)});
  }
  return out;
}

inline std::string format_scored(const std::vector<ScoredMention>& rows) {
  std::string out = kScoredHeader + "\n";
  for (const auto& r : rows) out += format_scored_row(r) + "\n";
  return out;
}

// Record-level view for sampling: one entry per record in the scored file,
// its terms in file order.
inline std::vector<ScoredRecord> scored_records(const std::vector<MentionRecord>& mentions,
                                                const std::vector<ScoredMention>& scored) {
  std::map<std::string, const MentionRecord*> by_id;
  for (const auto& m : mentions) by_id.emplace(m.id, &m);
  std::vector<ScoredRecord> out;
  std::map<std::string, std::size_t> at;
  for (const auto& s : scored) {
    const auto [it, fresh] = at.emplace(s.record_id, out.size());
    if (fresh) {
      const auto m = by_id.find(s.record_id);
      if (m == by_id.end()) throw DataError("scored record '" + s.record_id + "' has no mention entry");
      out.push_back({s.record_id, m->second->text, {}, s.compound, s.polarity});
    }
    out[it->second].terms.push_back(s.term);
  }
  return out;
}

// --- stages ------------------------------------------------------------------

inline IngestStats stage_ingest(const fs::path& input, const fs::path& partition_dir,
                                const IngestOptions& opt) {
  const auto corpus = load_corpus(input, opt);
  write_partitions(partition_dir, partition_by_month(corpus.records), corpus.stats);
  return corpus.stats;
}

inline ExtractStats stage_extract(const fs::path& partition_dir, const fs::path& terms,
                                  const PrepConfig& prep, const fs::path& out_file,
                                  unsigned threads = 1) {
  const auto index = load_terms(terms);
  const auto records = read_partitions(partition_dir);
  const auto result = extract_records(records, index, prep, threads);
  text::write_file(out_file.string(), format_mentions(result.records));
  auto stats_path = out_file;
  stats_path.replace_extension(".stats.json");
  text::write_file(stats_path.string(), result.stats.to_json().dump(2) + "\n");
  return result.stats;
}

struct ScoreOptions {
  fs::path lexicon;
  std::optional<fs::path> emoji;
  ValenceConfig config = ValenceConfig::defaults();
  Granularity granularity = Granularity::kMonth;
  unsigned threads = 1;
};

inline std::size_t stage_score(const fs::path& mentions_file, const ScoreOptions& opt,
                               const fs::path& out_file) {
  opt.config.validate();
  auto lexicon = load_lexicon(opt.lexicon);
  if (opt.emoji) load_emoji_table(lexicon, *opt.emoji);
  const auto mentions = parse_mentions(text::read_file(mentions_file.string()));
  const auto rows = score_mentions(mentions, lexicon, opt.config, opt.granularity, opt.threads);
  text::write_file(out_file.string(), format_scored(rows));
  return rows.size();
}

inline std::size_t stage_aggregate(const fs::path& scored_file, const fs::path& out_file,
                                   unsigned threads = 1) {
  const auto rows = parse_scored(text::read_file(scored_file.string()));
  const auto cells = aggregate_parallel(rows, threads);
  text::write_file(out_file.string(), format_cells(cells));
  return cells.size();
}

struct ReportOptions {
  std::optional<std::vector<std::string>> aspects;
  std::optional<Period> from;
  std::optional<Period> to;
  std::size_t top_k = 20;
  std::vector<fs::path> sectors;
  std::string title = "Aspect polarity by period";
};

inline std::optional<PeriodRange> range_of(const ReportOptions& opt, const CellMap& cells) {
  if (!opt.from && !opt.to) return std::nullopt;
  if (cells.empty()) return std::nullopt;
  Period lo = cells.begin()->first.second, hi = lo;
  for (const auto& [k, c] : cells) {
    lo = std::min(lo, k.second);
    hi = std::max(hi, k.second);
  }
  return PeriodRange{opt.from.value_or(lo), opt.to.value_or(hi)};
}

inline std::string format_top_terms(const std::vector<TermFrequency>& top) {
  std::string out = "rank\tterm\tfrequency\n";
  for (std::size_t i = 0; i < top.size(); ++i)
    out += std::to_string(i + 1) + "\t" + text::tsv_field(top[i].term) + "\t" +
           std::to_string(top[i].frequency) + "\n";
  return out;
}

// Writes the report artifacts into `out_dir`; returns the warnings raised
// while building grids.
inline std::vector<std::string> stage_report(const fs::path& mentions_file,
                                             const fs::path& scored_file,
                                             const fs::path& cells_file,
                                             const ReportOptions& opt, const fs::path& out_dir,
                                             unsigned threads = 1) {
  fs::create_directories(out_dir);
  const auto mentions = parse_mentions(text::read_file(mentions_file.string()));
  std::vector<AspectMention> flat;
  for (const auto& m : mentions) flat.insert(flat.end(), m.mentions.begin(), m.mentions.end());
  text::write_file((out_dir / "top_terms.tsv").string(), format_top_terms(top_terms(flat, opt.top_k)));

  std::vector<std::string> warnings;
  const auto emit = [&](const CellMap& cells, const std::string& stem, const std::string& title) {
    auto g = build_grid(cells, opt.aspects, range_of(opt, cells));
    for (auto& w : g.warnings) warnings.push_back(stem + ": " + w);
    text::write_file((out_dir / (stem + ".csv")).string(), grid_to_csv(g.grid));
    text::write_file((out_dir / (stem + ".svg")).string(), grid_to_svg(g.grid, title));
  };
  emit(parse_cells(text::read_file(cells_file.string())), "grid", opt.title);

  if (!opt.sectors.empty()) {
    const auto scored = parse_scored(text::read_file(scored_file.string()));
    for (const auto& path : opt.sectors) {
      const auto filter = load_sector(path);
      std::set<std::string> ids;
      for (const auto& m : mentions)
        if (filter.matches(m.matching_view)) ids.insert(m.id);
      std::vector<ScoredMention> rows;
      for (const auto& s : scored)
        if (ids.count(s.record_id)) rows.push_back(s);
      emit(aggregate_parallel(rows, threads), "sector_" + filter.name(),
           opt.title + " (" + filter.name() + ")");
    }
  }
  return warnings;
}

inline std::size_t stage_sample(const fs::path& mentions_file, const fs::path& scored_file,
                                std::size_t per_class, std::uint64_t seed,
                                const fs::path& out_file) {
  const auto mentions = parse_mentions(text::read_file(mentions_file.string()));
  const auto scored = parse_scored(text::read_file(scored_file.string()));
  const auto sample = stratified_sample(scored_records(mentions, scored), per_class, seed);
  std::string body;
  for (const auto& r : sample) body += r.to_json().dump() + "\n";
  text::write_file(out_file.string(), body);
  return sample.size();
}

// --- manifest-driven run -------------------------------------------------------

struct RunConfig {
  fs::path input;
  fs::path terms;
  fs::path lexicon;
  std::optional<fs::path> emoji;
  fs::path out_dir;
  PrepConfig prep;
  std::uint64_t seed = 0;
  Granularity granularity = Granularity::kMonth;
  double max_malformed_fraction = 0.10;
  ReportOptions report;
  std::size_t sample_per_class = 0;  // 0 skips the sampling stage
  std::optional<unsigned> threads;   // the CLI flag wins over this

  // Relative paths resolve against `base` (normally the config file's dir).
  static RunConfig from_json(const nlohmann::json& j, const fs::path& base = {}) {
    const auto resolve = [&](const std::string& s) {
      const fs::path p = s;
      return p.is_relative() ? base / p : p;
    };
    const auto path = [&](const char* key) { return resolve(j.at(key).get<std::string>()); };
    RunConfig c;
    try {
      c.input = path("input");
      c.terms = path("terms");
      c.lexicon = path("lexicon");
      if (j.contains("emoji")) c.emoji = path("emoji");
      c.out_dir = path("out_dir");
      if (j.contains("prep")) {
        const auto& p = j.at("prep");
        // Either inline or the path of a prep config file.
        c.prep = p.is_string() ? PrepConfig::from_json(nlohmann::json::parse(
                                     text::read_file(resolve(p.get<std::string>()).string())))
                               : PrepConfig::from_json(p);
      }
      c.seed = j.value("seed", c.seed);
      const auto g = j.value("granularity", std::string("month"));
      if (g == "day") c.granularity = Granularity::kDay;
      else if (g != "month") throw DataError("granularity must be 'month' or 'day'");
      c.max_malformed_fraction = j.value("max_malformed_fraction", c.max_malformed_fraction);
      c.sample_per_class = j.value("sample_per_class", c.sample_per_class);
      if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
      if (j.contains("report")) {
        const auto& r = j.at("report");
        if (r.contains("aspects")) c.report.aspects = r.at("aspects").get<std::vector<std::string>>();
        const auto period = [&](const char* key) -> std::optional<Period> {
          if (!r.contains(key)) return std::nullopt;
          const auto p = Period::parse(r.at(key).get<std::string>());
          if (!p) throw DataError(std::string("report.") + key + " must be YYYY-MM or YYYY-MM-DD");
          return p;
        };
        c.report.from = period("from");
        c.report.to = period("to");
        c.report.top_k = r.value("top_k", c.report.top_k);
        if (r.contains("title")) c.report.title = r.at("title").get<std::string>();
        for (const auto& s : r.value("sectors", std::vector<std::string>{}))
          c.report.sectors.push_back(resolve(s));
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("invalid run config: ") + e.what());
    }
    return c;
  }

  static RunConfig load(const fs::path& path) {
    const auto j = nlohmann::json::parse(text::read_file(path.string()), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("run config '" + path.string() + "' is not a JSON object");
    return from_json(j, path.parent_path());
  }
};

struct RunResult {
  std::map<std::string, std::string> outputs;  // path relative to out_dir -> sha256
  IngestStats ingest;
  ExtractStats extract;
  std::size_t scored_rows = 0;
  std::size_t cells = 0;
  std::vector<std::string> warnings;
};

// Artifact hashes of every regular file under `dir` except the manifest
// itself, keyed by relative path.
inline std::map<std::string, std::string> hash_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    out[rel] = sha256_hex(text::read_file(e.path().string()));
  }
  return out;
}

inline RunResult run_pipeline(const RunConfig& cfg, unsigned threads = 1) {
  const auto parts = cfg.out_dir / "partitions";
  const auto mentions = cfg.out_dir / "mentions.jsonl";
  const auto scored = cfg.out_dir / "scored.tsv";
  const auto cells = cfg.out_dir / "cells.tsv";
  const auto report = cfg.out_dir / "report";
  fs::create_directories(cfg.out_dir);

  RunResult res;
  const auto stage = [](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };
  stage("ingest", [&] {
    res.ingest = stage_ingest(cfg.input, parts,
                              {cfg.max_malformed_fraction, cfg.prep.english_only, threads});
  });
  stage("extract", [&] { res.extract = stage_extract(parts, cfg.terms, cfg.prep, mentions, threads); });
  stage("score", [&] {
    ScoreOptions so;
    so.lexicon = cfg.lexicon;
    so.emoji = cfg.emoji;
    so.granularity = cfg.granularity;
    so.threads = threads;
    res.scored_rows = stage_score(mentions, so, scored);
  });
  stage("aggregate", [&] { res.cells = stage_aggregate(scored, cells, threads); });
  stage("report", [&] {
    res.warnings = stage_report(mentions, scored, cells, cfg.report, report, threads);
  });
  if (cfg.sample_per_class > 0)
    stage("sample", [&] {
      stage_sample(mentions, scored, cfg.sample_per_class, cfg.seed, cfg.out_dir / "campaign.jsonl");
    });

  res.outputs = hash_tree(cfg.out_dir);
  nlohmann::ordered_json inputs;
  inputs["input"] = sha256_hex(text::read_file(cfg.input.string()));
  inputs["terms"] = sha256_hex(text::read_file(cfg.terms.string()));
  inputs["lexicon"] = sha256_hex(text::read_file(cfg.lexicon.string()));
  if (cfg.emoji) inputs["emoji"] = sha256_hex(text::read_file(cfg.emoji->string()));
  nlohmann::ordered_json m;
  m["seed"] = cfg.seed;
  m["granularity"] = cfg.granularity == Granularity::kDay ? "day" : "month";
  m["prep"] = cfg.prep.to_json();
  m["inputs"] = inputs;
  m["outputs"] = res.outputs;
  text::write_file((cfg.out_dir / "manifest.json").string(), m.dump(2) + "\n");
  return res;
}

}  // namespace adoptrace::pipeline
