#pragma once

// Ingestion of newline-delimited JSON records: one object per line with
// "id", "created_at" (ISO-8601), "text", optional "is_repost" and "lang".

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/period.hpp"
#include "adoptrace/util/parallel.hpp"
#include "adoptrace/util/text.hpp"
#include "json.hpp"

namespace adoptrace {

struct TweetRecord {
  std::string id;
  Timestamp created_at;
  std::string text;
  bool is_repost = false;
  std::optional<std::string> lang;

  MonthKey month() const { return MonthKey::of(created_at); }

  bool operator==(const TweetRecord&) const = default;
};

// Parses one input line. `line_no` is only used in error messages.
inline TweetRecord parse_record(std::string_view line, std::size_t line_no = 1) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError(line_no, "malformed JSON");
  if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");

  TweetRecord r;
  const auto id = j.find("id");
  if (id == j.end() || id->is_null()) throw MissingFieldError(line_no, "id");
  if (id->is_string())
    r.id = id->get<std::string>();
  else if (id->is_number_integer())
    r.id = id->dump();
  else
    throw ParseError(line_no, "field 'id' must be a string");
  if (r.id.empty()) throw ParseError(line_no, "field 'id' is empty");

  const auto created = j.find("created_at");
  if (created == j.end() || created->is_null()) throw MissingFieldError(line_no, "created_at");
  if (!created->is_string()) throw ParseError(line_no, "field 'created_at' must be a string");
  const auto ts = Timestamp::parse(created->get<std::string>());
  if (!ts) throw ParseError(line_no, "invalid timestamp '" + created->get<std::string>() + "'");
  r.created_at = *ts;

  const auto txt = j.find("text");
  if (txt == j.end() || txt->is_null()) throw MissingFieldError(line_no, "text");
  if (!txt->is_string()) throw ParseError(line_no, "field 'text' must be a string");
  r.text = txt->get<std::string>();

  if (const auto rp = j.find("is_repost"); rp != j.end() && !rp->is_null()) {
    if (!rp->is_boolean()) throw ParseError(line_no, "field 'is_repost' must be a boolean");
    r.is_repost = rp->get<bool>();
  }
  if (const auto lg = j.find("lang"); lg != j.end() && lg->is_string())
    r.lang = lg->get<std::string>();
  return r;
}

inline std::string serialize_record(const TweetRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["created_at"] = r.created_at.iso();
  j["text"] = r.text;
  if (r.is_repost) j["is_repost"] = true;
  if (r.lang) j["lang"] = *r.lang;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

struct IngestOptions {
  double max_malformed_fraction = 0.10;
  bool english_only = true;
  unsigned threads = 1;
};

struct IngestStats {
  std::size_t total = 0;  // non-blank lines
  std::size_t malformed = 0;
  std::size_t kept = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t dropped_repost = 0;
  std::size_t dropped_language = 0;
  std::vector<std::string> errors;  // first few parse errors, for diagnostics

  bool operator==(const IngestStats&) const = default;

  nlohmann::ordered_json to_json() const {
    return {{"total", total},
            {"malformed", malformed},
            {"kept", kept},
            {"dropped_duplicate", dropped_duplicate},
            {"dropped_repost", dropped_repost},
            {"dropped_language", dropped_language}};
  }
};

struct Corpus {
  std::vector<TweetRecord> records;
  IngestStats stats;
};

// Parsing runs in parallel over contiguous chunks; the merge keeps input
// order so the first occurrence of a duplicated id always wins.
inline Corpus load_corpus_text(std::string_view content, const IngestOptions& opt = {}) {
  struct Line {
    std::string_view text;
    std::size_t number;
  };
  std::vector<Line> input;
  {
    std::size_t n = 0;
    for (auto l : text::lines(content)) {
      ++n;
      if (!text::trim(l).empty()) input.push_back({l, n});
    }
  }

  struct Parsed {
    std::optional<TweetRecord> record;
    std::string error;
  };
  auto parsed = parallel_map<Parsed>(input.size(), opt.threads, [&](std::size_t i) {
    Parsed p;
    try {
      p.record = parse_record(input[i].text, input[i].number);
    } catch (const ParseError& e) {
      p.error = e.what();
    }
    return p;
  });

  Corpus c;
  c.stats.total = input.size();
  std::unordered_set<std::string> seen;
  for (auto& p : parsed) {
    if (!p.record) {
      ++c.stats.malformed;
      if (c.stats.errors.size() < 20) c.stats.errors.push_back(std::move(p.error));
      continue;
    }
    if (!seen.insert(p.record->id).second) {
      ++c.stats.dropped_duplicate;
      continue;
    }
    if (p.record->is_repost) {
      ++c.stats.dropped_repost;
      continue;
    }
    if (opt.english_only && p.record->lang && *p.record->lang != "en") {
      ++c.stats.dropped_language;
      continue;
    }
    c.records.push_back(std::move(*p.record));
  }
  c.stats.kept = c.records.size();

  if (c.stats.total > 0 &&
      static_cast<double>(c.stats.malformed) >
          opt.max_malformed_fraction * static_cast<double>(c.stats.total)) {
    throw CorpusQualityError(std::to_string(c.stats.malformed) + " of " +
                             std::to_string(c.stats.total) +
                             " lines are malformed (threshold " +
                             text::fixed(opt.max_malformed_fraction * 100, 1) + "%)" +
                             (c.stats.errors.empty() ? "" : "; first: " + c.stats.errors.front()));
  }
  return c;
}

inline Corpus load_corpus(const std::filesystem::path& path, const IngestOptions& opt = {}) {
  return load_corpus_text(text::read_file(path.string()), opt);
}

// Each record lands in exactly one bucket; buckets are chronological and keep
// input order within a month.
inline std::map<MonthKey, std::vector<TweetRecord>> partition_by_month(
    const std::vector<TweetRecord>& records) {
  std::map<MonthKey, std::vector<TweetRecord>> out;
  for (const auto& r : records) out[r.month()].push_back(r);
  return out;
}

// Writes one "<YYYY-MM>.jsonl" file per bucket plus "ingest_stats.json".
inline void write_partitions(const std::filesystem::path& dir,
                             const std::map<MonthKey, std::vector<TweetRecord>>& buckets,
                             const IngestStats& stats) {
  std::filesystem::create_directories(dir);
  for (const auto& [month, recs] : buckets) {
    std::string body;
    for (const auto& r : recs) body += serialize_record(r) + "\n";
    text::write_file((dir / (month.str() + ".jsonl")).string(), body);
  }
  text::write_file((dir / "ingest_stats.json").string(), stats.to_json().dump(2) + "\n");
}

// Reads every "<YYYY-MM>.jsonl" bucket in chronological order.
inline std::vector<TweetRecord> read_partitions(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("partition directory '" + dir.string() + "' does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.size() == 13 && name.ends_with(".jsonl") &&
        MonthKey::parse(name.substr(0, 7)))
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TweetRecord> out;
  for (const auto& f : files) {
    const std::string content = text::read_file(f.string());
    std::size_t n = 0;
    for (auto l : text::lines(content)) {
      ++n;
      if (!text::trim(l).empty()) out.push_back(parse_record(l, n));
    }
  }
  return out;
}

}  // namespace adoptrace
