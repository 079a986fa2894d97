#include <catch_amalgamated.hpp>

#include "adoptrace/corpus.hpp"
#include "adoptrace/synth.hpp"
#include "oracles.hpp"

using namespace adoptrace;

TEST_CASE("parse_record reads the documented fields") {
  const auto r = parse_record(R"({"id":"1","created_at":"2018-12-03T10:15:00Z","text":"hello"})");
  CHECK(r.id == "1");
  CHECK(r.month() == MonthKey{2018, 12});
  CHECK(r.text == "hello");
  CHECK_FALSE(r.is_repost);
  CHECK_FALSE(r.lang);

  const auto rp = parse_record(
      R"({"id":7,"created_at":"2018-12-03","text":"x","is_repost":true,"lang":"en","extra":[1]})");
  CHECK(rp.id == "7");
  CHECK(rp.is_repost);
  CHECK(rp.lang == "en");
}

TEST_CASE("parse_record names the missing field and the line") {
  try {
    parse_record(R"({"id":"1","text":"hello"})", 12);
    FAIL("expected MissingFieldError");
  } catch (const MissingFieldError& e) {
    CHECK(e.field() == "created_at");
    CHECK(e.line() == 12);
  }
  CHECK_THROWS_AS(parse_record(R"({"created_at":"2018-12-03","text":"x"})"), MissingFieldError);
  CHECK_THROWS_AS(parse_record(R"({"id":"1","created_at":"2018-12-03"})"), MissingFieldError);
  CHECK_THROWS_AS(parse_record("{not json"), ParseError);
  CHECK_THROWS_AS(parse_record("[1,2]"), ParseError);
  CHECK_THROWS_AS(parse_record(R"({"id":"","created_at":"2018-12-03","text":"x"})"), ParseError);
  CHECK_THROWS_AS(parse_record(R"({"id":"1","created_at":"yesterday","text":"x"})"), ParseError);
  CHECK_THROWS_AS(parse_record(R"({"id":"1","created_at":"2018-12-03","text":"x","is_repost":"no"})"),
                  ParseError);
}

TEST_CASE("serialize and parse round-trip") {
  TweetRecord r{"a\"b", *Timestamp::parse("2019-05-06T07:08:09Z"), "multi\nline \xF0\x9F\x98\x81",
                true, "en"};
  CHECK(parse_record(serialize_record(r)) == r);
}

namespace {
std::string rec(const std::string& id, const std::string& date, const std::string& extra = "") {
  return R"({"id":")" + id + R"(","created_at":")" + date + R"(","text":"t)" + id + "\"" + extra +
         "}\n";
}
}  // namespace

TEST_CASE("load_corpus drops duplicates, reposts and foreign records") {
  SECTION("duplicate id: first occurrence wins") {
    const auto c = load_corpus_text(rec("1", "2018-01-01") + rec("2", "2018-01-02") +
                                    rec("1", "2018-02-01"));
    CHECK(c.records.size() == 2);
    CHECK(c.stats.dropped_duplicate == 1);
    CHECK(c.records[0].month() == MonthKey{2018, 1});
  }
  SECTION("reposts") {
    const auto c = load_corpus_text(rec("1", "2018-01-01") + rec("2", "2018-01-01", R"(,"is_repost":true)"));
    CHECK(c.records.size() == 1);
    CHECK(c.stats.dropped_repost == 1);
  }
  SECTION("language filter and its toggle") {
    const auto text = rec("1", "2018-01-01", R"(,"lang":"en")") + rec("2", "2018-01-01", R"(,"lang":"de")") +
                      rec("3", "2018-01-01");
    CHECK(load_corpus_text(text).records.size() == 2);
    IngestOptions all;
    all.english_only = false;
    CHECK(load_corpus_text(text, all).records.size() == 3);
  }
  SECTION("empty input") {
    const auto c = load_corpus_text("");
    CHECK(c.records.empty());
    CHECK(c.stats == IngestStats{});
  }
}

TEST_CASE("malformed lines are tolerated up to the threshold") {
  std::string text;
  for (int i = 0; i < 10; ++i) text += rec(std::to_string(i), "2018-01-01");
  text += "garbage\n";
  const auto c = load_corpus_text(text);
  CHECK(c.stats.malformed == 1);
  CHECK(c.stats.errors.front().starts_with("line 11:"));
  text += "more garbage\n";
  CHECK_THROWS_AS(load_corpus_text(text), CorpusQualityError);
  IngestOptions lax;
  lax.max_malformed_fraction = 0.5;
  CHECK(load_corpus_text(text, lax).stats.malformed == 2);
}

TEST_CASE("unreadable path is an I/O error") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("partitioning is a chronological disjoint cover") {
  const auto c = load_corpus_text(rec("1", "2017-11-01") + rec("2", "2017-11-30") +
                                  rec("3", "2016-01-31") + rec("4", "2016-02-01"));
  const auto buckets = partition_by_month(c.records);
  REQUIRE(buckets.size() == 3);
  CHECK(buckets.begin()->first == MonthKey{2016, 1});
  CHECK(buckets.at(MonthKey{2017, 11}).size() == 2);
  std::size_t total = 0;
  for (const auto& [m, v] : buckets) total += v.size();
  CHECK(total == c.stats.kept);
}

TEST_CASE("parallel loading is identical to serial loading") {
  synth::Options o;
  o.records = 3000;
  o.seed = 9;
  const auto out = synth::generate(o);
  const auto serial = load_corpus_text(out.jsonl);
  for (unsigned t : {2u, 3u, 8u}) {
    IngestOptions opt;
    opt.threads = t;
    const auto par = load_corpus_text(out.jsonl, opt);
    CHECK(par.records == serial.records);
    CHECK(par.stats == serial.stats);
  }
  CHECK(load_corpus_text(out.jsonl).records == serial.records);  // idempotent
}

TEST_CASE("partitions written to disk read back unchanged") {
  oracle::TempDir dir("parts");
  const auto c = load_corpus(oracle::data_dir() + "/fixtures/corpus_1k.jsonl");
  write_partitions(dir.path(), partition_by_month(c.records), c.stats);
  CHECK(read_partitions(dir.path()) == [&] {
    std::vector<TweetRecord> sorted;
    for (auto& [m, v] : partition_by_month(c.records)) sorted.insert(sorted.end(), v.begin(), v.end());
    return sorted;
  }());
  CHECK(std::filesystem::exists(dir / "ingest_stats.json"));
  CHECK_THROWS_AS(read_partitions(dir / "missing"), IoError);
}

TEST_CASE("bundled fixture matches its generator manifest") {
  const auto c = load_corpus(oracle::data_dir() + "/fixtures/corpus_1k.jsonl");
  const auto man = nlohmann::json::parse(
      text::read_file(oracle::data_dir() + "/fixtures/corpus_1k.manifest.json"));
  CHECK(c.stats.kept == man["kept"].get<std::size_t>());
  CHECK(c.stats.total == man["lines"].get<std::size_t>());
  CHECK(c.stats.dropped_duplicate == man["duplicates"].get<std::size_t>());
  CHECK(c.stats.dropped_repost == man["reposts"].get<std::size_t>());
  CHECK(c.stats.dropped_language == man["foreign"].get<std::size_t>());

  const auto buckets = partition_by_month(c.records);
  std::map<std::string, std::size_t> sizes;
  for (const auto& [m, v] : buckets) sizes[m.str()] = v.size();
  CHECK(sizes == man["month_counts"].get<std::map<std::string, std::size_t>>());

  const auto biggest = std::max_element(sizes.begin(), sizes.end(),
                                        [](auto& a, auto& b) { return a.second < b.second; });
  const auto smallest = std::min_element(sizes.begin(), sizes.end(),
                                         [](auto& a, auto& b) { return a.second < b.second; });
  CHECK(biggest->first == "2017-11");
  CHECK(smallest->first == "2021-12");
}

TEST_CASE("generator regenerates the bundled fixture byte for byte") {
  synth::Options o;
  o.records = 1000;
  o.seed = 42;
  CHECK(synth::generate(o).jsonl == text::read_file(oracle::data_dir() + "/fixtures/corpus_1k.jsonl"));
}
