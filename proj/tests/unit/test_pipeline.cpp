#include <catch_amalgamated.hpp>

#include "adoptrace/annotate/campaign.hpp"
#include "adoptrace/pipeline.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace adoptrace;
using namespace adoptrace::pipeline;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config(const fs::path& out) {
  auto cfg = RunConfig::load(oracle::data_dir() + "/fixtures/run_1k.json");
  cfg.out_dir = out;
  return cfg;
}

nlohmann::json manifest() {
  return nlohmann::json::parse(
      text::read_file(oracle::data_dir() + "/fixtures/corpus_1k.manifest.json"));
}

}  // namespace

TEST_CASE("run config resolves paths against its directory") {
  const auto cfg = RunConfig::load(oracle::data_dir() + "/fixtures/run_1k.json");
  CHECK(fs::exists(cfg.input));
  CHECK(fs::exists(cfg.terms));
  CHECK(fs::exists(cfg.lexicon));
  REQUIRE(cfg.emoji);
  CHECK(fs::exists(*cfg.emoji));
  CHECK(cfg.seed == 42);
  CHECK(cfg.sample_per_class == 50);
  CHECK(cfg.report.sectors.size() == 2);
  CHECK(cfg.report.from == Period{2016, 1, 0});

  nlohmann::json j = {{"input", "a"}, {"terms", "/abs/t"}, {"lexicon", "l"}, {"out_dir", "o"},
                      {"prep", {{"scrape_keywords", {"iot"}}}}, {"granularity", "day"}};
  const auto c = RunConfig::from_json(j, "/base");
  CHECK(c.input == fs::path("/base/a"));
  CHECK(c.terms == fs::path("/abs/t"));
  CHECK(c.granularity == Granularity::kDay);
  j["granularity"] = "week";
  CHECK_THROWS_AS(RunConfig::from_json(j), DataError);
  j.erase("lexicon");
  CHECK_THROWS_AS(RunConfig::from_json(j), DataError);
}

TEST_CASE("fixture run reproduces the planted counts") {
  oracle::TempDir dir("run");
  const auto res = run_pipeline(fixture_config(dir.path()), 1);
  const auto man = manifest();
  CHECK(res.ingest.kept == man["kept"].get<std::size_t>());
  CHECK(res.ingest.dropped_duplicate == man["duplicates"].get<std::size_t>());
  CHECK(res.ingest.dropped_repost == man["reposts"].get<std::size_t>());
  CHECK(res.ingest.dropped_language == man["foreign"].get<std::size_t>());
  CHECK(res.extract.records_with_terms == man["records_with_terms"].get<std::size_t>());
  CHECK(res.extract.mention_rows == man["mention_rows"].get<std::size_t>());
  CHECK(res.scored_rows == man["mention_rows"].get<std::size_t>());

  for (const auto* f : {"mentions.jsonl", "mentions.stats.json", "scored.tsv", "cells.tsv",
                        "report/top_terms.tsv", "report/grid.csv", "report/grid.svg",
                        "report/sector_healthcare.csv", "report/sector_education.svg",
                        "campaign.jsonl", "manifest.json"})
    CHECK(fs::exists(dir / f));

  const auto grid = grid_from_csv(text::read_file((dir / "report/grid.csv").string()));
  CHECK(grid.aspects.size() == 5);
  CHECK(grid.periods.size() == 72);

  const auto samples = annotate::load_campaign_samples(dir / "campaign.jsonl");
  CHECK(samples.size() == 150);

  // the sector filter finds exactly the planted phrases
  const auto records = read_partitions(dir / "partitions");
  for (const auto* s : {"healthcare", "education"}) {
    const auto filter = load_sector(oracle::data_dir() + "/sectors/" + s + ".conf");
    CHECK(sector_view(records, filter, PrepConfig{}).size() ==
          man["sector_counts"][s].get<std::size_t>());
  }
}

TEST_CASE("outputs are identical across runs and thread counts") {
  oracle::TempDir a("det"), b("det"), c("det");
  const auto r1 = run_pipeline(fixture_config(a.path()), 1);
  const auto r2 = run_pipeline(fixture_config(b.path()), 1);
  const auto r8 = run_pipeline(fixture_config(c.path()), 8);
  CHECK(r1.outputs == r2.outputs);
  CHECK(r1.outputs == r8.outputs);
  CHECK(text::read_file((a / "manifest.json").string()) ==
        text::read_file((c / "manifest.json").string()));
}

TEST_CASE("a failing stage is named and earlier outputs remain") {
  oracle::TempDir dir("fail");
  auto cfg = fixture_config(dir.path());
  cfg.lexicon = dir / "no-such-lexicon.txt";
  try {
    run_pipeline(cfg);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "score");
  }
  CHECK(fs::exists(dir / "mentions.jsonl"));
  CHECK(fs::is_directory(dir / "partitions"));
  CHECK_FALSE(fs::exists(dir / "scored.tsv"));
}

TEST_CASE("mention files round-trip") {
  MentionRecord r;
  r.id = "9";
  r.created_at = *Timestamp::parse("2019-05-01T10:00:00Z");
  r.text = "Cloud native!";
  r.matching_view = "cloud native!";
  r.sentiment_view = "cloud native!";
  r.mentions = {{"cloud", "9", 0, 5}, {"cloud native", "9", 0, 12}};
  const std::vector<MentionRecord> v = {r, r};
  CHECK(parse_mentions(format_mentions(v)) == v);
}
