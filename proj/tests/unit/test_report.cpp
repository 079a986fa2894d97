#include <catch_amalgamated.hpp>

#include <random>

#include "adoptrace/corpus.hpp"
#include "adoptrace/report.hpp"
#include "adoptrace/synth.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace adoptrace;

namespace {

AspectMention m(std::string term, std::string id) { return {std::move(term), std::move(id), 0, 0}; }

AspectMonthCell cell(std::string term, Period p, Polarity label) {
  AspectMonthCell c;
  c.term = std::move(term);
  c.period = p;
  c.label = label;
  c.counts[index(label)] = 1;
  return c;
}

CellMap cells_of(std::vector<AspectMonthCell> cs) {
  CellMap out;
  for (auto& c : cs) out.emplace(CellKey{c.term, c.period}, c);
  return out;
}

}  // namespace

TEST_CASE("top_terms counts records, not occurrences") {
  const std::vector<AspectMention> ms = {m("cloud", "1"), m("cloud", "1"), m("cloud", "2"),
                                         m("5g", "2"),    m("ai", "3"),    m("5g", "3")};
  const auto top = top_terms(ms, 10);
  REQUIRE(top.size() == 3);
  CHECK(top[0] == TermFrequency{"5g", 2});
  CHECK(top[1] == TermFrequency{"cloud", 2});
  CHECK(top[2] == TermFrequency{"ai", 1});
  CHECK(top_terms(ms, 1) == std::vector<TermFrequency>{{"5g", 2}});
  CHECK(top_terms({}, 5).empty());
  CHECK_THROWS_AS(top_terms(ms, 0), std::invalid_argument);
}

TEST_CASE("top_terms for k is a prefix of top_terms for k+1") {
  std::mt19937_64 rng(5);
  std::vector<AspectMention> ms;
  for (int i = 0; i < 500; ++i)
    ms.push_back(m("t" + std::to_string(rng() % 30), std::to_string(rng() % 100)));
  auto prev = top_terms(ms, 1);
  for (std::size_t k = 2; k <= 31; ++k) {
    const auto cur = top_terms(ms, k);
    REQUIRE(cur.size() >= prev.size());
    CHECK(std::equal(prev.begin(), prev.end(), cur.begin()));
    prev = cur;
  }
}

TEST_CASE("grid covers every position") {
  const Period jan{2019, 1, 0}, feb{2019, 2, 0}, mar{2019, 3, 0};
  const auto cells = cells_of({cell("cloud", jan, Polarity::kPositive),
                               cell("cloud", feb, Polarity::kNegative),
                               cell("cloud", mar, Polarity::kNeutral),
                               cell("drones", jan, Polarity::kPositive),
                               cell("drones", mar, Polarity::kPositive)});
  const auto r = build_grid(cells);
  CHECK(r.warnings.empty());
  CHECK(r.grid.aspects == std::vector<std::string>{"cloud", "drones"});
  CHECK(r.grid.periods == std::vector<Period>{jan, feb, mar});
  CHECK(r.grid.positions() == 6);
  CHECK(r.grid.no_data_count() == 1);
  CHECK(r.grid.at("drones", feb) == nullptr);
  CHECK(r.grid.at("cloud", feb)->label == Polarity::kNegative);

  const auto only = build_grid(cells, std::vector<std::string>{"Drones", "robotics"});
  CHECK(only.grid.aspects == std::vector<std::string>{"drones"});
  CHECK(only.warnings.size() == 1);

  const auto wide = build_grid(cells, {}, PeriodRange{{2016, 1, 0}, {2021, 12, 0}});
  CHECK(wide.grid.periods.size() == 72);
  CHECK(wide.grid.no_data_count() == 2 * 72 - 5);

  const auto none = build_grid(cells, {}, PeriodRange{{2020, 1, 0}, {2020, 6, 0}});
  CHECK(none.grid.positions() == 12);
  CHECK(none.grid.cells.empty());

  const auto empty = build_grid(cells, {}, PeriodRange{{2020, 6, 0}, {2020, 1, 0}});
  CHECK(empty.grid.empty());
  CHECK_FALSE(empty.warnings.empty());
}

TEST_CASE("sector filter matches whole keywords and plurals") {
  const SectorFilter health("healthcare", {"hospital", "patient"});
  CHECK(health.matches("malware targeting israeli hospitals"));
  CHECK(health.matches("a hospital"));
  CHECK_FALSE(health.matches("5g rollout update"));
  CHECK_FALSE(health.matches("hospitality industry"));
  CHECK_THROWS_AS(SectorFilter("x", {}), std::invalid_argument);
  CHECK_THROWS_AS(SectorFilter("x", {"  "}), std::invalid_argument);

  const auto loaded = load_sector(oracle::data_dir() + "/sectors/healthcare.conf");
  CHECK(loaded.name() == "healthcare");
  CHECK(loaded.matches("ransomware hits clinics"));

  std::vector<TweetRecord> recs(2);
  recs[0].text = "New robotics at the Hospital";
  recs[1].text = "robotics in schools";
  CHECK(sector_view(recs, loaded, PrepConfig{}).size() == 1);
}

TEST_CASE("grid csv round-trips") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AspectMonthCell> cs;
    for (int i = 0; i < 20; ++i) {
      auto c = cell("term " + std::to_string(rng() % 4), Period{2020, static_cast<int>(1 + rng() % 12), 0},
                    kPolarities[rng() % 3]);
      c.counts = {rng() % 9, rng() % 9, rng() % 9};
      cs.push_back(c);
    }
    const auto grid = build_grid(cells_of(cs)).grid;
    CHECK(grid_from_csv(grid_to_csv(grid)) == grid);
  }
  CHECK(grid_to_csv(TimelineGrid{}) == "aspect,period,label,n_positive,n_negative,n_neutral\n");
  CHECK_THROWS_AS(grid_from_csv("bad\n"), ParseError);
}

TEST_CASE("svg colours cells by label") {
  const auto grid =
      build_grid(cells_of({cell("cloud <x>", Period{2019, 1, 0}, Polarity::kPositive)})).grid;
  const auto svg = grid_to_svg(grid, "title & co");
  CHECK(svg.find("<rect class=\"cell positive\"") != std::string::npos);
  CHECK(svg.find("fill=\"#2e9e44\"><title>") != std::string::npos);
  CHECK(svg.find("<rect class=\"cell negative\"") == std::string::npos);
  CHECK(svg.find("cloud &lt;x&gt;") != std::string::npos);
  CHECK(svg.find("title &amp; co") != std::string::npos);
  CHECK(color_of(Polarity::kNeutral) == "#f39c12");
  CHECK(color_of(Polarity::kNegative) == "#d62c2c");
}

TEST_CASE("fixture top terms equal the planted counts") {
  const auto corpus = load_corpus(oracle::data_dir() + "/fixtures/corpus_1k.jsonl", {});
  const TermIndex idx(synth::kTerms);
  std::vector<AspectMention> all;
  for (const auto& r : corpus.records) {
    const auto ms = extract(normalize(r.text, PrepConfig{}), idx, r.id);
    all.insert(all.end(), ms.begin(), ms.end());
  }
  const auto man = nlohmann::json::parse(
      text::read_file(oracle::data_dir() + "/fixtures/corpus_1k.manifest.json"));
  const auto top = top_terms(all, 100);
  CHECK(top.size() == man["term_counts"].size());
  for (const auto& t : top) CHECK(t.frequency == man["term_counts"][t.term].get<std::size_t>());
}
