#include <catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <thread>

#include "adoptrace/annotate/campaign.hpp"
#include "oracles.hpp"

using namespace adoptrace;
using namespace adoptrace::annotate;

namespace {

std::vector<ScoredRecord> samples(std::size_t n) {
  std::vector<ScoredRecord> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"s" + std::to_string(i), "text " + std::to_string(i), {"cloud", "5g"}, 0.5,
                   kPolarities[i % 3]});
  return out;
}

}  // namespace

TEST_CASE("one annotator sees every sample once, then nothing") {
  Campaign c(samples(150), {"c1", 5, 1});
  std::set<std::string> seen;
  for (int i = 0; i < 150; ++i) {
    const auto t = c.next_task("alice");
    REQUIRE(t);
    CHECK(t->aspect == "cloud");
    seen.insert(t->sample_id);
    CHECK(c.submit("alice", t->sample_id, "positive").status == SubmitStatus::kAccepted);
  }
  CHECK(seen.size() == 150);
  CHECK_FALSE(c.next_task("alice"));
  CHECK(c.next_task("bob"));
}

TEST_CASE("served tasks are not repeated before fresh ones run out") {
  Campaign c(samples(10), {"c", 5, 2});
  std::set<std::string> seen;
  for (int i = 0; i < 10; ++i) seen.insert(c.next_task("a")->sample_id);
  CHECK(seen.size() == 10);
  CHECK(c.next_task("a"));  // still unlabelled, so served again
}

TEST_CASE("submit statuses") {
  Campaign c(samples(3), {"c", 2, 0});
  CHECK(c.submit("a", "s0", "negative").status == SubmitStatus::kAccepted);
  CHECK(c.submit("a", "s0", "positive").status == SubmitStatus::kDuplicate);
  CHECK(c.submit("b", "s0", "maybe").status == SubmitStatus::kInvalidLabel);
  CHECK(c.submit("b", "nope", "neutral").status == SubmitStatus::kUnknownSample);
  CHECK(c.submit("b", "s0", "neutral").status == SubmitStatus::kAccepted);
  const auto r = c.submit("c", "s0", "neutral");
  CHECK(r.status == SubmitStatus::kCapReached);
  CHECK(r.total_annotations == 2);
  CHECK_FALSE(c.next_task("c")->sample_id == "s0");
}

TEST_CASE("a capped sample stops being served") {
  Campaign c(samples(1), {"c", 5, 0});
  for (int i = 0; i < 5; ++i) {
    const auto who = "ann" + std::to_string(i);
    REQUIRE(c.next_task(who));
    c.submit(who, "s0", "positive");
  }
  CHECK_FALSE(c.next_task("ann5"));
  CHECK(c.progress().complete);
}

TEST_CASE("five annotators complete a 150-sample campaign") {
  Campaign c(samples(150), {"c", 5, 3});
  auto p = c.progress();
  CHECK_FALSE(p.agreement);
  CHECK(p.to_json()["alpha"].is_null());
  for (int a = 0; a < 5; ++a) {
    const auto who = "ann" + std::to_string(a);
    while (const auto t = c.next_task(who)) c.submit(who, t->sample_id, "neutral");
  }
  p = c.progress();
  CHECK(p.annotations == 750);
  CHECK(p.annotators == 5);
  CHECK(p.completed_samples == 150);
  CHECK(p.complete);
  REQUIRE(p.agreement);
  CHECK(p.agreement->alpha == 1.0);
  CHECK(p.to_json()["alpha"].get<double>() == 1.0);
}

TEST_CASE("invalid campaigns are rejected") {
  CHECK_THROWS_AS(Campaign(samples(2), {"c", 0, 0}), std::invalid_argument);
  auto dup = samples(2);
  dup[1].id = dup[0].id;
  CHECK_THROWS_AS(Campaign(dup, {}), DataError);
  auto bare = samples(1);
  bare[0].terms.clear();
  CHECK_THROWS_AS(Campaign(bare, {}), DataError);
}

TEST_CASE("the log survives a restart") {
  oracle::TempDir dir("log");
  const auto log = dir / "ann.jsonl";
  {
    Campaign c(samples(4), {"c", 2, 0}, log, false);
    c.submit("a", "s0", "positive", "2021-01-01T00:00:00Z");
    c.submit("b", "s0", "negative", "2021-01-01T00:00:01Z");
    c.submit("a", "s1", "neutral", "2021-01-01T00:00:02Z");
  }
  Campaign c(samples(4), {"c", 2, 0}, log, false);
  CHECK(c.annotations().size() == 3);
  CHECK(c.annotations()[1] ==
        AnnotationRecord{"s0", "b", Polarity::kNegative, "2021-01-01T00:00:01Z"});
  CHECK(c.submit("a", "s1", "neutral").status == SubmitStatus::kDuplicate);
  CHECK(c.submit("c", "s0", "neutral").status == SubmitStatus::kCapReached);
  CHECK(AnnotationLog::read(log).size() == 3);

  // a log from a different campaign does not fit
  CHECK_THROWS_AS(Campaign(samples(4), {"c", 1, 0}, log, false), DataError);
}

TEST_CASE("a torn final log line is dropped") {
  oracle::TempDir dir("torn");
  const auto log = dir / "ann.jsonl";
  {
    Campaign c(samples(2), {"c", 5, 0}, log, false);
    c.submit("a", "s0", "positive", "t");
  }
  {
    std::ofstream f(log, std::ios::app);
    f << R"({"sample_id":"s1","annotator_id":"b","lab)";
  }
  Campaign c(samples(2), {"c", 5, 0}, log, false);
  CHECK(c.annotations().size() == 1);
  c.submit("b", "s1", "negative", "t");
  CHECK(AnnotationLog::read(log).size() == 2);

  {
    std::ofstream f(log, std::ios::app);
    f << "not json\n";
  }
  CHECK_THROWS_AS(AnnotationLog::read(log), ParseError);
}

TEST_CASE("concurrent submissions respect the cap") {
  Campaign c(samples(20), {"c", 5, 0});
  std::vector<std::thread> ts;
  for (int a = 0; a < 12; ++a)
    ts.emplace_back([&c, a] {
      const auto who = "ann" + std::to_string(a);
      for (int s = 0; s < 20; ++s) c.submit(who, "s" + std::to_string(s), "positive");
    });
  for (auto& t : ts) t.join();
  const auto p = c.progress();
  CHECK(p.annotations == 100);
  for (const auto& [id, n] : p.per_sample) CHECK(n == 5);
}

TEST_CASE("campaign sample files round-trip") {
  oracle::TempDir dir("samples");
  const auto s = samples(5);
  text::write_file((dir / "c.jsonl").string(), format_campaign_samples(s));
  CHECK(load_campaign_samples(dir / "c.jsonl") == s);
  text::write_file((dir / "bad.jsonl").string(), "{\"sample_id\": \"x\"}\n");
  CHECK_THROWS_AS(load_campaign_samples(dir / "bad.jsonl"), ParseError);
}
