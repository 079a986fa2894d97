#include <catch_amalgamated.hpp>

#include <random>

#include "adoptrace/aspects.hpp"
#include "oracles.hpp"

using namespace adoptrace;

namespace {
std::vector<std::string> terms_of(const std::vector<AspectMention>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.term);
  return out;
}
}  // namespace

TEST_CASE("term index normalizes and deduplicates") {
  CHECK(TermIndex({"Cloud", "cloud native", "5G network"}).size() == 3);
  CHECK(TermIndex({"cloud", "Cloud", "  CLOUD "}).size() == 1);
  CHECK(TermIndex({"Cloud   Native"}).terms().front() == "cloud native");
  CHECK(TermIndex({"", "  "}).empty());
}

TEST_CASE("load_terms skips comments and rejects empty files") {
  oracle::TempDir dir("terms");
  text::write_file((dir / "t.txt").string(), "# header\nCloud\n\ncloud native\ncloud\n");
  const auto idx = load_terms(dir / "t.txt");
  CHECK(idx.terms() == std::vector<std::string>{"cloud", "cloud native"});
  CHECK(idx.source_name() == "t.txt");
  text::write_file((dir / "e.txt").string(), "# nothing\n\n");
  CHECK_THROWS_AS(load_terms(dir / "e.txt"), DataError);
  CHECK_THROWS_AS(load_terms(dir / "missing.txt"), IoError);
}

TEST_CASE("nested and overlapping matches all fire, once per term") {
  const TermIndex idx({"cloud", "cloud native", "native platform", "5g", "5g network"});
  const auto ms = extract("cloud native platform on cloud 5g network and 5g", idx, "r1");
  CHECK(terms_of(ms) ==
        std::vector<std::string>{"5g", "5g network", "cloud", "cloud native", "native platform"});
  for (const auto& m : ms) CHECK(m.record_id == "r1");
  CHECK(ms[2].begin == 0);
}

TEST_CASE("word boundaries") {
  const TermIndex idx({"cloud", "5g", "co"});
  CHECK(extract("clouds are pretty", idx).empty());
  CHECK(terms_of(extract("cloud-based", idx)) == std::vector<std::string>{"cloud"});
  CHECK(extract("5gs", idx).empty());
  CHECK(extract("écloud", idx).empty());
  CHECK(terms_of(extract("co-op", idx)) == std::vector<std::string>{"co"});
  CHECK(terms_of(extract("(cloud)", idx)) == std::vector<std::string>{"cloud"});
}

TEST_CASE("spans index the matching view") {
  const TermIndex idx({"data science"});
  const std::string view = "the data science space";
  const auto ms = extract(view, idx);
  REQUIRE(ms.size() == 1);
  CHECK(view.substr(ms[0].begin, ms[0].end - ms[0].begin) == "data science");
}

TEST_CASE("automaton matches the naive per-term scan on random text") {
  const std::vector<std::string> vocab = {"cloud", "cloud native", "native", "5g", "5g network",
                                          "data", "big data", "smart home", "a", "über", "co-op",
                                          "learning", "machine learning", "network"};
  const TermIndex idx(vocab);
  std::mt19937_64 rng(17);
  for (int n = 0; n < 3000; ++n) {
    const auto t = oracle::random_text(rng, vocab, 1 + rng() % 25);
    INFO(t);
    CHECK(extract(t, idx) == oracle::naive_extract(t, idx.terms()));
  }
}
