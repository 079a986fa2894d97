#pragma once

// Technology-aspect extraction: every term of a phrase index that occurs in
// a normalized text at word boundaries, found in one pass with an
// Aho-Corasick automaton.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/textprep.hpp"
#include "adoptrace/util/text.hpp"

namespace adoptrace {

struct AspectMention {
  std::string term;
  std::string record_id;
  std::size_t begin = 0;  // byte offsets into matching_view
  std::size_t end = 0;

  auto operator<=>(const AspectMention&) const = default;
};

// Multi-pattern byte automaton. Transitions are stored sparsely per node
// (sorted by byte) since term vocabularies make for a wide, shallow trie.
class PhraseAutomaton {
 public:
  PhraseAutomaton() = default;

  explicit PhraseAutomaton(const std::vector<std::string>& patterns) {
    nodes_.emplace_back();
    for (std::uint32_t p = 0; p < patterns.size(); ++p) insert(patterns[p], p);
    lengths_.reserve(patterns.size());
    for (const auto& p : patterns) lengths_.push_back(p.size());
    link();
  }

  // Calls on_match(pattern_index, begin, end) for every occurrence, including
  // overlapping and nested ones, in order of increasing end offset.
  template <typename OnMatch>
  void scan(std::string_view text, OnMatch&& on_match) const {
    if (nodes_.empty()) return;
    std::uint32_t state = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      state = step(state, static_cast<unsigned char>(text[i]));
      for (std::uint32_t n = nodes_[state].terminal ? state : nodes_[state].output; n != kNone;
           n = nodes_[n].output) {
        const auto len = lengths_[nodes_[n].pattern];
        on_match(nodes_[n].pattern, i + 1 - len, i + 1);
      }
    }
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  struct Edge {
    unsigned char byte;
    std::uint32_t target;
  };

  struct Node {
    std::vector<Edge> edges;
    std::uint32_t fail = 0;
    std::uint32_t output = kNone;  // nearest terminal node on the fail chain
    std::uint32_t pattern = kNone;
    bool terminal = false;
  };

  std::uint32_t child(std::uint32_t n, unsigned char b) const {
    const auto& e = nodes_[n].edges;
    auto it = std::lower_bound(e.begin(), e.end(), b,
                               [](const Edge& x, unsigned char v) { return x.byte < v; });
    return it != e.end() && it->byte == b ? it->target : kNone;
  }

  std::uint32_t step(std::uint32_t state, unsigned char b) const {
    for (;;) {
      const auto next = child(state, b);
      if (next != kNone) return next;
      if (state == 0) return 0;
      state = nodes_[state].fail;
    }
  }

  void insert(std::string_view pattern, std::uint32_t index) {
    std::uint32_t n = 0;
    for (unsigned char b : pattern) {
      auto next = child(n, b);
      if (next == kNone) {
        next = static_cast<std::uint32_t>(nodes_.size());
        auto& e = nodes_[n].edges;
        auto it = std::lower_bound(e.begin(), e.end(), b,
                                   [](const Edge& x, unsigned char v) { return x.byte < v; });
        e.insert(it, Edge{b, next});
        nodes_.emplace_back();
      }
      n = next;
    }
    nodes_[n].terminal = true;
    nodes_[n].pattern = index;
  }

  void link() {
    std::queue<std::uint32_t> q;
    for (const auto& e : nodes_[0].edges) {
      nodes_[e.target].fail = 0;
      q.push(e.target);
    }
    while (!q.empty()) {
      const auto n = q.front();
      q.pop();
      for (const auto& e : nodes_[n].edges) {
        std::uint32_t f = nodes_[n].fail;
        std::uint32_t target = kNone;
        for (;;) {
          target = child(f, e.byte);
          if (target != kNone || f == 0) break;
          f = nodes_[f].fail;
        }
        nodes_[e.target].fail = (target != kNone && target != e.target) ? target : 0;
        const auto& fn = nodes_[nodes_[e.target].fail];
        nodes_[e.target].output = fn.terminal ? nodes_[e.target].fail : fn.output;
        q.push(e.target);
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<std::size_t> lengths_;
};

class TermIndex {
 public:
  // Phrases are lowercased and single-spaced; duplicates and empty phrases
  // are dropped.
  TermIndex(const std::vector<std::string>& phrases, std::string source_name = {})
      : source_name_(std::move(source_name)) {
    std::set<std::string> unique;
    for (const auto& p : phrases) {
      auto n = detail::normalize_phrase(p);
      if (!n.empty()) unique.insert(std::move(n));
    }
    terms_.assign(unique.begin(), unique.end());
    automaton_ = PhraseAutomaton(terms_);
  }

  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::string& source_name() const { return source_name_; }
  const PhraseAutomaton& automaton() const { return automaton_; }

 private:
  std::string source_name_;
  std::vector<std::string> terms_;  // sorted
  PhraseAutomaton automaton_;
};

// One phrase per line; blank lines and lines starting with '#' are skipped.
inline TermIndex load_terms(const std::filesystem::path& path) {
  const std::string content = text::read_file(path.string());
  std::vector<std::string> phrases;
  for (auto l : text::lines(content)) {
    const auto t = text::trim(l);
    if (!t.empty() && t.front() != '#') phrases.emplace_back(t);
  }
  TermIndex index(phrases, path.filename().string());
  if (index.empty()) throw DataError("term file '" + path.string() + "' contains no terms");
  return index;
}

// All index terms present in `matching_view` at word boundaries, one
// mention per distinct term (first occurrence), sorted by term.
inline std::vector<AspectMention> extract(std::string_view matching_view, const TermIndex& index,
                                          std::string_view record_id = {}) {
  std::vector<std::size_t> first(index.size(), SIZE_MAX);
  index.automaton().scan(matching_view, [&](std::uint32_t p, std::size_t b, std::size_t e) {
    if (first[p] == SIZE_MAX && at_word_boundary(matching_view, b, e)) first[p] = b;
  });
  std::vector<AspectMention> out;
  for (std::size_t p = 0; p < first.size(); ++p) {
    if (first[p] == SIZE_MAX) continue;
    const auto& term = index.terms()[p];
    out.push_back({term, std::string(record_id), first[p], first[p] + term.size()});
  }
  return out;
}

inline std::vector<AspectMention> extract(const CleanText& clean, const TermIndex& index,
                                          std::string_view record_id = {}) {
  return extract(clean.matching_view, index, record_id);
}

}  // namespace adoptrace
