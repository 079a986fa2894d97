#pragma once

// Text normalization ahead of matching and scoring: lowercase, strip
// mentions, hashtags, URLs and the keywords used to collect the corpus.

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/util/text.hpp"
#include "adoptrace/util/utf8.hpp"
#include "json.hpp"

namespace adoptrace {

struct PrepConfig {
  std::vector<std::string> scrape_keywords = {"iot", "internet of things"};
  bool preserve_case_for_sentiment = false;
  bool english_only = true;

  static PrepConfig from_json(const nlohmann::json& j) {
    PrepConfig c;
    if (j.contains("scrape_keywords"))
      c.scrape_keywords = j.at("scrape_keywords").get<std::vector<std::string>>();
    c.preserve_case_for_sentiment =
        j.value("preserve_case_for_sentiment", c.preserve_case_for_sentiment);
    c.english_only = j.value("english_only", c.english_only);
    return c;
  }

  nlohmann::ordered_json to_json() const {
    return {{"scrape_keywords", scrape_keywords},
            {"preserve_case_for_sentiment", preserve_case_for_sentiment},
            {"english_only", english_only}};
  }
};

enum class SpanKind { kMention, kHashtag, kUrl, kKeyword };

constexpr std::string_view to_string(SpanKind k) {
  switch (k) {
    case SpanKind::kMention: return "mention";
    case SpanKind::kHashtag: return "hashtag";
    case SpanKind::kUrl: return "url";
    case SpanKind::kKeyword: return "keyword";
  }
  return "";
}

struct RemovedSpan {
  SpanKind kind;
  std::string text;

  bool operator==(const RemovedSpan&) const = default;
};

struct CleanText {
  std::string matching_view;
  std::string sentiment_view;
  std::vector<RemovedSpan> removed_spans;
};

// Letters and digits; every non-ASCII byte counts as a word byte so that
// accented and non-Latin words are never split.
constexpr bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

inline bool at_word_boundary(std::string_view s, std::size_t begin, std::size_t end) {
  return (begin == 0 || !is_word_byte(s[begin - 1])) && (end == s.size() || !is_word_byte(s[end]));
}

namespace detail {

constexpr bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Original-case and lowercase copies of the same text, edited in lockstep.
// Lowercasing preserves byte length, so offsets agree between the two.
struct Views {
  std::string orig;
  std::string low;

  void blank(std::size_t begin, std::size_t end) {
    orig.replace(begin, end - begin, " ");
    low.replace(begin, end - begin, " ");
  }

  void collapse() {
    std::string o, l;
    o.reserve(orig.size());
    l.reserve(low.size());
    bool pending = false;
    for (std::size_t i = 0; i < orig.size(); ++i) {
      if (is_ascii_space(orig[i])) {
        pending = !o.empty();
        continue;
      }
      if (pending) {
        o.push_back(' ');
        l.push_back(' ');
        pending = false;
      }
      o.push_back(orig[i]);
      l.push_back(low[i]);
    }
    orig = std::move(o);
    low = std::move(l);
  }
};

inline std::size_t token_end(std::string_view s, std::size_t pos) {
  while (pos < s.size() && !is_ascii_space(s[pos])) ++pos;
  return pos;
}

inline std::string normalize_phrase(std::string_view phrase) {
  const std::string low = utf8::lower(phrase);
  std::string out;
  for (auto w : utf8::split_whitespace(low)) {
    if (!out.empty()) out.push_back(' ');
    out.append(w);
  }
  return out;
}

}  // namespace detail

// Removal order: URLs, then mentions and hashtags (both run to the next
// whitespace), then scrape keywords as whole words until a fixed point is
// reached. Every removed span becomes a single space before collapsing.
inline CleanText normalize(std::string_view raw, const PrepConfig& config) {
  CleanText out;
  detail::Views v{std::string(raw), utf8::lower(raw)};

  for (std::size_t i = 0; i < v.low.size();) {
    const std::string_view low = v.low;
    const bool url_start = (i == 0 || !is_word_byte(low[i - 1])) &&
                           (low.compare(i, 7, "http://") == 0 ||
                            low.compare(i, 8, "https://") == 0 || low.compare(i, 4, "www.") == 0);
    SpanKind kind;
    if (url_start)
      kind = SpanKind::kUrl;
    else if (low[i] == '@')
      kind = SpanKind::kMention;
    else if (low[i] == '#')
      kind = SpanKind::kHashtag;
    else {
      ++i;
      continue;
    }
    const std::size_t end = detail::token_end(low, i);
    out.removed_spans.push_back({kind, v.orig.substr(i, end - i)});
    v.blank(i, end);
    ++i;
  }
  v.collapse();

  std::vector<std::string> keywords;
  for (const auto& k : config.scrape_keywords) {
    auto n = detail::normalize_phrase(k);
    if (!n.empty()) keywords.push_back(std::move(n));
  }
  std::sort(keywords.begin(), keywords.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });

  for (bool changed = !keywords.empty(); changed;) {
    changed = false;
    for (const auto& kw : keywords) {
      std::size_t pos = 0;
      while ((pos = v.low.find(kw, pos)) != std::string::npos) {
        if (at_word_boundary(v.low, pos, pos + kw.size())) {
          out.removed_spans.push_back({SpanKind::kKeyword, v.orig.substr(pos, kw.size())});
          v.blank(pos, pos + kw.size());
          changed = true;
        }
        ++pos;
      }
    }
    v.collapse();
  }

  out.matching_view = std::move(v.low);
  out.sentiment_view = config.preserve_case_for_sentiment ? std::move(v.orig) : out.matching_view;
  return out;
}

}  // namespace adoptrace
