#pragma once

// Rule-augmented lexicon sentiment scoring. Word valences from a lexicon are
// adjusted by degree modifiers, capitalization, negation and the contrastive
// "but", summed with punctuation emphasis and squashed into [-1, 1].
//
// The default constants and word tables are those published with the VADER
// lexicon (Hutto & Gilbert, 2014), whose lexicon file ships in data/lexicon.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "adoptrace/error.hpp"
#include "adoptrace/polarity.hpp"
#include "adoptrace/util/text.hpp"
#include "adoptrace/util/utf8.hpp"

namespace adoptrace {

struct Lexicon {
  std::unordered_map<std::string, double> entries;
  // Single-code-point emoji mapped to a textual description that is scored
  // in place of the emoji. Empty disables emoji translation.
  std::unordered_map<char32_t, std::string> emoji;
  std::string source;
  std::vector<std::string> warnings;

  const double* find(const std::string& token) const {
    const auto it = entries.find(token);
    return it == entries.end() ? nullptr : &it->second;
  }
  bool contains(const std::string& token) const { return entries.count(token) != 0; }
};

// Tab-separated "token<TAB>mean valence[<TAB>...]" lines. Later duplicates
// override earlier ones. Lines with a non-numeric valence and tokens holding
// uppercase characters (unreachable by lowercase lookup) are skipped; both
// produce a warning.
inline Lexicon parse_lexicon(std::string_view content, std::string source = {}) {
  Lexicon lex;
  lex.source = std::move(source);
  std::size_t n = 0;
  for (auto line : text::lines(content)) {
    ++n;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, '\t');
    const auto token = text::trim(fields[0]);
    if (fields.size() < 2 || token.empty()) {
      lex.warnings.push_back("line " + std::to_string(n) + ": expected token and valence");
      continue;
    }
    const auto val = text::trim(fields[1]);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc{} || ptr != val.data() + val.size() || !std::isfinite(v)) {
      lex.warnings.push_back("line " + std::to_string(n) + ": non-numeric valence '" +
                             std::string(val) + "'");
      continue;
    }
    std::string key(token);
    if (utf8::lower(key) != key) {
      lex.warnings.push_back("line " + std::to_string(n) + ": token '" + key +
                             "' is not lowercase, skipped");
      continue;
    }
    if (!lex.entries.insert_or_assign(key, v).second)
      lex.warnings.push_back("line " + std::to_string(n) + ": duplicate token '" + key + "'");
  }
  if (lex.entries.empty()) throw DataError("lexicon '" + lex.source + "' has no entries");
  return lex;
}

inline Lexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(text::read_file(path.string()), path.filename().string());
}

// "emoji<TAB>description" lines. Multi-code-point sequences are ignored;
// returns the number of single-code-point entries added.
inline std::size_t load_emoji_table(Lexicon& lex, const std::filesystem::path& path) {
  const std::string content = text::read_file(path.string());
  std::size_t added = 0;
  for (auto line : text::lines(content)) {
    const auto fields = text::split(line, '\t');
    if (fields.size() < 2 || fields[0].empty()) continue;
    const auto d = utf8::decode(fields[0], 0);
    if (d.len != fields[0].size()) continue;
    lex.emoji[d.cp] = std::string(text::trim(fields[1]));
    ++added;
  }
  return added;
}

struct ValenceConfig {
  double normalization_alpha = 15.0;
  double booster_increment = 0.293;
  double caps_boost = 0.733;
  double negation_factor = -0.74;
  double exclamation_increment = 0.292;
  int max_exclamations = 4;
  double question_increment = 0.18;  // per mark, for 2..3 marks
  double question_cap = 0.96;        // total, for more than 3 marks
  double but_pre_weight = 0.5;
  double but_post_weight = 1.5;
  double damping_distance2 = 0.95;
  double damping_distance3 = 0.9;
  double never_so_factor = 1.25;

  // Degree modifiers: +1 intensifies, -1 dampens (scaled by booster_increment).
  std::unordered_map<std::string, int> boosters;
  std::unordered_set<std::string> negators;
  // Phrases whose presence around a lexicon word replaces its valence.
  std::unordered_map<std::string, double> special_cases;

  static ValenceConfig defaults() {
    ValenceConfig c;
    for (const char* w :
         {"absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
          "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
          "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping",
          "flippin", "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully",
          "fuckin", "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely",
          "incredible", "incredibly", "intensely", "major", "majorly", "more", "most",
          "particularly", "purely", "quite", "really", "remarkably", "so", "substantially",
          "thoroughly", "total", "totally", "tremendous", "tremendously", "uber", "unbelievably",
          "unusually", "utter", "utterly", "very"})
      c.boosters[w] = 1;
    for (const char* w :
         {"almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of",
          "less", "little", "marginal", "marginally", "occasional", "occasionally", "partly",
          "scarce", "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof",
          "sort-of"})
      c.boosters[w] = -1;
    c.negators = {"aint",     "arent",    "cannot",   "cant",     "couldnt",  "darent",
                  "didnt",    "doesnt",   "ain't",    "aren't",   "can't",    "couldn't",
                  "daren't",  "didn't",   "doesn't",  "dont",     "hadnt",    "hasnt",
                  "havent",   "isnt",     "mightnt",  "mustnt",   "neither",  "don't",
                  "hadn't",   "hasn't",   "haven't",  "isn't",    "mightn't", "mustn't",
                  "neednt",   "needn't",  "never",    "none",     "nope",     "nor",
                  "not",      "nothing",  "nowhere",  "oughtnt",  "shant",    "shouldnt",
                  "uhuh",     "wasnt",    "werent",   "oughtn't", "shan't",   "shouldn't",
                  "uh-uh",    "wasn't",   "weren't",  "without",  "wont",     "wouldnt",
                  "won't",    "wouldn't", "rarely",   "seldom",   "despite"};
    c.special_cases = {{"the shit", 3},       {"the bomb", 3},     {"bad ass", 1.5},
                       {"badass", 1.5},       {"bus stop", 0.0},   {"yeah right", -2},
                       {"kiss of death", -1.5}, {"to die for", 3}, {"beating heart", 3.5}};
    return c;
  }

  void validate() const {
    const double all[] = {normalization_alpha, booster_increment, caps_boost,
                          negation_factor,     exclamation_increment, question_increment,
                          question_cap,        but_pre_weight,    but_post_weight,
                          damping_distance2,   damping_distance3, never_so_factor};
    for (double v : all)
      if (!std::isfinite(v)) throw std::invalid_argument("valence constants must be finite");
    if (!(normalization_alpha > 0))
      throw std::invalid_argument("normalization_alpha must be positive");
  }
};

struct ValenceScore {
  double pos = 0;
  double neg = 0;
  double neu = 1;
  double compound = 0;
  double adjusted_sum = 0;  // S, after punctuation emphasis
};

// S / sqrt(S^2 + alpha), clamped to [-1, 1] against rounding.
inline double normalize_compound(double sum, double alpha = 15.0) {
  if (std::isinf(sum * sum)) return sum < 0 ? -1.0 : 1.0;
  const double c = sum / std::sqrt(sum * sum + alpha);
  return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

// <= -0.05 negative, >= 0.05 positive, neutral in between.
inline Polarity classify(double compound) {
  if (!(compound >= -1.0 && compound <= 1.0))
    throw std::invalid_argument("compound score outside [-1, 1]");
  if (compound <= -0.05) return Polarity::kNegative;
  if (compound >= 0.05) return Polarity::kPositive;
  return Polarity::kNeutral;
}

namespace detail {

constexpr bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}

// Strips leading/trailing ASCII punctuation unless that leaves two or fewer
// characters (likely an emoticon such as ":)").
inline std::string_view strip_punctuation(std::string_view token) {
  std::string_view s = token;
  while (!s.empty() && is_ascii_punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_punct(s.back())) s.remove_suffix(1);
  return utf8::length(s) <= 2 ? token : s;
}

inline std::string translate_emoji(std::string_view text, const Lexicon& lex) {
  if (lex.emoji.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  bool prev_space = true;
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    const auto it = lex.emoji.find(d.cp);
    if (it != lex.emoji.end()) {
      if (!prev_space) out.push_back(' ');
      out += it->second;
      prev_space = false;
    } else {
      out.append(text.substr(i, d.len));
      prev_space = d.cp == ' ';
    }
    i += d.len;
  }
  return out;
}

class Scorer {
 public:
  Scorer(std::string_view text, const Lexicon& lex, const ValenceConfig& cfg)
      : lex_(lex), cfg_(cfg) {
    text_ = translate_emoji(text, lex);
    for (auto tok : utf8::split_whitespace(text_)) {
      tokens_.emplace_back(strip_punctuation(tok));
      lower_.push_back(utf8::lower(tokens_.back()));
    }
    std::size_t caps = 0;
    for (const auto& t : tokens_) caps += utf8::is_all_caps(t) ? 1 : 0;
    const std::size_t differential = tokens_.size() - caps;
    cap_differential_ = differential > 0 && differential < tokens_.size();
  }

  ValenceScore run() const {
    std::vector<double> sentiments;
    sentiments.reserve(tokens_.size());
    const std::size_t n = tokens_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (cfg_.boosters.count(lower_[i]) ||
          (i + 1 < n && lower_[i] == "kind" && lower_[i + 1] == "of")) {
        sentiments.push_back(0.0);
        continue;
      }
      sentiments.push_back(word_valence(i));
    }
    apply_but(sentiments);
    return summarize(sentiments);
  }

 private:
  bool in_lexicon(std::size_t i) const { return lex_.contains(lower_[i]); }

  bool negated(const std::string& w) const {
    return cfg_.negators.count(w) != 0 || w.find("n't") != std::string::npos;
  }

  double booster_scalar(std::size_t j, double valence) const {
    const auto it = cfg_.boosters.find(lower_[j]);
    if (it == cfg_.boosters.end()) return 0.0;
    double scalar = it->second * cfg_.booster_increment;
    if (valence < 0) scalar = -scalar;
    if (utf8::is_all_caps(tokens_[j]) && cap_differential_)
      scalar += valence > 0 ? cfg_.caps_boost : -cfg_.caps_boost;
    return scalar;
  }

  double word_valence(std::size_t i) const {
    const double* base = lex_.find(lower_[i]);
    if (!base) return 0.0;
    const std::size_t n = tokens_.size();
    const auto& lw = lower_;
    double valence = *base;

    // "no" directly before another lexicon word acts as a negator, not a word.
    if (lw[i] == "no" && i + 1 < n && in_lexicon(i + 1)) valence = 0.0;
    if ((i > 0 && lw[i - 1] == "no") || (i > 1 && lw[i - 2] == "no") ||
        (i > 2 && lw[i - 3] == "no" && (lw[i - 1] == "or" || lw[i - 1] == "nor")))
      valence = *base * cfg_.negation_factor;

    if (utf8::is_all_caps(tokens_[i]) && cap_differential_)
      valence += valence > 0 ? cfg_.caps_boost : -cfg_.caps_boost;

    for (std::size_t dist = 0; dist < 3; ++dist) {
      if (i <= dist || in_lexicon(i - dist - 1)) continue;
      double s = booster_scalar(i - dist - 1, valence);
      if (dist == 1 && s != 0) s *= cfg_.damping_distance2;
      if (dist == 2 && s != 0) s *= cfg_.damping_distance3;
      valence += s;
      valence = negation_check(valence, dist, i);
      if (dist == 2) valence = idiom_check(valence, i);
    }

    if (i > 1 && !in_lexicon(i - 1) && lw[i - 1] == "least") {
      if (lw[i - 2] != "at" && lw[i - 2] != "very") valence *= cfg_.negation_factor;
    } else if (i > 0 && !in_lexicon(i - 1) && lw[i - 1] == "least") {
      valence *= cfg_.negation_factor;
    }
    return valence;
  }

  double negation_check(double valence, std::size_t dist, std::size_t i) const {
    const auto& lw = lower_;
    const auto so_or_this = [](const std::string& w) { return w == "so" || w == "this"; };
    if (dist == 0) {
      if (negated(lw[i - 1])) valence *= cfg_.negation_factor;
    } else if (dist == 1) {
      if (lw[i - 2] == "never" && so_or_this(lw[i - 1]))
        valence *= cfg_.never_so_factor;
      else if (lw[i - 2] == "without" && lw[i - 1] == "doubt")
        ;
      else if (negated(lw[i - 2]))
        valence *= cfg_.negation_factor;
    } else {
      if ((lw[i - 3] == "never" && so_or_this(lw[i - 2])) || so_or_this(lw[i - 1]))
        valence *= cfg_.never_so_factor;
      else if (lw[i - 3] == "without" && (lw[i - 2] == "doubt" || lw[i - 1] == "doubt"))
        ;
      else if (negated(lw[i - 3]))
        valence *= cfg_.negation_factor;
    }
    return valence;
  }

  // Only reached with i >= 3.
  double idiom_check(double valence, std::size_t i) const {
    const auto& lw = lower_;
    const std::size_t n = lw.size();
    const std::string one_zero = lw[i - 1] + " " + lw[i];
    const std::string two_one_zero = lw[i - 2] + " " + lw[i - 1] + " " + lw[i];
    const std::string two_one = lw[i - 2] + " " + lw[i - 1];
    const std::string three_two_one = lw[i - 3] + " " + lw[i - 2] + " " + lw[i - 1];
    const std::string three_two = lw[i - 3] + " " + lw[i - 2];

    for (const auto* seq : {&one_zero, &two_one_zero, &two_one, &three_two_one, &three_two}) {
      if (const auto it = cfg_.special_cases.find(*seq); it != cfg_.special_cases.end()) {
        valence = it->second;
        break;
      }
    }
    if (n - 1 > i) {
      const auto it = cfg_.special_cases.find(lw[i] + " " + lw[i + 1]);
      if (it != cfg_.special_cases.end()) valence = it->second;
    }
    if (n - 1 > i + 1) {
      const auto it = cfg_.special_cases.find(lw[i] + " " + lw[i + 1] + " " + lw[i + 2]);
      if (it != cfg_.special_cases.end()) valence = it->second;
    }
    for (const auto* gram : {&three_two_one, &three_two, &two_one}) {
      if (const auto it = cfg_.boosters.find(*gram); it != cfg_.boosters.end())
        valence += it->second * cfg_.booster_increment;
    }
    return valence;
  }

  // Words before the first "but" are damped, words after it amplified.
  // Each value is reweighted at the first position holding an equal value,
  // which is how the reference lexicon scorer behaves when a damped value
  // collides with a later one; published scores depend on it.
  void apply_but(std::vector<double>& sentiments) const {
    std::size_t but = lower_.size();
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (lower_[i] == "but") {
        but = i;
        break;
      }
    }
    if (but == lower_.size()) return;
    for (std::size_t i = 0; i < sentiments.size(); ++i) {
      const double v = sentiments[i];
      std::size_t at = 0;
      while (sentiments[at] != v) ++at;
      if (at < but)
        sentiments[at] = v * cfg_.but_pre_weight;
      else if (at > but)
        sentiments[at] = v * cfg_.but_post_weight;
    }
  }

  double punctuation_emphasis() const {
    std::size_t excl = 0, quest = 0;
    for (char c : text_) {
      excl += c == '!';
      quest += c == '?';
    }
    const double ep = static_cast<double>(std::min<std::size_t>(excl, cfg_.max_exclamations)) *
                      cfg_.exclamation_increment;
    double qm = 0;
    if (quest > 1) qm = quest <= 3 ? static_cast<double>(quest) * cfg_.question_increment
                                   : cfg_.question_cap;
    return ep + qm;
  }

  ValenceScore summarize(const std::vector<double>& sentiments) const {
    ValenceScore out;
    if (sentiments.empty()) return out;
    double sum = 0;
    for (double s : sentiments) sum += s;
    const double punct = punctuation_emphasis();
    if (sum > 0)
      sum += punct;
    else if (sum < 0)
      sum -= punct;
    out.adjusted_sum = sum;
    out.compound = normalize_compound(sum, cfg_.normalization_alpha);

    // Each word carries one unit of neutral mass; sentiment words add their
    // valence on top of it.
    double pos_sum = 0, neg_sum = 0, neu_count = 0;
    for (double s : sentiments) {
      if (s > 0) pos_sum += s + 1;
      if (s < 0) neg_sum += s - 1;
      if (s == 0) neu_count += 1;
    }
    if (pos_sum > std::fabs(neg_sum))
      pos_sum += punct;
    else if (pos_sum < std::fabs(neg_sum))
      neg_sum -= punct;
    const double total = pos_sum + std::fabs(neg_sum) + neu_count;
    out.pos = std::fabs(pos_sum / total);
    out.neg = std::fabs(neg_sum / total);
    out.neu = std::fabs(neu_count / total);
    return out;
  }

  const Lexicon& lex_;
  const ValenceConfig& cfg_;
  std::string text_;
  std::vector<std::string> tokens_;
  std::vector<std::string> lower_;
  bool cap_differential_ = false;
};

}  // namespace detail

// Text with no tokens scores compound 0 and is entirely neutral.
inline ValenceScore score(std::string_view text, const Lexicon& lexicon,
                          const ValenceConfig& config) {
  return detail::Scorer(text, lexicon, config).run();
}

}  // namespace adoptrace
