#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace adoptrace {

enum class Polarity { kPositive = 0, kNegative = 1, kNeutral = 2 };

inline constexpr std::array<Polarity, 3> kPolarities = {Polarity::kPositive, Polarity::kNegative,
                                                        Polarity::kNeutral};

constexpr std::size_t index(Polarity p) { return static_cast<std::size_t>(p); }

constexpr std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::kPositive: return "positive";
    case Polarity::kNegative: return "negative";
    case Polarity::kNeutral: return "neutral";
  }
  return "neutral";
}

inline std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "positive") return Polarity::kPositive;
  if (s == "negative") return Polarity::kNegative;
  if (s == "neutral") return Polarity::kNeutral;
  return std::nullopt;
}

}  // namespace adoptrace
