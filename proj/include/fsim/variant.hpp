// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <string_view>

#include "fsim/errors.hpp"

namespace fsim {

/// Simulation variant: simple, degree-preserving, bisimulation, bijective.
enum class Variant { kS, kDp, kB, kBj };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::kS, Variant::kDp,
                                                     Variant::kB, Variant::kBj};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kS: return "s";
    case Variant::kDp: return "dp";
    case Variant::kB: return "b";
    case Variant::kBj: return "bj";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "s") return Variant::kS;
  if (s == "dp") return Variant::kDp;
  if (s == "b") return Variant::kB;
  if (s == "bj") return Variant::kBj;
  throw ConfigError("unknown variant '" + std::string(s) +
                    "' (expected s, dp, b or bj)");
}

/// Variants whose neighbor mapping must be injective.
inline constexpr bool is_injective(Variant v) {
  return v == Variant::kDp || v == Variant::kBj;
}

/// Variants closed under taking the converse relation.
inline constexpr bool is_converse_invariant(Variant v) {
  return v == Variant::kB || v == Variant::kBj;
}

}  // namespace fsim
