#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace hkge {

using EntityId = std::int32_t;
using RelationId = std::int32_t;
using TypeId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(t.head);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(t.relation);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(t.tail);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Which end of a triple is replaced (corruption) or predicted (ranking).
enum class Side { Head, Tail };

}  // namespace hkge
