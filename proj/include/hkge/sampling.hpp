#pragma once

#include <cstdint>
#include <vector>

#include "hkge/graph.hpp"
#include "hkge/random.hpp"
#include "hkge/types.hpp"

namespace hkge {

enum class CorruptSide { Head, Tail, BothAlternating };

struct CorruptionPolicy {
  int negatives = 1;
  CorruptSide side = CorruptSide::BothAlternating;
  /// Reject corruptions that are known true in any split.
  bool exclude_known_positives = false;
};

/// Appends `policy.negatives` type-conforming corruptions of `positive` to
/// `out`. Replacements are drawn uniformly from the schema pool of the
/// corrupted side, never equal to the original entity. `draw_base` is the
/// global index of the first draw; under BothAlternating even-indexed draws
/// replace the head and odd-indexed draws the tail.
void corrupt(const Triple& positive, const CorruptionPolicy& policy, const KnowledgeGraph& kg,
             Rng& rng, std::vector<Triple>& out, std::uint64_t draw_base = 0);

inline std::vector<Triple> corrupt(const Triple& positive, const CorruptionPolicy& policy,
                                   const KnowledgeGraph& kg, Rng& rng) {
  std::vector<Triple> out;
  corrupt(positive, policy, kg, rng, out);
  return out;
}

}  // namespace hkge
