#include "hkge/sampling.hpp"

#include <algorithm>

#include "hkge/error.hpp"

namespace hkge {

namespace {

constexpr int kRejectionTries = 64;

EntityId draw_other(std::span<const EntityId> pool, EntityId original, Rng& rng) {
  // Pools are sorted; skip the original by drawing from n-1 slots.
  auto it = std::lower_bound(pool.begin(), pool.end(), original);
  const bool present = it != pool.end() && *it == original;
  const auto n = pool.size() - (present ? 1 : 0);
  auto k = static_cast<std::size_t>(uniform_index(rng, n));
  if (present && k >= static_cast<std::size_t>(it - pool.begin())) ++k;
  return pool[k];
}

}  // namespace

void corrupt(const Triple& positive, const CorruptionPolicy& policy, const KnowledgeGraph& kg,
             Rng& rng, std::vector<Triple>& out, std::uint64_t draw_base) {
  if (policy.negatives < 1) throw ConfigError("negatives per positive must be at least 1");
  for (int j = 0; j < policy.negatives; ++j) {
    Side side = Side::Tail;
    switch (policy.side) {
      case CorruptSide::Head: side = Side::Head; break;
      case CorruptSide::Tail: side = Side::Tail; break;
      case CorruptSide::BothAlternating:
        side = (draw_base + static_cast<std::uint64_t>(j)) % 2 == 0 ? Side::Head : Side::Tail;
        break;
    }
    const auto pool = kg.pool(positive.relation, side);
    const EntityId original = side == Side::Head ? positive.head : positive.tail;
    const auto& info = kg.relations.at(positive.relation);
    if (pool.size() < 2) {
      throw SamplingError("cannot corrupt " + info.name + " " +
                          (side == Side::Head ? "heads" : "tails") + ": type " +
                          kg.types.name(side == Side::Head ? info.head_type : info.tail_type) +
                          " has fewer than 2 entities");
    }

    auto with = [&](EntityId e) {
      Triple t = positive;
      (side == Side::Head ? t.head : t.tail) = e;
      return t;
    };

    Triple neg = with(draw_other(pool, original, rng));
    if (policy.exclude_known_positives && kg.contains(neg)) {
      bool found = false;
      for (int attempt = 1; attempt < kRejectionTries && !found; ++attempt) {
        neg = with(draw_other(pool, original, rng));
        found = !kg.contains(neg);
      }
      if (!found) {
        // Dense neighbourhood: enumerate what is left and draw from that.
        std::vector<EntityId> allowed;
        for (EntityId e : pool) {
          if (e != original && !kg.contains(with(e))) allowed.push_back(e);
        }
        if (allowed.empty()) {
          throw SamplingError("every candidate for (" + kg.entities.external_id(positive.head) +
                              ", " + info.name + ", " + kg.entities.external_id(positive.tail) +
                              ") is a known positive");
        }
        neg = with(allowed[static_cast<std::size_t>(uniform_index(rng, allowed.size()))]);
      }
    }
    out.push_back(neg);
  }
}

}  // namespace hkge
