#include "hkge/embedding.hpp"

#include "hkge/random.hpp"

namespace hkge {

ModelFamily parse_family(std::string_view name) {
  if (name == "transe") return ModelFamily::TransE;
  if (name == "distmult") return ModelFamily::DistMult;
  if (name == "complex") return ModelFamily::ComplEx;
  if (name == "simple") return ModelFamily::SimplE;
  throw ConfigError("unknown model " + std::string(name) + " (expected transe|distmult|complex|simple)");
}

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::TransE: return "transe";
    case ModelFamily::DistMult: return "distmult";
    case ModelFamily::ComplEx: return "complex";
    case ModelFamily::SimplE: return "simple";
  }
  return "?";
}

void init_random(EmbeddingTable& table, std::uint64_t seed, double gamma, double epsilon) {
  const double bound = init_bound(gamma, epsilon, table.dim());
  auto& p = table.params();
  if (bound == 0.0) {
    p.setZero();
  } else {
    auto rng = make_rng(seed, Stream::Init);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = uniform_real(rng, -bound, bound);
    }
  }
  table.accumulators().setZero();
}

void init_from_vectors(EmbeddingTable& table, const VectorFile& vectors, const VectorMapping& mapping,
                       std::uint64_t fallback_seed, double gamma, double epsilon) {
  if (vectors.dim() != table.dim()) {
    throw ConfigError("vector file dimension " + std::to_string(vectors.dim()) +
                      " does not match embedding dimension " + std::to_string(table.dim()));
  }
  if (mapping.size() != static_cast<std::size_t>(table.num_entities())) {
    throw ConfigError("vector mapping must cover every entity");
  }
  // Resolve everything before touching the table.
  std::vector<std::pair<EntityId, Eigen::Index>> rows;
  for (std::size_t e = 0; e < mapping.size(); ++e) {
    if (!mapping[e]) continue;
    auto row = vectors.find(*mapping[e]);
    if (!row) throw ResolutionError("row id " + *mapping[e] + " not present in vector file");
    rows.emplace_back(static_cast<EntityId>(e), *row);
  }
  if (!vectors.values.allFinite()) throw DataError("vector file contains non-finite values");

  init_random(table, fallback_seed, gamma, epsilon);
  const int slots = entity_slots(table.family());
  for (const auto& [e, row] : rows) {
    for (int s = 0; s < slots; ++s) table.entity(e, s) = vectors.values.row(row);
  }
}

}  // namespace hkge
