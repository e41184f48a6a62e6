#include <algorithm>
#include <set>

#include "hkge/error.hpp"
#include "hkge/graph.hpp"

namespace hkge {

std::optional<std::string> atc_parent(std::string_view code) {
  switch (code.size()) {
    case 1: return std::nullopt;
    case 3: return std::string(code.substr(0, 1));
    case 4: return std::string(code.substr(0, 3));
    case 5: return std::string(code.substr(0, 4));
    case 7: return std::string(code.substr(0, 5));
    default:
      throw FormatError("ATC code '" + std::string(code) + "' has invalid length " +
                        std::to_string(code.size()));
  }
}

std::vector<AtcEdge> atc_hierarchy_edges(std::span<const std::string> codes) {
  std::set<AtcEdge> edges;
  for (const auto& code : codes) {
    std::string child = code;
    while (auto parent = atc_parent(child)) {
      if (!edges.insert({child, *parent}).second) break;  // ancestry already walked
      child = std::move(*parent);
    }
  }
  return {edges.begin(), edges.end()};
}

std::size_t add_atc_hierarchy(KnowledgeGraph& kg, std::string_view atc_type) {
  const auto type = kg.types.find(atc_type);
  if (!type) return 0;

  std::vector<std::string> codes;
  for (std::size_t e = 0; e < kg.entities.size(); ++e) {
    if (kg.entities.type(static_cast<EntityId>(e)) == *type) {
      codes.push_back(kg.entities.external_id(static_cast<EntityId>(e)));
    }
  }
  const auto edges = atc_hierarchy_edges(codes);
  if (edges.empty()) return 0;

  RelationId rel;
  if (auto found = kg.relations.find(kAtcHypernym)) {
    rel = *found;
    const auto& info = kg.relations.at(rel);
    if (info.head_type != *type || info.tail_type != *type) {
      throw SchemaError(std::string(kAtcHypernym) + " must link " + std::string(atc_type) +
                        " to " + std::string(atc_type));
    }
  } else {
    rel = kg.relations.add({std::string(kAtcHypernym), *type, *type, false});
  }

  std::unordered_set<Triple, TripleHash> existing(kg.splits.train.begin(), kg.splits.train.end());
  std::size_t added = 0;
  for (const auto& edge : edges) {
    const Triple t{kg.entities.add(edge.child, *type), rel, kg.entities.add(edge.parent, *type)};
    if (existing.insert(t).second) {
      kg.splits.train.push_back(t);
      ++added;
    }
  }
  return added;
}

}  // namespace hkge
