#include <algorithm>

#include "hkge/error.hpp"
#include "hkge/graph.hpp"
#include "hkge/io.hpp"

namespace hkge {

namespace {

std::string pseudo_id(const std::string& entity, const std::string& field) {
  return entity + "#" + field;
}

// `has-<field>` for the first owner type; later owner types get an
// `@<type>` suffix so every relation keeps a single head type.
RelationId augmentation_relation(KnowledgeGraph& kg, const std::string& field, TypeId owner,
                                 TypeId node_type) {
  const std::string base = std::string(kAugmentPrefix) + field;
  for (const std::string& name : {base, base + "@" + kg.types.name(owner)}) {
    if (auto r = kg.relations.find(name)) {
      const auto& info = kg.relations.at(*r);
      if (info.head_type == owner && info.tail_type == node_type) return *r;
      continue;
    }
    return kg.relations.add({name, owner, node_type, false});
  }
  throw SchemaError("relation " + base + " already bound to other types");
}

}  // namespace

std::vector<ItemRow> load_item_table(const std::filesystem::path& path) {
  std::vector<ItemRow> rows;
  io::LineReader in(path);
  std::string line;
  while (in.next(line)) {
    auto f = io::split_fields(line, '\t');
    if (f.size() != 3) in.fail("expected 3 tab-separated fields, got " + std::to_string(f.size()));
    rows.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2])});
  }
  return rows;
}

AugmentStats augment_with_pseudo_nodes(KnowledgeGraph& kg, std::span<const ItemRow> items,
                                       const AugmentOptions& options) {
  for (const auto& item : items) {
    if (std::find(options.fields.begin(), options.fields.end(), item.field) == options.fields.end()) {
      throw SchemaError("field '" + item.field + "' is not a declared item field");
    }
    if (!kg.entities.find(item.entity)) throw ResolutionError("unknown entity " + item.entity);
  }

  AugmentStats stats;
  for (const auto& item : items) {
    const EntityId owner = kg.entities.at(item.entity);
    const TypeId owner_type = kg.entities.type(owner);
    const TypeId node_type = kg.types.intern(item.field == "structure" ? "structure" : "text");

    std::string id = pseudo_id(item.entity, item.field);
    if (kg.entities.find(id)) {
      if (options.detect_duplicates) continue;
      int k = 2;
      while (kg.entities.find(id + "#" + std::to_string(k))) ++k;
      id += "#" + std::to_string(k);
    }
    const EntityId node = kg.entities.add(id, node_type);
    kg.text_keys[node] = item.text_key;
    const RelationId rel = augmentation_relation(kg, item.field, owner_type, node_type);
    kg.splits.train.push_back({owner, rel, node});
    ++stats.nodes_added;
    ++stats.triples_added;
  }
  return stats;
}

}  // namespace hkge
