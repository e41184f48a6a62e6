#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hkge/types.hpp"

namespace hkge {

/// Interned entity type names (drug, protein, pathway, ...).
class TypeTable {
 public:
  TypeId intern(std::string_view name);
  std::optional<TypeId> find(std::string_view name) const;
  const std::string& name(TypeId id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> index_;
};

/// External string id <-> dense index <-> type.
class EntityRegistry {
 public:
  /// Registers `id` with `type`. Re-adding the same (id, type) is a no-op that
  /// returns the existing index; a conflicting type throws SchemaError.
  EntityId add(std::string_view id, TypeId type);
  std::optional<EntityId> find(std::string_view id) const;
  EntityId at(std::string_view id) const;

  TypeId type(EntityId e) const { return types_.at(static_cast<std::size_t>(e)); }
  const std::string& external_id(EntityId e) const { return ids_.at(static_cast<std::size_t>(e)); }
  std::size_t size() const noexcept { return ids_.size(); }

 private:
  std::vector<std::string> ids_;
  std::vector<TypeId> types_;
  std::unordered_map<std::string, EntityId> index_;
};

struct RelationInfo {
  std::string name;
  TypeId head_type = 0;
  TypeId tail_type = 0;
  bool symmetric = false;
};

class RelationSchema {
 public:
  RelationId add(RelationInfo info);
  std::optional<RelationId> find(std::string_view name) const;
  const RelationInfo& at(RelationId r) const { return relations_.at(static_cast<std::size_t>(r)); }
  std::size_t size() const noexcept { return relations_.size(); }

 private:
  std::vector<RelationInfo> relations_;
  std::unordered_map<std::string, RelationId> index_;
};

inline constexpr std::string_view kAtcHypernym = "ATChypernym";
inline constexpr std::string_view kAugmentPrefix = "has-";

/// Relations that are derivable from surface strings (ATC hierarchy) or that
/// link pseudo nodes; they are trained on but never ranked.
bool is_auxiliary_relation(std::string_view name);

struct Splits {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;

  std::size_t total() const noexcept { return train.size() + valid.size() + test.size(); }
};

enum class SplitName { Train, Valid, Test };
SplitName parse_split_name(std::string_view name);
std::string_view to_string(SplitName s);

/// Typed heterogeneous graph. Build it with the load/augment functions, then
/// call finalize() once; after that it is read-only and shareable.
class KnowledgeGraph {
 public:
  TypeTable types;
  EntityRegistry entities;
  RelationSchema relations;
  Splits splits;
  /// Pseudo node -> row id in the text/structure vector file.
  std::map<EntityId, std::string> text_keys;

  const std::vector<Triple>& split(SplitName s) const;
  std::vector<Triple>& split(SplitName s);

  /// Throws SchemaError when the triple's endpoint types disagree with the schema.
  void check_triple(const Triple& t) const;
  bool conforms(const Triple& t) const noexcept;

  void finalize();
  bool finalized() const noexcept { return finalized_; }

  /// Entities of a type, ascending by index. Requires finalize().
  std::span<const EntityId> pool(TypeId type) const;
  /// Candidate pool for the given side of relation r.
  std::span<const EntityId> pool(RelationId r, Side side) const;

  /// True if the triple appears in any split. Requires finalize().
  bool contains(const Triple& t) const;

  std::vector<std::size_t> relation_counts(SplitName s) const;

 private:
  bool finalized_ = false;
  std::vector<std::vector<EntityId>> pools_;
  std::unordered_set<Triple, TripleHash> all_;
};

// --- ingestion -------------------------------------------------------------

/// Reads `relation<TAB>head_type<TAB>tail_type<TAB>{sym|asym}`; interns types.
RelationSchema load_schema(const std::filesystem::path& path, TypeTable& types);

/// Reads `entity_id<TAB>type_name`. With `closed` set, type names must already
/// exist in `types`; otherwise unseen names are interned.
EntityRegistry load_entity_types(const std::filesystem::path& path, TypeTable& types,
                                 bool closed);

struct TripleLoadStats {
  std::size_t lines = 0;
  std::size_t duplicates = 0;
  std::vector<std::size_t> per_relation;
};

/// Reads `head_id<TAB>relation<TAB>tail_id`. Duplicate triples are dropped and
/// counted; order of first appearance is kept.
std::vector<Triple> load_triples(const std::filesystem::path& path, const EntityRegistry& registry,
                                 const RelationSchema& schema, const TypeTable& types,
                                 TripleLoadStats* stats = nullptr);

/// Uniform random partition into train/valid/test. Sizes are rounded so they
/// sum to the input size.
Splits split(std::span<const Triple> triples, const std::array<double, 3>& ratios,
             std::uint64_t seed);

/// Number of symmetric-relation triples whose reverse exists in a different
/// split than their own.
std::size_t symmetric_split_violations(const KnowledgeGraph& kg);

// --- ATC hierarchy ---------------------------------------------------------

struct AtcEdge {
  std::string child;
  std::string parent;
  friend auto operator<=>(const AtcEdge&, const AtcEdge&) = default;
};

/// Parent prefix of an ATC code (7->5->4->3->1); nullopt for level one.
/// Throws FormatError for lengths outside {1,3,4,5,7}.
std::optional<std::string> atc_parent(std::string_view code);

/// Child->parent edges over the full ancestry of every code, sorted and unique.
std::vector<AtcEdge> atc_hierarchy_edges(std::span<const std::string> codes);

/// Adds ATChypernym edges for every entity of type `atc_type` to the train
/// split, registering missing ancestors as atc entities and the relation
/// itself when absent. Returns the number of edges added.
std::size_t add_atc_hierarchy(KnowledgeGraph& kg, std::string_view atc_type = "atc");

// --- augmentation ----------------------------------------------------------

struct ItemRow {
  std::string entity;
  std::string field;
  std::string text_key;
};

struct AugmentOptions {
  std::vector<std::string> fields = {"name",         "description", "synonyms",
                                     "indication",   "pharmacodynamics",
                                     "mechanism-of-action", "metabolism",
                                     "gene-name",    "structure"};
  /// Skip (entity, field) pairs whose pseudo node already exists.
  bool detect_duplicates = true;
};

struct AugmentStats {
  std::size_t nodes_added = 0;
  std::size_t triples_added = 0;
};

std::vector<ItemRow> load_item_table(const std::filesystem::path& path);

/// One pseudo node per (entity, field) pair linked by `has-<field>` in train.
AugmentStats augment_with_pseudo_nodes(KnowledgeGraph& kg, std::span<const ItemRow> items,
                                       const AugmentOptions& options = {});

// --- bundle ----------------------------------------------------------------

/// Writes entities.tsv, schema.tsv, train/valid/test.tsv and text_keys.tsv.
void save_bundle(const KnowledgeGraph& kg, const std::filesystem::path& dir);
/// Reads a bundle back with identical dense indices; the result is finalized.
KnowledgeGraph load_bundle(const std::filesystem::path& dir);

/// Entity and edge count tables, one `section<TAB>name<TAB>...` row per line.
void write_stats(const KnowledgeGraph& kg, std::ostream& out);

}  // namespace hkge
