#include "hkge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "hkge/error.hpp"
#include "hkge/io.hpp"
#include "hkge/random.hpp"

namespace hkge {

TypeId TypeTable::intern(std::string_view name) {
  if (name.empty()) throw SchemaError("empty entity type name");
  if (auto id = find(name)) return *id;
  const auto id = static_cast<TypeId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(std::string(name), id);
  return id;
}

std::optional<TypeId> TypeTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EntityId EntityRegistry::add(std::string_view id, TypeId type) {
  if (id.empty()) throw SchemaError("empty entity id");
  if (auto existing = find(id)) {
    if (types_[static_cast<std::size_t>(*existing)] != type) {
      throw SchemaError("entity " + std::string(id) + " registered with conflicting types");
    }
    return *existing;
  }
  const auto e = static_cast<EntityId>(ids_.size());
  ids_.emplace_back(id);
  types_.push_back(type);
  index_.emplace(std::string(id), e);
  return e;
}

std::optional<EntityId> EntityRegistry::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EntityId EntityRegistry::at(std::string_view id) const {
  if (auto e = find(id)) return *e;
  throw ResolutionError("unknown entity " + std::string(id));
}

RelationId RelationSchema::add(RelationInfo info) {
  if (info.name.empty()) throw SchemaError("empty relation name");
  if (find(info.name)) throw SchemaError("duplicate relation " + info.name);
  const auto r = static_cast<RelationId>(relations_.size());
  index_.emplace(info.name, r);
  relations_.push_back(std::move(info));
  return r;
}

std::optional<RelationId> RelationSchema::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool is_auxiliary_relation(std::string_view name) {
  return name == kAtcHypernym || name.starts_with(kAugmentPrefix);
}

SplitName parse_split_name(std::string_view name) {
  if (name == "train") return SplitName::Train;
  if (name == "valid") return SplitName::Valid;
  if (name == "test") return SplitName::Test;
  throw ConfigError("unknown split " + std::string(name) + " (expected train|valid|test)");
}

std::string_view to_string(SplitName s) {
  switch (s) {
    case SplitName::Train: return "train";
    case SplitName::Valid: return "valid";
    case SplitName::Test: return "test";
  }
  return "?";
}

const std::vector<Triple>& KnowledgeGraph::split(SplitName s) const {
  switch (s) {
    case SplitName::Train: return splits.train;
    case SplitName::Valid: return splits.valid;
    case SplitName::Test: return splits.test;
  }
  return splits.test;
}

std::vector<Triple>& KnowledgeGraph::split(SplitName s) {
  return const_cast<std::vector<Triple>&>(std::as_const(*this).split(s));
}

bool KnowledgeGraph::conforms(const Triple& t) const noexcept {
  if (t.relation < 0 || static_cast<std::size_t>(t.relation) >= relations.size()) return false;
  const auto n = static_cast<EntityId>(entities.size());
  if (t.head < 0 || t.head >= n || t.tail < 0 || t.tail >= n) return false;
  const auto& info = relations.at(t.relation);
  return entities.type(t.head) == info.head_type && entities.type(t.tail) == info.tail_type;
}

void KnowledgeGraph::check_triple(const Triple& t) const {
  if (conforms(t)) return;
  if (t.relation < 0 || static_cast<std::size_t>(t.relation) >= relations.size()) {
    throw ResolutionError("relation index out of range");
  }
  const auto n = static_cast<EntityId>(entities.size());
  if (t.head < 0 || t.head >= n || t.tail < 0 || t.tail >= n) {
    throw ResolutionError("entity index out of range");
  }
  const auto& info = relations.at(t.relation);
  throw SchemaError("(" + entities.external_id(t.head) + ", " + info.name + ", " +
                    entities.external_id(t.tail) + ") expects " + types.name(info.head_type) +
                    " -> " + types.name(info.tail_type) + ", got " +
                    types.name(entities.type(t.head)) + " -> " + types.name(entities.type(t.tail)));
}

void KnowledgeGraph::finalize() {
  pools_.assign(types.size(), {});
  for (std::size_t e = 0; e < entities.size(); ++e) {
    pools_[static_cast<std::size_t>(entities.type(static_cast<EntityId>(e)))].push_back(
        static_cast<EntityId>(e));
  }
  all_.clear();
  for (auto s : {SplitName::Train, SplitName::Valid, SplitName::Test}) {
    for (const auto& t : split(s)) {
      check_triple(t);
      all_.insert(t);
    }
  }
  finalized_ = true;
  if (auto n = symmetric_split_violations(*this); n > 0) {
    spdlog::warn("{} symmetric triples have their reverse in a different split", n);
  }
}

std::span<const EntityId> KnowledgeGraph::pool(TypeId type) const {
  if (!finalized_) throw ConfigError("knowledge graph is not finalized");
  return pools_.at(static_cast<std::size_t>(type));
}

std::span<const EntityId> KnowledgeGraph::pool(RelationId r, Side side) const {
  const auto& info = relations.at(r);
  return pool(side == Side::Head ? info.head_type : info.tail_type);
}

bool KnowledgeGraph::contains(const Triple& t) const {
  if (!finalized_) throw ConfigError("knowledge graph is not finalized");
  return all_.count(t) != 0;
}

std::vector<std::size_t> KnowledgeGraph::relation_counts(SplitName s) const {
  std::vector<std::size_t> counts(relations.size(), 0);
  for (const auto& t : split(s)) ++counts[static_cast<std::size_t>(t.relation)];
  return counts;
}

RelationSchema load_schema(const std::filesystem::path& path, TypeTable& types) {
  RelationSchema schema;
  io::LineReader in(path);
  std::string line;
  while (in.next(line)) {
    auto f = io::split_fields(line, '\t');
    if (f.size() != 4) in.fail("expected 4 tab-separated fields, got " + std::to_string(f.size()));
    bool symmetric = false;
    if (f[3] == "sym") {
      symmetric = true;
    } else if (f[3] != "asym") {
      in.fail("symmetry flag must be sym or asym");
    }
    try {
      schema.add({std::string(f[0]), types.intern(f[1]), types.intern(f[2]), symmetric});
    } catch (const SchemaError& e) {
      in.fail(e.what());
    }
  }
  return schema;
}

EntityRegistry load_entity_types(const std::filesystem::path& path, TypeTable& types, bool closed) {
  EntityRegistry registry;
  io::LineReader in(path);
  std::string line;
  while (in.next(line)) {
    auto f = io::split_fields(line, '\t');
    if (f.size() != 2) in.fail("expected 2 tab-separated fields, got " + std::to_string(f.size()));
    TypeId type = 0;
    if (closed) {
      auto found = types.find(f[1]);
      if (!found) {
        throw SchemaError(in.where() + ":" + std::to_string(in.line_no()) + ": unknown type " +
                          std::string(f[1]));
      }
      type = *found;
    } else {
      type = types.intern(f[1]);
    }
    try {
      registry.add(f[0], type);
    } catch (const SchemaError& e) {
      throw SchemaError(in.where() + ":" + std::to_string(in.line_no()) + ": " + e.what());
    }
  }
  return registry;
}

std::vector<Triple> load_triples(const std::filesystem::path& path, const EntityRegistry& registry,
                                 const RelationSchema& schema, const TypeTable& types,
                                 TripleLoadStats* stats) {
  std::vector<Triple> out;
  std::unordered_set<Triple, TripleHash> seen;
  TripleLoadStats local;
  local.per_relation.assign(schema.size(), 0);
  io::LineReader in(path);
  std::string line;
  auto context = [&](const std::string& what) {
    return in.where() + ":" + std::to_string(in.line_no()) + ": " + what;
  };
  while (in.next(line)) {
    ++local.lines;
    auto f = io::split_fields(line, '\t');
    if (f.size() != 3) in.fail("expected 3 tab-separated fields, got " + std::to_string(f.size()));
    auto h = registry.find(f[0]);
    auto r = schema.find(f[1]);
    auto t = registry.find(f[2]);
    if (!h) throw ResolutionError(context("unknown entity " + std::string(f[0])));
    if (!r) throw ResolutionError(context("unknown relation " + std::string(f[1])));
    if (!t) throw ResolutionError(context("unknown entity " + std::string(f[2])));
    const auto& info = schema.at(*r);
    if (registry.type(*h) != info.head_type || registry.type(*t) != info.tail_type) {
      throw SchemaError(context(info.name + " expects " + types.name(info.head_type) + " -> " +
                                types.name(info.tail_type) + ", got " +
                                types.name(registry.type(*h)) + " -> " +
                                types.name(registry.type(*t))));
    }
    Triple tr{*h, *r, *t};
    if (!seen.insert(tr).second) {
      ++local.duplicates;
      continue;
    }
    ++local.per_relation[static_cast<std::size_t>(*r)];
    out.push_back(tr);
  }
  if (local.duplicates > 0) {
    spdlog::warn("{}: dropped {} duplicate triples", path.string(), local.duplicates);
  }
  if (stats) *stats = std::move(local);
  return out;
}

Splits split(std::span<const Triple> triples, const std::array<double, 3>& ratios,
             std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
  }
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");

  const std::size_t n = triples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, Stream::Split);
  shuffle(order.begin(), order.end(), rng);

  const auto n_train = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(ratios[0] * static_cast<double>(n))));
  const auto n_valid = std::min<std::size_t>(n - n_train, static_cast<std::size_t>(std::llround(ratios[1] * static_cast<double>(n))));

  Splits out;
  out.train.reserve(n_train);
  out.valid.reserve(n_valid);
  out.test.reserve(n - n_train - n_valid);
  for (std::size_t i = 0; i < n; ++i) {
    const Triple& t = triples[order[i]];
    if (i < n_train) {
      out.train.push_back(t);
    } else if (i < n_train + n_valid) {
      out.valid.push_back(t);
    } else {
      out.test.push_back(t);
    }
  }
  return out;
}

std::size_t symmetric_split_violations(const KnowledgeGraph& kg) {
  std::unordered_map<Triple, int, TripleHash> where;
  const std::array<SplitName, 3> names{SplitName::Train, SplitName::Valid, SplitName::Test};
  for (int s = 0; s < 3; ++s) {
    for (const auto& t : kg.split(names[static_cast<std::size_t>(s)])) {
      if (kg.relations.at(t.relation).symmetric) where.emplace(t, s);
    }
  }
  std::size_t violations = 0;
  for (const auto& [t, s] : where) {
    auto it = where.find(Triple{t.tail, t.relation, t.head});
    if (it != where.end() && it->second != s) ++violations;
  }
  return violations;
}

}  // namespace hkge
