#pragma once

// Synthetic graphs and file helpers shared by the unit and acceptance tests.

#include <filesystem>
#include <fstream>
#include <random>
#include <unordered_set>
#include <unistd.h>
#include <string>
#include <vector>

#include "hkge/graph.hpp"
#include "hkge/random.hpp"

namespace hkge::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hkge_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Adds entities named `<prefix><i>` of one type; returns their indices.
inline std::vector<EntityId> add_entities(KnowledgeGraph& kg, const std::string& type,
                                          const std::string& prefix, int n) {
  const TypeId t = kg.types.intern(type);
  std::vector<EntityId> out;
  for (int i = 0; i < n; ++i) out.push_back(kg.entities.add(prefix + std::to_string(i), t));
  return out;
}

inline RelationId add_relation(KnowledgeGraph& kg, const std::string& name, const std::string& head,
                               const std::string& tail, bool symmetric = false) {
  return kg.relations.add({name, kg.types.intern(head), kg.types.intern(tail), symmetric});
}

/// Three entity types (drug, protein, pathway), four relations, 48 entities
/// and `n_triples` distinct random type-conforming triples split 80/10/10.
inline KnowledgeGraph typed_kg(std::uint64_t seed, std::size_t n_triples = 240) {
  KnowledgeGraph kg;
  const auto drugs = add_entities(kg, "drug", "D", 24);
  const auto proteins = add_entities(kg, "protein", "P", 16);
  const auto pathways = add_entities(kg, "pathway", "W", 8);
  const RelationId interact = add_relation(kg, "interact", "drug", "drug", true);
  const RelationId target = add_relation(kg, "target", "drug", "protein");
  const RelationId enzyme = add_relation(kg, "enzyme", "drug", "protein");
  const RelationId pathway = add_relation(kg, "pathway", "protein", "pathway");

  auto rng = make_rng(seed, Stream::Split, 99);
  auto pick = [&](const std::vector<EntityId>& v) { return v[uniform_index(rng, v.size())]; };
  std::vector<Triple> triples;
  std::unordered_set<Triple, TripleHash> seen;
  while (triples.size() < n_triples) {
    Triple t;
    switch (uniform_index(rng, 4)) {
      case 0: t = {pick(drugs), interact, pick(drugs)}; break;
      case 1: t = {pick(drugs), target, pick(proteins)}; break;
      case 2: t = {pick(drugs), enzyme, pick(proteins)}; break;
      default: t = {pick(proteins), pathway, pick(pathways)}; break;
    }
    if (t.head == t.tail) continue;
    if (seen.insert(t).second) triples.push_back(t);
  }
  kg.splits = split(triples, {0.8, 0.1, 0.1}, seed);
  kg.finalize();
  return kg;
}

/// Two drug clusters; drugs interact (both directions) with every other drug
/// of their cluster and target every protein of their cluster.
inline KnowledgeGraph block_kg(std::uint64_t seed, int drugs_per_cluster = 10,
                               int proteins_per_cluster = 5) {
  KnowledgeGraph kg;
  std::vector<EntityId> drugs[2], proteins[2];
  for (int c = 0; c < 2; ++c) {
    drugs[c] = add_entities(kg, "drug", "C" + std::to_string(c) + "D", drugs_per_cluster);
  }
  for (int c = 0; c < 2; ++c) {
    proteins[c] = add_entities(kg, "protein", "C" + std::to_string(c) + "P", proteins_per_cluster);
  }
  const RelationId interact = add_relation(kg, "interact", "drug", "drug", true);
  const RelationId target = add_relation(kg, "target", "drug", "protein");
  std::vector<Triple> triples;
  for (int c = 0; c < 2; ++c) {
    for (auto a : drugs[c]) {
      for (auto b : drugs[c]) {
        if (a != b) triples.push_back({a, interact, b});
      }
      for (auto p : proteins[c]) triples.push_back({a, target, p});
    }
  }
  kg.splits = split(triples, {0.9, 0.05, 0.05}, seed);
  kg.finalize();
  return kg;
}

}  // namespace hkge::testing
