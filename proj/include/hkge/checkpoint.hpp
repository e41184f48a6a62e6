#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hkge/embedding.hpp"
#include "hkge/graph.hpp"

namespace hkge {

struct CheckpointManifest {
  ModelFamily family = ModelFamily::DistMult;
  int dim = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t epoch = 0;
  std::size_t step = 0;
  std::string config_hash;
};

struct Checkpoint {
  CheckpointManifest manifest;
  EmbeddingTable table;
  std::vector<std::string> entity_ids;
  std::vector<std::string> relation_names;
};

/// FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// params.vec + accumulators.vec + manifest.txt under `dir`.
void save_checkpoint(const std::filesystem::path& dir, const EmbeddingTable& table,
                     const KnowledgeGraph& kg, const CheckpointManifest& manifest);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// Throws ConfigError unless the checkpoint's entities and relations match
/// the graph's dense indices.
void check_compatible(const Checkpoint& ckpt, const KnowledgeGraph& kg);

}  // namespace hkge
