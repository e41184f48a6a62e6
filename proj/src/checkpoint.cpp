#include "hkge/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <map>

#include "hkge/error.hpp"
#include "hkge/io.hpp"

namespace hkge {

namespace {

// Row labels: `E<slot>:<entity id>` and `R<slot>:<relation name>`.
std::vector<std::string> row_labels(const EmbeddingTable& table, const std::vector<std::string>& entity_ids,
                                    const std::vector<std::string>& relation_names) {
  std::vector<std::string> labels(static_cast<std::size_t>(table.rows()));
  const int es = entity_slots(table.family());
  const int rs = relation_slots(table.family());
  for (int s = 0; s < es; ++s) {
    for (std::size_t e = 0; e < entity_ids.size(); ++e) {
      labels[static_cast<std::size_t>(table.entity_row(static_cast<EntityId>(e), s))] =
          "E" + std::to_string(s) + ":" + entity_ids[e];
    }
  }
  for (int s = 0; s < rs; ++s) {
    for (std::size_t r = 0; r < relation_names.size(); ++r) {
      labels[static_cast<std::size_t>(table.relation_row(static_cast<RelationId>(r), s))] =
          "R" + std::to_string(s) + ":" + relation_names[r];
    }
  }
  return labels;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("manifest: bad value for " + key + ": " + value);
  }
  return out;
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_checkpoint(const std::filesystem::path& dir, const EmbeddingTable& table,
                     const KnowledgeGraph& kg, const CheckpointManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> entity_ids, relation_names;
  for (std::size_t e = 0; e < kg.entities.size(); ++e) {
    entity_ids.push_back(kg.entities.external_id(static_cast<EntityId>(e)));
  }
  for (std::size_t r = 0; r < kg.relations.size(); ++r) {
    relation_names.push_back(kg.relations.at(static_cast<RelationId>(r)).name);
  }
  const auto labels = row_labels(table, entity_ids, relation_names);

  VectorFile file;
  file.ids = labels;
  file.values = table.params();
  write_vector_file(file, dir / "params.vec");
  file.values = table.accumulators();
  write_vector_file(file, dir / "accumulators.vec");

  auto out = io::open_out(dir / "manifest.txt");
  out << "model\t" << to_string(table.family()) << '\n'
      << "dim\t" << table.dim() << '\n'
      << "entities\t" << table.num_entities() << '\n'
      << "relations\t" << table.num_relations() << '\n'
      << "epoch\t" << manifest.epoch << '\n'
      << "step\t" << manifest.step << '\n'
      << "config_hash\t" << manifest.config_hash << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::map<std::string, std::string> kv;
  {
    io::LineReader in(dir / "manifest.txt");
    std::string line;
    while (in.next(line)) {
      auto f = io::split_fields(line, '\t');
      if (f.size() != 2) in.fail("expected key<TAB>value");
      kv[std::string(f[0])] = std::string(f[1]);
    }
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("manifest: missing " + key);
    return it->second;
  };

  Checkpoint ck;
  ck.manifest.family = parse_family(get("model"));
  ck.manifest.dim = static_cast<int>(parse_count("dim", get("dim")));
  ck.manifest.entities = parse_count("entities", get("entities"));
  ck.manifest.relations = parse_count("relations", get("relations"));
  ck.manifest.epoch = parse_count("epoch", get("epoch"));
  ck.manifest.step = parse_count("step", get("step"));
  ck.manifest.config_hash = get("config_hash");

  ck.table = EmbeddingTable(ck.manifest.family, ck.manifest.entities, ck.manifest.relations,
                            ck.manifest.dim);
  const VectorFile params = read_vector_file(dir / "params.vec");
  const VectorFile accum = read_vector_file(dir / "accumulators.vec");
  if (params.values.rows() != ck.table.rows() || params.dim() != ck.manifest.dim ||
      accum.values.rows() != ck.table.rows() || accum.dim() != ck.manifest.dim ||
      params.ids != accum.ids) {
    throw ParseError("checkpoint " + dir.string() + ": vector files disagree with manifest");
  }
  ck.table.params() = params.values;
  ck.table.accumulators() = accum.values;

  for (std::size_t e = 0; e < ck.manifest.entities; ++e) {
    const auto& label = params.ids[static_cast<std::size_t>(ck.table.entity_row(static_cast<EntityId>(e)))];
    if (!label.starts_with("E0:")) throw ParseError("checkpoint: unexpected row label " + label);
    ck.entity_ids.push_back(label.substr(3));
  }
  for (std::size_t r = 0; r < ck.manifest.relations; ++r) {
    const auto& label = params.ids[static_cast<std::size_t>(ck.table.relation_row(static_cast<RelationId>(r)))];
    if (!label.starts_with("R0:")) throw ParseError("checkpoint: unexpected row label " + label);
    ck.relation_names.push_back(label.substr(3));
  }
  return ck;
}

void check_compatible(const Checkpoint& ckpt, const KnowledgeGraph& kg) {
  if (ckpt.entity_ids.size() != kg.entities.size() || ckpt.relation_names.size() != kg.relations.size()) {
    throw ConfigError("checkpoint does not match the knowledge graph (entity/relation counts differ)");
  }
  for (std::size_t e = 0; e < kg.entities.size(); ++e) {
    if (ckpt.entity_ids[e] != kg.entities.external_id(static_cast<EntityId>(e))) {
      throw ConfigError("checkpoint entity order differs from the knowledge graph at " + ckpt.entity_ids[e]);
    }
  }
  for (std::size_t r = 0; r < kg.relations.size(); ++r) {
    if (ckpt.relation_names[r] != kg.relations.at(static_cast<RelationId>(r)).name) {
      throw ConfigError("checkpoint relation order differs from the knowledge graph");
    }
  }
}

}  // namespace hkge
