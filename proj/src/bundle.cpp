#include <iomanip>

#include "hkge/error.hpp"
#include "hkge/graph.hpp"
#include "hkge/io.hpp"

namespace hkge {

namespace {

void write_triples(const KnowledgeGraph& kg, const std::vector<Triple>& triples,
                   const std::filesystem::path& path) {
  auto out = io::open_out(path);
  for (const auto& t : triples) {
    out << kg.entities.external_id(t.head) << '\t' << kg.relations.at(t.relation).name << '\t'
        << kg.entities.external_id(t.tail) << '\n';
  }
}

std::vector<Triple> read_triples(const KnowledgeGraph& kg, const std::filesystem::path& path) {
  // Bundles are written by save_bundle; duplicates are impossible, but we keep
  // the full validation path.
  return load_triples(path, kg.entities, kg.relations, kg.types);
}

}  // namespace

void save_bundle(const KnowledgeGraph& kg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = io::open_out(dir / "schema.tsv");
    for (std::size_t r = 0; r < kg.relations.size(); ++r) {
      const auto& info = kg.relations.at(static_cast<RelationId>(r));
      out << info.name << '\t' << kg.types.name(info.head_type) << '\t'
          << kg.types.name(info.tail_type) << '\t' << (info.symmetric ? "sym" : "asym") << '\n';
    }
  }
  {
    auto out = io::open_out(dir / "entities.tsv");
    for (std::size_t e = 0; e < kg.entities.size(); ++e) {
      const auto id = static_cast<EntityId>(e);
      out << kg.entities.external_id(id) << '\t' << kg.types.name(kg.entities.type(id)) << '\n';
    }
  }
  {
    auto out = io::open_out(dir / "text_keys.tsv");
    for (const auto& [e, key] : kg.text_keys) out << kg.entities.external_id(e) << '\t' << key << '\n';
  }
  write_triples(kg, kg.splits.train, dir / "train.tsv");
  write_triples(kg, kg.splits.valid, dir / "valid.tsv");
  write_triples(kg, kg.splits.test, dir / "test.tsv");
}

KnowledgeGraph load_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a kg bundle: " + dir.string());
  KnowledgeGraph kg;
  kg.relations = load_schema(dir / "schema.tsv", kg.types);
  kg.entities = load_entity_types(dir / "entities.tsv", kg.types, false);
  {
    io::LineReader in(dir / "text_keys.tsv");
    std::string line;
    while (in.next(line)) {
      auto f = io::split_fields(line, '\t');
      if (f.size() != 2) in.fail("expected 2 tab-separated fields");
      kg.text_keys[kg.entities.at(f[0])] = std::string(f[1]);
    }
  }
  kg.splits.train = read_triples(kg, dir / "train.tsv");
  kg.splits.valid = read_triples(kg, dir / "valid.tsv");
  kg.splits.test = read_triples(kg, dir / "test.tsv");
  kg.finalize();
  return kg;
}

void write_stats(const KnowledgeGraph& kg, std::ostream& out) {
  std::vector<std::size_t> per_type(kg.types.size(), 0);
  for (std::size_t e = 0; e < kg.entities.size(); ++e) {
    ++per_type[static_cast<std::size_t>(kg.entities.type(static_cast<EntityId>(e)))];
  }
  out << "# entities\ntype\tcount\n";
  for (std::size_t t = 0; t < per_type.size(); ++t) {
    out << kg.types.name(static_cast<TypeId>(t)) << '\t' << per_type[t] << '\n';
  }
  out << "Total\t" << kg.entities.size() << "\n\n";

  const auto train = kg.relation_counts(SplitName::Train);
  const auto valid = kg.relation_counts(SplitName::Valid);
  const auto test = kg.relation_counts(SplitName::Test);
  out << "# edges\nrelation\tall\ttrain\tvalid\ttest\n";
  std::size_t all_total = 0;
  for (std::size_t r = 0; r < kg.relations.size(); ++r) {
    const std::size_t all = train[r] + valid[r] + test[r];
    all_total += all;
    out << kg.relations.at(static_cast<RelationId>(r)).name << '\t' << all << '\t' << train[r]
        << '\t' << valid[r] << '\t' << test[r] << '\n';
  }
  out << "Total\t" << all_total << '\t' << kg.splits.train.size() << '\t' << kg.splits.valid.size()
      << '\t' << kg.splits.test.size() << '\n';
}

}  // namespace hkge
