// hkge: build, train, evaluate and export heterogeneous KG embeddings.
//
// Exit codes: 0 success, 2 user/config error, 3 numeric failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hkge/checkpoint.hpp"
#include "hkge/embedding.hpp"
#include "hkge/error.hpp"
#include "hkge/evaluator.hpp"
#include "hkge/graph.hpp"
#include "hkge/io.hpp"
#include "hkge/log.hpp"
#include "hkge/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 2;
constexpr int kExitNumeric = 3;

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> out{};
  std::stringstream ss(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i == 3) throw hkge::ConfigError("--ratios takes exactly three values");
    try {
      std::size_t used = 0;
      out[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw hkge::ConfigError("--ratios: bad number '" + part + "'");
    }
    ++i;
  }
  if (i != 3) throw hkge::ConfigError("--ratios takes exactly three values");
  return out;
}

struct BuildArgs {
  std::string entities, triples, schema, items, ratios = "0.9,0.05,0.05", out;
  std::uint64_t seed = 0;
};

int cmd_build(const BuildArgs& a) {
  hkge::KnowledgeGraph kg;
  kg.relations = hkge::load_schema(a.schema, kg.types);
  kg.entities = hkge::load_entity_types(a.entities, kg.types, /*closed=*/true);
  hkge::TripleLoadStats load_stats;
  const auto triples = hkge::load_triples(a.triples, kg.entities, kg.relations, kg.types, &load_stats);
  spdlog::info("loaded {} entities, {} triples ({} duplicates dropped)", kg.entities.size(),
               triples.size(), load_stats.duplicates);

  kg.splits = hkge::split(triples, parse_ratios(a.ratios), a.seed);
  if (kg.relations.find(hkge::kAtcHypernym)) {
    const auto n = hkge::add_atc_hierarchy(kg);
    spdlog::info("added {} ATC hierarchy edges to train", n);
  }
  if (!a.items.empty()) {
    const auto items = hkge::load_item_table(a.items);
    const auto st = hkge::augment_with_pseudo_nodes(kg, items);
    spdlog::info("augmentation: {} pseudo nodes, {} train triples", st.nodes_added, st.triples_added);
  }
  kg.finalize();

  hkge::save_bundle(kg, a.out);
  {
    auto out = hkge::io::open_out(fs::path(a.out) / "stats.tsv");
    hkge::write_stats(kg, out);
  }
  hkge::write_stats(kg, std::cout);
  std::cout << "bundle written to " << a.out << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string kg, model = "distmult", loss = "default", method = "none", vectors, out, resume;
  hkge::TrainingConfig config;
  std::size_t checkpoint_every = 0;
};

int cmd_train(TrainArgs a) {
  auto& cfg = a.config;
  cfg.family = hkge::parse_family(a.model);
  cfg.loss = hkge::parse_loss(a.loss);
  cfg.method = hkge::parse_method(a.method);
  cfg.validate();

  const auto kg = hkge::load_bundle(a.kg);
  const bool needs_vectors = cfg.method == hkge::IntegrationMethod::Initialization ||
                             cfg.method == hkge::IntegrationMethod::Alignment;
  if (needs_vectors && a.vectors.empty()) {
    throw hkge::ConfigError("--method " + a.method + " requires --vectors");
  }
  if (cfg.method == hkge::IntegrationMethod::Augmentation && kg.text_keys.empty()) {
    throw hkge::ConfigError("--method augment needs a bundle built with --items");
  }
  std::optional<hkge::VectorFile> vectors;
  if (!a.vectors.empty()) {
    if (!fs::exists(a.vectors)) throw hkge::ConfigError("vector file not found: " + a.vectors);
    vectors = hkge::read_vector_file(a.vectors);
  }

  hkge::AlignmentAnchors anchors;
  if (cfg.method == hkge::IntegrationMethod::Alignment) {
    anchors = hkge::alignment_anchors(kg, *vectors, cfg.lambda_align, cfg.dim);
  }

  const std::string config_hash = hkge::fnv1a_hex(cfg.canonical());
  std::size_t start_epoch = 0, start_step = 0;
  hkge::EmbeddingTable table;
  if (!a.resume.empty()) {
    auto ck = hkge::load_checkpoint(a.resume);
    hkge::check_compatible(ck, kg);
    if (ck.manifest.family != cfg.family || ck.manifest.dim != cfg.dim) {
      throw hkge::ConfigError("--resume checkpoint was trained with a different model or dim");
    }
    if (ck.manifest.config_hash != config_hash) {
      spdlog::warn("resuming with a configuration that differs from the checkpoint's");
    }
    table = std::move(ck.table);
    start_epoch = ck.manifest.epoch;
    start_step = ck.manifest.step;
  } else {
    table = hkge::initial_table(kg, cfg, vectors ? &*vectors : nullptr);
  }

  hkge::Trainer trainer(kg, cfg, std::move(table), std::move(anchors));
  trainer.set_position(start_epoch, start_step);
  fs::create_directories(a.out);
  const fs::path out(a.out);

  auto checkpoint = [&](std::size_t epoch) {
    const auto dir = out / ("checkpoint-" + std::to_string(epoch));
    hkge::save_checkpoint(dir, trainer.table(), kg,
                          {cfg.family, cfg.dim, kg.entities.size(), kg.relations.size(), epoch,
                           trainer.steps_done(), config_hash});
    std::ofstream(out / "latest") << dir.filename().string() << '\n';
    spdlog::info("checkpoint {}", dir.string());
  };

  spdlog::info("training {} d={} loss={} method={} on {} triples, epochs {}..{}",
               hkge::to_string(cfg.family), cfg.dim, hkge::to_string(trainer.loss_kind()),
               a.method, kg.splits.train.size(), start_epoch + 1, cfg.epochs);
  try {
    trainer.train([&](std::size_t epoch) {
      const auto& log = trainer.log();
      const auto means = hkge::epoch_mean_losses(log);
      if (!means.empty()) spdlog::info("epoch {} mean loss {:.6g}", epoch, means.back());
      if (a.checkpoint_every > 0 && epoch % a.checkpoint_every == 0 && epoch != cfg.epochs) {
        checkpoint(epoch);
      }
    });
  } catch (const hkge::NumericError&) {
    hkge::write_loss_log(trainer.log(), out / "loss.csv");
    throw;
  }
  hkge::write_loss_log(trainer.log(), out / "loss.csv");
  checkpoint(trainer.epochs_done());
  std::cout << "final checkpoint: " << (out / ("checkpoint-" + std::to_string(trainer.epochs_done()))).string()
            << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string kg, checkpoint, split = "test", out, ties = "pessimistic";
  unsigned threads = 0;
};

int cmd_eval(const EvalArgs& a) {
  const auto kg = hkge::load_bundle(a.kg);
  const auto ck = hkge::load_checkpoint(a.checkpoint);
  hkge::check_compatible(ck, kg);
  const hkge::ScoringModel model(ck.table);
  hkge::EvalOptions options;
  options.threads = a.threads;
  options.rank.ties = hkge::parse_tie_mode(a.ties);
  const auto split = hkge::parse_split_name(a.split);
  const auto report = hkge::evaluate(model, kg, split, options);

  const fs::path out_dir = a.out.empty() ? fs::path(a.checkpoint) : fs::path(a.out);
  fs::create_directories(out_dir);
  const auto path = out_dir / ("report-" + std::string(hkge::to_string(split)) + ".tsv");
  {
    auto out = hkge::io::open_out(path);
    hkge::write_report_tsv(report, out);
  }
  hkge::print_report(report, std::cout);
  std::cout << "report: " << path.string() << '\n';
  return kExitOk;
}

struct ExportArgs {
  std::string checkpoint, ids, id_file, type, kg, out;
};

int cmd_export(const ExportArgs& a) {
  const auto ck = hkge::load_checkpoint(a.checkpoint);
  std::unordered_map<std::string, hkge::EntityId> index;
  for (std::size_t e = 0; e < ck.entity_ids.size(); ++e) index.emplace(ck.entity_ids[e], static_cast<hkge::EntityId>(e));

  std::vector<hkge::EntityId> selected;
  auto select = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw hkge::ResolutionError("unknown entity " + id);
    selected.push_back(it->second);
  };
  if (!a.ids.empty()) {
    std::stringstream ss(a.ids);
    std::string id;
    while (std::getline(ss, id, ',')) select(id);
  }
  if (!a.id_file.empty()) {
    hkge::io::LineReader in(a.id_file);
    std::string line;
    while (in.next(line)) select(line);
  }
  if (!a.type.empty()) {
    if (a.kg.empty()) throw hkge::ConfigError("--type needs --kg");
    const auto kg = hkge::load_bundle(a.kg);
    hkge::check_compatible(ck, kg);
    const auto type = kg.types.find(a.type);
    if (!type) throw hkge::ConfigError("unknown entity type " + a.type);
    for (auto e : kg.pool(*type)) selected.push_back(e);
  }
  if (a.ids.empty() && a.id_file.empty() && a.type.empty()) {
    for (std::size_t e = 0; e < ck.entity_ids.size(); ++e) selected.push_back(static_cast<hkge::EntityId>(e));
  }

  const auto& table = ck.table;
  const int slots = hkge::entity_slots(table.family());
  const int d = table.dim();
  hkge::VectorFile file;
  file.values.resize(static_cast<Eigen::Index>(selected.size()), slots * d);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    file.ids.push_back(ck.entity_ids[static_cast<std::size_t>(selected[i])]);
    for (int s = 0; s < slots; ++s) {
      file.values.row(static_cast<Eigen::Index>(i)).segment(s * d, d) = table.entity(selected[i], s);
    }
  }
  std::vector<std::string> comment;
  if (table.family() == hkge::ModelFamily::ComplEx) {
    comment.push_back("columns: real[0," + std::to_string(d) + ") imaginary[" + std::to_string(d) + "," +
                      std::to_string(2 * d) + ")");
  } else if (table.family() == hkge::ModelFamily::SimplE) {
    comment.push_back("columns: head[0," + std::to_string(d) + ") tail[" + std::to_string(d) + "," +
                      std::to_string(2 * d) + ")");
  }
  hkge::write_vector_file(file, a.out, comment);
  std::cout << "exported " << file.size() << " rows to " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  hkge::configure_logging();

  CLI::App app{"Heterogeneous knowledge graph embedding engine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file with [section] headers");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  BuildArgs build;
  auto* b = app.add_subcommand("build-kg", "Validate inputs, split, augment and write a kg bundle");
  b->add_option("--entities", build.entities, "Entity type TSV (id<TAB>type)")->required()->check(CLI::ExistingFile);
  b->add_option("--triples", build.triples, "Triple TSV (head<TAB>relation<TAB>tail)")->required()->check(CLI::ExistingFile);
  b->add_option("--schema", build.schema, "Schema TSV (relation<TAB>head_type<TAB>tail_type<TAB>sym|asym)")->required()->check(CLI::ExistingFile);
  b->add_option("--items", build.items, "Item table TSV (entity<TAB>field<TAB>text_key) for augmentation")->check(CLI::ExistingFile);
  b->add_option("--ratios", build.ratios, "train,valid,test ratios")->capture_default_str();
  b->add_option("--seed", build.seed, "Random seed")->capture_default_str();
  b->add_option("--out", build.out, "Output bundle directory")->required();

  TrainArgs train;
  auto& cfg = train.config;
  cfg.epochs = 100;
  auto* t = app.add_subcommand("train", "Train embeddings on a kg bundle");
  t->add_option("--kg", train.kg, "kg bundle directory")->required()->check(CLI::ExistingDirectory);
  t->add_option("--dim", cfg.dim, "Embedding dimension")->capture_default_str();
  t->add_option("--model", train.model, "transe|distmult|complex|simple")->capture_default_str()
      ->check(CLI::IsMember({"transe", "distmult", "complex", "simple"}));
  t->add_option("--loss", train.loss, "hinge|logistic|default")->capture_default_str()
      ->check(CLI::IsMember({"hinge", "logistic", "default"}));
  t->add_option("--method", train.method, "none|init|align|augment")->capture_default_str()
      ->check(CLI::IsMember({"none", "init", "align", "augment"}));
  t->add_option("--vectors", train.vectors, "Vector file for init/align/augment");
  t->add_option("--lambda", cfg.lambda_l2, "L2 regularization coefficient")->capture_default_str();
  t->add_option("--lambda-align", cfg.lambda_align, "Alignment coefficient")->capture_default_str();
  t->add_option("--margin", cfg.margin, "Hinge margin")->capture_default_str();
  t->add_option("--lr", cfg.learning_rate, "Adagrad learning rate")->capture_default_str();
  t->add_option("--batch", cfg.batch_size, "Mini-batch size")->capture_default_str();
  t->add_option("--epochs", cfg.epochs, "Number of epochs")->capture_default_str();
  t->add_option("--negatives", cfg.negatives, "Negatives per positive")->capture_default_str();
  t->add_option("--init-gamma", cfg.init_gamma, "Random init gamma")->capture_default_str();
  t->add_option("--init-epsilon", cfg.init_epsilon, "Random init epsilon")->capture_default_str();
  t->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  t->add_option("--threads", cfg.threads, "Gradient worker threads (0 = auto, 1 = deterministic)")->capture_default_str();
  t->add_option("--checkpoint-every", train.checkpoint_every, "Checkpoint cadence in epochs (0 = final only)")->capture_default_str();
  t->add_option("--resume", train.resume, "Continue from a checkpoint directory")->check(CLI::ExistingDirectory);
  t->add_option("--out", train.out, "Output directory for checkpoints and loss.csv")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Filtered link-prediction evaluation of a checkpoint");
  e->add_option("--kg", ev.kg, "kg bundle directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--split", ev.split, "valid|test")->capture_default_str()
      ->check(CLI::IsMember({"train", "valid", "test"}));
  e->add_option("--ties", ev.ties, "pessimistic|optimistic|mean")->capture_default_str()
      ->check(CLI::IsMember({"pessimistic", "optimistic", "mean"}));
  e->add_option("--threads", ev.threads, "Worker threads (0 = auto)")->capture_default_str();
  e->add_option("--out", ev.out, "Report directory (default: the checkpoint directory)");

  ExportArgs ex;
  auto* x = app.add_subcommand("export-embeddings", "Write entity embeddings as a vector file");
  x->add_option("--checkpoint", ex.checkpoint, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  x->add_option("--ids", ex.ids, "Comma-separated entity ids");
  x->add_option("--id-file", ex.id_file, "File with one entity id per line")->check(CLI::ExistingFile);
  x->add_option("--type", ex.type, "Export every entity of this type (needs --kg)");
  x->add_option("--kg", ex.kg, "kg bundle directory")->check(CLI::ExistingDirectory);
  x->add_option("--out", ex.out, "Output vector file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUser;
  }

  try {
    if (*b) return cmd_build(build);
    if (*t) return cmd_train(train);
    if (*e) return cmd_eval(ev);
    if (*x) return cmd_export(ex);
  } catch (const hkge::NumericError& err) {
    spdlog::error("{}", err.what());
    return kExitNumeric;
  } catch (const hkge::Error& err) {
    spdlog::error("{}", err.what());
    return kExitUser;
  } catch (const std::filesystem::filesystem_error& err) {
    spdlog::error("{}", err.what());
    return kExitUser;
  }
  return kExitUser;
}
