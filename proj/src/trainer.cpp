#include "hkge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "hkge/error.hpp"
#include "hkge/io.hpp"

namespace hkge {

LossKind parse_loss(std::string_view name) {
  if (name == "default") return LossKind::Default;
  if (name == "hinge") return LossKind::Hinge;
  if (name == "logistic") return LossKind::Logistic;
  throw ConfigError("unknown loss " + std::string(name) + " (expected hinge|logistic|default)");
}

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::Default: return "default";
    case LossKind::Hinge: return "hinge";
    case LossKind::Logistic: return "logistic";
  }
  return "?";
}

IntegrationMethod parse_method(std::string_view name) {
  if (name == "none") return IntegrationMethod::None;
  if (name == "init") return IntegrationMethod::Initialization;
  if (name == "align") return IntegrationMethod::Alignment;
  if (name == "augment") return IntegrationMethod::Augmentation;
  throw ConfigError("unknown method " + std::string(name) + " (expected none|init|align|augment)");
}

std::string_view to_string(IntegrationMethod m) {
  switch (m) {
    case IntegrationMethod::None: return "none";
    case IntegrationMethod::Initialization: return "init";
    case IntegrationMethod::Alignment: return "align";
    case IntegrationMethod::Augmentation: return "augment";
  }
  return "?";
}

LossKind resolve_loss(ModelFamily family, LossKind requested) {
  if (requested != LossKind::Default) return requested;
  return family == ModelFamily::TransE || family == ModelFamily::DistMult ? LossKind::Hinge
                                                                          : LossKind::Logistic;
}

void TrainingConfig::validate() const {
  if (dim <= 0) throw ConfigError("dim must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (negatives < 1) throw ConfigError("negatives per positive must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(lambda_l2 >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(lambda_align >= 0.0)) throw ConfigError("lambda-align must be non-negative");
  if (!(margin >= 0.0)) throw ConfigError("margin must be non-negative");
  if (!(init_gamma >= 0.0) || !(init_epsilon >= 0.0)) throw ConfigError("init bounds must be non-negative");
}

std::string TrainingConfig::canonical() const {
  std::ostringstream s;
  s.precision(17);
  s << "dim=" << dim << "\nmodel=" << to_string(family) << "\nloss=" << to_string(loss)
    << "\nnegatives=" << negatives << "\ncorrupt_side=" << static_cast<int>(corrupt_side)
    << "\nexclude_known=" << exclude_known_positives << "\nmargin=" << margin
    << "\nlambda=" << lambda_l2 << "\nlambda_align=" << lambda_align
    << "\nlr=" << learning_rate << "\nbatch=" << batch_size << "\nseed=" << seed
    << "\nmethod=" << to_string(method) << "\ninit_gamma=" << init_gamma
    << "\ninit_epsilon=" << init_epsilon << '\n';
  return s.str();
}

Trainer::Trainer(const KnowledgeGraph& kg, TrainingConfig config, EmbeddingTable table,
                 AlignmentAnchors anchors)
    : kg_(&kg),
      config_(std::move(config)),
      table_(std::move(table)),
      anchors_(std::move(anchors)),
      loss_(resolve_loss(config_.family, config_.loss)) {
  config_.validate();
  if (!kg.finalized()) throw ConfigError("knowledge graph must be finalized before training");
  if (table_.family() != config_.family || table_.dim() != config_.dim ||
      table_.num_entities() != static_cast<Eigen::Index>(kg.entities.size()) ||
      table_.num_relations() != static_cast<Eigen::Index>(kg.relations.size())) {
    throw ConfigError("embedding table does not match the graph and config");
  }
  policy_.negatives = config_.negatives;
  policy_.side = config_.corrupt_side;
  policy_.exclude_known_positives = config_.exclude_known_positives;
}

LabeledBatch Trainer::make_batch(std::span<const Triple> positives, Rng& rng) const {
  LabeledBatch batch;
  batch.positives.assign(positives.begin(), positives.end());
  batch.negatives.reserve(positives.size() * static_cast<std::size_t>(policy_.negatives));
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const auto before = batch.negatives.size();
    corrupt(positives[i], policy_, *kg_, rng, batch.negatives,
            static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(policy_.negatives));
    batch.source.insert(batch.source.end(), batch.negatives.size() - before, i);
  }
  return batch;
}

LossValue Trainer::evaluate_batch(const LabeledBatch& batch) const {
  const ScoringModel model(table_);
  auto compute = [&](const LabeledBatch& part) {
    return loss_ == LossKind::Hinge ? hinge_loss(part, model, config_.margin, config_.lambda_l2)
                                    : logistic_loss(part, model, config_.lambda_l2);
  };

  LossValue out;
  const unsigned workers = std::min<unsigned>(config_.threads == 0 ? std::thread::hardware_concurrency()
                                                                   : config_.threads,
                                              static_cast<unsigned>(batch.positives.size()));
  if (workers <= 1) {
    out = compute(batch);
  } else {
    // Split by positive so every hinge pair stays in one part. Each worker
    // reads the same snapshot; parts are merged in order.
    std::vector<LabeledBatch> parts(workers);
    const std::size_t n = batch.positives.size();
    std::vector<std::size_t> part_of(n), local_index(n);
    for (std::size_t i = 0; i < n; ++i) {
      part_of[i] = i * workers / n;
      local_index[i] = parts[part_of[i]].positives.size();
      parts[part_of[i]].positives.push_back(batch.positives[i]);
    }
    for (std::size_t j = 0; j < batch.negatives.size(); ++j) {
      const std::size_t i = batch.source[j];
      parts[part_of[i]].negatives.push_back(batch.negatives[j]);
      parts[part_of[i]].source.push_back(local_index[i]);
    }
    std::vector<LossValue> results(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        // L2 is added once below over the whole batch's rows.
        results[w] = loss_ == LossKind::Hinge ? hinge_loss(parts[w], model, config_.margin, 0.0)
                                              : logistic_loss(parts[w], model, 0.0);
      });
    }
    for (auto& t : pool) t.join();
    for (auto& r : results) {
      out.loss += r.loss;
      out.grad.merge(r.grad);
    }
    const auto rows = touched_rows(table_, batch);
    out.loss += l2_penalty(table_, rows, config_.lambda_l2, &out.grad);
  }

  if (config_.method == IntegrationMethod::Alignment) {
    const auto entities = touched_entities(batch);
    out.loss += alignment_penalty(entities, table_, anchors_, &out.grad);
  }
  return out;
}

double Trainer::apply(const LabeledBatch& batch) {
  LossValue value = evaluate_batch(batch);
  if (!std::isfinite(value.loss)) {
    throw NumericError("non-finite loss at epoch " + std::to_string(epoch_ + 1) + " step " +
                       std::to_string(step_ + 1) + " (batch of " +
                       std::to_string(batch.positives.size()) + " positives)");
  }
  auto& params = table_.params();
  auto& accum = table_.accumulators();
  for (const auto& [row, g] : value.grad.rows()) {
    if (!g.allFinite()) {
      throw NumericError("non-finite gradient at epoch " + std::to_string(epoch_ + 1) + " step " +
                         std::to_string(step_ + 1) + " row " + std::to_string(row));
    }
    adagrad_step(params.row(row), g, accum.row(row), config_.learning_rate);
  }
  return value.loss;
}

double Trainer::step(std::span<const Triple> positives, Rng& sampling_rng) {
  return apply(make_batch(positives, sampling_rng));
}

void Trainer::run_epoch() {
  const auto& train = kg_->splits.train;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  auto shuffle_rng = make_rng(config_.seed, Stream::Shuffle, epoch_);
  shuffle(order.begin(), order.end(), shuffle_rng);

  std::vector<Triple> positives;
  positives.reserve(config_.batch_size);
  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < order.size(); start += config_.batch_size, ++batch_index) {
    const std::size_t end = std::min(order.size(), start + config_.batch_size);
    positives.clear();
    for (std::size_t i = start; i < end; ++i) positives.push_back(train[order[i]]);
    auto rng = make_rng(config_.seed, Stream::Sampling, epoch_, batch_index);
    const double loss = step(positives, rng);
    ++step_;
    log_.push_back({epoch_ + 1, step_, loss});
    spdlog::trace("epoch {} step {} loss {}", epoch_ + 1, step_, loss);
  }
  ++epoch_;
}

void Trainer::train(const std::function<void(std::size_t)>& after_epoch) {
  while (epoch_ < config_.epochs) {
    run_epoch();
    spdlog::debug("epoch {} done", epoch_);
    if (after_epoch) after_epoch(epoch_);
  }
}

VectorMapping vector_mapping(const KnowledgeGraph& kg, const VectorFile& vectors) {
  VectorMapping mapping(kg.entities.size());
  for (std::size_t e = 0; e < kg.entities.size(); ++e) {
    const auto id = static_cast<EntityId>(e);
    if (auto it = kg.text_keys.find(id); it != kg.text_keys.end()) {
      mapping[e] = it->second;  // must resolve; a missing key is an error
    } else if (vectors.find(kg.entities.external_id(id))) {
      mapping[e] = kg.entities.external_id(id);
    }
  }
  return mapping;
}

EmbeddingTable initial_table(const KnowledgeGraph& kg, const TrainingConfig& config,
                             const VectorFile* vectors) {
  EmbeddingTable table(config.family, kg.entities.size(), kg.relations.size(), config.dim);
  const bool seeded = config.method == IntegrationMethod::Initialization ||
                      config.method == IntegrationMethod::Augmentation;
  if (config.method == IntegrationMethod::Initialization && !vectors) {
    throw ConfigError("method init requires a vector file");
  }
  if (seeded && vectors) {
    init_from_vectors(table, *vectors, vector_mapping(kg, *vectors), config.seed, config.init_gamma,
                      config.init_epsilon);
  } else {
    init_random(table, config.seed, config.init_gamma, config.init_epsilon);
  }
  return table;
}

AlignmentAnchors alignment_anchors(const KnowledgeGraph& kg, const VectorFile& vectors,
                                   double lambda_align, int dim) {
  if (vectors.dim() != dim) {
    throw ConfigError("vector file dimension " + std::to_string(vectors.dim()) +
                      " does not match embedding dimension " + std::to_string(dim));
  }
  AlignmentAnchors anchors;
  anchors.lambda = lambda_align;
  for (std::size_t e = 0; e < kg.entities.size(); ++e) {
    const auto id = static_cast<EntityId>(e);
    if (auto row = vectors.find(kg.entities.external_id(id))) {
      anchors.vectors.emplace(id, vectors.values.row(*row));
    }
  }
  return anchors;
}

TrainResult train(const KnowledgeGraph& kg, const TrainingConfig& config, const VectorFile* vectors) {
  config.validate();
  if (config.method == IntegrationMethod::Alignment && !vectors) {
    throw ConfigError("method align requires a vector file");
  }
  AlignmentAnchors anchors;
  if (config.method == IntegrationMethod::Alignment) {
    anchors = alignment_anchors(kg, *vectors, config.lambda_align, config.dim);
  }
  Trainer trainer(kg, config, initial_table(kg, config, vectors), std::move(anchors));
  trainer.train();
  return {trainer.table(), trainer.log()};
}

std::vector<double> epoch_mean_losses(std::span<const LossRecord> log) {
  std::vector<double> means;
  std::size_t count = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (i == 0 || log[i].epoch != log[i - 1].epoch) {
      if (count > 0) means.back() /= static_cast<double>(count);
      means.push_back(0.0);
      count = 0;
    }
    means.back() += log[i].loss;
    ++count;
  }
  if (count > 0) means.back() /= static_cast<double>(count);
  return means;
}

void write_loss_log(std::span<const LossRecord> log, const std::filesystem::path& path) {
  auto out = io::open_out(path);
  out.precision(17);
  out << "epoch,step,loss\n";
  for (const auto& rec : log) out << rec.epoch << ',' << rec.step << ',' << rec.loss << '\n';
}

}  // namespace hkge
