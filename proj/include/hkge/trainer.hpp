#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hkge/embedding.hpp"
#include "hkge/graph.hpp"
#include "hkge/objective.hpp"
#include "hkge/random.hpp"
#include "hkge/sampling.hpp"

namespace hkge {

enum class LossKind { Default, Hinge, Logistic };
enum class IntegrationMethod { None, Initialization, Alignment, Augmentation };

LossKind parse_loss(std::string_view name);
std::string_view to_string(LossKind k);
IntegrationMethod parse_method(std::string_view name);
std::string_view to_string(IntegrationMethod m);

/// Hinge for TransE/DistMult, logistic for ComplEx/SimplE unless overridden.
LossKind resolve_loss(ModelFamily family, LossKind requested);

struct TrainingConfig {
  int dim = 768;
  ModelFamily family = ModelFamily::DistMult;
  LossKind loss = LossKind::Default;
  int negatives = 1;
  CorruptSide corrupt_side = CorruptSide::BothAlternating;
  bool exclude_known_positives = false;
  double margin = 1.0;
  double lambda_l2 = 9e-9;
  double lambda_align = 0.0;
  double learning_rate = 0.25;
  std::size_t batch_size = 4096;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  IntegrationMethod method = IntegrationMethod::None;
  double init_gamma = kInitGamma;
  double init_epsilon = kInitEpsilon;
  /// Worker threads for gradient computation; 1 is the deterministic mode.
  unsigned threads = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  /// Stable `key=value` lines, used for the checkpoint manifest hash.
  std::string canonical() const;
};

inline constexpr double kAdagradEpsilon = 1e-10;

/// G += g^2; row -= eta * g / sqrt(G + eps), element-wise.
template <typename Row, typename Grad, typename Accum>
void adagrad_step(Eigen::MatrixBase<Row>& row, const Eigen::MatrixBase<Grad>& grad,
                  Eigen::MatrixBase<Accum>& accum, double eta) {
  accum.array() += grad.array().square();
  row.array() -= eta * grad.array() / (accum.array() + kAdagradEpsilon).sqrt();
}

template <typename Row, typename Grad, typename Accum>
void adagrad_step(Eigen::MatrixBase<Row>&& row, const Eigen::MatrixBase<Grad>& grad,
                  Eigen::MatrixBase<Accum>&& accum, double eta) {
  adagrad_step(row, grad, accum, eta);
}

struct LossRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double loss = 0.0;
};

/// Mini-batch Adagrad over the train split. Gradients of a step are summed
/// per row before a single update is applied to each row.
class Trainer {
 public:
  Trainer(const KnowledgeGraph& kg, TrainingConfig config, EmbeddingTable table,
          AlignmentAnchors anchors = {});

  /// Corrupts `positives`, then applies one update. Returns the batch loss.
  double step(std::span<const Triple> positives, Rng& sampling_rng);
  /// Loss and gradient of a prepared batch without touching the table.
  LossValue evaluate_batch(const LabeledBatch& batch) const;
  /// One update from a prepared batch. Returns the batch loss.
  double apply(const LabeledBatch& batch);

  /// Shuffles the train split and runs ceil(|train| / batch) steps.
  void run_epoch();
  /// Runs epochs until `config.epochs` have completed. The callback fires
  /// after each epoch with the number of completed epochs.
  void train(const std::function<void(std::size_t)>& after_epoch = {});

  /// Resume position; the next epoch will be `epoch` (0-based) and step
  /// numbering continues from `step`.
  void set_position(std::size_t epoch, std::size_t step) {
    epoch_ = epoch;
    step_ = step;
  }

  const EmbeddingTable& table() const noexcept { return table_; }
  EmbeddingTable& table() noexcept { return table_; }
  const TrainingConfig& config() const noexcept { return config_; }
  const std::vector<LossRecord>& log() const noexcept { return log_; }
  std::size_t epochs_done() const noexcept { return epoch_; }
  std::size_t steps_done() const noexcept { return step_; }
  LossKind loss_kind() const noexcept { return loss_; }

 private:
  LabeledBatch make_batch(std::span<const Triple> positives, Rng& rng) const;

  const KnowledgeGraph* kg_;
  TrainingConfig config_;
  EmbeddingTable table_;
  AlignmentAnchors anchors_;
  LossKind loss_;
  CorruptionPolicy policy_;
  std::size_t epoch_ = 0;
  std::size_t step_ = 0;
  std::vector<LossRecord> log_;
};

/// Entity -> vector-file row id: pseudo nodes use their text key, every other
/// entity its own external id when the file has it.
VectorMapping vector_mapping(const KnowledgeGraph& kg, const VectorFile& vectors);

/// Starting table for the configured method. Initialization and Augmentation
/// seed mapped entities from `vectors`; None and Alignment start random.
EmbeddingTable initial_table(const KnowledgeGraph& kg, const TrainingConfig& config,
                             const VectorFile* vectors);

/// Anchors for Alignment: every entity whose id appears in `vectors`.
AlignmentAnchors alignment_anchors(const KnowledgeGraph& kg, const VectorFile& vectors,
                                   double lambda_align, int dim);

struct TrainResult {
  EmbeddingTable table;
  std::vector<LossRecord> log;
};

/// Builds the initial table for the method and trains for `config.epochs`.
/// Initialization and Alignment require `vectors`.
TrainResult train(const KnowledgeGraph& kg, const TrainingConfig& config,
                  const VectorFile* vectors = nullptr);

/// Mean loss per epoch from a step log, in epoch order.
std::vector<double> epoch_mean_losses(std::span<const LossRecord> log);

void write_loss_log(std::span<const LossRecord> log, const std::filesystem::path& path);

}  // namespace hkge
