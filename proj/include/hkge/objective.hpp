#pragma once

#include <cmath>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "hkge/embedding.hpp"
#include "hkge/scoring.hpp"
#include "hkge/types.hpp"

namespace hkge {

/// Positives plus negatives, each negative tagged with the index of the
/// positive it was corrupted from.
struct LabeledBatch {
  std::vector<Triple> positives;
  std::vector<Triple> negatives;
  std::vector<std::size_t> source;
};

/// Sparse gradient keyed by table row. Ordered so application is
/// deterministic.
class GradientBuffer {
 public:
  void add(Eigen::Index row, const Eigen::Ref<const Eigen::RowVectorXd>& g) {
    auto [it, inserted] = rows_.try_emplace(row, g);
    if (!inserted) it->second += g;
  }
  void merge(const GradientBuffer& other) {
    for (const auto& [row, g] : other.rows_) add(row, g);
  }
  const std::map<Eigen::Index, Eigen::RowVectorXd>& rows() const noexcept { return rows_; }
  bool contains(Eigen::Index row) const { return rows_.count(row) != 0; }
  const Eigen::RowVectorXd& at(Eigen::Index row) const { return rows_.at(row); }
  std::size_t size() const noexcept { return rows_.size(); }
  void clear() { rows_.clear(); }

 private:
  std::map<Eigen::Index, Eigen::RowVectorXd> rows_;
};

struct LossValue {
  double loss = 0.0;
  GradientBuffer grad;
};

/// log(1 + exp(-x)) without overflow or cancellation.
inline double softplus_neg(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

/// Sorted unique rows touched by the batch's triples (all slots).
std::vector<Eigen::Index> touched_rows(const EmbeddingTable& table, const LabeledBatch& batch);

/// lambda * sum ||row||^2 over the given rows; gradient 2 lambda row.
double l2_penalty(const EmbeddingTable& table, std::span<const Eigen::Index> rows, double lambda,
                  GradientBuffer* grad);

/// sum log(1 + exp(-y f)) with y = +1 for positives, -1 for negatives, plus
/// the L2 term over batch-touched rows.
LossValue logistic_loss(const LabeledBatch& batch, const ScoringModel& model, double lambda_l2);

/// sum over (positive, negative) pairs of max(0, margin - f(pos) + f(neg))
/// plus the L2 term over batch-touched rows.
LossValue hinge_loss(const LabeledBatch& batch, const ScoringModel& model, double margin,
                     double lambda_l2);

/// Entity -> anchor vector (text or structure embedding) with weight lambda_a.
struct AlignmentAnchors {
  std::unordered_map<EntityId, Eigen::RowVectorXd> vectors;
  double lambda = 0.0;

  const Eigen::RowVectorXd* find(EntityId e) const {
    auto it = vectors.find(e);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

/// lambda_a * sum ||row - anchor||^2 over every slot of the touched, anchored
/// entities.
double alignment_penalty(std::span<const EntityId> entities, const EmbeddingTable& table,
                         const AlignmentAnchors& anchors, GradientBuffer* grad);

/// Entities appearing as head or tail anywhere in the batch, sorted unique.
std::vector<EntityId> touched_entities(const LabeledBatch& batch);

}  // namespace hkge
