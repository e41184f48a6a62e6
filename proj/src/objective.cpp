#include "hkge/objective.hpp"

#include <algorithm>

namespace hkge {

std::vector<Eigen::Index> touched_rows(const EmbeddingTable& table, const LabeledBatch& batch) {
  std::vector<Eigen::Index> rows;
  const int es = entity_slots(table.family());
  const int rs = relation_slots(table.family());
  auto add = [&](const Triple& t) {
    for (int s = 0; s < es; ++s) {
      rows.push_back(table.entity_row(t.head, s));
      rows.push_back(table.entity_row(t.tail, s));
    }
    for (int s = 0; s < rs; ++s) rows.push_back(table.relation_row(t.relation, s));
  };
  for (const auto& t : batch.positives) add(t);
  for (const auto& t : batch.negatives) add(t);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

std::vector<EntityId> touched_entities(const LabeledBatch& batch) {
  std::vector<EntityId> out;
  out.reserve(2 * (batch.positives.size() + batch.negatives.size()));
  for (const auto* part : {&batch.positives, &batch.negatives}) {
    for (const auto& t : *part) {
      out.push_back(t.head);
      out.push_back(t.tail);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double l2_penalty(const EmbeddingTable& table, std::span<const Eigen::Index> rows, double lambda,
                  GradientBuffer* grad) {
  if (lambda == 0.0) return 0.0;
  double total = 0.0;
  for (auto row : rows) {
    const auto v = table.params().row(row);
    total += v.squaredNorm();
    if (grad) grad->add(row, 2.0 * lambda * v);
  }
  return lambda * total;
}

namespace {

// d softplus(-y f) / df = -y * sigmoid(-y f)
double logistic_slope(double y, double f) {
  const double x = y * f;
  const double s = x >= 0.0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
  return -y * s;
}

}  // namespace

LossValue logistic_loss(const LabeledBatch& batch, const ScoringModel& model, double lambda_l2) {
  LossValue out;
  auto sink = [&](Eigen::Index row, const Eigen::RowVectorXd& g) { out.grad.add(row, g); };
  auto term = [&](const Triple& t, double y) {
    const double f = model.score(t);
    out.loss += softplus_neg(y * f);
    accumulate_gradient(model, t, logistic_slope(y, f), sink);
  };
  for (const auto& t : batch.positives) term(t, +1.0);
  for (const auto& t : batch.negatives) term(t, -1.0);
  const auto rows = touched_rows(model.table(), batch);
  out.loss += l2_penalty(model.table(), rows, lambda_l2, &out.grad);
  return out;
}

LossValue hinge_loss(const LabeledBatch& batch, const ScoringModel& model, double margin,
                     double lambda_l2) {
  LossValue out;
  auto sink = [&](Eigen::Index row, const Eigen::RowVectorXd& g) { out.grad.add(row, g); };
  std::vector<double> pos_scores(batch.positives.size());
  for (std::size_t i = 0; i < batch.positives.size(); ++i) pos_scores[i] = model.score(batch.positives[i]);
  for (std::size_t j = 0; j < batch.negatives.size(); ++j) {
    const std::size_t i = batch.source.at(j);
    const double violation = margin - pos_scores.at(i) + model.score(batch.negatives[j]);
    if (violation <= 0.0) continue;
    out.loss += violation;
    accumulate_gradient(model, batch.positives[i], -1.0, sink);
    accumulate_gradient(model, batch.negatives[j], +1.0, sink);
  }
  const auto rows = touched_rows(model.table(), batch);
  out.loss += l2_penalty(model.table(), rows, lambda_l2, &out.grad);
  return out;
}

double alignment_penalty(std::span<const EntityId> entities, const EmbeddingTable& table,
                         const AlignmentAnchors& anchors, GradientBuffer* grad) {
  if (anchors.lambda == 0.0) return 0.0;
  const int slots = entity_slots(table.family());
  double total = 0.0;
  for (EntityId e : entities) {
    const auto* anchor = anchors.find(e);
    if (!anchor) continue;
    for (int s = 0; s < slots; ++s) {
      const Eigen::RowVectorXd diff = table.entity(e, s) - *anchor;
      total += diff.squaredNorm();
      if (grad) grad->add(table.entity_row(e, s), 2.0 * anchors.lambda * diff);
    }
  }
  return anchors.lambda * total;
}

}  // namespace hkge
