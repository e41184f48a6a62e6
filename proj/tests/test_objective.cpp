#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "hkge/objective.hpp"
#include "oracles.hpp"

using namespace hkge;
using hkge::testing::fill_uniform;

namespace {

/// DistMult d=1 with relation 0 = 1 and head 0 = 1, so f(0, 0, e) = value of e.
EmbeddingTable scalar_table(std::vector<double> entity_values) {
  EmbeddingTable tb(ModelFamily::DistMult, entity_values.size(), 1, 1);
  for (std::size_t e = 0; e < entity_values.size(); ++e) tb.entity(static_cast<EntityId>(e))(0) = entity_values[e];
  tb.relation(0)(0) = 1.0;
  return tb;
}

}  // namespace

TEST(Softplus, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(softplus_neg(0.0), std::log(2.0));
  EXPECT_LT(softplus_neg(40.0), 1e-15);
  EXPECT_GT(softplus_neg(40.0), 0.0);
  EXPECT_DOUBLE_EQ(softplus_neg(-800.0), 800.0);
  EXPECT_TRUE(std::isfinite(softplus_neg(800.0)));
}

TEST(LogisticLoss, ZeroScoreGivesLog2) {
  const auto tb = scalar_table({1.0, 0.0});
  const LabeledBatch batch{{{0, 0, 1}}, {}, {}};
  EXPECT_NEAR(logistic_loss(batch, ScoringModel(tb), 0.0).loss, 0.6931471805599453, 1e-15);
}

TEST(LogisticLoss, SaturatedPositive) {
  const auto tb = scalar_table({1.0, 40.0});
  const LabeledBatch batch{{{0, 0, 1}}, {}, {}};
  const auto lv = logistic_loss(batch, ScoringModel(tb), 0.0);
  EXPECT_LT(lv.loss, 1e-15);
  for (const auto& [row, g] : lv.grad.rows()) EXPECT_TRUE(g.allFinite());
}

TEST(LogisticLoss, PositiveAndNegativePair) {
  const auto tb = scalar_table({1.0, 1.0, -2.0});
  const LabeledBatch batch{{{0, 0, 1}}, {{0, 0, 2}}, {0}};
  const double expected = std::log(1 + std::exp(-1.0)) + std::log(1 + std::exp(-2.0));
  EXPECT_NEAR(expected, 0.4402, 1e-4);
  EXPECT_NEAR(logistic_loss(batch, ScoringModel(tb), 0.0).loss, expected, 1e-15);
}

TEST(HingeLoss, InactivePairContributesNothing) {
  const auto tb = scalar_table({1.0, 2.0, 0.9});
  const LabeledBatch batch{{{0, 0, 1}}, {{0, 0, 2}}, {0}};
  const auto lv = hinge_loss(batch, ScoringModel(tb), 1.0, 0.0);
  EXPECT_EQ(lv.loss, 0.0);
  EXPECT_EQ(lv.grad.size(), 0u);
}

TEST(HingeLoss, EqualScoresCostTheMargin) {
  const auto tb = scalar_table({1.0, 0.5, 0.5});
  const LabeledBatch batch{{{0, 0, 1}}, {{0, 0, 2}}, {0}};
  EXPECT_EQ(hinge_loss(batch, ScoringModel(tb), 1.0, 0.0).loss, 1.0);
}

TEST(HingeLoss, SumsDeficitsOverPairs) {
  // Pairs with f(pos) - f(neg) = 0.7, 1.5, -0.2.
  const auto tb = scalar_table({1.0, 1.0, 0.3, -0.5, 1.2});
  const LabeledBatch batch{{{0, 0, 1}}, {{0, 0, 2}, {0, 0, 3}, {0, 0, 4}}, {0, 0, 0}};
  EXPECT_NEAR(hinge_loss(batch, ScoringModel(tb), 1.0, 0.0).loss, 1.5, 1e-12);
}

TEST(Alignment, MatchingAnchorContributesZero) {
  EmbeddingTable tb(ModelFamily::DistMult, 2, 1, 3);
  fill_uniform(tb, 1);
  AlignmentAnchors anchors{{{0, tb.entity(0)}}, 1.0};
  const std::vector<EntityId> ents{0, 1};
  EXPECT_EQ(alignment_penalty(ents, tb, anchors, nullptr), 0.0);
}

TEST(Alignment, ZeroLambdaContributesZero) {
  EmbeddingTable tb(ModelFamily::DistMult, 2, 1, 3);
  fill_uniform(tb, 2);
  AlignmentAnchors anchors{{{0, Eigen::RowVector3d(5, 5, 5)}}, 0.0};
  const std::vector<EntityId> ents{0};
  GradientBuffer g;
  EXPECT_EQ(alignment_penalty(ents, tb, anchors, &g), 0.0);
  EXPECT_EQ(g.size(), 0u);
}

TEST(Alignment, HandComputedPenaltyAndGradient) {
  EmbeddingTable tb(ModelFamily::DistMult, 1, 1, 3);
  tb.entity(0) << 1.5, 2.0, 3.0;
  AlignmentAnchors anchors{{{0, Eigen::RowVector3d(0.5, 0.0, 1.0)}}, 0.5};
  const std::vector<EntityId> ents{0};
  GradientBuffer g;
  EXPECT_EQ(alignment_penalty(ents, tb, anchors, &g), 4.5);
  EXPECT_EQ(g.at(0), Eigen::RowVector3d(1.0, 2.0, 2.0));
}

TEST(Alignment, EveryEntitySlotIsPulled) {
  EmbeddingTable tb(ModelFamily::ComplEx, 1, 1, 2);
  tb.entity(0, 0) << 1, 0;
  tb.entity(0, 1) << 0, 1;
  AlignmentAnchors anchors{{{0, Eigen::RowVector2d(0, 0)}}, 1.0};
  const std::vector<EntityId> ents{0};
  GradientBuffer g;
  EXPECT_EQ(alignment_penalty(ents, tb, anchors, &g), 2.0);
  EXPECT_TRUE(g.contains(tb.entity_row(0, 1)));
}

TEST(L2, OnlyTouchedRowsArePenalized) {
  EmbeddingTable tb(ModelFamily::DistMult, 4, 2, 2);
  tb.params().setOnes();
  const LabeledBatch batch{{{0, 1, 1}}, {{2, 1, 1}}, {0}};
  const auto rows = touched_rows(tb, batch);
  EXPECT_EQ(rows, (std::vector<Eigen::Index>{0, 1, 2, tb.relation_row(1)}));
  GradientBuffer g;
  EXPECT_EQ(l2_penalty(tb, rows, 0.25, &g), 2.0);
  EXPECT_FALSE(g.contains(3));
  EXPECT_EQ(g.at(0), Eigen::RowVector2d(0.5, 0.5));
}

namespace {

using BatchLoss = std::function<LossValue(const EmbeddingTable&)>;

/// Central-difference check of a batch loss against its gradient buffer
/// over every parameter of the table.
double batch_gradient_error(EmbeddingTable tb, const BatchLoss& loss) {
  const auto analytic = loss(tb).grad;
  const double h = 1e-6;
  double max_diff = 0.0, scale = 0.0;
  for (Eigen::Index row = 0; row < tb.rows(); ++row) {
    for (int j = 0; j < tb.dim(); ++j) {
      double& x = tb.params()(row, j);
      const double saved = x;
      x = saved + h;
      const double up = loss(tb).loss;
      x = saved - h;
      const double down = loss(tb).loss;
      x = saved;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic.contains(row) ? analytic.at(row)(j) : 0.0;
      max_diff = std::max(max_diff, std::abs(a - numeric));
      scale = std::max({scale, std::abs(a), std::abs(numeric)});
    }
  }
  return max_diff / scale;
}

LabeledBatch random_batch(std::uint64_t seed, int entities, int relations, int n) {
  auto rng = make_rng(seed, Stream::Fallback);
  LabeledBatch b;
  auto ent = [&] { return static_cast<EntityId>(uniform_index(rng, static_cast<std::uint64_t>(entities))); };
  for (int i = 0; i < n; ++i) {
    const Triple p{ent(), static_cast<RelationId>(uniform_index(rng, static_cast<std::uint64_t>(relations))), ent()};
    b.positives.push_back(p);
    b.negatives.push_back({ent(), p.relation, p.tail});
    b.negatives.push_back({p.head, p.relation, ent()});
    b.source.push_back(b.positives.size() - 1);
    b.source.push_back(b.positives.size() - 1);
  }
  return b;
}

}  // namespace

class BatchGradient : public ::testing::TestWithParam<ModelFamily> {};

TEST_P(BatchGradient, LogisticMatchesFiniteDifferences) {
  EmbeddingTable tb(GetParam(), 6, 2, 4);
  fill_uniform(tb, 3);
  const auto batch = random_batch(4, 6, 2, 5);
  EXPECT_LT(batch_gradient_error(tb, [&](const EmbeddingTable& t) {
              return logistic_loss(batch, ScoringModel(t), 0.05);
            }), 1e-6);
}

TEST_P(BatchGradient, HingeMatchesFiniteDifferences) {
  EmbeddingTable tb(GetParam(), 6, 2, 4);
  fill_uniform(tb, 5);
  const auto batch = random_batch(6, 6, 2, 5);
  EXPECT_LT(batch_gradient_error(tb, [&](const EmbeddingTable& t) {
              return hinge_loss(batch, ScoringModel(t), 2.0, 0.05);
            }), 1e-6);
}

TEST_P(BatchGradient, AlignmentMatchesFiniteDifferences) {
  EmbeddingTable tb(GetParam(), 5, 1, 3);
  fill_uniform(tb, 7);
  AlignmentAnchors anchors{{{1, Eigen::RowVector3d(0.1, -0.2, 0.3)}, {3, Eigen::RowVector3d(1, 1, 1)}}, 0.7};
  const std::vector<EntityId> ents{0, 1, 3};
  EXPECT_LT(batch_gradient_error(tb, [&](const EmbeddingTable& t) {
              LossValue v;
              v.loss = alignment_penalty(ents, t, anchors, &v.grad);
              return v;
            }), 1e-6);
}

TEST_P(BatchGradient, SmallStepAgainstGradientLowersLoss) {
  EmbeddingTable tb(GetParam(), 6, 2, 4);
  fill_uniform(tb, 8);
  const auto batch = random_batch(9, 6, 2, 5);
  const auto before = logistic_loss(batch, ScoringModel(tb), 0.01);
  for (const auto& [row, g] : before.grad.rows()) tb.params().row(row) -= 1e-4 * g;
  EXPECT_LT(logistic_loss(batch, ScoringModel(tb), 0.01).loss, before.loss);
}

INSTANTIATE_TEST_SUITE_P(Families, BatchGradient,
                         ::testing::Values(ModelFamily::TransE, ModelFamily::DistMult, ModelFamily::ComplEx,
                                           ModelFamily::SimplE),
                         [](const auto& info) { return std::string(to_string(info.param)); });
