#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "hkge/error.hpp"
#include "hkge/evaluator.hpp"
#include "hkge/trainer.hpp"
#include "oracles.hpp"

using namespace hkge;
using hkge::testing::add_entities;
using hkge::testing::add_relation;

namespace {

/// Five drugs on a line (DistMult, d=1, relation weight 1) plus one protein
/// that would outscore everything if it were a candidate.
/// Test holds (D0, r, D1); train holds (D0, r, D2), which scores higher.
struct FiveEntityFixture {
  KnowledgeGraph kg;
  EmbeddingTable table;

  FiveEntityFixture() {
    add_entities(kg, "drug", "D", 5);
    add_entities(kg, "protein", "P", 1);
    add_relation(kg, "r", "drug", "drug");
    kg.splits.train = {{0, 0, 2}};
    kg.splits.test = {{0, 0, 1}};
    kg.finalize();
    table = EmbeddingTable(ModelFamily::DistMult, 6, 1, 1);
    table.params().col(0) << 1.0, 2.0, 3.0, 0.5, -1.0, 100.0, 1.0;
  }
};

EmbeddingTable trained_table(const KnowledgeGraph& kg, ModelFamily family, std::uint64_t seed) {
  TrainingConfig c;
  c.dim = 6;
  c.family = family;
  c.epochs = 5;
  c.batch_size = 32;
  c.seed = seed;
  c.init_gamma = 0.5;
  c.init_epsilon = 0.0;
  return train(kg, c).table;
}

}  // namespace

TEST(Rank, StrictlyBestIsOne) {
  FiveEntityFixture f;
  f.table.params()(1, 0) = 10.0;
  const ScoringModel m(f.table);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, FilterIndex(f.kg), f.kg), 1);
}

TEST(Rank, KnownTrainTripleIsFilteredOut) {
  FiveEntityFixture f;
  const ScoringModel m(f.table);
  const FilterIndex filter(f.kg);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg), 1);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg, {false, true, TieMode::Pessimistic}), 2);
  const auto known = hkge::testing::all_known(f.kg);
  EXPECT_EQ(hkge::testing::oracle_rank(m, f.kg, known, {0, 0, 1}, Side::Tail, true), 1);
  EXPECT_EQ(hkge::testing::oracle_rank(m, f.kg, known, {0, 0, 1}, Side::Tail, false), 2);
}

TEST(Rank, WrongTypeCandidateIsIgnored) {
  FiveEntityFixture f;
  const ScoringModel m(f.table);
  const FilterIndex filter(f.kg);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg), 1);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg, {true, false, TieMode::Pessimistic}), 2);
}

TEST(Rank, TieModes) {
  FiveEntityFixture f;
  f.table.params()(3, 0) = 2.0;  // D3 ties with the true tail D1
  const ScoringModel m(f.table);
  const FilterIndex filter(f.kg);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg, {true, true, TieMode::Pessimistic}), 2);
  EXPECT_EQ(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg, {true, true, TieMode::Optimistic}), 1);
  EXPECT_EQ(rank_counts(m, {0, 0, 1}, Side::Tail, filter, f.kg).rank(TieMode::Mean), 1.5);
  EXPECT_THROW(rank(m, {0, 0, 1}, Side::Tail, filter, f.kg, {true, true, TieMode::Mean}), ConfigError);
}

TEST(Summarize, MrrAndHits) {
  KnowledgeGraph kg;
  add_relation(kg, "r", "drug", "drug");
  const std::vector<RelationId> rel{0, 0, 0};
  const std::vector<double> ranks{1, 2, 4};
  const auto rep = summarize(kg, rel, ranks, {1, 3, 10});
  EXPECT_NEAR(rep.micro.mrr, (1 + 0.5 + 0.25) / 3, 1e-15);
  EXPECT_NEAR(rep.micro.mrr, 0.5833, 1e-4);
  EXPECT_NEAR(rep.micro.hits[1], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(rep.micro.hits[0], 1.0 / 3.0);
  EXPECT_EQ(rep.micro.hits[2], 1.0);
}

TEST(Summarize, MacroIgnoresCounts) {
  KnowledgeGraph kg;
  add_relation(kg, "a", "drug", "drug");
  add_relation(kg, "b", "drug", "drug");
  add_relation(kg, "unused", "drug", "drug");
  const std::vector<RelationId> rel{0, 1, 1, 1, 1};
  const std::vector<double> ranks{5, 1, 1, 1, 5};
  const auto rep = summarize(kg, rel, ranks, {1});
  ASSERT_EQ(rep.relations.size(), 2u);
  EXPECT_NEAR(rep.relations[0].mrr, 0.2, 1e-15);
  EXPECT_NEAR(rep.relations[1].mrr, 0.8, 1e-15);
  EXPECT_NEAR(rep.macro_mrr, 0.5, 1e-15);
  EXPECT_NEAR(rep.micro.mrr, 0.68, 1e-15);
}

class OracleEquivalence : public ::testing::TestWithParam<ModelFamily> {};

TEST_P(OracleEquivalence, EveryRankMatchesBruteForce) {
  const auto kg = hkge::testing::typed_kg(3);
  const auto table = trained_table(kg, GetParam(), 4);
  const ScoringModel m(table);
  EvalOptions opt;
  opt.threads = 1;
  for (auto s : {SplitName::Valid, SplitName::Test}) {
    const auto rep = evaluate(m, kg, s, opt);
    EXPECT_EQ(rep.ranks, hkge::testing::oracle_ranks(m, kg, kg.split(s)));
  }
}

TEST_P(OracleEquivalence, AllTiedScoresRankLast) {
  const auto kg = hkge::testing::typed_kg(4);
  EmbeddingTable table(GetParam(), kg.entities.size(), kg.relations.size(), 3);
  const ScoringModel m(table);
  const auto rep = evaluate(m, kg, SplitName::Test);
  EXPECT_EQ(rep.ranks, hkge::testing::oracle_ranks(m, kg, kg.splits.test));
}

INSTANTIATE_TEST_SUITE_P(Families, OracleEquivalence,
                         ::testing::Values(ModelFamily::TransE, ModelFamily::DistMult, ModelFamily::ComplEx,
                                           ModelFamily::SimplE),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Evaluate, FilteredNeverExceedsRaw) {
  const auto kg = hkge::testing::typed_kg(5);
  const auto table = trained_table(kg, ModelFamily::DistMult, 5);
  const ScoringModel m(table);
  EvalOptions filtered, raw;
  raw.rank.filtered = false;
  const auto a = evaluate(m, kg, SplitName::Train, filtered);
  const auto b = evaluate(m, kg, SplitName::Train, raw);
  ASSERT_EQ(a.ranks.size(), b.ranks.size());
  bool strict = false;
  for (std::size_t i = 0; i < a.ranks.size(); ++i) {
    EXPECT_LE(a.ranks[i], b.ranks[i]);
    strict |= a.ranks[i] < b.ranks[i];
  }
  EXPECT_TRUE(strict);
}

TEST(Evaluate, LeavesTableUntouched) {
  const auto kg = hkge::testing::typed_kg(6);
  const auto table = trained_table(kg, ModelFamily::ComplEx, 6);
  const auto copy = table;
  evaluate(ScoringModel(table), kg, SplitName::Test);
  EXPECT_EQ(table, copy);
}

TEST(Evaluate, ThreadCountDoesNotChangeReport) {
  const auto kg = hkge::testing::typed_kg(7);
  const auto table = trained_table(kg, ModelFamily::SimplE, 7);
  EvalOptions one, many;
  one.threads = 1;
  many.threads = 5;
  const auto a = evaluate(ScoringModel(table), kg, SplitName::Test, one);
  const auto b = evaluate(ScoringModel(table), kg, SplitName::Test, many);
  EXPECT_EQ(a.ranks, b.ranks);
  EXPECT_EQ(a.micro.mrr, b.micro.mrr);
  EXPECT_EQ(a.macro_mrr, b.macro_mrr);
}

TEST(Evaluate, AuxiliaryRelationsAreSkipped) {
  auto kg = hkge::testing::typed_kg(8);
  const auto text = add_entities(kg, "text", "T", 3);
  const auto atc = add_entities(kg, "atc", "A", 3);
  const RelationId has_name = add_relation(kg, "has-name", "drug", "text");
  const RelationId hyper = add_relation(kg, std::string(kAtcHypernym), "atc", "atc");
  kg.splits.test.push_back({kg.entities.at("D0"), has_name, text[0]});
  kg.splits.test.push_back({atc[0], hyper, atc[1]});
  kg.finalize();
  const auto table = trained_table(kg, ModelFamily::DistMult, 8);
  const auto rep = evaluate(ScoringModel(table), kg, SplitName::Test);
  for (const auto& r : rep.relations) {
    EXPECT_FALSE(is_auxiliary_relation(r.relation)) << r.relation;
  }
  EXPECT_EQ(rep.micro.count, 2 * (kg.splits.test.size() - 2));

  const std::vector<Triple> only_aux{{atc[0], hyper, atc[1]}};
  EXPECT_THROW(evaluate(ScoringModel(table), kg, only_aux), ConfigError);
}

TEST(Evaluate, EmptySplitIsConfigError) {
  auto kg = hkge::testing::typed_kg(9);
  kg.splits.valid.clear();
  kg.finalize();
  EmbeddingTable table(ModelFamily::DistMult, kg.entities.size(), kg.relations.size(), 2);
  EXPECT_THROW(evaluate(ScoringModel(table), kg, SplitName::Valid), ConfigError);
}

TEST(Report, TsvHasHeaderRelationsMicroAndMacro) {
  const auto kg = hkge::testing::typed_kg(10);
  const auto table = trained_table(kg, ModelFamily::DistMult, 10);
  const auto rep = evaluate(ScoringModel(table), kg, SplitName::Test);
  std::ostringstream out;
  write_report_tsv(rep, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "relation\tcount\tmrr\thits1\thits3\thits10");
  std::vector<std::string> names;
  while (std::getline(in, line)) names.push_back(line.substr(0, line.find('\t')));
  ASSERT_EQ(names.size(), rep.relations.size() + 2);
  EXPECT_EQ(names[0], "interact");
  EXPECT_EQ(names[names.size() - 2], "micro");
  EXPECT_EQ(names.back(), "macro");
}
