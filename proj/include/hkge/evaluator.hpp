#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hkge/graph.hpp"
#include "hkge/scoring.hpp"

namespace hkge {

/// Known true answers for (relation, known entity, side) over all splits.
class FilterIndex {
 public:
  explicit FilterIndex(const KnowledgeGraph& kg);

  /// True entities completing the query at `side`, sorted ascending.
  std::span<const EntityId> answers(RelationId r, EntityId known, Side side) const;
  bool is_true(RelationId r, EntityId known, Side side, EntityId candidate) const;

 private:
  static std::uint64_t key(RelationId r, EntityId known, Side side) noexcept;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> answers_;
};

enum class TieMode { Pessimistic, Optimistic, Mean };
TieMode parse_tie_mode(std::string_view name);

struct RankOptions {
  bool filtered = true;
  bool type_filtered = true;
  TieMode ties = TieMode::Pessimistic;
};

/// Candidates scoring strictly above, and tied with, the true entity.
struct RankCounts {
  std::int64_t greater = 0;
  std::int64_t ties = 0;

  double rank(TieMode mode) const noexcept {
    switch (mode) {
      case TieMode::Pessimistic: return static_cast<double>(1 + greater + ties);
      case TieMode::Optimistic: return static_cast<double>(1 + greater);
      case TieMode::Mean: return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
    }
    return 0.0;
  }
};

RankCounts rank_counts(const ScoringModel& model, const Triple& query, Side side,
                       const FilterIndex& filter, const KnowledgeGraph& kg,
                       const RankOptions& options = {});

/// Rank of the true `side` entity; pessimistic or optimistic ties only.
std::int64_t rank(const ScoringModel& model, const Triple& query, Side side,
                  const FilterIndex& filter, const KnowledgeGraph& kg,
                  const RankOptions& options = {});

struct RelationMetrics {
  std::string relation;
  std::size_t count = 0;  // ranking queries, two per triple
  double mrr = 0.0;
  std::vector<double> hits;  // aligned with EvalReport::ks
};

struct EvalReport {
  std::vector<int> ks;
  std::vector<RelationMetrics> relations;  // relations with count > 0, schema order
  RelationMetrics micro;
  double macro_mrr = 0.0;
  /// Every rank in query order: for each evaluated triple, head then tail.
  std::vector<double> ranks;
};

struct EvalOptions {
  std::vector<int> ks = {1, 3, 10};
  RankOptions rank;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Filtered, type-filtered ranking of both sides of every evaluable triple in
/// `split`. ATChypernym and has-* relations are skipped.
EvalReport evaluate(const ScoringModel& model, const KnowledgeGraph& kg, SplitName split,
                    const EvalOptions& options = {});
EvalReport evaluate(const ScoringModel& model, const KnowledgeGraph& kg,
                    std::span<const Triple> triples, const EvalOptions& options = {});

/// Aggregates per-relation ranks into a report. `ranks[i]` belongs to the
/// relation `relation_of[i]`.
EvalReport summarize(const KnowledgeGraph& kg, std::span<const RelationId> relation_of,
                     std::span<const double> ranks, const std::vector<int>& ks);

/// `relation<TAB>count<TAB>mrr<TAB>hits@k...` then `micro` and `macro` rows.
void write_report_tsv(const EvalReport& report, std::ostream& out);
void print_report(const EvalReport& report, std::ostream& out);

}  // namespace hkge
