#include "hkge/evaluator.hpp"

#include <algorithm>
#include <iomanip>
#include <thread>

#include "hkge/error.hpp"

namespace hkge {

FilterIndex::FilterIndex(const KnowledgeGraph& kg) {
  for (auto s : {SplitName::Train, SplitName::Valid, SplitName::Test}) {
    for (const auto& t : kg.split(s)) {
      answers_[key(t.relation, t.head, Side::Tail)].push_back(t.tail);
      answers_[key(t.relation, t.tail, Side::Head)].push_back(t.head);
    }
  }
  for (auto& [k, v] : answers_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

std::uint64_t FilterIndex::key(RelationId r, EntityId known, Side side) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r)) << 33) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(known)) << 1) |
         (side == Side::Head ? 1u : 0u);
}

std::span<const EntityId> FilterIndex::answers(RelationId r, EntityId known, Side side) const {
  auto it = answers_.find(key(r, known, side));
  if (it == answers_.end()) return {};
  return it->second;
}

bool FilterIndex::is_true(RelationId r, EntityId known, Side side, EntityId candidate) const {
  auto a = answers(r, known, side);
  return std::binary_search(a.begin(), a.end(), candidate);
}

TieMode parse_tie_mode(std::string_view name) {
  if (name == "pessimistic") return TieMode::Pessimistic;
  if (name == "optimistic") return TieMode::Optimistic;
  if (name == "mean") return TieMode::Mean;
  throw ConfigError("unknown tie mode " + std::string(name) + " (expected pessimistic|optimistic|mean)");
}

namespace {

// Rank counting for one query with a reusable score buffer.
RankCounts count_rank(const ScoringModel& model, const Triple& query, Side side,
                      const FilterIndex& filter, const KnowledgeGraph& kg, const RankOptions& options,
                      std::vector<EntityId>& all_entities, std::vector<double>& scores) {
  std::span<const EntityId> pool;
  if (options.type_filtered) {
    pool = kg.pool(query.relation, side);
  } else {
    if (all_entities.size() != kg.entities.size()) {
      all_entities.resize(kg.entities.size());
      for (std::size_t e = 0; e < all_entities.size(); ++e) all_entities[e] = static_cast<EntityId>(e);
    }
    pool = all_entities;
  }
  const EntityId truth = side == Side::Head ? query.head : query.tail;
  const EntityId known = side == Side::Head ? query.tail : query.head;
  const double true_score = model.score(query);
  model.score_candidates(query, side, pool, scores);

  const auto answers = options.filtered ? filter.answers(query.relation, known, side)
                                        : std::span<const EntityId>{};
  RankCounts counts;
  bool saw_truth = false;
  auto ans = answers.begin();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const EntityId c = pool[i];
    if (c == truth) {
      saw_truth = true;
      continue;
    }
    // pool and answers are both ascending: merge-walk the filter.
    while (ans != answers.end() && *ans < c) ++ans;
    if (ans != answers.end() && *ans == c) continue;
    if (scores[i] > true_score) {
      ++counts.greater;
    } else if (scores[i] == true_score) {
      ++counts.ties;
    }
  }
  if (options.type_filtered && !saw_truth) {
    throw Error("true entity missing from its own candidate pool");
  }
  return counts;
}

}  // namespace

RankCounts rank_counts(const ScoringModel& model, const Triple& query, Side side,
                       const FilterIndex& filter, const KnowledgeGraph& kg, const RankOptions& options) {
  std::vector<EntityId> all;
  std::vector<double> scores;
  return count_rank(model, query, side, filter, kg, options, all, scores);
}

std::int64_t rank(const ScoringModel& model, const Triple& query, Side side, const FilterIndex& filter,
                  const KnowledgeGraph& kg, const RankOptions& options) {
  if (options.ties == TieMode::Mean) throw ConfigError("integer rank needs pessimistic or optimistic ties");
  const auto c = rank_counts(model, query, side, filter, kg, options);
  return static_cast<std::int64_t>(c.rank(options.ties));
}

EvalReport summarize(const KnowledgeGraph& kg, std::span<const RelationId> relation_of,
                     std::span<const double> ranks, const std::vector<int>& ks) {
  EvalReport report;
  report.ks = ks;
  report.ranks.assign(ranks.begin(), ranks.end());

  struct Acc {
    std::size_t count = 0;
    double rr = 0.0;
    std::vector<std::size_t> hits;
  };
  std::vector<Acc> per(kg.relations.size());
  Acc micro;
  micro.hits.assign(ks.size(), 0);
  for (auto& a : per) a.hits.assign(ks.size(), 0);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    for (Acc* a : {&per[static_cast<std::size_t>(relation_of[i])], &micro}) {
      ++a->count;
      a->rr += 1.0 / ranks[i];
      for (std::size_t k = 0; k < ks.size(); ++k) {
        if (ranks[i] <= ks[k]) ++a->hits[k];
      }
    }
  }
  auto finish = [&](const std::string& name, const Acc& a) {
    RelationMetrics m;
    m.relation = name;
    m.count = a.count;
    m.mrr = a.count ? a.rr / static_cast<double>(a.count) : 0.0;
    for (auto h : a.hits) m.hits.push_back(a.count ? static_cast<double>(h) / static_cast<double>(a.count) : 0.0);
    return m;
  };
  double macro = 0.0;
  for (std::size_t r = 0; r < per.size(); ++r) {
    if (per[r].count == 0) continue;
    report.relations.push_back(finish(kg.relations.at(static_cast<RelationId>(r)).name, per[r]));
    macro += report.relations.back().mrr;
  }
  report.micro = finish("micro", micro);
  report.macro_mrr = report.relations.empty() ? 0.0 : macro / static_cast<double>(report.relations.size());
  return report;
}

EvalReport evaluate(const ScoringModel& model, const KnowledgeGraph& kg, std::span<const Triple> triples,
                    const EvalOptions& options) {
  if (triples.empty()) throw ConfigError("cannot evaluate an empty split");
  std::vector<Triple> queries;
  for (const auto& t : triples) {
    if (!is_auxiliary_relation(kg.relations.at(t.relation).name)) queries.push_back(t);
  }
  if (queries.empty()) throw ConfigError("split has no evaluable triples");

  const FilterIndex filter(kg);
  std::vector<double> ranks(2 * queries.size());
  std::vector<RelationId> relation_of(2 * queries.size());

  unsigned workers = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(queries.size())));
  auto run = [&](unsigned w) {
    std::vector<EntityId> all;
    std::vector<double> scores;
    for (std::size_t i = w; i < queries.size(); i += workers) {
      const auto& q = queries[i];
      for (int s = 0; s < 2; ++s) {
        const Side side = s == 0 ? Side::Head : Side::Tail;
        ranks[2 * i + static_cast<std::size_t>(s)] =
            count_rank(model, q, side, filter, kg, options.rank, all, scores).rank(options.rank.ties);
        relation_of[2 * i + static_cast<std::size_t>(s)] = q.relation;
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  return summarize(kg, relation_of, ranks, options.ks);
}

EvalReport evaluate(const ScoringModel& model, const KnowledgeGraph& kg, SplitName split,
                    const EvalOptions& options) {
  return evaluate(model, kg, std::span<const Triple>(kg.split(split)), options);
}

void write_report_tsv(const EvalReport& report, std::ostream& out) {
  const auto old_precision = out.precision(10);
  out << "relation\tcount\tmrr";
  for (int k : report.ks) out << "\thits" << k;
  out << '\n';
  auto row = [&](const RelationMetrics& m) {
    out << m.relation << '\t' << m.count << '\t' << m.mrr;
    for (double h : m.hits) out << '\t' << h;
    out << '\n';
  };
  for (const auto& m : report.relations) row(m);
  row(report.micro);
  out << "macro\t" << report.micro.count << '\t' << report.macro_mrr;
  for (std::size_t i = 0; i < report.ks.size(); ++i) out << "\t";
  out << '\n';
  out.precision(old_precision);
}

void print_report(const EvalReport& report, std::ostream& out) {
  std::size_t width = 8;
  for (const auto& m : report.relations) width = std::max(width, m.relation.size());
  const auto flags = out.flags();
  out << std::left << std::setw(static_cast<int>(width)) << "relation" << std::right << std::setw(9)
      << "count" << std::setw(9) << "MRR";
  for (int k : report.ks) out << std::setw(9) << ("H@" + std::to_string(k));
  out << '\n' << std::string(width + 18 + 9 * report.ks.size(), '-') << '\n';
  out << std::fixed << std::setprecision(4);
  auto row = [&](const RelationMetrics& m) {
    out << std::left << std::setw(static_cast<int>(width)) << m.relation << std::right << std::setw(9)
        << m.count << std::setw(9) << m.mrr;
    for (double h : m.hits) out << std::setw(9) << h;
    out << '\n';
  };
  for (const auto& m : report.relations) row(m);
  out << std::string(width + 18 + 9 * report.ks.size(), '-') << '\n';
  row(report.micro);
  out << std::left << std::setw(static_cast<int>(width)) << "macro" << std::right << std::setw(9)
      << report.micro.count << std::setw(9) << report.macro_mrr << '\n';
  out.flags(flags);
}

}  // namespace hkge
