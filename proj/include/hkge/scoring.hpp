#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hkge/embedding.hpp"
#include "hkge/types.hpp"

namespace hkge {

// Kernels accumulate coordinate terms left to right in a plain loop. The fixed
// order makes the algebraic reductions exact: DistMult multiplies (h*t)*r, so
// swapping h and t gives the same bits, and ComplEx/SimplE reduce to the same
// terms when their extra parts are zero or tied.

/// -||h + r - t||_2
template <typename H, typename R, typename T>
typename H::Scalar transe_score(const Eigen::MatrixBase<H>& h, const Eigen::MatrixBase<R>& r,
                                const Eigen::MatrixBase<T>& t) {
  using Scalar = typename H::Scalar;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const Scalar x = h(i) + r(i) - t(i);
    acc += x * x;
  }
  return -std::sqrt(acc);
}

/// sum_i h_i r_i t_i
template <typename H, typename R, typename T>
typename H::Scalar distmult_score(const Eigen::MatrixBase<H>& h, const Eigen::MatrixBase<R>& r,
                                  const Eigen::MatrixBase<T>& t) {
  using Scalar = typename H::Scalar;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < h.size(); ++i) acc += (h(i) * t(i)) * r(i);
  return acc;
}

/// Re(<h, r, conj(t)>) with h = h_re + i h_im etc.
template <typename A, typename B, typename C, typename D, typename E, typename F>
typename A::Scalar complex_score(const Eigen::MatrixBase<A>& h_re, const Eigen::MatrixBase<B>& h_im,
                                 const Eigen::MatrixBase<C>& r_re, const Eigen::MatrixBase<D>& r_im,
                                 const Eigen::MatrixBase<E>& t_re, const Eigen::MatrixBase<F>& t_im) {
  using Scalar = typename A::Scalar;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < h_re.size(); ++i) {
    const Scalar same = h_re(i) * t_re(i) + h_im(i) * t_im(i);
    const Scalar cross = h_re(i) * t_im(i) - h_im(i) * t_re(i);
    acc += same * r_re(i) + cross * r_im(i);
  }
  return acc;
}

/// 1/2 (<head(h), v_r, tail(t)> + <head(t), v_r^-1, tail(h)>)
template <typename A, typename B, typename C, typename D, typename E, typename F>
typename A::Scalar simple_score(const Eigen::MatrixBase<A>& h_head, const Eigen::MatrixBase<B>& h_tail,
                                const Eigen::MatrixBase<C>& v_r, const Eigen::MatrixBase<D>& v_inv,
                                const Eigen::MatrixBase<E>& t_head, const Eigen::MatrixBase<F>& t_tail) {
  using Scalar = typename A::Scalar;
  const Scalar forward = distmult_score(h_head, v_r, t_tail);
  const Scalar backward = distmult_score(t_head, v_inv, h_tail);
  return Scalar(0.5) * (forward + backward);
}

/// Score kernels bound to a table. Higher is more plausible for every family.
template <typename Scalar>
class BasicScoringModel {
 public:
  using Table = BasicEmbeddingTable<Scalar>;
  using Index = Eigen::Index;
  using Vector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  explicit BasicScoringModel(const Table& table) : table_(&table) {}

  ModelFamily family() const noexcept { return table_->family(); }
  const Table& table() const noexcept { return *table_; }

  Scalar score(const Triple& t) const { return score(t.head, t.relation, t.tail); }

  Scalar score(EntityId h, RelationId r, EntityId t) const {
    const Table& tb = *table_;
    switch (tb.family()) {
      case ModelFamily::TransE:
        return transe_score(tb.entity(h), tb.relation(r), tb.entity(t));
      case ModelFamily::DistMult:
        return distmult_score(tb.entity(h), tb.relation(r), tb.entity(t));
      case ModelFamily::ComplEx:
        return complex_score(tb.entity(h, 0), tb.entity(h, 1), tb.relation(r, 0), tb.relation(r, 1),
                             tb.entity(t, 0), tb.entity(t, 1));
      case ModelFamily::SimplE:
        return simple_score(tb.entity(h, 0), tb.entity(h, 1), tb.relation(r, 0), tb.relation(r, 1),
                            tb.entity(t, 0), tb.entity(t, 1));
    }
    return Scalar(0);
  }

  /// Scores `anchor` with its `side` entity replaced by each candidate in turn.
  /// Each entry equals score() of the substituted triple bit for bit.
  void score_candidates(const Triple& anchor, Side side, std::span<const EntityId> candidates,
                        std::vector<Scalar>& out) const {
    out.resize(candidates.size());
    Triple q = anchor;
    EntityId& slot = side == Side::Head ? q.head : q.tail;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      slot = candidates[i];
      out[i] = score(q);
    }
  }

 private:
  const Table* table_;
};

using ScoringModel = BasicScoringModel<double>;

/// d score / d row for every row one triple touches. A row may appear twice
/// (self-loops, SimplE's two slots of one entity); consumers must sum.
struct TripleGradient {
  struct Entry {
    Eigen::Index row;
    Eigen::RowVectorXd grad;
  };
  std::vector<Entry> entries;
};

/// Adds `scale * d score / d row` into `sink(row, vector)`. Avoids building a
/// TripleGradient in the training inner loop.
template <typename Sink>
void accumulate_gradient(const ScoringModel& model, const Triple& tr, double scale, Sink&& sink) {
  const EmbeddingTable& tb = model.table();
  const auto h = tr.head;
  const auto r = tr.relation;
  const auto t = tr.tail;
  switch (tb.family()) {
    case ModelFamily::TransE: {
      Eigen::RowVectorXd diff = tb.entity(h) + tb.relation(r) - tb.entity(t);
      const double norm = diff.norm();
      if (norm == 0.0) {
        diff.setZero();
      } else {
        diff *= -scale / norm;
      }
      sink(tb.entity_row(h), diff);
      sink(tb.relation_row(r), diff);
      sink(tb.entity_row(t), (-diff).eval());
      return;
    }
    case ModelFamily::DistMult: {
      const auto eh = tb.entity(h).array();
      const auto er = tb.relation(r).array();
      const auto et = tb.entity(t).array();
      sink(tb.entity_row(h), Eigen::RowVectorXd(scale * er * et));
      sink(tb.relation_row(r), Eigen::RowVectorXd(scale * eh * et));
      sink(tb.entity_row(t), Eigen::RowVectorXd(scale * eh * er));
      return;
    }
    case ModelFamily::ComplEx: {
      const auto a = tb.entity(h, 0).array();
      const auto b = tb.entity(h, 1).array();
      const auto c = tb.relation(r, 0).array();
      const auto d = tb.relation(r, 1).array();
      const auto e = tb.entity(t, 0).array();
      const auto f = tb.entity(t, 1).array();
      sink(tb.entity_row(h, 0), Eigen::RowVectorXd(scale * (c * e + d * f)));
      sink(tb.entity_row(h, 1), Eigen::RowVectorXd(scale * (c * f - d * e)));
      sink(tb.relation_row(r, 0), Eigen::RowVectorXd(scale * (a * e + b * f)));
      sink(tb.relation_row(r, 1), Eigen::RowVectorXd(scale * (a * f - b * e)));
      sink(tb.entity_row(t, 0), Eigen::RowVectorXd(scale * (a * c - b * d)));
      sink(tb.entity_row(t, 1), Eigen::RowVectorXd(scale * (a * d + b * c)));
      return;
    }
    case ModelFamily::SimplE: {
      const double half = 0.5 * scale;
      const auto hh = tb.entity(h, 0).array();
      const auto ht = tb.entity(h, 1).array();
      const auto vr = tb.relation(r, 0).array();
      const auto vi = tb.relation(r, 1).array();
      const auto th = tb.entity(t, 0).array();
      const auto tt = tb.entity(t, 1).array();
      sink(tb.entity_row(h, 0), Eigen::RowVectorXd(half * vr * tt));
      sink(tb.entity_row(t, 1), Eigen::RowVectorXd(half * hh * vr));
      sink(tb.relation_row(r, 0), Eigen::RowVectorXd(half * hh * tt));
      sink(tb.entity_row(t, 0), Eigen::RowVectorXd(half * vi * ht));
      sink(tb.entity_row(h, 1), Eigen::RowVectorXd(half * th * vi));
      sink(tb.relation_row(r, 1), Eigen::RowVectorXd(half * th * ht));
      return;
    }
  }
}

/// Analytic gradient of the score. TransE returns the zero subgradient where
/// h + r = t.
inline TripleGradient gradient(const ScoringModel& model, const Triple& t) {
  TripleGradient g;
  accumulate_gradient(model, t, 1.0, [&](Eigen::Index row, const Eigen::RowVectorXd& v) {
    g.entries.push_back({row, v});
  });
  return g;
}

}  // namespace hkge
