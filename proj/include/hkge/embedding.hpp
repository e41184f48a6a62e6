#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "hkge/error.hpp"
#include "hkge/types.hpp"

namespace hkge {

enum class ModelFamily { TransE, DistMult, ComplEx, SimplE };

ModelFamily parse_family(std::string_view name);
std::string_view to_string(ModelFamily f);

/// ComplEx keeps (real, imaginary) and SimplE keeps (head, tail) rows per entity.
constexpr int entity_slots(ModelFamily f) noexcept {
  return f == ModelFamily::ComplEx || f == ModelFamily::SimplE ? 2 : 1;
}
/// ComplEx keeps (real, imaginary) and SimplE keeps (v_r, v_r^-1) rows per
/// relation.
constexpr int relation_slots(ModelFamily f) noexcept { return entity_slots(f); }

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// All trainable rows of one model plus their Adagrad accumulators.
///
/// Rows are laid out slot-major: entity slot s of entity e lives at
/// `s * num_entities + e`, followed by relation slot s of relation r at
/// `entity_rows + s * num_relations + r`. Keeping each slot contiguous lets a
/// type's candidate rows be walked without striding over the partner slot.
template <typename Scalar>
class BasicEmbeddingTable {
 public:
  using Matrix = RowMatrix<Scalar>;
  using Index = Eigen::Index;

  BasicEmbeddingTable() = default;
  BasicEmbeddingTable(ModelFamily family, std::size_t num_entities, std::size_t num_relations,
                      int dim)
      : family_(family),
        num_entities_(static_cast<Index>(num_entities)),
        num_relations_(static_cast<Index>(num_relations)),
        dim_(dim) {
    if (dim <= 0) throw ConfigError("embedding dimension must be positive");
    const Index rows = num_entities_ * entity_slots(family) + num_relations_ * relation_slots(family);
    params_ = Matrix::Zero(rows, dim);
    accum_ = Matrix::Zero(rows, dim);
  }

  ModelFamily family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  Index num_entities() const noexcept { return num_entities_; }
  Index num_relations() const noexcept { return num_relations_; }
  Index rows() const noexcept { return params_.rows(); }

  Index entity_row(EntityId e, int slot = 0) const noexcept {
    return static_cast<Index>(slot) * num_entities_ + e;
  }
  Index relation_row(RelationId r, int slot = 0) const noexcept {
    return num_entities_ * entity_slots(family_) + static_cast<Index>(slot) * num_relations_ + r;
  }
  bool is_entity_row(Index row) const noexcept { return row < num_entities_ * entity_slots(family_); }
  /// Entity owning a row; only meaningful when is_entity_row(row).
  EntityId entity_of_row(Index row) const noexcept {
    return static_cast<EntityId>(row % num_entities_);
  }

  auto entity(EntityId e, int slot = 0) { return params_.row(entity_row(e, slot)); }
  auto entity(EntityId e, int slot = 0) const { return params_.row(entity_row(e, slot)); }
  auto relation(RelationId r, int slot = 0) { return params_.row(relation_row(r, slot)); }
  auto relation(RelationId r, int slot = 0) const { return params_.row(relation_row(r, slot)); }

  Matrix& params() noexcept { return params_; }
  const Matrix& params() const noexcept { return params_; }
  Matrix& accumulators() noexcept { return accum_; }
  const Matrix& accumulators() const noexcept { return accum_; }

  bool all_finite() const { return params_.allFinite() && accum_.allFinite(); }

  friend bool operator==(const BasicEmbeddingTable& a, const BasicEmbeddingTable& b) {
    return a.family_ == b.family_ && a.num_entities_ == b.num_entities_ &&
           a.num_relations_ == b.num_relations_ && a.dim_ == b.dim_ && a.params_ == b.params_ &&
           a.accum_ == b.accum_;
  }

 private:
  ModelFamily family_ = ModelFamily::DistMult;
  Index num_entities_ = 0;
  Index num_relations_ = 0;
  int dim_ = 0;
  Matrix params_;
  Matrix accum_;
};

using EmbeddingTable = BasicEmbeddingTable<double>;

/// Row-labelled dense vectors, the interchange format for anchors, exports
/// and checkpoints.
struct VectorFile {
  std::vector<std::string> ids;
  RowMatrix<double> values;

  Eigen::Index dim() const noexcept { return values.cols(); }
  std::size_t size() const noexcept { return ids.size(); }
  /// Row index by id; built lazily on first call.
  std::optional<Eigen::Index> find(std::string_view id) const;

 private:
  mutable std::unordered_map<std::string, Eigen::Index> index_;
};

/// Parses `count dim` followed by `row_id v1 ... vd` lines. Lines starting with
/// `#` are comments.
VectorFile read_vector_file(const std::filesystem::path& path);

/// Writes shortest round-trip decimals so a read reproduces every double
/// exactly. `comment` lines are emitted first, each prefixed with `# `.
void write_vector_file(const VectorFile& file, const std::filesystem::path& path,
                       const std::vector<std::string>& comment = {});

inline constexpr double kInitGamma = 12.0;
inline constexpr double kInitEpsilon = 2.0;

/// Half-width of the uniform initialization interval, gamma + epsilon / d.
inline double init_bound(double gamma, double epsilon, int dim) {
  return gamma + epsilon / static_cast<double>(dim);
}

/// Fills every parameter i.i.d. uniform on [-b, b] with b = init_bound and
/// zeroes the accumulators.
void init_random(EmbeddingTable& table, std::uint64_t seed, double gamma = kInitGamma,
                 double epsilon = kInitEpsilon);

/// Per-entity row id in a vector file; nullopt leaves the entity on its
/// random initialization.
using VectorMapping = std::vector<std::optional<std::string>>;

/// Random-initializes the table from `fallback_seed`, then overwrites every
/// mapped entity's rows (all slots) with its file vector. Relation rows keep
/// their random values.
void init_from_vectors(EmbeddingTable& table, const VectorFile& vectors,
                       const VectorMapping& mapping, std::uint64_t fallback_seed,
                       double gamma = kInitGamma, double epsilon = kInitEpsilon);

}  // namespace hkge
