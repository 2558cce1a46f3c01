#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "podkit/gram_space.hpp"
#include "podkit/pod_engine.hpp"
#include "podkit/snapshot_io.hpp"

namespace podkit {

enum class MapKind { general, embedding, derivative, custom };
const char* map_kind_name(MapKind kind);

/// L : X -> Y in coordinates. The inverse is present only when L is square,
/// has SVD condition number <= 1e12 and the computed inverse reproduces the
/// identity on both sides to 1e-8 in Frobenius norm.
class LinearMap {
 public:
  /// Attempts to certify an inverse for square matrices.
  static LinearMap make(GramSpace domain, GramSpace codomain, Matrix matrix, MapKind kind);
  /// Never certifies an inverse (for maps known to be singular).
  static LinearMap make_noninvertible(GramSpace domain, GramSpace codomain, Matrix matrix, MapKind kind);

  const GramSpace& domain() const { return domain_; }
  const GramSpace& codomain() const { return codomain_; }
  const Matrix& matrix() const { return matrix_; }
  MapKind kind() const { return kind_; }
  bool invertible() const { return inverse_.has_value(); }
  /// Throws NotInvertible.
  const Matrix& inverse() const;
  std::uint64_t id() const { return id_; }

  Vector apply(const Vector& x) const;
  Vector apply_inverse(const Vector& y) const;
  /// L* : Y -> X
  Matrix adjoint() const;
  /// L^{-*} = (L^{-1})* : X -> Y
  Matrix inverse_adjoint() const;

 private:
  LinearMap(GramSpace domain, GramSpace codomain, Matrix matrix, MapKind kind, std::optional<Matrix> inverse);

  GramSpace domain_;
  GramSpace codomain_;
  Matrix matrix_;
  MapKind kind_;
  std::optional<Matrix> inverse_;
  std::uint64_t id_;
};

/// Columns L w_j with the same weights, so K^Y = L K.
SnapshotSet induced_snapshots(const SnapshotSet& set, const LinearMap& map);

struct RankRelation {
  Index s_X = 0;
  Index s_Y = 0;                  // rank of L on the retained X modes, cutoff sqrt(drop_tol) |L|
  Index s_Y_own = 0;              // basis_Y.rank(), relative to its own sigma_1
  bool relation_holds = false;    // s_Y <= s_X
  bool equality_expected = false; // map invertible
  bool equality_holds = false;
};
RankRelation rank_relation_check(const PodBasis& basis_X, const PodBasis& basis_Y, const LinearMap& map);

/// All POD eigenvalues nonzero, i.e. rank == dim of the space.
bool eigs_all_nonzero(const PodBasis& basis, const GramSpace& space);

struct MapReport {
  Index dim_X = 0;
  Index dim_Y = 0;
  double op_norm = 0.0;       // |L| in the space norms; grows under refinement for derivatives
  Index numerical_rank = 0;
  bool injective = false;
  bool surjective = false;
  bool invertible = false;
};
MapReport describe(const LinearMap& map);

/// Map description:
///   {"identity": n} | {"diag": [...]} | {"matrix": path}
///   | {"derivative_1d": {"nodes": n, "scheme": "forward"|"centered", "blocks": k}}
///   | {"embedding": {"from": "mass", "to": "stiffness+mass", "nodes": n}}
/// An optional "codomain" gram spec overrides the default codomain. The
/// derivative map defaults to the element-wise L2 gram; the others default to
/// the domain space.
LinearMap map_from_spec(const nlohmann::json& spec, const GramSpace& domain,
                        const std::filesystem::path& base_dir);

}  // namespace podkit
