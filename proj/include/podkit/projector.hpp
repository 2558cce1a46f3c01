#pragma once

#include <cstdint>
#include <random>

#include "podkit/gram_space.hpp"
#include "podkit/linear_map.hpp"
#include "podkit/pod_engine.hpp"

namespace podkit {

enum class ProjectorFamily {
  pod_orthogonal,
  mapped_orthogonal,
  ritz,
  composite_L_PiX_Linv,
  composite_Linv_PiY_L,
};
const char* family_name(ProjectorFamily family);

struct Provenance {
  std::uint64_t basis_id = 0;
  std::uint64_t map_id = 0;    // 0 when no map was involved
  std::uint64_t piY_id = 0;    // the Y projector a composite was built from
};

/// Rank-r projection P x = R (D^T G x) with range basis R and dual basis D.
///
/// The Hilbert adjoint is P* y = D (R^T G y), so the factored form is closed
/// under adjoints.
class Projector {
 public:
  Projector(GramSpace space, Matrix range, Matrix dual, ProjectorFamily family, Provenance provenance);

  const GramSpace& space() const { return space_; }
  Index r() const { return range_.cols(); }
  const Matrix& range_basis() const { return range_; }
  const Matrix& dual_basis() const { return dual_; }
  ProjectorFamily family() const { return family_; }
  const Provenance& provenance() const { return provenance_; }
  std::uint64_t id() const { return id_; }

  Vector apply(const Vector& x) const;
  Matrix apply(const Matrix& x) const;
  Vector apply_adjoint(const Vector& y) const;
  /// Dense coordinate matrix R D^T G (diagnostics only).
  Matrix matrix() const;

 private:
  GramSpace space_;
  Matrix range_;
  Matrix dual_;
  ProjectorFamily family_;
  Provenance provenance_;
  std::uint64_t id_;
};

/// Orthogonal projection onto span{phi_1..phi_r}.
Projector pi_X(const PodBasis& basis, Index r);

/// Y-orthogonal projection onto span{L phi_1..L phi_r}.
Projector pi_Y_orthogonal(const PodBasis& basis, const LinearMap& map, Index r);

/// Continuity and ellipticity constants of a(u, v) = v^T A u on a space:
/// |a(u, v)| <= C_a |u| |v| and a(v, v) >= c_a |v|^2.
struct FormConstants {
  double continuity = 0.0;
  double ellipticity = 0.0;
  double bound() const { return continuity / ellipticity; }
};
FormConstants form_constants(const GramSpace& space, const Matrix& form);

/// Ritz projection onto span{L phi_k}: a(P y, v) = a(y, v) for v in the range.
Projector pi_Y_ritz(const PodBasis& basis, const LinearMap& map, const Matrix& form, Index r);

enum class ConstructionPath {
  direct,
  /// Dual functionals from the inverse-adjoint representations.
  adjoint_representation,
};

/// L Pi_r^X L^{-1} on Y.
Projector composite_L_piX_Linv(const LinearMap& map, const PodBasis& basis, Index r,
                               ConstructionPath path = ConstructionPath::direct);

/// L^{-1} Pi_r^Y L on X, for a Y projector built from the same basis and map.
Projector composite_Linv_piY_L(const LinearMap& map, const PodBasis& basis, const Projector& piY,
                               ConstructionPath path = ConstructionPath::direct);

/// Operator norm in the space norm (0 for rank 0).
double op_norm(const Projector& proj);

struct ProjectorDiagnostics {
  double idempotency = 0.0;   // max_x |P P x - P x| / |P x| over samples
  double self_adjointness = 0.0; // |P - P*|_F / |P|_F on the dense matrix
  double range_reproduction = 0.0; // max_k |P v_k - v_k| / |v_k|
  double norm = 0.0;
};
ProjectorDiagnostics diagnose(const Projector& proj, Index samples, std::mt19937_64& rng);

}  // namespace podkit
