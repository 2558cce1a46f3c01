#pragma once

#include <cstdint>
#include <filesystem>

#include "podkit/gram_space.hpp"
#include "podkit/snapshot_io.hpp"

namespace podkit {

enum class PodMethod {
  /// Thin SVD of C^T W Gamma^{1/2}; keeps relative accuracy in small tails.
  svd,
  /// Eigendecomposition of the s x s correlation matrix, or of the dim x dim
  /// operator K K* when dim < s.
  snapshots,
};

struct PodOptions {
  double drop_tol = 1e-12;  // relative to the largest POD eigenvalue
  PodMethod method = PodMethod::svd;
};

/// Singular triplets (sigma_k, f_k, phi_k) of the POD operator K : S -> X.
///
/// The svd method keeps all min(dim, s) computed triplets, including those
/// below the drop tolerance, so that tail sums over k > r see the complete
/// spectrum. rank() counts only the triplets above the tolerance.
class PodBasis {
 public:
  PodBasis(Vector sigma, Matrix modes, Matrix right_vectors, Index rank, double drop_tol,
           GramSpace space, Vector weights);

  const Vector& sigma() const { return sigma_; }
  Vector lambda() const { return sigma_.array().square(); }
  const Matrix& modes() const { return modes_; }
  const Matrix& right_vectors() const { return right_; }
  Index rank() const { return rank_; }
  Index stored() const { return sigma_.size(); }
  double drop_tol() const { return drop_tol_; }
  const GramSpace& space() const { return space_; }
  const Vector& weights() const { return weights_; }
  std::uint64_t id() const { return id_; }

  /// sum_{k > r} sigma_k^2 over the stored triplets.
  double tail_energy(Index r) const;
  /// Throws RankExceeded when r > rank() and InvalidArgument when r < 0.
  void require_rank(Index r) const;

 private:
  Vector sigma_;
  Matrix modes_;
  Matrix right_;
  Index rank_;
  double drop_tol_;
  GramSpace space_;
  Vector weights_;
  std::uint64_t id_;
};

PodBasis compute_pod(const SnapshotSet& set, const GramSpace& space, const PodOptions& options = {});

/// K f = sum_j gamma_j f_j w_j
Vector apply_K(const SnapshotSet& set, const Vector& f);
/// (K* x)_j = (x, w_j)_X
Vector apply_K_adjoint(const SnapshotSet& set, const GramSpace& space, const Vector& x);

/// (u, v)_S = sum_j gamma_j u_j v_j
double inner_S(const Vector& weights, const Vector& u, const Vector& v);

/// sum_{k <= r} (x, phi_k)_X phi_k, requires 1 <= r <= rank.
Vector project_X(const PodBasis& basis, Index r, const Vector& x);

/// sum_j gamma_j |w_j|_X^2
double hs_norm_sq(const SnapshotSet& set, const GramSpace& space);

struct OptimalityReport {
  Index r = 0;
  Index trials = 0;
  double pod_error = 0.0;        // tail sum of sigma_k^2
  double pod_self_error = 0.0;   // E_r evaluated on the POD approximant itself
  double min_competitor = 0.0;   // smallest E_r among random competitors
  Index violations = 0;          // competitors below pod_error - 1e-10
  bool passed = false;
};

/// Compares the POD error against random rank-r approximations
/// w_j^r = sum_k a_k s_{k,j} eta_k. Three competitor flavors rotate: fully
/// random (a, s, eta), best fit in a random subspace, and small perturbations
/// of the POD solution.
OptimalityReport optimality_oracle(const SnapshotSet& set, const GramSpace& space, Index r,
                                   Index trials, std::uint64_t seed, const PodOptions& options = {});

void save_basis(const PodBasis& basis, const std::filesystem::path& json_path);
PodBasis load_basis(const std::filesystem::path& json_path, const GramSpace& space);

}  // namespace podkit
