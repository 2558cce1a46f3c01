#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

namespace podkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A finite-dimensional real Hilbert space in coordinates.
///
/// The inner product is (u, v) = v^T G u for a symmetric positive-definite Gram
/// matrix G. G is factored once as G = C C^T (C lower triangular) and every
/// application of G^{-1} is a pair of triangular solves. Instances are immutable
/// and cheap to copy; copies share the factorization.
class GramSpace {
 public:
  /// Symmetry is checked at 1e-13 relative to max|G| and the accepted matrix is
  /// replaced by (G + G^T) / 2 before factoring.
  static GramSpace make(Matrix gram, std::string label);
  static GramSpace identity(Index dim, std::string label = "identity");

  Index dim() const { return data_->gram.rows(); }
  const Matrix& gram() const { return data_->gram; }
  /// Lower-triangular Cholesky factor C with C C^T = G.
  const Matrix& chol() const { return data_->chol; }
  const std::string& label() const { return data_->label; }
  bool is_identity() const { return data_->identity; }

  double inner(const Vector& u, const Vector& v) const;
  /// sqrt(inner(u, u)); quadratic forms in [-1e-14 |u|^2, 0) are treated as zero.
  double norm(const Vector& u) const;

  Vector apply_gram(const Vector& u) const;
  Matrix apply_gram(const Matrix& u) const;
  /// G^{-1} b via the cached factor.
  Matrix solve_gram(const Matrix& b) const;
  /// C^T a, so that |C^T a|_F^2 = sum over columns of |a_j|^2 in this space.
  Matrix factor_transpose_times(const Matrix& a) const;

  /// Modified Gram-Schmidt (two passes) in this inner product.
  Matrix orthonormalize(const Matrix& vectors) const;

  /// Same underlying object (not just equal values).
  bool shares_storage_with(const GramSpace& other) const { return data_ == other.data_; }

 private:
  struct Data {
    Matrix gram;
    Matrix chol;
    std::string label;
    bool identity = false;
  };
  explicit GramSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

inline GramSpace make_space(Matrix gram, std::string label) {
  return GramSpace::make(std::move(gram), std::move(label));
}

/// Coordinate matrix of the Hilbert adjoint of A : from -> to, i.e.
/// G_from^{-1} A^T G_to, so that (A u, v)_to = (u, A* v)_from.
Matrix adjoint_matrix(const GramSpace& from, const GramSpace& to, const Matrix& a);

/// Operator norm of A : from -> to in the two space norms. Computed as the
/// square root of the largest eigenvalue of the symmetric-definite pencil
/// (A^T G_to A, G_from).
double operator_norm(const GramSpace& from, const GramSpace& to, const Matrix& a);

/// Extreme eigenvalues of the pencil (B, G) for symmetric B.
struct PencilBounds {
  double smallest;
  double largest;
};
PencilBounds pencil_bounds(const GramSpace& space, const Matrix& symmetric);

}  // namespace podkit
