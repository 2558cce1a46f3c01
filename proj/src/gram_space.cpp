#include "podkit/gram_space.hpp"

#include <algorithm>
#include <cmath>

#include "podkit/errors.hpp"
#include "podkit/kernels.hpp"

namespace podkit {

namespace {

constexpr double kSymmetryTol = 1e-13;
constexpr double kNegativeClamp = 1e-14;
constexpr double kOrthoDropTol = 1e-12;

void require_length(const GramSpace& space, Index n, const char* what) {
  if (n != space.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(n) + ", space '" + space.label() +
                                                  "' has dimension " + std::to_string(space.dim()));
  }
}

}  // namespace

GramSpace GramSpace::make(Matrix gram, std::string label) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "Gram matrix must be square and non-empty, got " +
                                                  std::to_string(gram.rows()) + "x" +
                                                  std::to_string(gram.cols()));
  }
  if (!gram.allFinite()) throw Error(ErrorCode::NotSymmetric, "Gram matrix has non-finite entries");

  const double scale = gram.cwiseAbs().maxCoeff();
  const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw Error(ErrorCode::NotSymmetric, "max |G - G^T| = " + std::to_string(asym) +
                                             " exceeds 1e-13 * max|G| for '" + label + "'");
  }
  Matrix sym = 0.5 * (gram + gram.transpose());

  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "Cholesky factorization hit a non-positive pivot for '" + label + "'");
  }
  Matrix chol = llt.matrixL();
  if ((chol.diagonal().array() <= 0.0).any()) {
    throw Error(ErrorCode::NotPositiveDefinite, "non-positive Cholesky pivot for '" + label + "'");
  }

  auto data = std::make_shared<Data>();
  data->identity = sym.isIdentity(0.0);
  data->gram = std::move(sym);
  data->chol = std::move(chol);
  data->label = std::move(label);
  return GramSpace(std::move(data));
}

GramSpace GramSpace::identity(Index dim, std::string label) {
  if (dim <= 0) throw Error(ErrorCode::DimensionMismatch, "identity space needs dim >= 1");
  return make(Matrix::Identity(dim, dim), std::move(label));
}

double GramSpace::inner(const Vector& u, const Vector& v) const {
  require_length(*this, u.size(), "u");
  require_length(*this, v.size(), "v");
  const auto n = static_cast<std::size_t>(dim());
  if (is_identity()) return kernels::active().dot(u.data(), v.data(), n);
  return kernels::active().bilinear(gram().data(), n, u.data(), v.data());
}

double GramSpace::norm(const Vector& u) const {
  const double q = inner(u, u);
  if (q >= 0.0) return std::sqrt(q);
  const double euclid = u.squaredNorm();
  if (q >= -kNegativeClamp * euclid) return 0.0;
  throw Error(ErrorCode::NegativeQuadraticForm,
              "u^T G u = " + std::to_string(q) + " in space '" + label() + "'");
}

Vector GramSpace::apply_gram(const Vector& u) const {
  require_length(*this, u.size(), "u");
  if (is_identity()) return u;
  Vector out(dim());
  kernels::active().gemv(gram().data(), static_cast<std::size_t>(dim()),
                         static_cast<std::size_t>(dim()), u.data(), out.data());
  return out;
}

Matrix GramSpace::apply_gram(const Matrix& u) const {
  require_length(*this, u.rows(), "matrix rows");
  if (is_identity()) return u;
  return gram() * u;
}

Matrix GramSpace::solve_gram(const Matrix& b) const {
  require_length(*this, b.rows(), "right-hand side rows");
  if (is_identity()) return b;
  Matrix y = chol().triangularView<Eigen::Lower>().solve(b);
  return chol().transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix GramSpace::factor_transpose_times(const Matrix& a) const {
  require_length(*this, a.rows(), "matrix rows");
  if (is_identity()) return a;
  return chol().transpose().triangularView<Eigen::Upper>() * a;
}

Matrix GramSpace::orthonormalize(const Matrix& vectors) const {
  require_length(*this, vectors.rows(), "vectors rows");
  const Index cols = vectors.cols();
  Matrix q(dim(), cols);

  double largest = 0.0;
  for (Index j = 0; j < cols; ++j) largest = std::max(largest, norm(vectors.col(j)));
  if (cols > 0 && largest == 0.0) {
    throw Error(ErrorCode::RankDeficient, "all input vectors are zero");
  }

  for (Index j = 0; j < cols; ++j) {
    Vector v = vectors.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        const Vector qi = q.col(i);
        v -= inner(v, qi) * qi;
      }
    }
    const double pivot = norm(v);
    if (pivot <= kOrthoDropTol * largest) {
      throw Error(ErrorCode::RankDeficient, "column " + std::to_string(j) +
                                                " is linearly dependent on its predecessors in '" +
                                                label() + "'");
    }
    q.col(j) = v / pivot;
  }
  return q;
}

Matrix adjoint_matrix(const GramSpace& from, const GramSpace& to, const Matrix& a) {
  if (a.rows() != to.dim() || a.cols() != from.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    ", expected " + std::to_string(to.dim()) + "x" + std::to_string(from.dim()));
  }
  return from.solve_gram(a.transpose() * to.gram());
}

double operator_norm(const GramSpace& from, const GramSpace& to, const Matrix& a) {
  if (a.rows() != to.dim() || a.cols() != from.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "operator_norm: operator shape does not match spaces");
  }
  if (a.isZero(0.0)) return 0.0;
  Matrix lhs = a.transpose() * to.gram() * a;
  lhs = 0.5 * (lhs + lhs.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(lhs, from.gram(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "generalized eigensolver failed in operator_norm");
  }
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

PencilBounds pencil_bounds(const GramSpace& space, const Matrix& symmetric) {
  if (symmetric.rows() != space.dim() || symmetric.cols() != space.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "pencil_bounds: matrix shape does not match space");
  }
  // C^{-1} B C^{-T}
  const auto lower = space.chol().triangularView<Eigen::Lower>();
  Matrix t = lower.solve(symmetric);
  Matrix reduced = lower.solve(t.transpose()).transpose();
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(reduced, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "eigensolver failed in pencil_bounds");
  }
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

}  // namespace podkit
