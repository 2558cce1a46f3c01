#include "podkit/projector.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <atomic>

#include "podkit/errors.hpp"

namespace podkit {

namespace {

std::atomic<std::uint64_t> next_projector_id{1};

void check_map_basis(const LinearMap& map, const PodBasis& basis) {
  if (map.domain().dim() != basis.space().dim()) {
    throw Error(ErrorCode::DimensionMismatch, "map domain does not match the POD space");
  }
}

Matrix mapped_modes(const PodBasis& basis, const LinearMap& map, Index r) {
  basis.require_rank(r);
  check_map_basis(map, basis);
  return map.matrix() * basis.modes().leftCols(r);
}

// C^{-1} B C^{-T}
Matrix whiten(const GramSpace& space, const Matrix& b) {
  if (space.is_identity()) return b;
  const auto c = space.chol().triangularView<Eigen::Lower>();
  Matrix t = c.solve(b);
  return c.solve(t.transpose()).transpose();
}

}  // namespace

const char* family_name(ProjectorFamily family) {
  switch (family) {
    case ProjectorFamily::pod_orthogonal: return "pod_orthogonal";
    case ProjectorFamily::mapped_orthogonal: return "mapped_orthogonal";
    case ProjectorFamily::ritz: return "ritz";
    case ProjectorFamily::composite_L_PiX_Linv: return "composite_L_PiX_Linv";
    case ProjectorFamily::composite_Linv_PiY_L: return "composite_Linv_PiY_L";
  }
  return "unknown";
}

Projector::Projector(GramSpace space, Matrix range, Matrix dual, ProjectorFamily family, Provenance provenance)
    : space_(std::move(space)),
      range_(std::move(range)),
      dual_(std::move(dual)),
      family_(family),
      provenance_(provenance),
      id_(next_projector_id.fetch_add(1)) {
  if (range_.rows() != space_.dim() || dual_.rows() != space_.dim() || range_.cols() != dual_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "projector factors do not match the space");
  }
}

Vector Projector::apply(const Vector& x) const {
  if (x.size() != space_.dim()) throw Error(ErrorCode::DimensionMismatch, "projector apply: wrong length");
  const Vector coeff = dual_.transpose() * space_.apply_gram(x);
  return range_ * coeff;
}

Matrix Projector::apply(const Matrix& x) const {
  if (x.rows() != space_.dim()) throw Error(ErrorCode::DimensionMismatch, "projector apply: wrong rows");
  return range_ * (dual_.transpose() * space_.apply_gram(x));
}

Vector Projector::apply_adjoint(const Vector& y) const {
  if (y.size() != space_.dim()) throw Error(ErrorCode::DimensionMismatch, "projector adjoint: wrong length");
  const Vector coeff = range_.transpose() * space_.apply_gram(y);
  return dual_ * coeff;
}

Matrix Projector::matrix() const { return range_ * (dual_.transpose() * space_.gram()); }

Projector pi_X(const PodBasis& basis, Index r) {
  basis.require_rank(r);
  Matrix phi = basis.modes().leftCols(r);
  return Projector(basis.space(), phi, phi, ProjectorFamily::pod_orthogonal, {basis.id(), 0, 0});
}

Projector pi_Y_orthogonal(const PodBasis& basis, const LinearMap& map, Index r) {
  const Matrix v = mapped_modes(basis, map, r);
  Matrix q;
  try {
    q = map.codomain().orthonormalize(v);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
    throw Error(ErrorCode::RankDeficientImage, "mapped modes L phi_1..L phi_" + std::to_string(r) +
                                                   " are linearly dependent in Y");
  }
  return Projector(map.codomain(), q, q, ProjectorFamily::mapped_orthogonal, {basis.id(), map.id(), 0});
}

FormConstants form_constants(const GramSpace& space, const Matrix& form) {
  if (form.rows() != space.dim() || form.cols() != space.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "form matrix does not match the space");
  }
  FormConstants fc;
  const Matrix sym = 0.5 * (form + form.transpose());
  fc.ellipticity = pencil_bounds(space, sym).smallest;
  const Matrix w = whiten(space, form);
  fc.continuity = Eigen::JacobiSVD<Matrix>(w).singularValues()[0];
  return fc;
}

Projector pi_Y_ritz(const PodBasis& basis, const LinearMap& map, const Matrix& form, Index r) {
  const GramSpace& y = map.codomain();
  const FormConstants fc = form_constants(y, form);
  if (!(fc.ellipticity > 1e-14 * std::max(fc.continuity, 1e-300))) {
    throw Error(ErrorCode::FormNotElliptic,
                "smallest eigenvalue of the symmetric part relative to the Y gram is " +
                    std::to_string(fc.ellipticity));
  }
  const Matrix v = mapped_modes(basis, map, r);
  // B_ij = a(v_j, v_i)
  const Matrix b = v.transpose() * form * v;
  if (r > 0) {
    Eigen::JacobiSVD<Matrix> svd(b);
    const auto& sv = svd.singularValues();
    if (!(sv[r - 1] > 1e-13 * sv[0])) {
      throw Error(ErrorCode::SingularRitzSystem, "Ritz system matrix is numerically singular");
    }
  }
  // coefficients c = B^{-1} V^T A y = D^T G y  =>  D = G^{-1} A^T V B^{-T}
  Eigen::FullPivLU<Matrix> lu(b);
  const Matrix vta = v.transpose() * form;
  const Matrix dual = y.solve_gram(Matrix(lu.solve(vta).transpose()));
  return Projector(y, v, dual, ProjectorFamily::ritz, {basis.id(), map.id(), 0});
}

Projector composite_L_piX_Linv(const LinearMap& map, const PodBasis& basis, Index r, ConstructionPath path) {
  if (!map.invertible()) throw Error(ErrorCode::NotInvertible, "L Pi^X L^{-1} needs an invertible map");
  const Matrix v = mapped_modes(basis, map, r);
  const auto phi = basis.modes().leftCols(r);
  Matrix dual;
  if (path == ConstructionPath::direct) {
    // representer of y -> (L^{-1} y, phi_k)_X: G_Y d = L^{-T} G_X phi_k
    const Matrix rhs = map.domain().apply_gram(Matrix(phi));
    const Matrix z = Eigen::FullPivLU<Matrix>(map.matrix().transpose()).solve(rhs);
    dual = map.codomain().solve_gram(z);
  } else {
    dual = map.inverse_adjoint() * phi;
  }
  return Projector(map.codomain(), v, dual, ProjectorFamily::composite_L_PiX_Linv, {basis.id(), map.id(), 0});
}

Projector composite_Linv_piY_L(const LinearMap& map, const PodBasis& basis, const Projector& piY,
                               ConstructionPath path) {
  if (!map.invertible()) throw Error(ErrorCode::NotInvertible, "L^{-1} Pi^Y L needs an invertible map");
  const auto& prov = piY.provenance();
  if (prov.basis_id != basis.id() || prov.map_id != map.id()) {
    throw Error(ErrorCode::ProvenanceMismatch, "Y projector was built from a different basis or map");
  }
  const Index r = piY.r();
  const Matrix v = mapped_modes(basis, map, r);
  const auto phi = basis.modes().leftCols(r);
  const GramSpace& x = map.domain();
  const GramSpace& y = map.codomain();

  // z_k = (Pi^Y)* applied to the Y-side biorthogonal partner of L phi_k
  Matrix partners;
  if (path == ConstructionPath::direct) {
    // coordinates alpha of Pi^Y L x in the basis v: alpha = M^{-1} V^T G_Y Pi^Y L x
    const Matrix gv = y.apply_gram(v);
    const Matrix m = v.transpose() * gv;
    partners = Eigen::LLT<Matrix>(m).solve(v.transpose()).transpose();  // V M^{-1}
  } else {
    partners = map.inverse_adjoint() * phi;  // L^{-*} phi_k
  }
  Matrix z(y.dim(), r);
  for (Index k = 0; k < r; ++k) z.col(k) = piY.apply_adjoint(partners.col(k));
  const Matrix dual = adjoint_matrix(x, y, map.matrix()) * z;  // L* z
  Provenance p{basis.id(), map.id(), piY.id()};
  return Projector(x, Matrix(phi), dual, ProjectorFamily::composite_Linv_PiY_L, p);
}

double op_norm(const Projector& proj) {
  if (proj.r() == 0) return 0.0;
  return operator_norm(proj.space(), proj.space(), proj.matrix());
}

ProjectorDiagnostics diagnose(const Projector& proj, Index samples, std::mt19937_64& rng) {
  ProjectorDiagnostics d;
  const GramSpace& sp = proj.space();
  std::normal_distribution<double> normal;
  for (Index t = 0; t < samples; ++t) {
    const Vector x = Vector::NullaryExpr(sp.dim(), [&](Index) { return normal(rng); });
    const Vector px = proj.apply(x);
    const double scale = sp.norm(px);
    if (scale > 0.0) d.idempotency = std::max(d.idempotency, sp.norm(proj.apply(px) - px) / scale);
  }
  const Matrix p = proj.matrix();
  const Matrix padj = adjoint_matrix(sp, sp, p);
  const double pn = p.norm();
  d.self_adjointness = pn > 0.0 ? (p - padj).norm() / pn : 0.0;
  for (Index k = 0; k < proj.r(); ++k) {
    const Vector v = proj.range_basis().col(k);
    const double vn = sp.norm(v);
    if (vn > 0.0) d.range_reproduction = std::max(d.range_reproduction, sp.norm(proj.apply(v) - v) / vn);
  }
  d.norm = op_norm(proj);
  return d;
}

}  // namespace podkit
