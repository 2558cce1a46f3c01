#include "podkit/linear_map.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <atomic>
#include <cmath>

#include "podkit/csv.hpp"
#include "podkit/errors.hpp"
#include "podkit/fem_1d.hpp"

namespace podkit {

namespace {

std::atomic<std::uint64_t> next_map_id{1};

constexpr double kMaxCondition = 1e12;
constexpr double kInverseResidual = 1e-8;

std::optional<Matrix> certify_inverse(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) return std::nullopt;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 0.0) || sv[0] / sv[sv.size() - 1] > kMaxCondition) return std::nullopt;
  Matrix inv = Eigen::FullPivLU<Matrix>(a).inverse();
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  if ((a * inv - id).norm() > kInverseResidual || (inv * a - id).norm() > kInverseResidual) {
    return std::nullopt;
  }
  return inv;
}

// singular values of L measured in the space norms: C_Y^T L C_X^{-T}
Vector weighted_singular_values(const LinearMap& map) {
  Matrix t = map.codomain().factor_transpose_times(map.matrix());
  const auto& dom = map.domain();
  if (!dom.is_identity()) {
    // right-multiply by C_X^{-T}: solve C_X t'^T = t^T
    t = dom.chol().triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  }
  return Eigen::JacobiSVD<Matrix>(t).singularValues();
}

}  // namespace

const char* map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::general: return "general";
    case MapKind::embedding: return "embedding";
    case MapKind::derivative: return "derivative";
    case MapKind::custom: return "custom";
  }
  return "unknown";
}

LinearMap::LinearMap(GramSpace domain, GramSpace codomain, Matrix matrix, MapKind kind,
                     std::optional<Matrix> inverse)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      matrix_(std::move(matrix)),
      kind_(kind),
      inverse_(std::move(inverse)),
      id_(next_map_id.fetch_add(1)) {}

LinearMap LinearMap::make(GramSpace domain, GramSpace codomain, Matrix matrix, MapKind kind) {
  auto map = make_noninvertible(std::move(domain), std::move(codomain), std::move(matrix), kind);
  map.inverse_ = certify_inverse(map.matrix_);
  return map;
}

LinearMap LinearMap::make_noninvertible(GramSpace domain, GramSpace codomain, Matrix matrix, MapKind kind) {
  if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "map matrix is " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                    ", spaces need " + std::to_string(codomain.dim()) + "x" + std::to_string(domain.dim()));
  }
  if (!matrix.allFinite()) throw Error(ErrorCode::InvalidArgument, "map matrix has non-finite entries");
  return LinearMap(std::move(domain), std::move(codomain), std::move(matrix), kind, std::nullopt);
}

const Matrix& LinearMap::inverse() const {
  if (!inverse_) throw Error(ErrorCode::NotInvertible, std::string(map_kind_name(kind_)) + " map has no certified inverse");
  return *inverse_;
}

Vector LinearMap::apply(const Vector& x) const {
  if (x.size() != domain_.dim()) throw Error(ErrorCode::DimensionMismatch, "map apply: wrong length");
  return matrix_ * x;
}

Vector LinearMap::apply_inverse(const Vector& y) const {
  const Matrix& inv = inverse();
  if (y.size() != codomain_.dim()) throw Error(ErrorCode::DimensionMismatch, "map apply_inverse: wrong length");
  return inv * y;
}

Matrix LinearMap::adjoint() const { return adjoint_matrix(domain_, codomain_, matrix_); }

Matrix LinearMap::inverse_adjoint() const { return adjoint_matrix(codomain_, domain_, inverse()); }

SnapshotSet induced_snapshots(const SnapshotSet& set, const LinearMap& map) {
  if (set.space_dim() != map.domain().dim()) {
    throw Error(ErrorCode::DimensionMismatch, "snapshots do not live in the map's domain");
  }
  return set.with_data(map.matrix() * set.data());
}

RankRelation rank_relation_check(const PodBasis& basis_X, const PodBasis& basis_Y, const LinearMap& map) {
  RankRelation rel;
  rel.s_X = basis_X.rank();
  rel.s_Y_own = basis_Y.rank();
  // rank of L K_r with K_r the rank-s_X truncation of K, i.e. the rank of L on span{phi_k}
  const Vector sv = weighted_singular_values(map);
  const double floor = std::sqrt(basis_X.drop_tol()) * (sv.size() ? sv[0] : 0.0);
  if (rel.s_X > 0) {
    const Matrix t = map.codomain().factor_transpose_times(map.matrix() * basis_X.modes().leftCols(rel.s_X));
    const Vector restricted = Eigen::JacobiSVD<Matrix>(t).singularValues();
    for (Index k = 0; k < restricted.size(); ++k)
      if (restricted[k] > floor) ++rel.s_Y;
  }
  rel.relation_holds = rel.s_Y <= rel.s_X;
  rel.equality_expected = map.invertible();
  rel.equality_holds = rel.s_X == rel.s_Y;
  return rel;
}

bool eigs_all_nonzero(const PodBasis& basis, const GramSpace& space) { return basis.rank() == space.dim(); }

MapReport describe(const LinearMap& map) {
  MapReport rep;
  rep.dim_X = map.domain().dim();
  rep.dim_Y = map.codomain().dim();
  const Vector sv = weighted_singular_values(map);
  rep.op_norm = sv.size() ? sv[0] : 0.0;
  const double floor = 1e-12 * std::max<double>(static_cast<double>(std::max(rep.dim_X, rep.dim_Y)), 1.0) * rep.op_norm;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv[k] > floor) ++rep.numerical_rank;
  rep.injective = rep.numerical_rank == rep.dim_X;
  rep.surjective = rep.numerical_rank == rep.dim_Y;
  rep.invertible = map.invertible();
  return rep;
}

namespace {

Matrix centered_derivative(Index nodes) {
  const double h = 1.0 / static_cast<double>(nodes - 1);
  Matrix d = Matrix::Zero(nodes, nodes);
  d(0, 0) = -1.0 / h;
  d(0, 1) = 1.0 / h;
  for (Index i = 1; i + 1 < nodes; ++i) {
    d(i, i - 1) = -0.5 / h;
    d(i, i + 1) = 0.5 / h;
  }
  d(nodes - 1, nodes - 2) = -1.0 / h;
  d(nodes - 1, nodes - 1) = 1.0 / h;
  return d;
}

GramSpace named_fem_space(const std::string& name, Index nodes) {
  if (name == "mass" || name == "L2") return gram_from_spec(nlohmann::json{{"fem_mass", nodes}}, nodes, {});
  if (name == "stiffness+mass" || name == "mass+stiffness" || name == "H1") {
    return gram_from_spec(nlohmann::json{{"fem_h1", nodes}}, nodes, {});
  }
  if (name == "stiffness") return gram_from_spec(nlohmann::json{{"fem_stiffness", nodes}}, nodes, {});
  throw Error(ErrorCode::MalformedManifest, "unknown embedding space '" + name + "'");
}

}  // namespace

LinearMap map_from_spec(const nlohmann::json& spec, const GramSpace& domain, const std::filesystem::path& base_dir) {
  if (!spec.is_object()) throw Error(ErrorCode::MalformedManifest, "map spec must be a JSON object");
  const Index n = domain.dim();
  std::optional<GramSpace> codomain;
  try {
    if (spec.contains("identity")) {
      const Index k = spec.at("identity").get<Index>();
      if (k != n) throw Error(ErrorCode::DimensionMismatch, "identity map size differs from domain");
      Matrix m = Matrix::Identity(n, n);
      codomain = spec.contains("codomain") ? gram_from_spec(spec.at("codomain"), n, base_dir) : domain;
      return LinearMap::make(domain, *codomain, std::move(m), MapKind::general);
    }
    if (spec.contains("diag")) {
      const auto d = spec.at("diag").get<std::vector<double>>();
      if (static_cast<Index>(d.size()) != n) throw Error(ErrorCode::DimensionMismatch, "diag length differs from domain");
      Matrix m = Eigen::Map<const Vector>(d.data(), n).asDiagonal();
      codomain = spec.contains("codomain") ? gram_from_spec(spec.at("codomain"), n, base_dir) : domain;
      return LinearMap::make(domain, *codomain, std::move(m), MapKind::custom);
    }
    if (spec.contains("matrix")) {
      std::filesystem::path p = spec.at("matrix").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      Matrix m = csv::read_matrix(p);
      codomain = spec.contains("codomain") ? gram_from_spec(spec.at("codomain"), m.rows(), base_dir)
                                           : (m.rows() == n ? domain : GramSpace::identity(m.rows()));
      return LinearMap::make(domain, *codomain, std::move(m), MapKind::custom);
    }
    if (spec.contains("derivative_1d")) {
      const auto& d = spec.at("derivative_1d");
      const Index nodes = d.at("nodes").get<Index>();
      const Index blocks = d.value("blocks", Index{1});
      const std::string scheme = d.value("scheme", std::string("forward"));
      Matrix block;
      nlohmann::json default_codomain;
      if (scheme == "forward") {
        block = assemble_fem_1d(nodes).deriv;
        default_codomain = {{"element_l2", nodes}, {"blocks", blocks}};
      } else if (scheme == "centered") {
        if (nodes < 3) throw Error(ErrorCode::InvalidArgument, "centered derivative needs >= 3 nodes");
        block = centered_derivative(nodes);
        default_codomain = {{"fem_mass", nodes}, {"blocks", blocks}};
      } else {
        throw Error(ErrorCode::MalformedManifest, "unknown derivative scheme '" + scheme + "'");
      }
      Matrix m = block_diagonal(block, blocks);
      const auto& cspec = spec.contains("codomain") ? spec.at("codomain") : default_codomain;
      codomain = gram_from_spec(cspec, m.rows(), base_dir);
      // derivatives annihilate constants
      return LinearMap::make_noninvertible(domain, *codomain, std::move(m), MapKind::derivative);
    }
    if (spec.contains("embedding")) {
      const auto& e = spec.at("embedding");
      const Index nodes = e.value("nodes", n);
      if (nodes != n) throw Error(ErrorCode::DimensionMismatch, "embedding nodes differ from domain dimension");
      const auto to = e.value("to", std::string("stiffness+mass"));
      codomain = spec.contains("codomain") ? gram_from_spec(spec.at("codomain"), n, base_dir)
                                           : named_fem_space(to, nodes);
      return LinearMap::make(domain, *codomain, Matrix::Identity(n, n), MapKind::embedding);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedManifest, std::string("map spec: ") + ex.what());
  }
  throw Error(ErrorCode::MalformedManifest, "unrecognized map spec " + spec.dump());
}

}  // namespace podkit
