#include "podkit/pod_engine.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <numeric>
#include <random>

#include "podkit/csv.hpp"
#include "podkit/errors.hpp"
#include "podkit/kernels.hpp"

namespace podkit {

namespace {

std::atomic<std::uint64_t> next_basis_id{1};

void check_dims(const SnapshotSet& set, const GramSpace& space) {
  if (set.space_dim() != space.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "snapshots have dimension " + std::to_string(set.space_dim()) +
                                                  ", space '" + space.label() + "' has " +
                                                  std::to_string(space.dim()));
  }
}

// C^T W Gamma^{1/2}: its Frobenius inner products are the X x S inner products.
Matrix weighted_data(const SnapshotSet& set, const GramSpace& space) {
  Matrix b = space.factor_transpose_times(set.data());
  b *= set.weights().cwiseSqrt().asDiagonal();
  return b;
}

// C^{-T} u maps a Euclidean-orthonormal column to an X-orthonormal one.
Matrix from_factor_coords(const GramSpace& space, const Matrix& u) {
  if (space.is_identity()) return u;
  return space.chol().triangularView<Eigen::Lower>().transpose().solve(u);
}

void fix_signs(Matrix& modes, Matrix& right) {
  for (Index k = 0; k < modes.cols(); ++k) {
    Index at = 0;
    modes.col(k).cwiseAbs().maxCoeff(&at);
    if (modes(at, k) < 0.0) {
      modes.col(k) *= -1.0;
      right.col(k) *= -1.0;
    }
  }
}

Index count_rank(const Vector& sigma, double drop_tol) {
  if (sigma.size() == 0 || !(sigma[0] > 0.0)) return 0;
  const double floor = drop_tol * sigma[0] * sigma[0];
  Index rank = 0;
  while (rank < sigma.size() && sigma[rank] * sigma[rank] > floor) ++rank;
  return rank;
}

PodBasis pod_by_svd(const SnapshotSet& set, const GramSpace& space, double drop_tol) {
  const Matrix b = weighted_data(set, space);
  if (!b.allFinite()) throw Error(ErrorCode::EigenFailure, "non-finite snapshot data");
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
      b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sigma = svd.singularValues();
  Matrix modes = from_factor_coords(space, svd.matrixU());
  Matrix right = set.weights().cwiseSqrt().cwiseInverse().asDiagonal() * svd.matrixV();
  fix_signs(modes, right);
  const Index rank = count_rank(sigma, drop_tol);
  return PodBasis(std::move(sigma), std::move(modes), std::move(right), rank, drop_tol, space,
                  set.weights());
}

PodBasis pod_by_snapshots(const SnapshotSet& set, const GramSpace& space, double drop_tol) {
  const Matrix b = weighted_data(set, space);
  const bool state_side = set.space_dim() < set.count();
  Matrix corr = state_side ? Matrix(b * b.transpose()) : Matrix(b.transpose() * b);
  corr = 0.5 * (corr + corr.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "correlation eigensolver failed");

  // ascending -> descending; equal eigenvalues keep their solver order
  const Index n = corr.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) {
    return eig.eigenvalues()[a] > eig.eigenvalues()[c];
  });
  Vector all_sigma(n);
  for (Index k = 0; k < n; ++k) all_sigma[k] = std::sqrt(std::max(0.0, eig.eigenvalues()[order[k]]));
  const Index rank = count_rank(all_sigma, drop_tol);

  Vector sigma = all_sigma.head(rank);
  Matrix modes(set.space_dim(), rank);
  Matrix right(set.count(), rank);
  for (Index k = 0; k < rank; ++k) {
    const Vector v = eig.eigenvectors().col(order[k]);
    if (state_side) {
      modes.col(k) = from_factor_coords(space, v);
      right.col(k) = apply_K_adjoint(set, space, modes.col(k)) / sigma[k];
    } else {
      right.col(k) = set.weights().cwiseSqrt().cwiseInverse().cwiseProduct(v);
      modes.col(k) = apply_K(set, right.col(k)) / sigma[k];
    }
  }
  fix_signs(modes, right);
  return PodBasis(std::move(sigma), std::move(modes), std::move(right), rank, drop_tol, space,
                  set.weights());
}

}  // namespace

PodBasis::PodBasis(Vector sigma, Matrix modes, Matrix right_vectors, Index rank, double drop_tol,
                   GramSpace space, Vector weights)
    : sigma_(std::move(sigma)),
      modes_(std::move(modes)),
      right_(std::move(right_vectors)),
      rank_(rank),
      drop_tol_(drop_tol),
      space_(std::move(space)),
      weights_(std::move(weights)),
      id_(next_basis_id.fetch_add(1)) {
  if (modes_.cols() != sigma_.size() || right_.cols() != sigma_.size() ||
      modes_.rows() != space_.dim() || right_.rows() != weights_.size() || rank_ > sigma_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent POD basis components");
  }
}

double PodBasis::tail_energy(Index r) const {
  double sum = 0.0;
  for (Index k = sigma_.size() - 1; k >= r && k >= 0; --k) sum += sigma_[k] * sigma_[k];
  return sum;
}

void PodBasis::require_rank(Index r) const {
  if (r < 0) throw Error(ErrorCode::InvalidArgument, "negative r");
  if (r > rank_) {
    throw Error(ErrorCode::RankExceeded,
                "r = " + std::to_string(r) + " exceeds POD rank " + std::to_string(rank_));
  }
}

PodBasis compute_pod(const SnapshotSet& set, const GramSpace& space, const PodOptions& options) {
  check_dims(set, space);
  if (!(options.drop_tol > 0.0 && options.drop_tol < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "drop_tol must lie in (0, 1)");
  }
  return options.method == PodMethod::svd ? pod_by_svd(set, space, options.drop_tol)
                                          : pod_by_snapshots(set, space, options.drop_tol);
}

Vector apply_K(const SnapshotSet& set, const Vector& f) {
  if (f.size() != set.count()) {
    throw Error(ErrorCode::DimensionMismatch, "apply_K: S-vector of length " + std::to_string(f.size()) +
                                                  ", expected " + std::to_string(set.count()));
  }
  const Vector coeff = set.weights().cwiseProduct(f);
  Vector out = Vector::Zero(set.space_dim());
  kernels::active().gemv(set.data().data(), set.space_dim(), set.count(), coeff.data(), out.data());
  return out;
}

Vector apply_K_adjoint(const SnapshotSet& set, const GramSpace& space, const Vector& x) {
  check_dims(set, space);
  if (x.size() != space.dim()) throw Error(ErrorCode::DimensionMismatch, "apply_K_adjoint: wrong length");
  const Vector gx = space.apply_gram(x);
  const auto& table = kernels::active();
  Vector out(set.count());
  for (Index j = 0; j < set.count(); ++j) {
    out[j] = table.dot(set.data().col(j).data(), gx.data(), static_cast<std::size_t>(gx.size()));
  }
  return out;
}

double inner_S(const Vector& weights, const Vector& u, const Vector& v) {
  if (u.size() != weights.size() || v.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "S inner product: wrong length");
  }
  const Vector wu = weights.cwiseProduct(u);
  return kernels::active().dot(wu.data(), v.data(), static_cast<std::size_t>(v.size()));
}

Vector project_X(const PodBasis& basis, Index r, const Vector& x) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "project_X needs r >= 1");
  basis.require_rank(r);
  const auto& space = basis.space();
  if (x.size() != space.dim()) throw Error(ErrorCode::DimensionMismatch, "project_X: wrong length");
  const auto phi = basis.modes().leftCols(r);
  const Vector coeff = phi.transpose() * space.apply_gram(x);
  return phi * coeff;
}

double hs_norm_sq(const SnapshotSet& set, const GramSpace& space) {
  check_dims(set, space);
  double sum = 0.0;
  for (Index j = 0; j < set.count(); ++j) {
    const Vector w = set.data().col(j);
    sum += set.weights()[j] * space.inner(w, w);
  }
  return sum;
}

namespace {

// E_r for the approximant with columns given by `approx`
double approximation_error(const SnapshotSet& set, const GramSpace& space, const Matrix& approx) {
  double sum = 0.0;
  for (Index j = 0; j < set.count(); ++j) {
    const Vector d = set.data().col(j) - approx.col(j);
    sum += set.weights()[j] * space.inner(d, d);
  }
  return sum;
}

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

OptimalityReport optimality_oracle(const SnapshotSet& set, const GramSpace& space, Index r, Index trials,
                                   std::uint64_t seed, const PodOptions& options) {
  if (trials < 0) throw Error(ErrorCode::InvalidArgument, "trials must be >= 0");
  const PodBasis basis = compute_pod(set, space, options);
  basis.require_rank(r);

  OptimalityReport rep;
  rep.r = r;
  rep.trials = trials;
  rep.pod_error = basis.tail_energy(r);

  // a_k = sigma_k, s_k = f_k, eta_k = phi_k
  const auto phi = basis.modes().leftCols(r);
  const auto f = basis.right_vectors().leftCols(r);
  const Matrix pod_approx = phi * basis.sigma().head(r).asDiagonal() * f.transpose();
  rep.pod_self_error = approximation_error(set, space, pod_approx);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = std::sqrt(std::max(hs_norm_sq(set, space), 1e-300));
  rep.min_competitor = std::numeric_limits<double>::infinity();
  const double slack = 1e-10;

  for (Index t = 0; t < trials; ++t) {
    Matrix approx;
    switch (t % 3) {
      case 0: {
        Matrix eta = gaussian(space.dim(), r, rng);
        Matrix s = gaussian(set.count(), r, rng);
        Vector a = Vector::NullaryExpr(r, [&](Index) { return scale * unit(rng); });
        approx = eta * a.asDiagonal() * s.transpose() / std::max<double>(1.0, static_cast<double>(set.count()));
        break;
      }
      case 1: {
        // best fit inside a random r-dimensional subspace
        Matrix q = r > 0 ? space.orthonormalize(gaussian(space.dim(), r, rng)) : Matrix(space.dim(), 0);
        approx = q * (q.transpose() * space.apply_gram(set.data()));
        break;
      }
      default: {
        const double eps = std::pow(10.0, -1.0 - 6.0 * unit(rng));
        Matrix eta = phi + eps * gaussian(space.dim(), r, rng);
        Matrix s = f + eps * gaussian(set.count(), r, rng);
        Vector a = basis.sigma().head(r) * (1.0 + eps * (2.0 * unit(rng) - 1.0));
        approx = eta * a.asDiagonal() * s.transpose();
        break;
      }
    }
    const double e = approximation_error(set, space, approx);
    rep.min_competitor = std::min(rep.min_competitor, e);
    if (e < rep.pod_error - slack) ++rep.violations;
  }
  if (trials == 0) rep.min_competitor = rep.pod_error;
  const double self_gap = std::abs(rep.pod_self_error - rep.pod_error);
  rep.passed = rep.violations == 0 && self_gap <= 1e-10 * std::max(1.0, scale * scale);
  return rep;
}

void save_basis(const PodBasis& basis, const std::filesystem::path& json_path) {
  auto modes_path = json_path;
  modes_path.replace_extension(".modes.csv");
  auto right_path = json_path;
  right_path.replace_extension(".right.csv");
  csv::write_matrix(modes_path, basis.modes());
  csv::write_matrix(right_path, basis.right_vectors());

  nlohmann::json j;
  j["sigma"] = std::vector<double>(basis.sigma().data(), basis.sigma().data() + basis.stored());
  j["rank"] = basis.rank();
  j["drop_tol"] = basis.drop_tol();
  j["weights"] = std::vector<double>(basis.weights().data(), basis.weights().data() + basis.weights().size());
  j["space"] = basis.space().label();
  j["modes"] = modes_path.filename().string();
  j["right_vectors"] = right_path.filename().string();
  csv::write_file_atomic(json_path, j.dump(2) + "\n");
}

PodBasis load_basis(const std::filesystem::path& json_path, const GramSpace& space) {
  try {
    const auto j = nlohmann::json::parse(csv::read_file(json_path));
    const auto base = json_path.parent_path();
    const auto sigma_v = j.at("sigma").get<std::vector<double>>();
    const auto weights_v = j.at("weights").get<std::vector<double>>();
    Vector sigma = Eigen::Map<const Vector>(sigma_v.data(), static_cast<Index>(sigma_v.size()));
    Vector weights = Eigen::Map<const Vector>(weights_v.data(), static_cast<Index>(weights_v.size()));
    Matrix modes = csv::read_matrix(base / j.at("modes").get<std::string>());
    Matrix right = csv::read_matrix(base / j.at("right_vectors").get<std::string>());
    return PodBasis(std::move(sigma), std::move(modes), std::move(right), j.at("rank").get<Index>(),
                    j.at("drop_tol").get<double>(), space, std::move(weights));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedManifest, json_path.string() + ": " + e.what());
  }
}

}  // namespace podkit
