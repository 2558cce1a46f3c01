#include "podkit/instances.hpp"

#include <Eigen/QR>
#include <cmath>
#include <random>

#include "podkit/errors.hpp"
#include "podkit/fem_1d.hpp"

namespace podkit {

EmbeddingExample parse_example(const std::string& name) {
  if (name == "example1") return EmbeddingExample::example1;
  if (name == "example2") return EmbeddingExample::example2;
  if (name == "example3") return EmbeddingExample::example3;
  throw Error(ErrorCode::InvalidArgument, "unknown example '" + name + "'");
}

EmbeddingInstance make_embedding_instance(Index nodes, EmbeddingExample which, RitzFormParams params) {
  const Fem1d fem = assemble_fem_1d(nodes);
  const std::string tag = "(" + std::to_string(nodes) + ")";
  GramSpace l2 = GramSpace::make(fem.mass, "L2" + tag);
  GramSpace h1 = GramSpace::make(fem.mass + fem.stiffness, "H1" + tag);
  const Matrix id = Matrix::Identity(nodes, nodes);
  switch (which) {
    case EmbeddingExample::example1:
      return {l2, h1, LinearMap::make(l2, h1, id, MapKind::embedding), std::nullopt};
    case EmbeddingExample::example2:
      return {h1, l2, LinearMap::make(h1, l2, id, MapKind::embedding), std::nullopt};
    case EmbeddingExample::example3: {
      // a(u, v) = v^T A u; advection (u', v) gives C(i, j) = (phi_j', phi_i)
      Matrix form = fem.stiffness + params.kappa * fem.mass + params.beta * fem.advection;
      return {l2, h1, LinearMap::make(l2, h1, id, MapKind::embedding), std::move(form)};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown example");
}

SnapshotSet synthetic_trajectory(Index nodes, std::uint64_t seed, Index intervals, double t_end) {
  if (nodes < 3 || intervals < 1 || !(t_end > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "synthetic trajectory needs nodes >= 3 and a positive time span");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kModes = 8;
  double amp[kModes], omega[kModes], phase[kModes];
  for (int m = 0; m < kModes; ++m) {
    amp[m] = (1.0 + 0.2 * unit(rng)) / std::pow(1.0 + m, 1.5);
    omega[m] = 1.0 + 0.7 * m + 0.1 * unit(rng);
    phase[m] = 2.0 * M_PI * unit(rng);
  }
  const double bump_speed = 1.0 + 0.6 * unit(rng);
  const double pi = M_PI;

  Vector grid(intervals + 1);
  Matrix states(nodes, intervals + 1);
  const double h = 1.0 / static_cast<double>(nodes - 1);
  for (Index k = 0; k <= intervals; ++k) {
    const double t = t_end * static_cast<double>(k) / static_cast<double>(intervals);
    grid[k] = t;
    for (Index i = 0; i < nodes; ++i) {
      const double x = static_cast<double>(i) * h;
      double u = 0.0;
      for (int m = 0; m < kModes; ++m) {
        u += amp[m] * std::cos(m * pi * x) * std::sin(omega[m] * t + phase[m]) * std::exp(-0.2 * m * t);
      }
      const double centre = 0.5 + 0.3 * std::sin(bump_speed * t);
      u += 0.5 * std::exp(-(x - centre) * (x - centre) / 0.01);
      states(i, k) = u;
    }
  }
  return from_trajectory(grid, states);
}

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Matrix orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  return qr.householderQ() * Matrix::Identity(n, n);
}

GramSpace random_space(Index dim, std::mt19937_64& rng, const std::string& label) {
  const Matrix b = gaussian(dim, dim, rng);
  Matrix g = (b.transpose() * b + static_cast<double>(dim) * Matrix::Identity(dim, dim)) / static_cast<double>(dim);
  return GramSpace::make(std::move(g), label);
}

}  // namespace

RandomInstance random_instance(Index dim, Index s, std::uint64_t seed, MapClass map_class) {
  if (dim < 1 || s < 1) throw Error(ErrorCode::InvalidArgument, "random instance needs dim, s >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GramSpace x = random_space(dim, rng, "X");

  // data with a geometric spectrum, sometimes of reduced rank
  const Index full = std::min(dim, s);
  const Index data_rank = unit(rng) < 0.25 ? std::max<Index>(1, full - 1 - static_cast<Index>(unit(rng) * full / 2)) : full;
  const double ratio = 0.5 + 0.3 * unit(rng);
  Vector decay(data_rank);
  for (Index k = 0; k < data_rank; ++k) decay[k] = std::pow(ratio, static_cast<double>(k));
  const Matrix data = gaussian(dim, data_rank, rng) * decay.asDiagonal() * gaussian(data_rank, s, rng);
  Vector weights = Vector::NullaryExpr(s, [&](Index) { return 0.2 + 1.3 * unit(rng); });
  SnapshotSet set = SnapshotSet::discrete(data, std::move(weights));

  Index dim_y = dim;
  Matrix l;
  switch (map_class) {
    case MapClass::invertible: {
      Vector sv = Vector::NullaryExpr(dim, [&](Index) { return std::pow(10.0, 2.0 * unit(rng)); });
      l = orthogonal(dim, rng) * sv.asDiagonal() * orthogonal(dim, rng);
      break;
    }
    case MapClass::injective:
      dim_y = dim + 1 + static_cast<Index>(unit(rng) * 4);
      l = gaussian(dim_y, dim, rng);
      break;
    case MapClass::rank_deficient: {
      Vector sv = Vector::NullaryExpr(dim, [&](Index) { return std::pow(10.0, 2.0 * unit(rng)); });
      const Index zeros = std::max<Index>(1, dim / 3);
      for (Index k = 0; k < zeros; ++k) sv[static_cast<Index>(unit(rng) * dim) % dim] = 0.0;
      sv[0] = 0.0;
      l = orthogonal(dim, rng) * sv.asDiagonal() * orthogonal(dim, rng);
      break;
    }
    case MapClass::wide:
      dim_y = std::max<Index>(1, dim - 1 - static_cast<Index>(unit(rng) * 4));
      l = gaussian(dim_y, dim, rng);
      break;
  }
  GramSpace y = random_space(dim_y, rng, "Y");
  LinearMap map = map_class == MapClass::invertible ? LinearMap::make(x, y, std::move(l), MapKind::general)
                                                    : LinearMap::make_noninvertible(x, y, std::move(l), MapKind::general);
  return {std::move(set), std::move(x), std::move(y), std::move(map)};
}

RandomInstance random_instance(Index dim, Index s, std::uint64_t seed, bool invertible) {
  return random_instance(dim, s, seed, invertible ? MapClass::invertible : MapClass::injective);
}

RandomInstance gr2_instance() {
  Matrix w(2, 2);
  w << 1.0, 1.0, 0.0, 1.0;
  SnapshotSet set = SnapshotSet::discrete(w, Vector::Ones(2));
  GramSpace x = GramSpace::identity(2, "R2");
  Matrix l = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  return {std::move(set), x, x, LinearMap::make(x, x, std::move(l), MapKind::custom)};
}

}  // namespace podkit
