#include "doctest.h"

#include <cmath>
#include <random>

#include "oracle/dense_oracle.hpp"
#include "podkit/errors.hpp"
#include "podkit/instances.hpp"
#include "podkit/pod_engine.hpp"
#include "support.hpp"

using namespace podkit;
using testing_support::rel;
using testing_support::TempDir;

TEST_CASE("two-snapshot fixture has eigenvalues of [[2,1],[1,1]]") {
  const auto inst = gr2_instance();
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  const double l1 = (3.0 + std::sqrt(5.0)) / 2.0, l2 = (3.0 - std::sqrt(5.0)) / 2.0;
  REQUIRE(b.rank() == 2);
  CHECK(std::abs(b.lambda()[0] - l1) < 1e-14);
  CHECK(std::abs(b.lambda()[1] - l2) < 1e-14);
  CHECK(std::abs(b.tail_energy(1) - l2) < 1e-14);
  // the leading mode is the eigenvector (1, (sqrt5 - 1)/2) normalized
  Vector e(2);
  e << 1.0, (std::sqrt(5.0) - 1.0) / 2.0;
  e.normalize();
  CHECK((b.modes().col(0) - e).norm() < 1e-14);
}

TEST_CASE("POD eigenvalues match an independent Jacobi oracle") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    CAPTURE(seed);
    const Index dim = 5 + static_cast<Index>(seed % 7) * 3, s = 4 + static_cast<Index>(seed % 5) * 4;
    const auto inst = random_instance(dim, s, seed, MapClass::invertible);
    const PodBasis b = compute_pod(inst.set, inst.space_X);
    const auto ref = oracle::pod_snapshots(inst.set.data(), inst.set.weights(), inst.space_X.gram());
    CHECK(b.rank() == ref.phi.cols());
    const double l1 = ref.lambda[0];
    for (Index k = 0; k < b.rank(); ++k) CHECK(std::abs(b.lambda()[k] - ref.lambda[k]) <= 1e-11 * l1);
    for (Index r = 0; r <= b.rank(); ++r) CHECK(std::abs(b.tail_energy(r) - oracle::tail(ref.lambda, r)) <= 1e-11 * l1);
    // modes agree up to sign with the oracle modes (simple spectrum)
    for (Index k = 0; k < b.rank(); ++k) {
      // the oracle's mode error is about eps * lambda_1 / gap
      const double below = k + 1 < ref.lambda.size() ? ref.lambda[k] - ref.lambda[k + 1] : ref.lambda[k];
      const double above = k > 0 ? ref.lambda[k - 1] - ref.lambda[k] : l1;
      if (std::min(below, above) < 1e-6 * l1) continue;
      const double c = std::abs(inst.space_X.inner(b.modes().col(k), ref.phi.col(k)));
      CAPTURE(k);
      CHECK(c == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("singular triplet relations hold") {
  const auto inst = random_instance(15, 11, 4, MapClass::injective);
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  const Index r = b.rank();
  const Matrix phi = b.modes().leftCols(r);
  const Matrix f = b.right_vectors().leftCols(r);
  // X- and S-orthonormality
  CHECK((phi.transpose() * inst.space_X.gram() * phi - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.transpose() * inst.set.weights().asDiagonal() * f - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
  for (Index k = 0; k < r; ++k) {
    const double sk = b.sigma()[k];
    CHECK((apply_K(inst.set, f.col(k)) - sk * phi.col(k)).norm() <= 1e-11 * b.sigma()[0]);
    CHECK((apply_K_adjoint(inst.set, inst.space_X, phi.col(k)) - sk * f.col(k)).norm() <= 1e-11 * b.sigma()[0]);
    // sign convention: largest coordinate positive
    Index at = 0;
    phi.col(k).cwiseAbs().maxCoeff(&at);
    CHECK(phi(at, k) > 0.0);
  }
}

TEST_CASE("energy identity: sum of POD eigenvalues equals the weighted data energy") {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto inst = random_instance(8 + static_cast<Index>(seed % 9), 6 + static_cast<Index>(seed % 11), seed,
                                      MapClass::injective);
    const PodBasis b = compute_pod(inst.set, inst.space_X);
    CHECK(rel(b.tail_energy(0), hs_norm_sq(inst.set, inst.space_X)) <= 1e-12);
  }
}

TEST_CASE("svd and method-of-snapshots routes agree") {
  for (std::uint64_t seed : {3u, 8u, 13u}) {
    for (auto [dim, s] : {std::pair<Index, Index>{20, 7}, {7, 20}, {12, 12}}) {
      const auto inst = random_instance(dim, s, seed, MapClass::invertible);
      const PodBasis a = compute_pod(inst.set, inst.space_X);
      const PodBasis b = compute_pod(inst.set, inst.space_X, PodOptions{1e-12, PodMethod::snapshots});
      CHECK(a.rank() == b.rank());
      for (Index k = 0; k < a.rank(); ++k) {
        CHECK(std::abs(a.sigma()[k] - b.sigma()[k]) <= 1e-10 * a.sigma()[0]);
      }
      for (Index k = 0; k < a.rank(); ++k) {
        if (k + 1 < a.rank() && a.lambda()[k] - a.lambda()[k + 1] < 1e-4 * a.lambda()[0]) continue;
        if (k > 0 && a.lambda()[k - 1] - a.lambda()[k] < 1e-4 * a.lambda()[0]) continue;
        CHECK((a.modes().col(k) - b.modes().col(k)).norm() < 1e-6);
      }
    }
  }
}

TEST_CASE("rank detection on deficient data") {
  std::mt19937_64 rng(2);
  const Matrix basis = testing_support::gaussian(10, 3, rng);
  const Matrix data = basis * testing_support::gaussian(3, 8, rng);
  const SnapshotSet set = SnapshotSet::discrete(data, Vector::Ones(8));
  const PodBasis b = compute_pod(set, GramSpace::identity(10));
  CHECK(b.rank() == 3);
  CHECK(b.stored() == 8);
  CHECK(b.tail_energy(3) <= 1e-20 * b.tail_energy(0));
  try {
    b.require_rank(4);
    FAIL("rank 4 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankExceeded);
  }
  const SnapshotSet zero = SnapshotSet::discrete(Matrix::Zero(4, 3), Vector::Ones(3));
  CHECK(compute_pod(zero, GramSpace::identity(4)).rank() == 0);
}

TEST_CASE("projection onto the leading modes is the X-orthogonal projection") {
  const auto inst = random_instance(12, 9, 31, MapClass::injective);
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  std::mt19937_64 rng(1);
  const Vector x = testing_support::gaussian(12, 1, rng);
  for (Index r = 1; r <= b.rank(); ++r) {
    const Vector p = project_X(b, r, x);
    for (Index k = 0; k < r; ++k) CHECK(std::abs(inst.space_X.inner(x - p, b.modes().col(k))) < 1e-12 * inst.space_X.norm(x));
    CHECK((project_X(b, r, p) - p).norm() < 1e-12 * p.norm());
  }
  CHECK_THROWS_AS(project_X(b, 0, x), Error);
}

TEST_CASE("optimality: no random competitor beats the POD tail") {
  const auto gr2 = gr2_instance();
  const auto rep = optimality_oracle(gr2.set, gr2.space_X, 1, 100, 5);
  CHECK(std::abs(rep.pod_error - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-12);
  CHECK(rep.violations == 0);
  CHECK(rep.passed);
  CHECK(rep.min_competitor >= rep.pod_error - 1e-10);
  CHECK(std::abs(rep.pod_self_error - rep.pod_error) <= 1e-12);
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const auto inst = random_instance(10, 8, seed, MapClass::invertible);
    const PodBasis b = compute_pod(inst.set, inst.space_X);
    for (Index r : {Index{1}, b.rank() / 2, b.rank()}) {
      if (r < 1) continue;
      const auto o = optimality_oracle(inst.set, inst.space_X, r, 50, seed);
      CHECK(o.passed);
      CHECK(o.trials == 50);
    }
  }
}

TEST_CASE("basis bundle round-trips") {
  TempDir dir("basis");
  const auto inst = random_instance(9, 6, 2, MapClass::invertible);
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  save_basis(b, dir / "b.json");
  const PodBasis c = load_basis(dir / "b.json", inst.space_X);
  CHECK(c.sigma() == b.sigma());
  CHECK(c.modes() == b.modes());
  CHECK(c.right_vectors() == b.right_vectors());
  CHECK(c.rank() == b.rank());
  CHECK(c.id() != b.id());
}
