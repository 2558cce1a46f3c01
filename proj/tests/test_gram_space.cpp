#include "doctest.h"

#include <cmath>
#include <random>

#include "oracle/dense_oracle.hpp"
#include "podkit/errors.hpp"
#include "podkit/fem_1d.hpp"
#include "podkit/gram_space.hpp"
#include "support.hpp"

using namespace podkit;
using testing_support::gaussian;
using testing_support::random_spd;

TEST_CASE("identity space reduces to the Euclidean inner product") {
  const GramSpace e = GramSpace::identity(3);
  Vector u(3), v(3);
  u << 1, 2, 3;
  v << -1, 0, 2;
  CHECK(e.inner(u, v) == doctest::Approx(5.0));
  CHECK(e.norm(u) == doctest::Approx(std::sqrt(14.0)));
  CHECK(e.is_identity());
}

TEST_CASE("gram validation rejects bad matrices") {
  Matrix ns(2, 2);
  ns << 1, 0.5, 0.4, 1;
  CHECK_THROWS_WITH_AS(GramSpace::make(ns, "x"), doctest::Contains("G - G^T"), Error);
  try {
    GramSpace::make(ns, "x");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSymmetric);
  }
  Matrix indef(2, 2);
  indef << 1, 2, 2, 1;
  try {
    GramSpace::make(indef, "x");
    FAIL("indefinite gram accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  try {
    GramSpace::make(Matrix::Zero(2, 3), "x");
    FAIL("rectangular gram accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
  const GramSpace ok = GramSpace::make(Matrix::Identity(2, 2), "ok");
  try {
    ok.inner(Vector::Ones(3), Vector::Ones(2));
    FAIL("length mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("four-element mass matrix matches quadrature assembly") {
  const Fem1d fem = assemble_fem_1d(5);
  const auto ref = oracle::fem_by_quadrature(5);
  CHECK((fem.mass - ref.mass).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((fem.stiffness - ref.stiffness).cwiseAbs().maxCoeff() < 1e-12);
  // tridiagonal, row sums integrate the hat functions: h/2 at the ends, h inside
  const double h = 0.25;
  for (Index i = 0; i < 5; ++i) {
    const double expect = (i == 0 || i == 4) ? h / 2 : h;
    CHECK(fem.mass.row(i).sum() == doctest::Approx(expect).epsilon(1e-14));
    for (Index j = 0; j < 5; ++j)
      if (std::abs(i - j) > 1) CHECK(fem.mass(i, j) == 0.0);
  }
  const GramSpace m = GramSpace::make(fem.mass, "L2");
  CHECK(m.norm(Vector::Ones(5)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inner product is symmetric, bilinear and positive") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial;
    const GramSpace s = GramSpace::make(random_spd(n, rng), "R");
    const Matrix x = gaussian(n, 3, rng);
    const Vector u = x.col(0), v = x.col(1), w = x.col(2);
    CHECK(s.inner(u, v) == doctest::Approx(s.inner(v, u)).epsilon(1e-13));
    CHECK(s.inner(2.0 * u + w, v) == doctest::Approx(2.0 * s.inner(u, v) + s.inner(w, v)).epsilon(1e-12));
    CHECK(s.norm(u) > 0.0);
    CHECK(s.inner(u, u) == doctest::Approx(u.dot(s.gram() * u)).epsilon(1e-13));
    // C C^T = G
    CHECK((s.chol() * s.chol().transpose() - s.gram()).norm() <= 1e-12 * s.gram().norm());
    CHECK((s.gram() * s.solve_gram(x) - x).norm() <= 1e-10 * x.norm());
  }
}

TEST_CASE("zero vector has zero norm") {
  const GramSpace s = GramSpace::identity(2);
  CHECK(s.norm(Vector::Zero(2)) == 0.0);
}

TEST_CASE("orthonormalize produces a G-orthonormal basis of the same span") {
  std::mt19937_64 rng(5);
  const Index n = 12;
  const GramSpace s = GramSpace::make(random_spd(n, rng), "R");
  const Matrix v = gaussian(n, 5, rng);
  const Matrix q = s.orthonormalize(v);
  REQUIRE(q.cols() == 5);
  CHECK((q.transpose() * s.gram() * q - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  // span check: v = q (q^T G v)
  const Matrix coeff = q.transpose() * s.gram() * v;
  CHECK((q * coeff - v).norm() < 1e-10 * v.norm());

  Matrix dep = v;
  dep.col(3) = v.col(0) + v.col(1);
  try {
    s.orthonormalize(dep);
    FAIL("dependent columns accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("adjoint satisfies (Au, v)_to = (u, A* v)_from") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 3 + trial, n = 5 + trial / 2;
    const GramSpace from = GramSpace::make(random_spd(m, rng), "X");
    const GramSpace to = GramSpace::make(random_spd(n, rng), "Y");
    const Matrix a = gaussian(n, m, rng);
    const Matrix adj = adjoint_matrix(from, to, a);
    const Vector u = gaussian(m, 1, rng), v = gaussian(n, 1, rng);
    CHECK(to.inner(a * u, v) == doctest::Approx(from.inner(u, adj * v)).epsilon(1e-11));
  }
}

TEST_CASE("operator norm agrees with an independent pencil eigenvalue") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 4 + trial, n = 3 + trial;
    const GramSpace from = GramSpace::make(random_spd(m, rng), "X");
    const GramSpace to = GramSpace::make(random_spd(n, rng), "Y");
    const Matrix a = gaussian(n, m, rng);
    const auto [lo, hi] = oracle::pencil_extremes(a.transpose() * to.gram() * a, from.gram());
    (void)lo;
    CHECK(operator_norm(from, to, a) == doctest::Approx(std::sqrt(hi)).epsilon(1e-10));
    // no unit vector is stretched further than the norm
    for (int k = 0; k < 20; ++k) {
      const Vector u = gaussian(m, 1, rng);
      CHECK(to.norm(a * u) <= operator_norm(from, to, a) * from.norm(u) * (1 + 1e-12));
    }
  }
  const GramSpace e = GramSpace::identity(3);
  CHECK(operator_norm(e, e, Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("copies share the factorization") {
  const GramSpace a = GramSpace::identity(4);
  const GramSpace b = a;
  CHECK(a.shares_storage_with(b));
  CHECK_FALSE(a.shares_storage_with(GramSpace::identity(4)));
}
