#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "oracle/dense_oracle.hpp"
#include "podkit/error_lab.hpp"
#include "podkit/errors.hpp"
#include "podkit/instances.hpp"
#include "support.hpp"

using namespace podkit;
using testing_support::rel;

namespace {

// hand-built modes of the two-snapshot fixture: eigenvectors of [[2,1],[1,1]]
struct Gr2Hand {
  double l1 = (3.0 + std::sqrt(5.0)) / 2.0;
  double l2 = (3.0 - std::sqrt(5.0)) / 2.0;
  Vector phi1, phi2;
  Matrix w, l;
  Gr2Hand() {
    phi1 = Vector(2);
    phi1 << 1.0, l1 - 2.0;
    phi1.normalize();
    phi2 = Vector(2);
    phi2 << 1.0, l2 - 2.0;
    phi2.normalize();
    w = Matrix(2, 2);
    w << 1, 1, 0, 1;
    l = Matrix(2, 2);
    l << 1, 0, 0, 2;
  }
  // orthogonal projector onto span{u} in R^2
  static Matrix line(const Vector& u) { return u * u.transpose() / u.squaredNorm(); }
};

std::vector<Index> all_r(const PodBasis& b) {
  std::vector<Index> out;
  for (Index r = 1; r <= b.rank(); ++r) out.push_back(r);
  return out;
}

}  // namespace

TEST_CASE("two-snapshot fixture: every identity at r = 1 against hand values") {
  const Gr2Hand h;
  const auto inst = gr2_instance();
  const PodBasis b = compute_pod(inst.set, inst.space_X);

  const ErrorReport known = check_known(inst.set, inst.space_X, b, 1);
  CHECK(std::abs(known.lhs - h.l2) < 1e-14);
  CHECK(std::abs(known.rhs - h.l2) < 1e-14);
  CHECK(known.passed);

  // thm51_a: sum_j |L(w_j - P w_j)|^2 = l2 |L phi2|^2
  const Matrix px = Gr2Hand::line(h.phi1);
  const double a_lhs = (h.l * (h.w - px * h.w)).squaredNorm();
  const double a_rhs = h.l2 * (h.l * h.phi2).squaredNorm();
  CHECK(rel(a_lhs, a_rhs) < 1e-14);
  const ErrorReport a = check_thm51_a(inst.set, b, inst.map, 1);
  CHECK(rel(a.lhs, a_lhs) < 1e-13);
  CHECK(rel(a.rhs, a_rhs) < 1e-13);
  CHECK(a.passed);

  // thm51_b with the orthogonal projector onto span{L phi1}
  const Matrix py = Gr2Hand::line(h.l * h.phi1);
  const Matrix lw = h.l * h.w;
  const double b_lhs = (lw - py * lw).squaredNorm();
  const double b_rhs = h.l2 * (h.l * h.phi2 - py * h.l * h.phi2).squaredNorm();
  const Projector piY = pi_Y_orthogonal(b, inst.map, 1);
  const ErrorReport eb = check_thm51_b(inst.set, b, inst.map, piY, 1);
  CHECK(rel(eb.lhs, b_lhs) < 1e-12);
  CHECK(rel(eb.rhs, b_rhs) < 1e-12);
  CHECK(eb.rel_diff < 1e-10);

  // thm51_c: L^{-1} P_Y L
  const Matrix linv = oracle::inverse(h.l);
  const double c_lhs = (h.w - linv * py * lw).squaredNorm();
  const double c_rhs = h.l2 * (h.phi2 - linv * py * h.l * h.phi2).squaredNorm();
  const ErrorReport ec = check_thm51_c(inst.set, b, inst.map, piY, 1);
  CHECK(rel(ec.lhs, c_lhs) < 1e-12);
  CHECK(rel(ec.rhs, c_rhs) < 1e-12);
  CHECK(ec.rel_diff < 1e-10);

  const auto hs = check_hs_identities(inst.set, b, inst.map, piY, 1);
  REQUIRE(hs.size() == 3);
  for (const auto& rep : hs) CHECK(rep.rel_diff < 1e-10);
  CHECK(rel(hs[0].lhs, a.lhs) < 1e-10);
  CHECK(rel(hs[1].lhs, eb.lhs) < 1e-10);
  CHECK(rel(hs[2].lhs, ec.lhs) < 1e-10);
}

TEST_CASE("two-snapshot fixture: snapshot formula, bound and pointwise bounds") {
  const Gr2Hand h;
  const auto inst = gr2_instance();
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  // x = K g_2 = w_2, residual |w_2 - P w_2|
  const Vector w2 = h.w.col(1);
  const double direct = (w2 - Gr2Hand::line(h.phi1) * w2).norm();
  const auto t = check_thm67(inst.set, b, 1, 1);
  REQUIRE(t.size() == 2);
  CHECK(rel(t[0].lhs, direct) < 1e-13);
  CHECK(t[0].passed);
  CHECK(t[1].passed);
  CHECK(t[1].rhs == doctest::Approx(std::sqrt(h.l2)).epsilon(1e-13));
  CHECK_THROWS_AS(check_thm67(inst.set, b, 1, 2), Error);

  std::mt19937_64 rng(3);
  const Projector piY = pi_Y_orthogonal(b, inst.map, 1);
  for (int k = 0; k < 20; ++k) {
    const Vector g = testing_support::gaussian(2, 1, rng);
    for (auto kind : {PointwiseKind::thm64, PointwiseKind::thm65, PointwiseKind::thm66}) {
      const ErrorReport rep = check_pointwise(kind, g, inst.set, b, inst.map, &piY, 1);
      CHECK(rep.passed);
      REQUIRE(rep.weakened);
      CHECK(rep.rhs <= *rep.weakened + 1e-12);
    }
  }
  // g = f_1: x = sigma_1 phi_1 lies in the preserved span
  const Vector f1 = b.right_vectors().col(0);
  CHECK(check_pointwise(PointwiseKind::thm64, f1, inst.set, b, inst.map, &piY, 1).lhs < 1e-14);
  CHECK(check_pointwise(PointwiseKind::thm65, f1, inst.set, b, inst.map, &piY, 1).lhs < 1e-14);
}

TEST_CASE("threshold r0 matches an explicit S-projection") {
  // the fixture with weights that push |g_l|_S above one
  const Gr2Hand h;
  const SnapshotSet set = SnapshotSet::discrete(h.w, Vector((Vector(2) << 0.25, 0.5).finished()));
  const GramSpace x = GramSpace::identity(2);
  const PodBasis b = compute_pod(set, x);
  const LinearMap map = LinearMap::make(x, x, h.l, MapKind::custom);
  const auto ref = oracle::pod_snapshots(h.w, set.weights(), Matrix::Identity(2, 2));
  // |g_l - P_r g_l|_S^2 with g_l = e_l / gamma_l
  std::optional<Index> r0;
  for (Index r = 0; r <= 2 && !r0; ++r) {
    double worst = 0.0;
    for (Index l = 0; l < 2; ++l) {
      Vector g = Vector::Zero(2);
      g[l] = 1.0 / set.weights()[l];
      Vector p = Vector::Zero(2);
      for (Index k = 0; k < r; ++k) {
        const Vector fk = ref.f.col(k);
        p += (fk.cwiseProduct(set.weights()).dot(g)) * fk;
      }
      const Vector d = g - p;
      worst = std::max(worst, std::sqrt(d.cwiseProduct(set.weights()).dot(d)));
    }
    if (worst <= 1.0 + 1e-12) r0 = r;
  }
  REQUIRE(r0);
  CHECK(cor68_r0(b) == r0);
  for (Index r = 1; r <= 2; ++r) {
    const Vector res = s_residuals(b, r);
    CHECK(res.size() == 2);
    const Projector piY = pi_Y_orthogonal(b, map, r);
    const Cor68Result c = check_cor68(set, b, &map, &piY, r);
    CHECK(c.reports.size() == 4);
    for (const auto& rep : c.reports) {
      CHECK(rep.guaranteed == (r >= *r0));
      CHECK(rep.passed);
      if (rep.guaranteed) CHECK(rep.holds);
    }
  }
}

TEST_CASE("identities hold on random instances for every r and every projector family") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const MapClass cls = seed % 2 ? MapClass::invertible : MapClass::injective;
    const auto inst = random_instance(6 + static_cast<Index>(seed % 10), 5 + static_cast<Index>(seed % 7), seed, cls);
    const PodBasis b = compute_pod(inst.set, inst.space_X);
    LabSetup s;
    s.set = &inst.set;
    s.basis = &b;
    s.map = &inst.map;
    std::vector<PiYFamily> families{PiYFamily::orthogonal};
    if (inst.map.invertible()) {
      families.push_back(PiYFamily::composite_xy);
      families.push_back(PiYFamily::composite_yx);
    }
    for (auto fam : families) {
      s.family = fam;
      CAPTURE(seed);
      CAPTURE(family_flag(fam));
      const auto reps = verify_all(s, all_r(b), seed, 5);
      for (const auto& r : reps) {
        CAPTURE(r.id);
        CAPTURE(r.r);
        CAPTURE(r.lhs);
        CAPTURE(r.rhs);
        CAPTURE(r.ell);
        CHECK(r.passed);
      }
    }
  }
}

TEST_CASE("Ritz and orthogonal Y projectors each satisfy their own identity") {
  const auto ex = make_embedding_instance(17, EmbeddingExample::example3);
  const SnapshotSet set = synthetic_trajectory(17, 6);
  const PodBasis b = compute_pod(set, ex.space_X);
  bool differs = false;
  for (Index r = 1; r <= std::min<Index>(b.rank(), 10); ++r) {
    const Projector ritz = pi_Y_ritz(b, ex.map, *ex.form, r);
    const Projector orth = pi_Y_orthogonal(b, ex.map, r);
    const ErrorReport a = check_thm51_b(set, b, ex.map, ritz, r);
    const ErrorReport o = check_thm51_b(set, b, ex.map, orth, r);
    CHECK(a.passed);
    CHECK(o.passed);
    // the orthogonal projector is the best approximation in Y
    CHECK(o.lhs <= a.lhs * (1.0 + 1e-10) + 1e-15);
    if (rel(a.lhs, o.lhs) > 1e-6) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("right-hand sides decrease in r and vanish at full rank") {
  const auto inst = random_instance(12, 10, 5, MapClass::invertible);
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  LabSetup s;
  s.set = &inst.set;
  s.basis = &b;
  s.map = &inst.map;
  const auto reps = sweep(s, all_r(b));
  const double energy = b.tail_energy(0);
  std::map<std::string, double> last;
  for (const auto& r : reps) {
    if (last.count(r.id)) CHECK(r.rhs <= last[r.id] * (1.0 + 1e-12) + 1e-15 * energy);
    last[r.id] = r.rhs;
    if (r.r == b.rank()) CHECK(r.rhs <= 1e-12 * energy);
  }
  CHECK(last.size() == 4);
}

TEST_CASE("report verdict rules") {
  const Tolerances tol;
  CHECK(make_identity("x", 1, 1.0, 1.0 + 1e-9, tol).passed);
  CHECK_FALSE(make_identity("x", 1, 1.0, 1.0 + 1e-7, tol).passed);
  CHECK(make_identity("x", 1, 1e-15, 3e-15, tol).passed);
  CHECK_FALSE(make_identity("x", 1, 1e-13, 3e-13, tol).passed);
  CHECK(make_identity("x", 1, 1.0, 1.0 + 5e-10, tol, 1e-9).passed);
  CHECK(make_bound("b", 1, 1.0 + 5e-11, 1.0, tol).passed);
  CHECK_FALSE(make_bound("b", 1, 1.0 + 1e-9, 1.0, tol).passed);
}

TEST_CASE("rank guard and CSV layout") {
  const auto inst = gr2_instance();
  const PodBasis b = compute_pod(inst.set, inst.space_X);
  try {
    check_known(inst.set, inst.space_X, b, 3);
    FAIL("r above rank accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankExceeded);
  }
  LabSetup s;
  s.set = &inst.set;
  s.basis = &b;
  s.map = &inst.map;
  const auto reps = sweep(s, {1, 2});
  CHECK(reps.size() == 8);
  const std::string csv = reports_to_csv(reps);
  CHECK(csv.rfind("identity_id,r,actual,formula,abs_diff,rel_diff,passed\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  const auto j = reports_to_json(reps, Tolerances{});
  CHECK(j.at("all_passed") == true);
  CHECK(j.at("tolerances").at("identity") == 1e-8);
}
