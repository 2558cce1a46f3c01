#include "podkit/error_lab.hpp"

#include <cmath>
#include <random>

#include "podkit/csv.hpp"
#include "podkit/errors.hpp"
#include "podkit/kernels.hpp"

namespace podkit {

namespace {

// sum_j gamma_j |m_j|^2 in the space
double weighted_energy(const GramSpace& space, const Vector& weights, const Matrix& m) {
  const Matrix gm = space.apply_gram(m);
  const auto& k = kernels::active();
  double sum = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    sum += weights[j] * k.dot(m.col(j).data(), gm.col(j).data(), static_cast<std::size_t>(m.rows()));
  }
  return sum;
}

// |m_j|^2 in the space, per column
Vector column_norms_sq(const GramSpace& space, const Matrix& m) {
  const Matrix gm = space.apply_gram(m);
  const auto& k = kernels::active();
  Vector out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    out[j] = std::max(0.0, k.dot(m.col(j).data(), gm.col(j).data(), static_cast<std::size_t>(m.rows())));
  }
  return out;
}

// |C^T A Gamma^{1/2}|_F^2: Hilbert-Schmidt norm of A : S -> space
double hs_sq(const GramSpace& space, const Vector& weights, const Matrix& a) {
  Matrix t = space.factor_transpose_times(a);
  t *= weights.cwiseSqrt().asDiagonal();
  return kernels::active().dot(t.data(), t.data(), static_cast<std::size_t>(t.size()));
}

Matrix project_columns(const PodBasis& basis, Index r, const Matrix& x) {
  const auto phi = basis.modes().leftCols(r);
  return phi * (phi.transpose() * basis.space().apply_gram(x));
}

double tail(const Vector& sigma, const Vector& terms, Index r) {
  double sum = 0.0;
  for (Index k = sigma.size() - 1; k >= r && k >= 0; --k) sum += sigma[k] * sigma[k] * terms[k];
  return sum;
}

double sigma_after(const PodBasis& basis, Index r) { return r < basis.stored() ? basis.sigma()[r] : 0.0; }

void check_set(const SnapshotSet& set, const PodBasis& basis) {
  if (set.space_dim() != basis.space().dim() || set.count() != basis.right_vectors().rows()) {
    throw Error(ErrorCode::DimensionMismatch, "snapshot set does not match the POD basis");
  }
}

void check_piY(const Projector& piY, const LinearMap& map) {
  if (piY.space().dim() != map.codomain().dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Y projector does not act on the map's codomain");
  }
}

}  // namespace

double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

ErrorReport make_identity(std::string id, Index r, double lhs, double rhs, const Tolerances& tol,
                          double tol_override, double scale) {
  ErrorReport rep;
  rep.id = std::move(id);
  rep.r = r;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.kind = CheckKind::identity;
  rep.abs_diff = std::abs(lhs - rhs);
  rep.rel_diff = relative_difference(lhs, rhs);
  const double t = tol_override > 0.0 ? tol_override : tol.identity;
  const double floor = tol.zero_floor * scale;
  const bool both_zero = std::abs(lhs) <= floor && std::abs(rhs) <= floor;
  rep.passed = lhs >= 0.0 && rhs >= 0.0 && (rep.rel_diff <= t || both_zero);
  rep.holds = rep.passed;
  return rep;
}

ErrorReport make_bound(std::string id, Index r, double lhs, double rhs, const Tolerances& tol) {
  ErrorReport rep;
  rep.id = std::move(id);
  rep.r = r;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.kind = CheckKind::bound;
  rep.abs_diff = std::abs(lhs - rhs);
  rep.rel_diff = relative_difference(lhs, rhs);
  rep.holds = lhs <= rhs + tol.bound_slack;
  rep.passed = rep.holds;
  return rep;
}

ModeTerms mode_terms(const PodBasis& basis, const LinearMap* map, const Projector* piY) {
  ModeTerms t;
  if (!map) return t;
  const Matrix lphi = map->matrix() * basis.modes();
  t.lphi_sq = column_norms_sq(map->codomain(), lphi);
  if (piY) {
    const Matrix projected = piY->apply(lphi);
    t.piY_defect_sq = column_norms_sq(map->codomain(), lphi - projected);
    if (map->invertible()) {
      t.inv_defect_sq = column_norms_sq(map->domain(), basis.modes() - map->inverse() * projected);
    }
  }
  return t;
}

ErrorReport check_known(const SnapshotSet& set, const GramSpace& space, const PodBasis& basis, Index r,
                        const Tolerances& tol) {
  check_set(set, basis);
  if (!space.shares_storage_with(basis.space()) && space.dim() != basis.space().dim()) {
    throw Error(ErrorCode::DimensionMismatch, "space does not match the POD basis");
  }
  basis.require_rank(r);
  const Matrix residual = set.data() - project_columns(basis, r, set.data());
  const double lhs = weighted_energy(space, set.weights(), residual);
  return make_identity("known_2_6", r, lhs, basis.tail_energy(r), tol, -1.0, basis.tail_energy(0));
}

ErrorReport check_thm51_a(const SnapshotSet& set, const PodBasis& basis, const LinearMap& map, Index r,
                          const Tolerances& tol) {
  check_set(set, basis);
  basis.require_rank(r);
  const Matrix& l = map.matrix();
  const Matrix residual = l * set.data() - l * project_columns(basis, r, set.data());
  const double lhs = weighted_energy(map.codomain(), set.weights(), residual);
  const ModeTerms t = mode_terms(basis, &map, nullptr);
  return make_identity("thm51_a", r, lhs, tail(basis.sigma(), t.lphi_sq, r), tol, -1.0,
                       weighted_energy(map.codomain(), set.weights(), l * set.data()));
}

ErrorReport check_thm51_b(const SnapshotSet& set, const PodBasis& basis, const LinearMap& map,
                          const Projector& piY, Index r, const Tolerances& tol) {
  check_set(set, basis);
  check_piY(piY, map);
  basis.require_rank(r);
  const Matrix lw = map.matrix() * set.data();
  const double lhs = weighted_energy(map.codomain(), set.weights(), lw - piY.apply(lw));
  const ModeTerms t = mode_terms(basis, &map, &piY);
  return make_identity("thm51_b", r, lhs, tail(basis.sigma(), t.piY_defect_sq, r), tol, -1.0,
                       weighted_energy(map.codomain(), set.weights(), lw));
}

ErrorReport check_thm51_c(const SnapshotSet& set, const PodBasis& basis, const LinearMap& map,
                          const Projector& piY, Index r, const Tolerances& tol, const Projector* composite) {
  check_set(set, basis);
  check_piY(piY, map);
  basis.require_rank(r);
  const Matrix& inv = map.inverse();
  Matrix approx;
  if (composite) {
    approx = composite->apply(set.data());
  } else {
    approx = inv * piY.apply(Matrix(map.matrix() * set.data()));
  }
  const double lhs = weighted_energy(map.domain(), set.weights(), set.data() - approx);
  const ModeTerms t = mode_terms(basis, &map, &piY);
  return make_identity("thm51_c", r, lhs, tail(basis.sigma(), t.inv_defect_sq, r), tol, -1.0, basis.tail_energy(0));
}

std::vector<ErrorReport> check_hs_identities(const SnapshotSet& set, const PodBasis& basis,
                                             const LinearMap& map, const Projector& piY, Index r,
                                             const Tolerances& tol) {
  check_set(set, basis);
  check_piY(piY, map);
  basis.require_rank(r);
  const Vector& w = set.weights();
  const Matrix& l = map.matrix();
  const Matrix lw = l * set.data();
  const ModeTerms t = mode_terms(basis, &map, &piY);
  const double energy_Y = hs_sq(map.codomain(), w, lw);
  std::vector<ErrorReport> out;
  out.push_back(make_identity("hs_a", r, hs_sq(map.codomain(), w, lw - l * project_columns(basis, r, set.data())),
                              tail(basis.sigma(), t.lphi_sq, r), tol, -1.0, energy_Y));
  const Matrix pilw = piY.apply(lw);
  out.push_back(make_identity("hs_b", r, hs_sq(map.codomain(), w, lw - pilw),
                              tail(basis.sigma(), t.piY_defect_sq, r), tol, -1.0, energy_Y));
  if (map.invertible()) {
    out.push_back(make_identity("hs_c", r, hs_sq(map.domain(), w, set.data() - map.inverse() * pilw),
                                tail(basis.sigma(), t.inv_defect_sq, r), tol, -1.0, basis.tail_energy(0)));
  }
  return out;
}

std::vector<ErrorReport> check_thm67_general(const SnapshotSet& set, const PodBasis& basis, Index r,
                                             const Vector& g, const Tolerances& tol) {
  check_set(set, basis);
  if (r < 0 || r > basis.stored()) throw Error(ErrorCode::RankExceeded, "r outside the stored spectrum");
  const Vector x = apply_K(set, g);
  const Vector res = x - project_columns(basis, r, x);
  const double lhs = basis.space().norm(res);
  double sum = 0.0;
  for (Index k = basis.stored() - 1; k >= r; --k) {
    const double c = inner_S(set.weights(), g, basis.right_vectors().col(k));
    sum += basis.sigma()[k] * basis.sigma()[k] * c * c;
  }
  std::vector<ErrorReport> out;
  const double g_norm = std::sqrt(std::max(0.0, inner_S(set.weights(), g, g)));
  out.push_back(make_identity("thm67", r, lhs, std::sqrt(sum), tol, 1e-9, sigma_after(basis, 0) * g_norm));
  out.push_back(make_bound("thm67_bound", r, lhs, sigma_after(basis, r) * g_norm, tol));
  return out;
}

std::vector<ErrorReport> check_thm67(const SnapshotSet& set, const PodBasis& basis, Index r, Index ell,
                                     const Tolerances& tol) {
  if (ell < 0 || ell >= set.count()) {
    throw Error(ErrorCode::IndexOutOfRange, "snapshot index " + std::to_string(ell) + " outside [0, " +
                                                std::to_string(set.count()) + ")");
  }
  Vector g = Vector::Zero(set.count());
  g[ell] = 1.0 / set.weights()[ell];
  auto out = check_thm67_general(set, basis, r, g, tol);
  // gamma^{-1/2} sigma_{r+1}, written in the snapshot form
  out[1] = make_bound("thm67_snapshot", r, out[1].lhs, sigma_after(basis, r) / std::sqrt(set.weights()[ell]), tol);
  for (auto& rep : out) rep.ell = ell;
  return out;
}

Vector s_residuals(const PodBasis& basis, Index r) {
  const Index s = basis.right_vectors().rows();
  if (r < 0 || r > basis.stored()) throw Error(ErrorCode::RankExceeded, "r outside the stored spectrum");
  const Vector& w = basis.weights();
  const auto f = basis.right_vectors().leftCols(r);
  Vector out(s);
  Vector g = Vector::Zero(s);
  for (Index l = 0; l < s; ++l) {
    g.setZero();
    g[l] = 1.0 / w[l];
    // coefficients (g, f_k)_S = f_k(l)
    const Vector coeff = f.transpose() * w.cwiseProduct(g);
    const Vector res = g - f * coeff;
    out[l] = std::sqrt(std::max(0.0, inner_S(w, res, res)));
  }
  return out;
}

std::optional<Index> cor68_r0(const PodBasis& basis) {
  const Vector& w = basis.weights();
  const Matrix& f = basis.right_vectors();
  // running |g_l - Pi_r^S g_l|_S^2 = 1/gamma_l - sum_{k<=r} f_k(l)^2 locates a candidate cheaply;
  // the explicit residual then decides.
  Vector running = w.cwiseInverse();
  for (Index r = 0; r <= basis.stored(); ++r) {
    if (r > 0) running -= f.col(r - 1).cwiseAbs2();
    if (running.maxCoeff() <= 1.0 + 1e-8 * w.cwiseInverse().maxCoeff()) {
      for (Index rr = r; rr <= basis.stored(); ++rr) {
        if (s_residuals(basis, rr).maxCoeff() <= 1.0) return rr;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Cor68Result check_cor68(const SnapshotSet& set, const PodBasis& basis, const LinearMap* map,
                        const Projector* piY, Index r, const Tolerances& tol) {
  check_set(set, basis);
  basis.require_rank(r);
  Cor68Result result;
  result.r0 = cor68_r0(basis);
  const bool guaranteed = result.r0 && r >= *result.r0;

  auto worst = [&](std::string id, const Vector& lhs_per, double rhs) {
    Index at = 0;
    const double lhs = lhs_per.size() ? lhs_per.maxCoeff(&at) : 0.0;
    ErrorReport rep = make_bound(std::move(id), r, lhs, rhs, tol);
    rep.ell = at;
    rep.guaranteed = guaranteed;
    rep.passed = !guaranteed || rep.holds;
    result.reports.push_back(rep);
  };

  const Matrix& w = set.data();
  const Matrix pw = project_columns(basis, r, w);
  const double s1 = sigma_after(basis, r);
  worst("cor68_a", column_norms_sq(basis.space(), w - pw), s1 * s1);
  if (!map) return result;

  const ModeTerms t = mode_terms(basis, map, piY);
  const Matrix lw = map->matrix() * w;
  Matrix pilw;
  if (piY) {
    check_piY(*piY, *map);
    pilw = piY->apply(lw);
    worst("cor68_b", column_norms_sq(map->codomain(), lw - pilw), tail(basis.sigma(), t.piY_defect_sq, r));
  }
  worst("cor68_c", column_norms_sq(map->codomain(), lw - map->matrix() * pw), tail(basis.sigma(), t.lphi_sq, r));
  if (piY && map->invertible()) {
    worst("cor68_d", column_norms_sq(map->domain(), w - map->inverse() * pilw),
          tail(basis.sigma(), t.inv_defect_sq, r));
  }
  return result;
}

const char* pointwise_name(PointwiseKind kind) {
  switch (kind) {
    case PointwiseKind::thm64: return "thm64";
    case PointwiseKind::thm65: return "thm65";
    case PointwiseKind::thm66: return "thm66";
  }
  return "unknown";
}

ErrorReport check_pointwise(PointwiseKind kind, const Vector& g, const SnapshotSet& set, const PodBasis& basis,
                            const LinearMap& map, const Projector* piY, Index r, const Tolerances& tol) {
  check_set(set, basis);
  basis.require_rank(r);
  if (kind != PointwiseKind::thm65 && !piY) {
    throw Error(ErrorCode::InvalidArgument, std::string(pointwise_name(kind)) + " needs a Y projector");
  }
  if (kind != PointwiseKind::thm64 && !map.invertible()) {
    throw Error(ErrorCode::NotInvertible, std::string(pointwise_name(kind)) + " needs an invertible map");
  }
  if (piY) check_piY(*piY, map);

  const Vector x = apply_K(set, g);
  double lhs = 0.0;
  const Vector* per_mode = nullptr;
  const ModeTerms t = mode_terms(basis, &map, piY);
  switch (kind) {
    case PointwiseKind::thm64: {
      const Vector y = map.apply(x);
      lhs = map.codomain().norm(piY->apply(y) - y);
      per_mode = &t.piY_defect_sq;
      break;
    }
    case PointwiseKind::thm65: {
      const Vector y = map.apply(x);
      const Vector back = map.apply_inverse(y);
      lhs = map.codomain().norm(y - map.apply(project_columns(basis, r, back)));
      per_mode = &t.lphi_sq;
      break;
    }
    case PointwiseKind::thm66: {
      const Vector approx = map.apply_inverse(piY->apply(map.apply(x)));
      lhs = map.domain().norm(x - approx);
      per_mode = &t.inv_defect_sq;
      break;
    }
  }
  double rhs = 0.0, parseval = 0.0, energy = 0.0;
  for (Index k = basis.stored() - 1; k >= r; --k) {
    const double c = inner_S(set.weights(), g, basis.right_vectors().col(k));
    const double d = std::sqrt(std::max(0.0, (*per_mode)[k]));
    rhs += basis.sigma()[k] * std::abs(c) * d;
    parseval += c * c;
    energy += basis.sigma()[k] * basis.sigma()[k] * d * d;
  }
  ErrorReport rep = make_bound(pointwise_name(kind), r, lhs, rhs, tol);
  rep.weakened = std::sqrt(parseval) * std::sqrt(energy);
  return rep;
}

PiYFamily parse_family(const std::string& name) {
  if (name == "orthogonal") return PiYFamily::orthogonal;
  if (name == "ritz") return PiYFamily::ritz;
  if (name == "composite-xy") return PiYFamily::composite_xy;
  if (name == "composite-yx") return PiYFamily::composite_yx;
  throw Error(ErrorCode::InvalidArgument, "unknown projector family '" + name + "'");
}

const char* family_flag(PiYFamily family) {
  switch (family) {
    case PiYFamily::orthogonal: return "orthogonal";
    case PiYFamily::ritz: return "ritz";
    case PiYFamily::composite_xy: return "composite-xy";
    case PiYFamily::composite_yx: return "composite-yx";
  }
  return "unknown";
}

Projector make_piY(const PodBasis& basis, const LinearMap& map, PiYFamily family, const Matrix* form, Index r) {
  switch (family) {
    case PiYFamily::ritz:
      if (!form) throw Error(ErrorCode::InvalidArgument, "the ritz family needs a form on Y");
      return pi_Y_ritz(basis, map, *form, r);
    case PiYFamily::composite_xy:
      return composite_L_piX_Linv(map, basis, r);
    case PiYFamily::orthogonal:
    case PiYFamily::composite_yx:
      break;
  }
  return pi_Y_orthogonal(basis, map, r);
}

namespace {

void sweep_row(const LabSetup& s, Index r, std::vector<ErrorReport>& out, std::optional<Projector>& piY_out,
               std::optional<Projector>& composite_out) {
  out.push_back(check_known(*s.set, s.basis->space(), *s.basis, r, s.tol));
  if (!s.map) return;
  out.push_back(check_thm51_a(*s.set, *s.basis, *s.map, r, s.tol));
  piY_out.emplace(make_piY(*s.basis, *s.map, s.family, s.form, r));
  out.push_back(check_thm51_b(*s.set, *s.basis, *s.map, *piY_out, r, s.tol));
  if (s.map->invertible()) {
    if (s.family == PiYFamily::composite_yx) composite_out.emplace(composite_Linv_piY_L(*s.map, *s.basis, *piY_out));
    out.push_back(check_thm51_c(*s.set, *s.basis, *s.map, *piY_out, r, s.tol,
                                composite_out ? &*composite_out : nullptr));
  }
}

void check_setup(const LabSetup& s, const std::vector<Index>& r_list) {
  if (!s.set || !s.basis) throw Error(ErrorCode::InvalidArgument, "error lab needs a snapshot set and a basis");
  if (r_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty r list");
  for (Index r : r_list) {
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "r values must be >= 1");
    s.basis->require_rank(r);
  }
}

}  // namespace

std::vector<ErrorReport> sweep(const LabSetup& setup, const std::vector<Index>& r_list) {
  check_setup(setup, r_list);
  std::vector<ErrorReport> out;
  for (Index r : r_list) {
    std::optional<Projector> piY, composite;
    sweep_row(setup, r, out, piY, composite);
  }
  return out;
}

std::vector<ErrorReport> verify_all(const LabSetup& setup, const std::vector<Index>& r_list, std::uint64_t seed,
                                    Index random_g) {
  check_setup(setup, r_list);
  const SnapshotSet& set = *setup.set;
  const PodBasis& basis = *setup.basis;
  const auto& tol = setup.tol;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<ErrorReport> out;

  auto keep_worst = [](std::optional<ErrorReport>& slot, ErrorReport rep) {
    const double score = rep.kind == CheckKind::identity ? rep.rel_diff : rep.lhs - rep.rhs;
    const double prev = !slot ? -INFINITY : (slot->kind == CheckKind::identity ? slot->rel_diff : slot->lhs - slot->rhs);
    if (!slot || (slot->passed && !rep.passed) || (slot->passed == rep.passed && score > prev)) slot = rep;
  };

  for (Index r : r_list) {
    std::optional<Projector> piY, composite;
    sweep_row(setup, r, out, piY, composite);
    if (setup.map) {
      for (auto& rep : check_hs_identities(set, basis, *setup.map, *piY, r, tol)) out.push_back(rep);
    }

    // residual formula and snapshot bound for every snapshot; the worst entry is reported
    {
      const Matrix res = set.data() - project_columns(basis, r, set.data());
      const Vector lhs_sq = column_norms_sq(basis.space(), res);
      const auto& f = basis.right_vectors();
      std::optional<ErrorReport> exact, bound;
      for (Index l = 0; l < set.count(); ++l) {
        double sum = 0.0;
        for (Index k = basis.stored() - 1; k >= r; --k) sum += basis.sigma()[k] * basis.sigma()[k] * f(l, k) * f(l, k);
        ErrorReport e = make_identity("thm67", r, std::sqrt(lhs_sq[l]), std::sqrt(sum), tol, 1e-9,
                                      sigma_after(basis, 0) / std::sqrt(set.weights()[l]));
        e.ell = l;
        keep_worst(exact, e);
        ErrorReport b = make_bound("thm67_snapshot", r, std::sqrt(lhs_sq[l]),
                                   sigma_after(basis, r) / std::sqrt(set.weights()[l]), tol);
        b.ell = l;
        keep_worst(bound, b);
      }
      out.push_back(*exact);
      out.push_back(*bound);
    }

    const Cor68Result cor = check_cor68(set, basis, setup.map, piY ? &*piY : nullptr, r, tol);
    for (const auto& rep : cor.reports) out.push_back(rep);

    if (random_g > 0) {
      std::optional<ErrorReport> g67, p64, p65, p66;
      for (Index t = 0; t < random_g; ++t) {
        const Vector g = Vector::NullaryExpr(set.count(), [&](Index) { return normal(rng); });
        keep_worst(g67, check_thm67_general(set, basis, r, g, tol)[1]);
        if (!setup.map) continue;
        keep_worst(p64, check_pointwise(PointwiseKind::thm64, g, set, basis, *setup.map, &*piY, r, tol));
        if (setup.map->invertible()) {
          keep_worst(p65, check_pointwise(PointwiseKind::thm65, g, set, basis, *setup.map, &*piY, r, tol));
          keep_worst(p66, check_pointwise(PointwiseKind::thm66, g, set, basis, *setup.map, &*piY, r, tol));
        }
      }
      for (auto* slot : {&g67, &p64, &p65, &p66})
        if (*slot) out.push_back(**slot);
    }
  }
  return out;
}

bool all_passed(const std::vector<ErrorReport>& reports) {
  for (const auto& r : reports)
    if (!r.passed) return false;
  return true;
}

nlohmann::json to_json(const ErrorReport& rep) {
  nlohmann::json j;
  j["identity_id"] = rep.id;
  j["kind"] = rep.kind == CheckKind::identity ? "identity" : "bound";
  j["r"] = rep.r;
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["abs_diff"] = rep.abs_diff;
  j["rel_diff"] = rep.rel_diff;
  j["passed"] = rep.passed;
  if (rep.ell >= 0) j["ell"] = rep.ell;
  if (rep.kind == CheckKind::bound) {
    j["holds"] = rep.holds;
    j["guaranteed"] = rep.guaranteed;
  }
  if (rep.weakened) j["cauchy_schwarz_bound"] = *rep.weakened;
  return j;
}

nlohmann::json reports_to_json(const std::vector<ErrorReport>& reports, const Tolerances& tol) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return {{"tolerances", {{"identity", tol.identity}, {"bound_slack", tol.bound_slack}, {"zero_floor", tol.zero_floor}}},
          {"all_passed", all_passed(reports)},
          {"reports", arr}};
}

std::string reports_to_csv(const std::vector<ErrorReport>& reports) {
  std::string out = "identity_id,r,actual,formula,abs_diff,rel_diff,passed\n";
  for (const auto& r : reports) {
    out += r.id + "," + std::to_string(r.r) + "," + csv::format_double(r.lhs) + "," + csv::format_double(r.rhs) +
           "," + csv::format_double(r.abs_diff) + "," + csv::format_double(r.rel_diff) + "," +
           (r.passed ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace podkit
