#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "podkit/linear_map.hpp"
#include "podkit/pod_engine.hpp"
#include "podkit/projector.hpp"

namespace podkit {

enum class CheckKind { identity, bound };

struct Tolerances {
  double identity = 1e-8;     // relative difference for identities
  double bound_slack = 1e-10; // absolute slack for inequalities
  double zero_floor = 1e-14;  // identities pass when both sides are below this times their scale
};

/// One evaluated identity or bound. lhs is the directly computed error,
/// rhs the spectral formula.
struct ErrorReport {
  std::string id;
  Index r = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  bool passed = false;
  CheckKind kind = CheckKind::identity;
  Index ell = -1;             // snapshot index (0-based) for per-snapshot entries
  bool guaranteed = true;     // false for per-snapshot bounds below r0
  bool holds = true;          // the inequality itself, regardless of guarantee
  std::optional<double> weakened;  // Cauchy-Schwarz form of a pointwise bound
};

/// scale is the size of the compared quantity at r = 0 (data energy for the
/// squared errors); the zero floor is taken relative to it.
ErrorReport make_identity(std::string id, Index r, double lhs, double rhs, const Tolerances& tol,
                          double tol_override = -1.0, double scale = 1.0);
ErrorReport make_bound(std::string id, Index r, double lhs, double rhs, const Tolerances& tol);
double relative_difference(double a, double b);

/// Per-mode quantities that the spectral sides are built from.
struct ModeTerms {
  Vector lphi_sq;        // |L phi_k|_Y^2
  Vector piY_defect_sq;  // |L phi_k - Pi^Y L phi_k|_Y^2
  Vector inv_defect_sq;  // |phi_k - L^{-1} Pi^Y L phi_k|_X^2 (empty without an inverse)
};
ModeTerms mode_terms(const PodBasis& basis, const LinearMap* map, const Projector* piY);

ErrorReport check_known(const SnapshotSet& set, const GramSpace& space, const PodBasis& basis, Index r,
                        const Tolerances& tol = {});
ErrorReport check_thm51_a(const SnapshotSet& set, const PodBasis& basis, const LinearMap& map, Index r,
                          const Tolerances& tol = {});
ErrorReport check_thm51_b(const SnapshotSet& set, const PodBasis& basis, const LinearMap& map,
                          const Projector& piY, Index r, const Tolerances& tol = {});
/// With `composite` given, the left side applies that L^{-1} Pi^Y L projector
/// object instead of applying L, Pi^Y and L^{-1} in turn.
ErrorReport check_thm51_c(const SnapshotSet& set, const PodBasis& basis, const LinearMap& map,
                          const Projector& piY, Index r, const Tolerances& tol = {},
                          const Projector* composite = nullptr);

/// hs_a, hs_b and (with an invertible map) hs_c.
std::vector<ErrorReport> check_hs_identities(const SnapshotSet& set, const PodBasis& basis,
                                             const LinearMap& map, const Projector& piY, Index r,
                                             const Tolerances& tol = {});

/// Exact residual formula for x = K g_ell (identity at 1e-9) and the snapshot
/// bound gamma_ell^{-1/2} sigma_{r+1}. ell is 0-based.
std::vector<ErrorReport> check_thm67(const SnapshotSet& set, const PodBasis& basis, Index r, Index ell,
                                     const Tolerances& tol = {});
/// Exact residual formula and the bound sigma_{r+1} |g|_S for x = K g.
std::vector<ErrorReport> check_thm67_general(const SnapshotSet& set, const PodBasis& basis, Index r,
                                             const Vector& g, const Tolerances& tol = {});

/// |g_ell - Pi_r^S g_ell|_S for every snapshot, with g_ell = e_ell / gamma_ell.
Vector s_residuals(const PodBasis& basis, Index r);
/// Smallest r with max_ell |g_ell - Pi_r^S g_ell|_S <= 1, if any stored r reaches it.
std::optional<Index> cor68_r0(const PodBasis& basis);

struct Cor68Result {
  std::vector<ErrorReport> reports;  // cor68_a .. cor68_d (worst snapshot each)
  std::optional<Index> r0;
};
/// map and piY may be null (only cor68_a is then evaluated); cor68_d needs an
/// invertible map.
Cor68Result check_cor68(const SnapshotSet& set, const PodBasis& basis, const LinearMap* map,
                        const Projector* piY, Index r, const Tolerances& tol = {});

enum class PointwiseKind { thm64, thm65, thm66 };
const char* pointwise_name(PointwiseKind kind);
ErrorReport check_pointwise(PointwiseKind kind, const Vector& g, const SnapshotSet& set, const PodBasis& basis,
                            const LinearMap& map, const Projector* piY, Index r, const Tolerances& tol = {});

enum class PiYFamily { orthogonal, ritz, composite_xy, composite_yx };
PiYFamily parse_family(const std::string& name);
const char* family_flag(PiYFamily family);

/// The Y-side projector a family selects. composite_yx uses the orthogonal
/// Y projector; the X-side composite is formed separately.
Projector make_piY(const PodBasis& basis, const LinearMap& map, PiYFamily family, const Matrix* form, Index r);

struct LabSetup {
  const SnapshotSet* set = nullptr;
  const PodBasis* basis = nullptr;
  const LinearMap* map = nullptr;  // optional
  PiYFamily family = PiYFamily::orthogonal;
  const Matrix* form = nullptr;    // Ritz form on Y
  Tolerances tol;
};

/// known_2_6, thm51_a, thm51_b and (invertible maps) thm51_c for every r.
std::vector<ErrorReport> sweep(const LabSetup& setup, const std::vector<Index>& r_list);

/// Every check: the sweep rows plus the HS identities, snapshot formulas and
/// bounds, the per-snapshot cor68 bounds and `random_g` pointwise bound
/// draws per r.
std::vector<ErrorReport> verify_all(const LabSetup& setup, const std::vector<Index>& r_list,
                                    std::uint64_t seed, Index random_g = 20);

bool all_passed(const std::vector<ErrorReport>& reports);
nlohmann::json to_json(const ErrorReport& report);
nlohmann::json reports_to_json(const std::vector<ErrorReport>& reports, const Tolerances& tol);
/// identity_id, r, actual, formula, abs_diff, rel_diff, passed
std::string reports_to_csv(const std::vector<ErrorReport>& reports);

}  // namespace podkit
