#pragma once

#include "json.hpp"
#include "podkit/gram_space.hpp"
#include "podkit/linear_map.hpp"

namespace podkit {

/// FitzHugh-Nagumo reaction-diffusion system on (0, 1):
///   u_t = mu u_xx - v / mu + f(u) / mu + c / mu,   f(u) = u (u - 0.1) (1 - u)
///   v_t = b u - gamma v + c
/// with u_x(t, 0) = -A t^3 exp(-k t), u_x(t, 1) = 0 and zero initial data.
struct FhnConfig {
  double mu = 0.015;
  double b = 0.5;
  double gamma_param = 2.0;
  double c = 0.05;
  double flux_amplitude = 50000.0;
  double flux_rate = 15.0;
  Index nodes = 100;
  double t_end = 10.0;
  double dt = 1e-3;
  Index record_stride = 1;  // keep every k-th step

  void validate() const;
};

FhnConfig fhn_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FhnConfig& config);

struct Trajectory {
  Vector grid;   // recorded times, starting at 0
  Matrix states; // [u; v] nodal values, one column per recorded time
};

/// Piecewise-linear finite elements in space with the nonlinearity
/// interpolated nodally (M f(U)); two-stage L-stable SDIRK in time with a
/// Newton solve per stage. Throws SolverDiverged if repeated step halving
/// cannot make Newton converge.
Trajectory solve_fhn(const FhnConfig& config);

/// L2 x L2 on the nodal [u; v] coordinates: block-diagonal mass matrix.
GramSpace make_product_space(Index nodes);
/// Element-wise derivative of both components, into piecewise constants with
/// the element-length Gram matrix. Not invertible.
LinearMap make_fhn_L(Index nodes);
LinearMap make_fhn_L(const GramSpace& product_space, Index nodes);

}  // namespace podkit
