#include "podkit/fhn.hpp"

#include <cmath>

#include "podkit/errors.hpp"
#include "podkit/fem_1d.hpp"

namespace podkit {

void FhnConfig::validate() const {
  if (!(mu > 0 && b > 0 && gamma_param > 0 && c >= 0 && t_end > 0 && dt > 0 && flux_amplitude >= 0 &&
        flux_rate >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "FitzHugh-Nagumo parameters must be positive");
  }
  if (nodes < 3) throw Error(ErrorCode::InvalidArgument, "FitzHugh-Nagumo needs >= 3 nodes");
  if (record_stride < 1) throw Error(ErrorCode::InvalidArgument, "record_stride must be >= 1");
  if (dt > t_end) throw Error(ErrorCode::InvalidArgument, "dt exceeds t_end");
}

FhnConfig fhn_config_from_json(const nlohmann::json& j) {
  FhnConfig cfg;
  try {
    cfg.mu = j.value("mu", cfg.mu);
    cfg.b = j.value("b", cfg.b);
    cfg.gamma_param = j.value("gamma", cfg.gamma_param);
    cfg.c = j.value("c", cfg.c);
    cfg.flux_amplitude = j.value("flux_amplitude", cfg.flux_amplitude);
    cfg.flux_rate = j.value("flux_rate", cfg.flux_rate);
    cfg.nodes = j.value("nodes", cfg.nodes);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.record_stride = j.value("record_stride", cfg.record_stride);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedManifest, std::string("FitzHugh-Nagumo config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const FhnConfig& cfg) {
  return {{"mu", cfg.mu},         {"b", cfg.b},
          {"gamma", cfg.gamma_param}, {"c", cfg.c},
          {"flux_amplitude", cfg.flux_amplitude}, {"flux_rate", cfg.flux_rate},
          {"nodes", cfg.nodes},   {"t_end", cfg.t_end},
          {"dt", cfg.dt},         {"record_stride", cfg.record_stride}};
}

namespace {

// tridiagonal matrix: lo[i] = A(i, i-1), up[i] = A(i, i+1)
struct Tri {
  Vector lo, di, up;
};

Tri tri_from(const Matrix& a) {
  const Index n = a.rows();
  Tri t{Vector::Zero(n), a.diagonal(), Vector::Zero(n)};
  for (Index i = 1; i < n; ++i) t.lo[i] = a(i, i - 1);
  for (Index i = 0; i + 1 < n; ++i) t.up[i] = a(i, i + 1);
  return t;
}

Vector mul(const Tri& t, const Vector& x) {
  const Index n = x.size();
  Vector y = t.di.cwiseProduct(x);
  for (Index i = 1; i < n; ++i) y[i] += t.lo[i] * x[i - 1];
  for (Index i = 0; i + 1 < n; ++i) y[i] += t.up[i] * x[i + 1];
  return y;
}

Vector thomas(Vector lo, Vector di, Vector up, Vector rhs) {
  const Index n = rhs.size();
  for (Index i = 1; i < n; ++i) {
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  Vector x(n);
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (Index i = n - 2; i >= 0; --i) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

double f_react(double u) { return u * (u - 0.1) * (1.0 - u); }
double f_react_prime(double u) { return -3.0 * u * u + 2.2 * u - 0.1; }

class Integrator {
 public:
  explicit Integrator(const FhnConfig& cfg) : cfg_(cfg) {
    const Fem1d fem = assemble_fem_1d(cfg.nodes);
    m_ = tri_from(fem.mass);
    s_ = tri_from(fem.stiffness);
    ones_ = Vector::Ones(cfg.nodes);
    m_ones_ = mul(m_, ones_);
  }

  // advance (u, v) from t by h; false if Newton fails
  bool step(Vector& u, Vector& v, double t, double h) const {
    const double g = 1.0 - std::sqrt(2.0) / 2.0;
    const double a21 = 1.0 - g;
    const double beta = h * g;
    const double delta = 1.0 + beta * cfg_.gamma_param;
    const Vector mu_n = mul(m_, u);

    Vector du1, dv1, uu = u, vv;
    for (int stage = 0; stage < 2; ++stage) {
      const double ts = stage == 0 ? t + g * h : t + h;
      Vector ru = mu_n;
      Vector zv = v;
      if (stage == 1) {
        ru += h * a21 * du1;
        zv += h * a21 * dv1;
      }
      if (!newton(uu, ru, zv, beta, delta, ts)) return false;
      vv = (zv + beta * (cfg_.b * uu + cfg_.c * ones_)) / delta;
      if (stage == 0) {
        du1 = rhs_u(uu, vv, ts);
        dv1 = cfg_.b * uu - cfg_.gamma_param * vv + cfg_.c * ones_;
      }
    }
    u = uu;
    v = vv;
    return true;
  }

 private:
  double load(double t) const { return cfg_.mu * cfg_.flux_amplitude * t * t * t * std::exp(-cfg_.flux_rate * t); }

  Vector rhs_u(const Vector& u, const Vector& v, double t) const {
    const Vector fu = u.unaryExpr(&f_react);
    Vector r = -cfg_.mu * mul(s_, u) + mul(m_, fu - v) / cfg_.mu + (cfg_.c / cfg_.mu) * m_ones_;
    r[0] += load(t);
    return r;
  }

  bool newton(Vector& u, const Vector& ru, const Vector& zv, double beta, double delta, double t) const {
    const double atol = 1e-8;
    const double rtol = 1e-6;
    const double mu = cfg_.mu;
    const double dv_du = beta * cfg_.b / delta;
    for (int it = 0; it < 25; ++it) {
      const Vector v = (zv + beta * (cfg_.b * u + cfg_.c * ones_)) / delta;
      const Vector res = mul(m_, u) - ru - beta * rhs_u(u, v, t);
      const Vector fp = u.unaryExpr(&f_react_prime);
      const double cm = 1.0 + beta * dv_du / mu;
      Tri j{cm * m_.lo, cm * m_.di, cm * m_.up};
      j.lo += beta * mu * s_.lo;
      j.di += beta * mu * s_.di;
      j.up += beta * mu * s_.up;
      const Index n = u.size();
      for (Index i = 0; i < n; ++i) {
        j.di[i] -= beta / mu * m_.di[i] * fp[i];
        if (i > 0) j.lo[i] -= beta / mu * m_.lo[i] * fp[i - 1];
        if (i + 1 < n) j.up[i] -= beta / mu * m_.up[i] * fp[i + 1];
      }
      const Vector du = thomas(j.lo, j.di, j.up, -res);
      if (!du.allFinite()) return false;
      u += du;
      if (du.lpNorm<Eigen::Infinity>() <= atol + rtol * u.lpNorm<Eigen::Infinity>()) return true;
    }
    return false;
  }

  FhnConfig cfg_;
  Tri m_, s_;
  Vector ones_, m_ones_;
};

bool advance(const Integrator& integ, Vector& u, Vector& v, double t, double h, int depth) {
  Vector u1 = u, v1 = v;
  if (integ.step(u1, v1, t, h)) {
    u = u1;
    v = v1;
    return true;
  }
  if (depth >= 8) return false;
  return advance(integ, u, v, t, 0.5 * h, depth + 1) && advance(integ, u, v, t + 0.5 * h, 0.5 * h, depth + 1);
}

}  // namespace

Trajectory solve_fhn(const FhnConfig& cfg) {
  cfg.validate();
  const Index n = cfg.nodes;
  const Index steps = std::max<Index>(1, static_cast<Index>(std::llround(cfg.t_end / cfg.dt)));
  const double h = cfg.t_end / static_cast<double>(steps);
  const Index recorded = (steps + cfg.record_stride - 1) / cfg.record_stride + 1;

  Trajectory traj;
  traj.grid.resize(recorded);
  traj.states.resize(2 * n, recorded);
  Vector u = Vector::Zero(n), v = Vector::Zero(n);
  traj.grid[0] = 0.0;
  traj.states.col(0).setZero();

  Integrator integ(cfg);
  Index col = 1;
  for (Index k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    if (!advance(integ, u, v, t, h, 0)) {
      throw Error(ErrorCode::SolverDiverged, "Newton failed at t = " + std::to_string(t) + " after step halving");
    }
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps) {
      traj.grid[col] = k + 1 == steps ? cfg.t_end : static_cast<double>(k + 1) * h;
      traj.states.col(col).head(n) = u;
      traj.states.col(col).tail(n) = v;
      ++col;
    }
  }
  return traj;
}

GramSpace make_product_space(Index nodes) {
  return GramSpace::make(block_diagonal(assemble_fem_1d(nodes).mass, 2), "L2xL2(" + std::to_string(nodes) + ")");
}

LinearMap make_fhn_L(const GramSpace& product_space, Index nodes) {
  const Fem1d fem = assemble_fem_1d(nodes);
  GramSpace y = GramSpace::make(block_diagonal(fem.element_gram, 2), "dL2xdL2(" + std::to_string(nodes) + ")");
  return LinearMap::make_noninvertible(product_space, std::move(y), block_diagonal(fem.deriv, 2),
                                       MapKind::derivative);
}

LinearMap make_fhn_L(Index nodes) { return make_fhn_L(make_product_space(nodes), nodes); }

}  // namespace podkit
