#include "jacnet/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace jacnet {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Dormand-Prince 4(5) tableau. b5 is the propagated 5th-order weight row,
// b4 the embedded 4th-order one.
constexpr int kStages = 7;
constexpr double kC[kStages] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[kStages][kStages - 1] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[kStages] = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[kStages] = {5179.0 / 57600,     0.0,          7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;

// Embedded-pair driver over t in [0,1]. on_accept(t, h) fires once per
// accepted step before t advances; nfev counts rhs evaluations.
Vector dopri5(const RhsFn& rhs, Vector y, double rtol, double atol, int max_steps, long& nfev,
              const std::function<void(double, double)>& on_accept) {
  require(rtol > 0.0 && atol > 0.0, "rk45_adaptive: tolerances must be positive");
  const std::size_t dim = y.size();
  double t = 0.0;
  double h = 1.0;
  long attempts = 0;
  double last_err_abs = 0.0;

  std::vector<Vector> k(kStages);
  k[0] = rhs(t, y);
  ++nfev;

  while (true) {
    const bool last = (t + h >= 1.0);
    if (last) h = 1.0 - t;

    if (++attempts > max_steps) {
      throw NonConvergenceError(
          "rk45_adaptive: exceeded max_steps=" + std::to_string(max_steps) +
              " at t=" + std::to_string(t),
          y, last_err_abs);
    }

    for (int s = 1; s < kStages; ++s) {
      Vector ys = y;
      for (int j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) axpy(h * kA[s][j], k[j], ys);
      k[s] = rhs(t + kC[s] * h, ys);
      ++nfev;
    }

    Vector ynew = y;
    for (int j = 0; j < kStages; ++j)
      if (kB5[j] != 0.0) axpy(h * kB5[j], k[j], ynew);

    double err_norm = 0.0;
    double err_abs = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double e = 0.0;
      for (int j = 0; j < kStages; ++j) e += (kB5[j] - kB4[j]) * k[j][i];
      e *= h;
      err_abs = std::max(err_abs, std::abs(e));
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err_norm += (e / sc) * (e / sc);
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(dim));
    last_err_abs = err_abs;

    if (err_norm <= 1.0) {
      if (on_accept) on_accept(t, h);
      t += h;
      y = std::move(ynew);
      k[0] = k[kStages - 1];  // FSAL
      if (last) return y;
      const double fac = (err_norm == 0.0)
                             ? kFacMax
                             : std::clamp(kSafety * std::pow(err_norm, -0.2), kFacMin, kFacMax);
      h *= fac;
    } else {
      h *= std::clamp(kSafety * std::pow(err_norm, -0.2), kFacMin, 1.0);
    }
  }
}

Vector rk4_fixed_ivp(const RhsFn& rhs, Vector y, int steps) {
  require(steps >= 1, "rk4_fixed: steps must be >= 1");
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Vector k1 = rhs(t, y);
    Vector y2 = y;
    axpy(0.5 * h, k1, y2);
    const Vector k2 = rhs(t + 0.5 * h, y2);
    Vector y3 = y;
    axpy(0.5 * h, k2, y3);
    const Vector k3 = rhs(t + 0.5 * h, y3);
    Vector y4 = y;
    axpy(h, k3, y4);
    const Vector k4 = rhs(t + h, y4);
    for (std::size_t c = 0; c < y.size(); ++c)
      y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return y;
}

}  // namespace

std::pair<Vector, Vector> path_eval(const LinearPath& p, double t) {
  require(p.a.size() == p.b.size(), "path: endpoint dimension mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("path_eval: t outside [0, 1]");
  Vector point(p.a.size());
  for (std::size_t i = 0; i < p.a.size(); ++i) point[i] = (1.0 - t) * p.a[i] + t * p.b[i];
  return {std::move(point), sub(p.b, p.a)};
}

IntegrationResult line_integrate(const FieldFn& field_fn, const LinearPath& p,
                                 const IntegratorConfig& cfg) {
  require(p.a.size() == p.b.size(), "line_integrate: endpoint dimension mismatch");
  const Vector rdot = sub(p.b, p.a);

  IntegrationResult res;
  auto integrand = [&](double t) {
    auto [point, vel] = path_eval(p, t);
    ++res.evals;
    return matvec(field_fn(point), vel);
  };

  if (cfg.scheme == Scheme::rk4_fixed) {
    require(cfg.steps >= 1, "rk4_fixed: steps must be >= 1");
    const int n = cfg.steps;
    const double h = 1.0 / n;
    // Simpson weights (what classic RK4 reduces to for a t-only integrand),
    // with shared step endpoints merged into single nodes.
    res.nodes.push_back({0.0, h / 6.0});
    for (int i = 0; i < n; ++i) {
      res.nodes.push_back({(i + 0.5) * h, 2.0 * h / 3.0});
      res.nodes.push_back({i == n - 1 ? 1.0 : (i + 1) * h, i == n - 1 ? h / 6.0 : h / 3.0});
    }
    for (const QuadNode& node : res.nodes) {
      const Vector g = integrand(node.t);
      if (res.value.empty()) res.value.assign(g.size(), 0.0);
      axpy(node.weight, g, res.value);
    }
    return res;
  }

  // rk45_adaptive: error-controlled steps over t, nodes recorded per
  // accepted step at the nonzero propagated weights.
  RhsFn rhs = [&](double t, const Vector&) { return integrand(t); };
  auto on_accept = [&](double t, double h) {
    for (int j = 0; j < kStages; ++j)
      if (kB5[j] != 0.0) res.nodes.push_back({t + kC[j] * h, h * kB5[j]});
  };
  const Vector g0 = matvec(field_fn(p.a), rdot);  // sizes the state
  ++res.evals;
  long nfev = 0;
  res.value = dopri5(rhs, Vector(g0.size(), 0.0), cfg.rtol, cfg.atol, cfg.max_steps, nfev,
                     on_accept);
  return res;
}

Vector accumulate_node_grad(const JacobianField& f, const LinearPath& p,
                            std::span<const QuadNode> nodes, const Vector& upstream) {
  require(static_cast<int>(upstream.size()) == f.d_out,
          "accumulate_node_grad: upstream dimension mismatch");
  const Vector rdot = sub(p.b, p.a);
  Vector grad(param_count(f), 0.0);
  for (const QuadNode& node : nodes) {
    auto [point, vel] = path_eval(p, node.t);
    Matrix up = outer(upstream, vel);
    for (double& v : up.data) v *= node.weight;
    axpy(1.0, field_param_grad(f, point, up), grad);
  }
  return grad;
}

Vector line_integrate_grad(const JacobianField& f, const LinearPath& p,
                           const IntegratorConfig& cfg, const Vector& upstream) {
  const IntegrationResult res =
      line_integrate([&](const Vector& x) { return eval_field(f, x); }, p, cfg);
  return accumulate_node_grad(f, p, res.nodes, upstream);
}

Vector solve_ivp(const RhsFn& rhs, const Vector& state0, const IntegratorConfig& cfg) {
  if (cfg.scheme == Scheme::rk4_fixed) return rk4_fixed_ivp(rhs, state0, cfg.steps);
  long nfev = 0;
  return dopri5(rhs, state0, cfg.rtol, cfg.atol, cfg.max_steps, nfev, {});
}

}  // namespace jacnet
