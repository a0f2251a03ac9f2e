#pragma once

#include <functional>
#include <span>
#include <utility>

#include "jacnet/field.hpp"
#include "jacnet/linalg.hpp"

namespace jacnet {

/// Straight segment r(t) = (1-t)a + t*b for t in [0,1], velocity b - a.
struct LinearPath {
  Vector a;
  Vector b;
};

/// (point, velocity) at parameter t. t outside [0,1] is an error.
std::pair<Vector, Vector> path_eval(const LinearPath& p, double t);

enum class Scheme { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4_fixed;
  int steps = 32;       // rk4_fixed: uniform step count
  double rtol = 1e-6;   // rk45_adaptive
  double atol = 1e-6;   // rk45_adaptive
  int max_steps = 100000;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, Vector best, double err_estimate)
      : std::runtime_error(what), best_value(std::move(best)), error_estimate(err_estimate) {}

  Vector best_value;      // state reached when the step budget ran out
  double error_estimate;  // inf-norm of the last embedded error estimate
};

/// One quadrature node: the integral contribution is weight * F(r(t)) * rdot.
struct QuadNode {
  double t;
  double weight;
};

struct IntegrationResult {
  Vector value;
  std::vector<QuadNode> nodes;  // replaying value = sum_i w_i*F(r(t_i))*rdot in order
  long evals = 0;               // field evaluations performed
};

using FieldFn = std::function<Matrix(const Vector&)>;
using RhsFn = std::function<Vector(double, const Vector&)>;

/// Integral of F(r(t))*rdot(t) over t in [0,1].
///
/// rk4_fixed runs classic RK4 on y' = F(r(t))*rdot with uniform steps; for a
/// t-only integrand this collapses to composite Simpson, and the recorded
/// nodes reproduce the value bit-exactly when replayed in order.
/// rk45_adaptive runs an embedded Dormand-Prince 4(5) pair with per-step
/// error control err <= atol + rtol*|y|, safety 0.9, step factors clamped
/// to [0.2, 5]. Exceeding max_steps throws NonConvergenceError.
IntegrationResult line_integrate(const FieldFn& field_fn, const LinearPath& p,
                                 const IntegratorConfig& cfg);

/// Gradient accumulation over recorded nodes: for each (t_i, w_i) adds
/// field_param_grad(f, r(t_i), w_i * upstream * rdot^T). Node positions and
/// weights are treated as parameter-independent.
Vector accumulate_node_grad(const JacobianField& f, const LinearPath& p,
                            std::span<const QuadNode> nodes, const Vector& upstream);

/// Gradient of <upstream, line_integrate(eval_field(f,.), p, cfg).value>
/// with respect to the flat parameters (discretize-then-differentiate).
Vector line_integrate_grad(const JacobianField& f, const LinearPath& p,
                           const IntegratorConfig& cfg, const Vector& upstream);

/// state(1) of state'(t) = rhs(t, state), state(0) = state0, under the same
/// scheme and tolerance contract as line_integrate.
Vector solve_ivp(const RhsFn& rhs, const Vector& state0, const IntegratorConfig& cfg);

}  // namespace jacnet
