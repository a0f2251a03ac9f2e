#pragma once

#include "jacnet/field.hpp"
#include "jacnet/integrate.hpp"

namespace jacnet {

/// Prediction model: a Jacobian field anchored at (x0, y0). Predictions
/// integrate the field from x0 to the query point, so predict(x0) == y0
/// holds exactly in every configuration.
struct JacNetModel {
  JacobianField field;
  Vector x0;
  Vector y0;
  IntegratorConfig integrator;
};

/// y0 + integral of J(r(t)) * rdot over the straight path x0 -> x.
Vector predict(const JacNetModel& m, const Vector& x);

/// Gradient of <upstream, predict(m, x)> w.r.t. the flat field parameters.
/// The anchor y0 and the path itself carry no parameter gradient.
Vector predict_grad(const JacNetModel& m, const Vector& x, const Vector& upstream);

/// Inverse by solving the IVP x'(t) = J(x(t))^{-1} * (y - y0), x(0) = x0,
/// i.e. the preimage runs so that predict(x(t)) tracks the straight output
/// path from y0 to y. Requires d_in == d_out; a singular Jacobian along the
/// trajectory throws (cannot happen under the spd activation).
Vector invert(const JacNetModel& m, const Vector& y);

/// Max over the grid of |invert(m, predict(m, x)) - x|_inf.
double round_trip_error(const JacNetModel& m, const std::vector<Vector>& xs);

/// Path dependence probe for dim >= 2: inf-norm difference between the
/// integral along the straight path a -> b and along the two-segment path
/// a -> (b_1, a_2, ...) -> b. Near zero iff the field behaves conservatively
/// between a and b.
double conservativity_diagnostic(const FieldFn& field_fn, const Vector& a, const Vector& b,
                                 const IntegratorConfig& cfg);

}  // namespace jacnet
