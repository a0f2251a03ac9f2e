#include "jacnet/model.hpp"

namespace jacnet {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_model(const JacNetModel& m) {
  require(static_cast<int>(m.x0.size()) == m.field.d_in, "model: x0 dimension mismatch");
  require(static_cast<int>(m.y0.size()) == m.field.d_out, "model: y0 dimension mismatch");
}

}  // namespace

Vector predict(const JacNetModel& m, const Vector& x) {
  check_model(m);
  require(static_cast<int>(x.size()) == m.field.d_in, "predict: x dimension mismatch");
  require(all_finite(x), "predict: x must be finite");
  const IntegrationResult res = line_integrate(
      [&](const Vector& p) { return eval_field(m.field, p); }, LinearPath{m.x0, x},
      m.integrator);
  return add(m.y0, res.value);
}

Vector predict_grad(const JacNetModel& m, const Vector& x, const Vector& upstream) {
  check_model(m);
  return line_integrate_grad(m.field, LinearPath{m.x0, x}, m.integrator, upstream);
}

Vector invert(const JacNetModel& m, const Vector& y) {
  check_model(m);
  require(m.field.d_in == m.field.d_out, "invert: requires d_in == d_out");
  require(static_cast<int>(y.size()) == m.field.d_out, "invert: y dimension mismatch");
  const Vector rdot = sub(y, m.y0);
  const RhsFn rhs = [&](double, const Vector& x) {
    return matvec(lu_inverse(eval_field(m.field, x)), rdot);
  };
  return solve_ivp(rhs, m.x0, m.integrator);
}

double round_trip_error(const JacNetModel& m, const std::vector<Vector>& xs) {
  double worst = 0.0;
  for (const Vector& x : xs)
    worst = std::max(worst, max_abs(sub(invert(m, predict(m, x)), x)));
  return worst;
}

double conservativity_diagnostic(const FieldFn& field_fn, const Vector& a, const Vector& b,
                                 const IntegratorConfig& cfg) {
  require(a.size() == b.size(), "conservativity_diagnostic: dimension mismatch");
  require(a.size() >= 2, "conservativity_diagnostic: requires dim >= 2");
  const Vector direct = line_integrate(field_fn, LinearPath{a, b}, cfg).value;
  Vector corner = a;
  corner[0] = b[0];  // first coordinate moves first
  const Vector leg1 = line_integrate(field_fn, LinearPath{a, corner}, cfg).value;
  const Vector leg2 = line_integrate(field_fn, LinearPath{corner, b}, cfg).value;
  return max_abs(sub(direct, add(leg1, leg2)));
}

}  // namespace jacnet
