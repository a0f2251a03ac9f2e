#include "jacnet/train.hpp"

#include <cmath>

#include "fmt17.hpp"
#include "jacnet/rng.hpp"

namespace jacnet {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string to_string(Target t) {
  switch (t) {
    case Target::exp: return "exp";
    case Target::abs: return "abs";
    case Target::custom: return "custom";
  }
  throw std::logic_error("unreachable target");
}

Target target_from_string(const std::string& s) {
  if (s == "exp") return Target::exp;
  if (s == "abs") return Target::abs;
  if (s == "custom") return Target::custom;
  throw std::invalid_argument("unknown target: " + s);
}

double eval_target(Target t, double x) {
  switch (t) {
    case Target::exp: return std::exp(x);
    case Target::abs: return std::abs(x);
    case Target::custom: break;
  }
  throw std::invalid_argument("custom target needs an explicit function");
}

Dataset sample_dataset(const DatasetSpec& spec, const TargetFn& custom) {
  require(spec.n >= 1, "sample_dataset: n must be >= 1");
  require(spec.lo <= spec.hi, "sample_dataset: interval must be ordered");
  if (spec.target == Target::custom) require(static_cast<bool>(custom),
                                             "sample_dataset: custom target needs a function");
  Dataset ds;
  ds.spec = spec;
  ds.pairs.reserve(spec.n);
  Rng rng(spec.seed);
  for (int i = 0; i < spec.n; ++i) {
    const double x = rng.uniform(spec.lo, spec.hi);
    const double y = spec.target == Target::custom ? custom(x) : eval_target(spec.target, x);
    ds.pairs.push_back({Vector{x}, Vector{y}});
  }
  return ds;
}

double l1_loss(const Vector& y, const Vector& yhat) {
  require(y.size() == yhat.size(), "l1_loss: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s;
}

RiskResult empirical_risk_and_grad(const JacNetModel& m, const Dataset& ds) {
  require(!ds.pairs.empty(), "empirical_risk_and_grad: empty dataset");
  RiskResult out;
  out.grad.assign(param_count(m.field), 0.0);
  const double inv_n = 1.0 / static_cast<double>(ds.pairs.size());
  const FieldFn field_fn = [&](const Vector& x) { return eval_field(m.field, x); };
  for (const auto& [x, y] : ds.pairs) {
    const LinearPath path{m.x0, x};
    const IntegrationResult res = line_integrate(field_fn, path, m.integrator);
    const Vector yhat = add(m.y0, res.value);
    out.loss += inv_n * l1_loss(y, yhat);
    Vector upstream(y.size());
    bool any = false;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double r = y[j] - yhat[j];
      upstream[j] = r > 0.0 ? -1.0 : (r < 0.0 ? 1.0 : 0.0);
      any = any || upstream[j] != 0.0;
    }
    out.field_evals += res.evals;
    if (any) {
      axpy(inv_n, accumulate_node_grad(m.field, path, res.nodes, upstream), out.grad);
      out.field_evals += static_cast<long>(res.nodes.size());
    }
  }
  return out;
}

TrainState adam_step(TrainState state, const Vector& grad, const TrainConfig& cfg) {
  require(grad.size() == state.params.size(), "adam_step: gradient dimension mismatch");
  require(state.adam_m.size() == state.params.size() &&
              state.adam_v.size() == state.params.size(),
          "adam_step: moment dimension mismatch");
  const int t = state.iter + 1;
  const double bc1 = 1.0 - std::pow(cfg.adam.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.adam.beta2, t);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    state.adam_m[i] = cfg.adam.beta1 * state.adam_m[i] + (1.0 - cfg.adam.beta1) * grad[i];
    state.adam_v[i] = cfg.adam.beta2 * state.adam_v[i] + (1.0 - cfg.adam.beta2) * grad[i] * grad[i];
    const double mhat = state.adam_m[i] / bc1;
    const double vhat = state.adam_v[i] / bc2;
    state.params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam.eps);
  }
  state.iter = t;
  return state;
}

IntegratorConfig integrator_at_tolerance(const IntegratorConfig& base, double tol) {
  IntegratorConfig cfg = base;
  if (cfg.scheme == Scheme::rk45_adaptive) {
    cfg.rtol = tol;
    cfg.atol = tol;
  } else {
    cfg.steps = std::max(1, static_cast<int>(std::ceil(std::pow(tol, -0.25))));
  }
  return cfg;
}

std::pair<JacNetModel, TrainState> train(const Dataset& ds, const JacNetModel& model0,
                                         const TrainConfig& cfg,
                                         const IterCallback& on_iteration) {
  require(cfg.lr > 0.0, "train: lr must be positive");
  require(cfg.iterations >= 0, "train: iterations must be >= 0");
  require(cfg.anneal.factor > 0.0 && cfg.anneal.factor < 1.0, "train: factor must be in (0, 1)");
  require(cfg.anneal.tol_floor > 0.0, "train: tol_floor must be positive");

  JacNetModel m = model0;
  TrainState st;
  st.params = flatten_params(m.field);
  st.adam_m.assign(st.params.size(), 0.0);
  st.adam_v.assign(st.params.size(), 0.0);
  st.current_tol = cfg.anneal.tol_init;
  if (cfg.iterations == 0) return {m, st};

  for (int k = 0; k < cfg.iterations; ++k) {
    m.integrator = integrator_at_tolerance(cfg.integrator, st.current_tol);
    const RiskResult rr = empirical_risk_and_grad(m, ds);
    st.history.push_back({k, rr.loss, st.current_tol, rr.field_evals});
    if (on_iteration) on_iteration(st, m);
    if (rr.loss < st.current_tol)
      st.current_tol = std::max(st.current_tol * cfg.anneal.factor, cfg.anneal.tol_floor);
    st = adam_step(std::move(st), rr.grad, cfg);
    load_flat_params(m.field, st.params);
  }

  // Loss of the final parameters, at the tolerance reached by annealing.
  m.integrator = integrator_at_tolerance(cfg.integrator, st.current_tol);
  const RiskResult fin = empirical_risk_and_grad(m, ds);
  st.history.push_back({cfg.iterations, fin.loss, st.current_tol, fin.field_evals});
  if (on_iteration) on_iteration(st, m);
  return {m, st};
}

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::string out = "iter,loss,tolerance,field_evals\n";
  for (const HistoryRow& row : history) {
    out += std::to_string(row.iter);
    out += ',';
    out += fmt17(row.loss);
    out += ',';
    out += fmt17(row.tolerance);
    out += ',';
    out += std::to_string(row.field_evals);
    out += '\n';
  }
  return out;
}

}  // namespace jacnet
