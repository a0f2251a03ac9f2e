#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "jacnet/model.hpp"

namespace jacnet {

enum class Target { exp, abs, custom };

std::string to_string(Target t);
Target target_from_string(const std::string& s);

/// Scalar target evaluated elementwise; Target::custom needs a user function.
using TargetFn = std::function<double(double)>;
double eval_target(Target t, double x);

struct DatasetSpec {
  Target target = Target::exp;
  int n = 5;
  double lo = -1.0;
  double hi = 1.0;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<std::pair<Vector, Vector>> pairs;  // (x, y = target(x))
  DatasetSpec spec;
};

/// n i.i.d. uniform 1-D draws from [lo, hi), labeled by the target.
/// Identical spec (including seed) gives an identical dataset.
Dataset sample_dataset(const DatasetSpec& spec, const TargetFn& custom = {});

/// Sum of absolute componentwise differences.
double l1_loss(const Vector& y, const Vector& yhat);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AnnealConfig {
  double tol_init = 1e-1;
  double factor = 0.5;
  double tol_floor = 1e-8;
};

struct TrainConfig {
  double lr = 0.01;
  int iterations = 50;
  AdamConfig adam;
  AnnealConfig anneal;
  IntegratorConfig integrator;
};

struct HistoryRow {
  int iter;
  double loss;
  double tolerance;
  long field_evals;
};

struct TrainState {
  Vector params;
  Vector adam_m;
  Vector adam_v;
  int iter = 0;
  double current_tol = 1e-1;
  std::vector<HistoryRow> history;
};

struct RiskResult {
  double loss = 0.0;
  Vector grad;
  long field_evals = 0;
};

/// Full-batch L1 empirical risk and its parameter gradient. The per-sample
/// upstream is -sign(y - yhat) with sign(0) := 0; samples are accumulated in
/// dataset order.
RiskResult empirical_risk_and_grad(const JacNetModel& m, const Dataset& ds);

/// Standard bias-corrected Adam update; increments the iteration counter.
TrainState adam_step(TrainState state, const Vector& grad, const TrainConfig& cfg);

/// Copies cfg.integrator with its accuracy knob set from tol: rtol = atol =
/// tol for rk45_adaptive, steps = ceil(tol^(-1/4)) for rk4_fixed.
IntegratorConfig integrator_at_tolerance(const IntegratorConfig& base, double tol);

using IterCallback = std::function<void(const TrainState&, const JacNetModel&)>;

/// Full-batch training loop with tolerance annealing: each iteration
/// evaluates loss+gradient at the current tolerance, takes an Adam step, and
/// halves the tolerance (down to tol_floor) whenever the loss drops below
/// it. History rows hold the loss at iteration k (params after k updates);
/// with iterations = N the history has N+1 rows, the last being the final
/// loss. iterations = 0 returns model0 untouched with an empty history.
std::pair<JacNetModel, TrainState> train(const Dataset& ds, const JacNetModel& model0,
                                         const TrainConfig& cfg,
                                         const IterCallback& on_iteration = {});

/// History serialized as CSV: header iter,loss,tolerance,field_evals and
/// fp64 columns printed with 17 significant digits.
std::string history_csv(const std::vector<HistoryRow>& history);

}  // namespace jacnet
