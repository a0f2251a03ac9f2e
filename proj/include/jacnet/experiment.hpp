#pragma once

#include <string>
#include <vector>

#include "jacnet/train.hpp"

namespace jacnet {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EvalGridSpec {
  int n_test = 100;
  double lo = -2.0;
  double hi = 2.0;
};

/// One experiment, fully described by a single JSON file. Derived streams:
/// network weights draw from seed+1, the test set from seed+2.
struct ExperimentConfig {
  DatasetSpec data;  // target, n_train, train_interval, seed
  int hidden = 64;
  ActivationSpec activation{ActivationKind::spd, 1e-4, 1.0};
  Vector x0{0.0};
  Vector y0;  // empty: resolved to target(x0)
  TrainConfig train;
  EvalGridSpec eval;
  std::string output_dir = "out";
};

/// Parse and validate config JSON; unknown keys anywhere are rejected.
/// Overrides are dotted key=value pairs (e.g. "iterations=10",
/// "activation.k=0.5") applied before validation.
ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Resolved config (defaults and y0 materialized) as a JSON string.
std::string config_to_json(const ExperimentConfig& cfg);

Vector linspace(double lo, double hi, int n);

/// Fresh model for the config: seeded weights, anchor (x0, y0), the
/// configured integrator.
JacNetModel initial_model(const ExperimentConfig& cfg);

// Subcommand bodies. They throw on failure; run_guarded maps exceptions to
// exit codes (0 success, 1 validation failure, 2 numerical failure).
int cmd_train(const ExperimentConfig& cfg);
int cmd_eval(const ExperimentConfig& cfg, const std::string& params_path = "",
             const std::string& out_path = "");
int cmd_invert(const ExperimentConfig& cfg, const std::string& params_path = "",
               const std::string& out_path = "");
int cmd_diagnose(const IntegratorConfig& integrator);
int cmd_gradcheck(std::uint64_t seed, int instances_per_kind = 10);

int run_guarded(const std::function<int()>& body);

}  // namespace jacnet
