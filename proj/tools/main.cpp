#include <cstdint>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jacnet/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"jacnet: learn a function by learning its Jacobian and integrating it"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string params_path;
  std::string out_path;
  std::uint64_t gc_seed = 0;
  int gc_instances = 10;

  auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("-c,--config", config_path, "experiment config JSON");
    if (required) opt->required();
    sub->add_option("--set", overrides, "override a config field, dotted key=value")
        ->take_all();
  };

  CLI::App* sub_train = app.add_subcommand("train", "train a model and write artifacts");
  add_config(sub_train, true);

  CLI::App* sub_eval = app.add_subcommand("eval", "write eval.csv over the eval grid");
  add_config(sub_eval, true);
  sub_eval->add_option("--params", params_path, "params.json path (default: output_dir)");
  sub_eval->add_option("--out", out_path, "output csv path (default: output_dir/eval.csv)");

  CLI::App* sub_invert = app.add_subcommand("invert", "write invert.csv over the output range");
  add_config(sub_invert, true);
  sub_invert->add_option("--params", params_path, "params.json path (default: output_dir)");
  sub_invert->add_option("--out", out_path, "output csv path (default: output_dir/invert.csv)");

  CLI::App* sub_diag = app.add_subcommand("diagnose", "run the path-dependence diagnostics");
  add_config(sub_diag, false);

  CLI::App* sub_gc = app.add_subcommand("gradcheck", "finite-difference gradient check");
  sub_gc->add_option("--seed", gc_seed, "rng seed");
  sub_gc->add_option("--instances", gc_instances, "instances per activation kind")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  return jacnet::run_guarded([&]() -> int {
    if (sub_train->parsed()) return jacnet::cmd_train(jacnet::load_config(config_path, overrides));
    if (sub_eval->parsed())
      return jacnet::cmd_eval(jacnet::load_config(config_path, overrides), params_path, out_path);
    if (sub_invert->parsed())
      return jacnet::cmd_invert(jacnet::load_config(config_path, overrides), params_path,
                                out_path);
    if (sub_diag->parsed()) {
      jacnet::IntegratorConfig integ;  // exact for these low-degree fields
      integ.scheme = jacnet::Scheme::rk4_fixed;
      integ.steps = 64;
      if (!config_path.empty())
        integ = jacnet::load_config(config_path, overrides).train.integrator;
      return jacnet::cmd_diagnose(integ);
    }
    return jacnet::cmd_gradcheck(gc_seed, gc_instances);
  });
}
