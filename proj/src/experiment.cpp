#include "jacnet/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fmt17.hpp"
#include "jacnet/field_io.hpp"
#include "jacnet/rng.hpp"

namespace jacnet {

namespace {

using nlohmann::json;

void expect(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

// ---- schema validation -----------------------------------------------

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    expect(known, "config: unknown key \"" + (where.empty() ? key : where + "." + key) + "\"");
  }
}

std::pair<double, double> interval_from(const json& j, const std::string& name) {
  expect(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
         "config: " + name + " must be [lo, hi]");
  const double lo = j[0].get<double>();
  const double hi = j[1].get<double>();
  expect(lo <= hi, "config: " + name + " must be ordered");
  return {lo, hi};
}

Vector vector_from(const json& j, const std::string& name) {
  expect(j.is_array() && !j.empty(), "config: " + name + " must be a nonempty array");
  Vector v;
  for (const auto& e : j) {
    expect(e.is_number(), "config: " + name + " entries must be numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

ExperimentConfig parse_config(const json& j) {
  expect(j.is_object(), "config: root must be a JSON object");
  reject_unknown(j, "", {"target", "n_train", "train_interval", "seed", "hidden", "activation",
                         "x0", "y0", "lr", "iterations", "adam", "anneal", "integrator", "eval",
                         "output_dir"});
  ExperimentConfig cfg;

  if (j.contains("target")) cfg.data.target = target_from_string(j["target"].get<std::string>());
  expect(cfg.data.target != Target::custom, "config: custom target is not available here");
  if (j.contains("n_train")) cfg.data.n = j["n_train"].get<int>();
  expect(cfg.data.n >= 1, "config: n_train must be >= 1");
  if (j.contains("train_interval"))
    std::tie(cfg.data.lo, cfg.data.hi) = interval_from(j["train_interval"], "train_interval");
  if (j.contains("seed")) cfg.data.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("hidden")) cfg.hidden = j["hidden"].get<int>();
  expect(cfg.hidden >= 1, "config: hidden must be >= 1");

  if (j.contains("activation")) {
    const json& a = j["activation"];
    reject_unknown(a, "activation", {"kind", "epsilon", "k"});
    if (a.contains("kind"))
      cfg.activation.kind = activation_kind_from_string(a["kind"].get<std::string>());
    if (a.contains("epsilon")) cfg.activation.epsilon = a["epsilon"].get<double>();
    if (a.contains("k")) cfg.activation.k = a["k"].get<double>();
    expect(cfg.activation.epsilon > 0.0, "config: activation.epsilon must be > 0");
    expect(cfg.activation.k > 0.0, "config: activation.k must be > 0");
  }

  if (j.contains("x0")) cfg.x0 = vector_from(j["x0"], "x0");
  if (j.contains("y0")) cfg.y0 = vector_from(j["y0"], "y0");

  if (j.contains("lr")) cfg.train.lr = j["lr"].get<double>();
  expect(cfg.train.lr > 0.0, "config: lr must be > 0");
  if (j.contains("iterations")) cfg.train.iterations = j["iterations"].get<int>();
  expect(cfg.train.iterations >= 0, "config: iterations must be >= 0");

  if (j.contains("adam")) {
    const json& a = j["adam"];
    reject_unknown(a, "adam", {"beta1", "beta2", "eps"});
    if (a.contains("beta1")) cfg.train.adam.beta1 = a["beta1"].get<double>();
    if (a.contains("beta2")) cfg.train.adam.beta2 = a["beta2"].get<double>();
    if (a.contains("eps")) cfg.train.adam.eps = a["eps"].get<double>();
  }

  if (j.contains("anneal")) {
    const json& a = j["anneal"];
    reject_unknown(a, "anneal", {"tol_init", "factor", "tol_floor"});
    if (a.contains("tol_init")) cfg.train.anneal.tol_init = a["tol_init"].get<double>();
    if (a.contains("factor")) cfg.train.anneal.factor = a["factor"].get<double>();
    if (a.contains("tol_floor")) cfg.train.anneal.tol_floor = a["tol_floor"].get<double>();
    expect(cfg.train.anneal.tol_init > 0.0, "config: anneal.tol_init must be > 0");
    expect(cfg.train.anneal.factor > 0.0 && cfg.train.anneal.factor < 1.0,
           "config: anneal.factor must be in (0, 1)");
    expect(cfg.train.anneal.tol_floor > 0.0, "config: anneal.tol_floor must be > 0");
  }

  cfg.train.integrator.scheme = Scheme::rk45_adaptive;
  cfg.train.integrator.rtol = 1e-8;
  cfg.train.integrator.atol = 1e-8;
  if (j.contains("integrator")) {
    const json& a = j["integrator"];
    reject_unknown(a, "integrator", {"scheme", "steps", "rtol", "atol", "max_steps"});
    if (a.contains("scheme")) {
      const std::string s = a["scheme"].get<std::string>();
      if (s == "rk4_fixed")
        cfg.train.integrator.scheme = Scheme::rk4_fixed;
      else if (s == "rk45_adaptive")
        cfg.train.integrator.scheme = Scheme::rk45_adaptive;
      else
        throw ValidationError("config: unknown integrator.scheme \"" + s + "\"");
    }
    if (a.contains("steps")) cfg.train.integrator.steps = a["steps"].get<int>();
    if (a.contains("rtol")) cfg.train.integrator.rtol = a["rtol"].get<double>();
    if (a.contains("atol")) cfg.train.integrator.atol = a["atol"].get<double>();
    if (a.contains("max_steps")) cfg.train.integrator.max_steps = a["max_steps"].get<int>();
    expect(cfg.train.integrator.steps >= 1, "config: integrator.steps must be >= 1");
    expect(cfg.train.integrator.rtol > 0.0 && cfg.train.integrator.atol > 0.0,
           "config: integrator tolerances must be > 0");
    expect(cfg.train.integrator.max_steps >= 1, "config: integrator.max_steps must be >= 1");
  }

  if (j.contains("eval")) {
    const json& a = j["eval"];
    reject_unknown(a, "eval", {"n_test", "interval"});
    if (a.contains("n_test")) cfg.eval.n_test = a["n_test"].get<int>();
    expect(cfg.eval.n_test >= 1, "config: eval.n_test must be >= 1");
    if (a.contains("interval")) std::tie(cfg.eval.lo, cfg.eval.hi) = interval_from(a["interval"], "eval.interval");
  }

  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  expect(!cfg.output_dir.empty(), "config: output_dir must be nonempty");

  // Resolve the anchor: y0 defaults to target(x0).
  if (cfg.y0.empty()) {
    expect(cfg.x0.size() == 1, "config: y0 is required when x0 is not 1-D");
    cfg.y0 = Vector{eval_target(cfg.data.target, cfg.x0[0])};
  }
  expect(cfg.x0.size() == 1 && cfg.y0.size() == 1,
         "config: named targets are scalar; x0 and y0 must be 1-D");
  return cfg;
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    expect(eq != std::string::npos && eq > 0, "override must look like key=value: " + ov);
    const std::string path = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // unquoted strings (e.g. target=abs)
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
      expect(!key.empty(), "override has an empty key segment: " + ov);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
}

// ---- artifact helpers --------------------------------------------------

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

json config_json(const ExperimentConfig& cfg) {
  json act{{"kind", to_string(cfg.activation.kind)}};
  if (cfg.activation.kind == ActivationKind::spd) act["epsilon"] = cfg.activation.epsilon;
  if (cfg.activation.kind == ActivationKind::scaled_tanh) act["k"] = cfg.activation.k;
  json integ{{"scheme", cfg.train.integrator.scheme == Scheme::rk4_fixed ? "rk4_fixed"
                                                                         : "rk45_adaptive"},
             {"steps", cfg.train.integrator.steps},
             {"rtol", cfg.train.integrator.rtol},
             {"atol", cfg.train.integrator.atol},
             {"max_steps", cfg.train.integrator.max_steps}};
  return json{
      {"target", to_string(cfg.data.target)},
      {"n_train", cfg.data.n},
      {"train_interval", {cfg.data.lo, cfg.data.hi}},
      {"seed", cfg.data.seed},
      {"hidden", cfg.hidden},
      {"activation", std::move(act)},
      {"x0", cfg.x0},
      {"y0", cfg.y0},
      {"lr", cfg.train.lr},
      {"iterations", cfg.train.iterations},
      {"adam",
       {{"beta1", cfg.train.adam.beta1}, {"beta2", cfg.train.adam.beta2},
        {"eps", cfg.train.adam.eps}}},
      {"anneal",
       {{"tol_init", cfg.train.anneal.tol_init}, {"factor", cfg.train.anneal.factor},
        {"tol_floor", cfg.train.anneal.tol_floor}}},
      {"integrator", std::move(integ)},
      {"eval", {{"n_test", cfg.eval.n_test}, {"interval", {cfg.eval.lo, cfg.eval.hi}}}},
      {"output_dir", cfg.output_dir},
  };
}

double dataset_loss(const JacNetModel& m, const Dataset& ds) {
  double loss = 0.0;
  for (const auto& [x, y] : ds.pairs) loss += l1_loss(y, predict(m, x));
  return loss / static_cast<double>(ds.pairs.size());
}

JacobianField field_for_eval(const ExperimentConfig& cfg, const std::string& params_path) {
  const std::string path =
      params_path.empty() ? (std::filesystem::path(cfg.output_dir) / "params.json").string()
                          : params_path;
  try {
    return load_field(path);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("cannot load params: ") + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  apply_overrides(j, overrides);
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), overrides);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

Vector linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  if (n == 1) return Vector{lo};
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  v[n - 1] = hi;
  return v;
}

JacNetModel initial_model(const ExperimentConfig& cfg) {
  JacNetModel m;
  m.field = make_field(static_cast<int>(cfg.x0.size()), static_cast<int>(cfg.y0.size()),
                       cfg.hidden, cfg.activation, cfg.data.seed + 1);
  m.x0 = cfg.x0;
  m.y0 = cfg.y0;
  m.integrator = cfg.train.integrator;
  return m;
}

int cmd_train(const ExperimentConfig& cfg) {
  const Dataset ds = sample_dataset(cfg.data);
  const JacNetModel model0 = initial_model(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  auto [model, state] = train(ds, model0, cfg.train);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double final_train_loss =
      state.history.empty() ? dataset_loss(model, ds) : state.history.back().loss;

  DatasetSpec test_spec = cfg.data;
  test_spec.n = cfg.eval.n_test;
  test_spec.lo = cfg.eval.lo;
  test_spec.hi = cfg.eval.hi;
  test_spec.seed = cfg.data.seed + 2;
  const double test_loss = dataset_loss(model, sample_dataset(test_spec));

  int anneal_events = 0;
  for (std::size_t i = 1; i < state.history.size(); ++i)
    if (state.history[i].tolerance < state.history[i - 1].tolerance) ++anneal_events;

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  save_field(model.field, (dir / "params.json").string());
  write_file(dir / "history.csv", history_csv(state.history));
  json meta{{"config", config_json(cfg)},
            {"metrics",
             {{"final_train_loss", final_train_loss},
              {"test_loss", test_loss},
              {"wall_time_seconds", wall},
              {"annealing_events", anneal_events},
              {"final_tolerance", state.current_tol}}}};
  write_file(dir / "meta.json", meta.dump(2) + "\n");

  std::cout << "trained " << to_string(cfg.data.target) << "/" << to_string(cfg.activation.kind)
            << ": final_train_loss=" << final_train_loss << " test_loss=" << test_loss
            << " annealing_events=" << anneal_events << "\n";
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& params_path,
             const std::string& out_path) {
  JacNetModel m = initial_model(cfg);
  m.field = field_for_eval(cfg, params_path);
  const Vector grid = linspace(cfg.eval.lo, cfg.eval.hi, cfg.eval.n_test);
  std::string csv = "x,y_target,y_pred\n";
  for (double x : grid) {
    const double yp = predict(m, Vector{x})[0];
    csv += fmt17(x) + "," + fmt17(eval_target(cfg.data.target, x)) + "," + fmt17(yp) + "\n";
  }
  const std::filesystem::path out =
      out_path.empty() ? std::filesystem::path(cfg.output_dir) / "eval.csv" : out_path;
  std::filesystem::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  write_file(out, csv);
  std::cout << "wrote " << out.string() << " (" << grid.size() << " rows)\n";
  return 0;
}

int cmd_invert(const ExperimentConfig& cfg, const std::string& params_path,
               const std::string& out_path) {
  JacNetModel m = initial_model(cfg);
  m.field = field_for_eval(cfg, params_path);
  if (m.field.activation.kind != ActivationKind::spd)
    throw ValidationError("invert: requires an spd-activated model (got " +
                          to_string(m.field.activation.kind) + ")");
  if (cfg.data.target != Target::exp)
    throw ValidationError("invert: no reference inverse for target " +
                          to_string(cfg.data.target));
  const Vector ys = linspace(eval_target(cfg.data.target, cfg.data.lo),
                             eval_target(cfg.data.target, cfg.data.hi), cfg.eval.n_test);
  std::string csv = "y,x_true,x_pred\n";
  for (double y : ys) {
    const double xp = invert(m, Vector{y})[0];
    csv += fmt17(y) + "," + fmt17(std::log(y)) + "," + fmt17(xp) + "\n";
  }
  const std::filesystem::path out =
      out_path.empty() ? std::filesystem::path(cfg.output_dir) / "invert.csv" : out_path;
  std::filesystem::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  write_file(out, csv);
  std::cout << "wrote " << out.string() << " (" << ys.size() << " rows)\n";
  return 0;
}

int cmd_diagnose(const IntegratorConfig& integrator) {
  const Vector a{0.0, 0.0};
  const Vector b{1.0, 1.0};
  // Gradient of |x|^2: path independent.
  const FieldFn conservative = [](const Vector& x) {
    Matrix m(1, 2);
    m(0, 0) = 2.0 * x[0];
    m(0, 1) = 2.0 * x[1];
    return m;
  };
  // Rotational field (-x2, x1): circulation makes the two paths disagree by 1.
  const FieldFn rotational = [](const Vector& x) {
    Matrix m(1, 2);
    m(0, 0) = -x[1];
    m(0, 1) = x[0];
    return m;
  };
  const double dc = conservativity_diagnostic(conservative, a, b, integrator);
  const double dr = conservativity_diagnostic(rotational, a, b, integrator);
  const bool ok = dc <= 1e-8 && std::abs(dr - 1.0) <= 1e-6;
  std::cout << "conservative field path discrepancy: " << fmt17(dc) << " (limit 1e-8)\n";
  std::cout << "rotational field path discrepancy:   " << fmt17(dr) << " (expected 1.0 +- 1e-6)\n";
  if (!ok) std::cerr << "diagnose: discrepancy outside tolerance\n";
  return ok ? 0 : 2;
}

int cmd_gradcheck(std::uint64_t seed, int instances_per_kind) {
  Rng rng(seed);
  auto signed_mag = [&](double lo, double hi) {
    const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return s * rng.uniform(lo, hi);
  };

  bool all_ok = true;
  for (ActivationKind kind : {ActivationKind::identity, ActivationKind::spd,
                              ActivationKind::scaled_tanh, ActivationKind::cauchy_riemann}) {
    double worst = 0.0;
    for (int inst = 0; inst < instances_per_kind; ++inst) {
      ActivationSpec act{kind, 1e-4, 1.0};
      int d_in = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
      int d_out = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
      if (kind == ActivationKind::spd) d_out = d_in;
      if (kind == ActivationKind::cauchy_riemann) d_in = d_out = 2;
      const int hidden = 3 + static_cast<int>(rng.uniform(0.0, 6.0));
      JacobianField f = make_field(d_in, d_out, hidden, act,
                                   static_cast<std::uint64_t>(rng.uniform(0.0, 1e9)));

      LinearPath path;
      path.a.resize(d_in);
      path.b.resize(d_in);
      for (int i = 0; i < d_in; ++i) {
        path.a[i] = rng.uniform(-1.0, 1.0);
        path.b[i] = path.a[i] + signed_mag(0.3, 1.2);
      }
      Vector upstream(d_out);
      for (int i = 0; i < d_out; ++i) upstream[i] = signed_mag(0.3, 1.0);

      IntegratorConfig icfg;
      icfg.scheme = Scheme::rk4_fixed;
      icfg.steps = 8;

      const Vector analytic = line_integrate_grad(f, path, icfg, upstream);

      const Vector theta0 = flatten_params(f);
      auto value_at = [&](const Vector& th) {
        JacobianField g = f;
        load_flat_params(g, th);
        const Vector v =
            line_integrate([&](const Vector& x) { return eval_field(g, x); }, path, icfg).value;
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += upstream[i] * v[i];
        return s;
      };
      const double h = 1e-5;
      Vector fd(theta0.size());
      Vector th = theta0;
      for (std::size_t i = 0; i < th.size(); ++i) {
        const double keep = th[i];
        th[i] = keep + h;
        const double up = value_at(th);
        th[i] = keep - h;
        const double dn = value_at(th);
        th[i] = keep;
        fd[i] = (up - dn) / (2.0 * h);
      }
      const double denom = std::max(max_abs(fd), 1e-12);
      worst = std::max(worst, max_abs(sub(analytic, fd)) / denom);
    }
    const bool ok = worst < 1e-5;
    all_ok = all_ok && ok;
    std::cout << "gradcheck " << to_string(kind) << ": max_rel_err=" << fmt17(worst)
              << (ok ? "  ok" : "  FAIL (limit 1e-5)") << "\n";
  }
  if (!all_ok) std::cerr << "gradcheck: relative error above 1e-5\n";
  return all_ok ? 0 : 2;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace jacnet
