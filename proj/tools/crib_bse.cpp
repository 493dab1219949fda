#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cribse/dataset_io.hpp"
#include "cribse/errors.hpp"
#include "cribse/fim.hpp"
#include "cribse/ggd.hpp"
#include "cribse/mle.hpp"
#include "cribse/model.hpp"
#include "cribse/parallel.hpp"
#include "cribse/rng.hpp"
#include "cribse/simulate.hpp"
#include "cribse/sweep.hpp"
#include "cribse/validate.hpp"

namespace {

using nlohmann::json;
using namespace cribse;

constexpr int kExitOk = 0;
constexpr int kExitSuiteFail = 1;
constexpr int kExitUsage = 2;

void write_text(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + out);
  f << text;
  if (!f) throw IoError("write failed: " + out);
}

json complex_json(const Complex& v) { return json::array({v.real(), v.imag()}); }

json cvector_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

/// Config-file support: JSON keys mirror the long flag names; a key applies
/// only when its flag was not given on the command line.
class ConfigBridge {
 public:
  ConfigBridge(CLI::App* sub, std::string* config_path)
      : sub_(sub), config_path_(config_path) {}

  template <typename T>
  void bind(const std::string& key, T* target) {
    setters_[key] = [target](const json& v) { *target = v.get<T>(); };
  }

  void apply() const {
    if (config_path_->empty()) return;
    std::ifstream f(*config_path_);
    if (!f) throw IoError("cannot open config file: " + *config_path_);
    json cfg;
    try {
      cfg = json::parse(f);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad config file: ") + e.what());
    }
    if (!cfg.is_object()) throw ParseError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      const auto it = setters_.find(key);
      if (it == setters_.end()) {
        throw InvalidParams("unknown config key: " + key);
      }
      const CLI::Option* opt = sub_->get_option_no_throw("--" + key);
      if (opt != nullptr && opt->count() > 0) continue;  // flag wins
      try {
        it->second(value);
      } catch (const json::exception& e) {
        throw ParseError("bad value for config key '" + key + "': " + e.what());
      }
    }
  }

 private:
  CLI::App* sub_;
  std::string* config_path_;
  std::map<std::string, std::function<void(const json&)>> setters_;
};

sweep::GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(':', start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  if (parts.size() < 3 || parts.size() > 4) {
    throw InvalidParams("grid must be min:max:points or min:max:points:log");
  }
  sweep::GridSpec g;
  try {
    g.min = std::stod(parts[0]);
    g.max = std::stod(parts[1]);
    g.points = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw InvalidParams("grid must be numeric min:max:points");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      g.log_spacing = true;
    } else if (parts[3] == "linear") {
      g.log_spacing = false;
    } else {
      throw InvalidParams("grid spacing must be 'linear' or 'log'");
    }
  }
  return g;
}

std::vector<fim::Model> parse_models(const std::string& text) {
  std::vector<fim::Model> models;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(',', start);
    const std::string name = pos == std::string::npos
                                 ? text.substr(start)
                                 : text.substr(start, pos - start);
    if (!name.empty()) models.push_back(fim::model_from_name(name));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (models.empty()) throw InvalidParams("models list must be nonempty");
  return models;
}

std::string gnuplot_csv_reference(const std::string& script_path,
                                  const std::string& csv_path) {
  namespace fs = std::filesystem;
  const fs::path script(script_path), csv(csv_path);
  if (script.parent_path() == csv.parent_path()) return csv.filename().string();
  return csv_path;
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
  std::string preset;
  int d = 5, N = 5000, T = 10;
  double alpha = 1.0, gamma = 0.0, tau = 0.0;
  std::string schedule = "linear";
  std::string axis;
  std::string grid;
  std::string models = "cvxcsv,csv,bice";
  std::string out = "-";
  std::string format = "csv";
  std::string gnuplot;
};

int run_sweep_cmd(const SweepArgs& a, const CLI::App* sub) {
  if (a.schedule != "linear") {
    throw InvalidParams("schedule kind must be 'linear'");
  }
  sweep::SweepSpec spec;
  if (!a.preset.empty()) spec = sweep::preset(a.preset);

  const auto given = [sub](const std::string& flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  // Flags refine the preset; without a preset they stand alone.
  if (a.preset.empty() || given("--d")) spec.d = a.d;
  if (a.preset.empty() || given("--N")) spec.N = a.N;
  if (a.preset.empty() || given("--T")) spec.T = a.T;
  if (a.preset.empty() || given("--alpha")) spec.alpha = a.alpha;
  if (a.preset.empty() || given("--gamma")) spec.gamma = a.gamma;
  if (a.preset.empty() || given("--tau")) spec.tau = a.tau;
  if (!a.axis.empty()) spec.axis = sweep::axis_from_name(a.axis);
  if (!a.grid.empty()) {
    spec.grid = parse_grid(a.grid);
    spec.pins.clear();
  }
  spec.models = parse_models(a.models);
  spec.validate();

  const std::vector<sweep::ResultRow> rows = sweep::run_sweep(spec);
  const std::string text =
      a.format == "json" ? sweep::to_json(rows) : sweep::to_csv(rows);
  if (a.format != "json" && a.format != "csv") {
    throw InvalidParams("format must be 'csv' or 'json'");
  }
  write_text(a.out, text);
  if (!a.gnuplot.empty()) {
    if (a.out.empty() || a.out == "-" || a.format != "csv") {
      throw InvalidParams("--gnuplot needs --format csv and a file --out");
    }
    write_text(a.gnuplot,
               sweep::gnuplot_script(spec, gnuplot_csv_reference(a.gnuplot, a.out)));
  }
  if (!a.out.empty() && a.out != "-") {
    std::cout << "wrote " << rows.size() << " rows to " << a.out << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- validate ----

struct ValidateArgs {
  std::string suite;
  std::uint64_t seed = validate::kDefaultSeed;
  std::string out = "-";
};

int run_validate_cmd(const ValidateArgs& a) {
  const validate::SuiteReport report = validate::run_suite(a.suite, a.seed);
  write_text(a.out, validate::report_json(report));
  if (!a.out.empty() && a.out != "-") {
    std::cout << "suite " << report.suite << (report.pass ? " passed" : " FAILED")
              << ", report at " << a.out << "\n";
  }
  return report.pass ? kExitOk : kExitSuiteFail;
}

// ------------------------------------------------------------- simulate ----

struct SimulateArgs {
  int d = 5, N = 5000, T = 10;
  double alpha = 1.0, gamma = 0.0, tau = 0.0;
  std::uint64_t seed = 1;
  bool random_path = false;
  std::string out;
  std::string format = "json";
};

simulate::MixtureConfig make_config(int d, int N, int T, double alpha, double gamma,
                                    double tau, std::uint64_t seed,
                                    bool random_path) {
  const ggd::GgdParams p(alpha, gamma);
  if (!random_path) return simulate::equivariant_config(d, N, T, p, tau, seed);
  RandomStream rng = RandomStream(seed).derive(0x504154);  // path stream
  const model::ConstrainedModel cm = simulate::random_endpoints(d, rng);
  model::MixingPath path(cm.a_first, cm.a_last, model::linear_schedule(T));
  return simulate::MixtureConfig(N, p, tau, std::move(path), cm.w, seed);
}

int run_simulate_cmd(const SimulateArgs& a) {
  const simulate::MixtureConfig cfg =
      make_config(a.d, a.N, a.T, a.alpha, a.gamma, a.tau, a.seed, a.random_path);
  const simulate::Dataset data = simulate::generate(cfg);
  io::save_dataset(a.out, cfg, data, io::format_from_name(a.format));

  const std::vector<double> sigma = fim::variance_profile(cfg.tau, cfg.T);
  std::cout << "wrote " << cfg.N << " samples (" << cfg.d << " sensors, N_b="
            << cfg.N / cfg.T << " per block) to " << a.out << "\n";
  std::cout << "block  lambda  sigma\n";
  for (int t = 1; t <= cfg.T; ++t) {
    std::cout << t << "  " << cfg.path.schedule.lambda(t) << "  " << sigma[t - 1]
              << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- estimate ----

struct EstimateArgs {
  std::string data;
  int d = 3, N = 20000, T = 10;
  double alpha = 0.25, gamma = 0.0, tau = 1.0;
  std::uint64_t seed = 1;
  bool random_path = false;
  bool oracle = false;
  bool estimate_cz = false;
  int batch = 0;
  int max_iters = 500;
  double step = 0.0;
  double backtrack = 0.5;
  double tol = 1e-9;
  int restarts = 2;
  double init_scale = 0.01;
  std::uint64_t fit_seed = 0x5EED0F17;
  std::string out = "-";
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  double isr = 0.0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
};

TrialOutcome run_one_fit(const simulate::MixtureConfig& cfg,
                         const simulate::Dataset& data, const EstimateArgs& a) {
  const std::vector<double> sigma = fim::variance_profile(cfg.tau, cfg.T);
  std::vector<CMatrix> Cz(static_cast<std::size_t>(cfg.T),
                          CMatrix::Identity(cfg.d - 1, cfg.d - 1));
  if (a.estimate_cz) {
    Cz = mle::estimate_background_cov(data, mle::ThetaCvx::zero(cfg.d));
  }
  mle::FitOptions opts;
  opts.max_iters = a.max_iters;
  opts.initial_step = a.step;
  opts.backtrack = a.backtrack;
  opts.tolerance = a.tol;
  opts.restarts = a.restarts;
  opts.init_scale = a.init_scale;
  opts.seed = a.fit_seed ^ cfg.seed;
  const mle::FitResult fit = mle::fit(data, cfg.source, sigma, Cz, opts);

  TrialOutcome t;
  t.seed = cfg.seed;
  t.isr = simulate::empirical_isr(data, fit.theta.separator(), cfg);
  t.loglik = fit.loglik;
  t.iterations = fit.iterations;
  t.converged = fit.converged;
  return t;
}

json crib_summary(const simulate::MixtureConfig& cfg, fim::CribResult* out_crib) {
  const fim::CribResult crib =
      fim::crib_model(fim::Model::CvxCsv, cfg.d, cfg.N, cfg.T,
                      cfg.path.schedule, cfg.source, cfg.tau);
  if (out_crib != nullptr) *out_crib = crib;
  json j;
  j["isr"] = crib.identifiable ? json(crib.isr) : json("inf");
  j["isr_db"] = crib.identifiable ? json(crib.isr_db) : json();
  j["identifiable"] = crib.identifiable;
  j["rcond"] = crib.rcond;
  return j;
}

int run_estimate_cmd(const EstimateArgs& a) {
  json report;
  fim::CribResult crib;

  if (a.batch > 0) {
    const simulate::MixtureConfig base =
        make_config(a.d, a.N, a.T, a.alpha, a.gamma, a.tau, a.seed, a.random_path);
    report["crib"] = crib_summary(base, &crib);

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(a.batch));
    parallel_for(a.batch, [&](int i) {
      simulate::MixtureConfig cfg = base;
      cfg.seed = RandomStream(base.seed).derive(static_cast<std::uint64_t>(i)).seed();
      const simulate::Dataset data = simulate::generate(cfg);
      outcomes[static_cast<std::size_t>(i)] = run_one_fit(cfg, data, a);
    });

    std::vector<double> isrs;
    json arr = json::array();
    for (const auto& t : outcomes) {
      isrs.push_back(t.isr);
      json o;
      o["seed"] = t.seed;
      o["isr"] = t.isr;
      o["loglik"] = t.loglik;
      o["iterations"] = t.iterations;
      o["converged"] = t.converged;
      arr.push_back(std::move(o));
    }
    report["trials"] = std::move(arr);
    std::sort(isrs.begin(), isrs.end());
    const std::size_t n = isrs.size();
    const double median = n % 2 == 1 ? isrs[n / 2]
                                     : 0.5 * (isrs[n / 2 - 1] + isrs[n / 2]);
    report["median_isr"] = median;
    report["median_ratio"] =
        crib.identifiable ? json(median / crib.isr) : json();
  } else {
    simulate::MixtureConfig cfg = make_config(a.d, a.N, a.T, a.alpha, a.gamma,
                                              a.tau, a.seed, a.random_path);
    simulate::Dataset data;
    if (a.data.empty()) {
      data = simulate::generate(cfg);
    } else {
      io::DatasetFile file = io::load_dataset(a.data);
      cfg = std::move(file.config);
      data = std::move(file.data);
    }
    report["crib"] = crib_summary(cfg, &crib);

    if (a.oracle) {
      report["oracle_isr"] = simulate::empirical_isr(data, cfg.w, cfg);
    } else {
      const std::vector<double> sigma = fim::variance_profile(cfg.tau, cfg.T);
      std::vector<CMatrix> Cz(static_cast<std::size_t>(cfg.T),
                              CMatrix::Identity(cfg.d - 1, cfg.d - 1));
      if (a.estimate_cz) {
        Cz = mle::estimate_background_cov(data, mle::ThetaCvx::zero(cfg.d));
      }
      mle::FitOptions opts;
      opts.max_iters = a.max_iters;
      opts.initial_step = a.step;
      opts.backtrack = a.backtrack;
      opts.tolerance = a.tol;
      opts.restarts = a.restarts;
      opts.init_scale = a.init_scale;
      opts.seed = a.fit_seed ^ cfg.seed;
      const mle::FitResult fit = mle::fit(data, cfg.source, sigma, Cz, opts);
      const double isr = simulate::empirical_isr(data, fit.theta.separator(), cfg);
      report["theta"] = {{"g1", cvector_json(fit.theta.g1)},
                         {"gT", cvector_json(fit.theta.gT)},
                         {"h", cvector_json(fit.theta.h)}};
      report["loglik"] = fit.loglik;
      report["iterations"] = fit.iterations;
      report["converged"] = fit.converged;
      report["isr"] = isr;
      report["ratio"] = crib.identifiable ? json(isr / crib.isr) : json();
    }
  }
  if (!crib.identifiable) {
    report["warning"] = "truth configuration is not identifiable; the bound is infinite";
  }
  write_text(a.out, report.dump() + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cramer-Rao bounds and maximum-likelihood extraction for "
               "dynamic single-source mixtures"};
  app.require_subcommand(1);

  // ---- sweep
  SweepArgs sa;
  std::string sweep_config;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Evaluate ISR bounds over a parameter grid (plot-ready CSV/JSON)");
  ConfigBridge sweep_bridge(sweep_cmd, &sweep_config);
  sweep_cmd->add_option("--config", sweep_config, "JSON config file (flags override)");
  sweep_cmd->add_option("--preset", sa.preset, "chart1|chart2|chart3");
  sweep_cmd->add_option("--d", sa.d, "sensor count");
  sweep_cmd->add_option("--N", sa.N, "total samples");
  sweep_cmd->add_option("--T", sa.T, "block count");
  sweep_cmd->add_option("--alpha", sa.alpha, "GGD shape (fixed value)");
  sweep_cmd->add_option("--gamma", sa.gamma, "GGD circularity (fixed value)");
  sweep_cmd->add_option("--tau", sa.tau, "variance-profile knob (fixed value)");
  sweep_cmd->add_option("--schedule", sa.schedule, "blending schedule kind (linear)");
  sweep_cmd->add_option("--axis", sa.axis, "swept axis: alpha|gamma|tau");
  sweep_cmd->add_option("--grid", sa.grid, "min:max:points[:log|:linear]");
  sweep_cmd->add_option("--models", sa.models, "comma list of cvxcsv,csv,bice");
  sweep_cmd->add_option("--out", sa.out, "output path ('-' for stdout)");
  sweep_cmd->add_option("--format", sa.format, "csv|json");
  sweep_cmd->add_option("--gnuplot", sa.gnuplot, "also write a gnuplot script here");
  sweep_bridge.bind("preset", &sa.preset);
  sweep_bridge.bind("d", &sa.d);
  sweep_bridge.bind("N", &sa.N);
  sweep_bridge.bind("T", &sa.T);
  sweep_bridge.bind("alpha", &sa.alpha);
  sweep_bridge.bind("gamma", &sa.gamma);
  sweep_bridge.bind("tau", &sa.tau);
  sweep_bridge.bind("schedule", &sa.schedule);
  sweep_bridge.bind("axis", &sa.axis);
  sweep_bridge.bind("grid", &sa.grid);
  sweep_bridge.bind("models", &sa.models);
  sweep_bridge.bind("out", &sa.out);
  sweep_bridge.bind("format", &sa.format);
  sweep_bridge.bind("gnuplot", &sa.gnuplot);

  // ---- validate
  ValidateArgs va;
  std::string validate_config;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Run one oracle suite and report JSON");
  ConfigBridge validate_bridge(validate_cmd, &validate_config);
  validate_cmd->add_option("--config", validate_config,
                           "JSON config file (flags override)");
  validate_cmd->add_option("suite", va.suite,
                           "fim-oracle|sampler-moments|closed-form|coincidence|"
                           "ordering|gradient");
  validate_cmd->add_option("--seed", va.seed, "suite seed");
  validate_cmd->add_option("--out", va.out, "report path ('-' for stdout)");
  validate_bridge.bind("suite", &va.suite);
  validate_bridge.bind("seed", &va.seed);
  validate_bridge.bind("out", &va.out);

  // ---- simulate
  SimulateArgs ma;
  std::string simulate_config;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Generate a synthetic mixture dataset");
  ConfigBridge simulate_bridge(simulate_cmd, &simulate_config);
  simulate_cmd->add_option("--config", simulate_config,
                           "JSON config file (flags override)");
  simulate_cmd->add_option("--d", ma.d, "sensor count");
  simulate_cmd->add_option("--N", ma.N, "total samples");
  simulate_cmd->add_option("--T", ma.T, "block count");
  simulate_cmd->add_option("--alpha", ma.alpha, "GGD shape");
  simulate_cmd->add_option("--gamma", ma.gamma, "GGD circularity");
  simulate_cmd->add_option("--tau", ma.tau, "variance-profile knob");
  simulate_cmd->add_option("--seed", ma.seed, "generation seed");
  simulate_cmd->add_flag("--random-path", ma.random_path,
                         "random constrained mixing path instead of the "
                         "equivariant truth");
  simulate_cmd->add_option("--out", ma.out, "dataset path");
  simulate_cmd->add_option("--format", ma.format, "json|binary");
  simulate_bridge.bind("d", &ma.d);
  simulate_bridge.bind("N", &ma.N);
  simulate_bridge.bind("T", &ma.T);
  simulate_bridge.bind("alpha", &ma.alpha);
  simulate_bridge.bind("gamma", &ma.gamma);
  simulate_bridge.bind("tau", &ma.tau);
  simulate_bridge.bind("seed", &ma.seed);
  simulate_bridge.bind("random-path", &ma.random_path);
  simulate_bridge.bind("out", &ma.out);
  simulate_bridge.bind("format", &ma.format);

  // ---- estimate
  EstimateArgs ea;
  std::string estimate_config;
  CLI::App* estimate_cmd = app.add_subcommand(
      "estimate", "Fit the constrained ML extractor and compare to the bound");
  ConfigBridge estimate_bridge(estimate_cmd, &estimate_config);
  estimate_cmd->add_option("--config", estimate_config,
                           "JSON config file (flags override)");
  estimate_cmd->add_option("--data", ea.data, "dataset file (from 'simulate')");
  estimate_cmd->add_option("--d", ea.d, "sensor count (generated instance)");
  estimate_cmd->add_option("--N", ea.N, "total samples (generated instance)");
  estimate_cmd->add_option("--T", ea.T, "block count (generated instance)");
  estimate_cmd->add_option("--alpha", ea.alpha, "GGD shape (generated instance)");
  estimate_cmd->add_option("--gamma", ea.gamma, "GGD circularity (generated instance)");
  estimate_cmd->add_option("--tau", ea.tau, "variance knob (generated instance)");
  estimate_cmd->add_option("--seed", ea.seed, "instance seed (batch base seed)");
  estimate_cmd->add_flag("--random-path", ea.random_path,
                         "random constrained mixing path for generated instances");
  estimate_cmd->add_flag("--oracle", ea.oracle,
                         "score the true separator instead of fitting");
  estimate_cmd->add_flag("--estimate-cz", ea.estimate_cz,
                         "use per-block sample background covariance");
  estimate_cmd->add_option("--batch", ea.batch,
                           "fit this many generated trials (seed XOR index)");
  estimate_cmd->add_option("--max-iters", ea.max_iters, "ascent iteration cap");
  estimate_cmd->add_option("--step", ea.step, "initial step (0 = 1/N)");
  estimate_cmd->add_option("--backtrack", ea.backtrack, "line-search shrink factor");
  estimate_cmd->add_option("--tol", ea.tol, "per-sample gradient tolerance");
  estimate_cmd->add_option("--restarts", ea.restarts, "random restarts");
  estimate_cmd->add_option("--init-scale", ea.init_scale, "restart init scale");
  estimate_cmd->add_option("--fit-seed", ea.fit_seed, "restart stream seed");
  estimate_cmd->add_option("--out", ea.out, "report path ('-' for stdout)");
  estimate_bridge.bind("data", &ea.data);
  estimate_bridge.bind("d", &ea.d);
  estimate_bridge.bind("N", &ea.N);
  estimate_bridge.bind("T", &ea.T);
  estimate_bridge.bind("alpha", &ea.alpha);
  estimate_bridge.bind("gamma", &ea.gamma);
  estimate_bridge.bind("tau", &ea.tau);
  estimate_bridge.bind("seed", &ea.seed);
  estimate_bridge.bind("random-path", &ea.random_path);
  estimate_bridge.bind("oracle", &ea.oracle);
  estimate_bridge.bind("estimate-cz", &ea.estimate_cz);
  estimate_bridge.bind("batch", &ea.batch);
  estimate_bridge.bind("max-iters", &ea.max_iters);
  estimate_bridge.bind("step", &ea.step);
  estimate_bridge.bind("backtrack", &ea.backtrack);
  estimate_bridge.bind("tol", &ea.tol);
  estimate_bridge.bind("restarts", &ea.restarts);
  estimate_bridge.bind("init-scale", &ea.init_scale);
  estimate_bridge.bind("fit-seed", &ea.fit_seed);
  estimate_bridge.bind("out", &ea.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sweep_cmd->parsed()) {
      sweep_bridge.apply();
      return run_sweep_cmd(sa, sweep_cmd);
    }
    if (validate_cmd->parsed()) {
      validate_bridge.apply();
      if (va.suite.empty()) throw InvalidParams("validate needs a suite name");
      return run_validate_cmd(va);
    }
    if (simulate_cmd->parsed()) {
      simulate_bridge.apply();
      if (ma.out.empty()) throw InvalidParams("simulate needs --out");
      return run_simulate_cmd(ma);
    }
    if (estimate_cmd->parsed()) {
      estimate_bridge.apply();
      return run_estimate_cmd(ea);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
