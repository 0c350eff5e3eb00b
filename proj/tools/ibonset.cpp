// ibonset command-line tool: onset reports, frontiers, sweeps and generators.

#include "ibonset/chi2.hpp"
#include "ibonset/datagen.hpp"
#include "ibonset/error.hpp"
#include "ibonset/gaussian.hpp"
#include "ibonset/ibsolver.hpp"
#include "ibonset/io.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/perturb.hpp"
#include "ibonset/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

using namespace ibonset;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

// Options that change where results go, not what they are.
const std::set<std::string> kNotRecorded{"config", "output", "prediction-output", "jobs", "help"};

struct Common {
  std::string input;
  std::string output;
  std::string config;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int restarts = 0;
  int jobs = 1;
};

struct Metadata {
  std::string command;
  Json config;
  std::string hash;
  std::uint64_t seed = 0;

  std::vector<std::string> lines() const {
    return {"tool: ibonset " IBONSET_VERSION, "command: " + command, "config: " + config.dump(),
            "config_hash: " + hash, "seed: " + std::to_string(seed)};
  }
  Json json() const {
    Json m;
    m["tool"] = "ibonset";
    m["version"] = IBONSET_VERSION;
    m["command"] = command;
    m["config"] = config;
    m["config_hash"] = hash;
    m["seed"] = seed;
    return m;
  }
};

std::string json_scalar_to_string(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  throw InvalidArgument("config key '" + key + "' must be a string, number or boolean");
}

// Fills options that were not given on the command line from the JSON file.
void apply_config(CLI::App* sub, const std::string& path) {
  Json cfg;
  try {
    cfg = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw InvalidArgument("config '" + path + "' must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InvalidArgument("config '" + path + "': unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(json_scalar_to_string(v, key));
    } else {
      opt->add_result(json_scalar_to_string(value, key));
    }
    opt->run_callback();
  }
}

// Sweep rows are written in ascending parameter order.
std::vector<double> sorted_values(const std::string& spec) {
  std::vector<double> v = parse_values(spec);
  std::sort(v.begin(), v.end());
  return v;
}

Metadata metadata_for(CLI::App* sub, std::uint64_t seed) {
  Metadata m;
  m.command = sub->get_name();
  m.seed = seed;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (kNotRecorded.count(name) != 0) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    m.config[name] = value;
  }
  m.hash = config_hash(m.config.dump());
  return m;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    write_text(path, content);
  }
}

std::string with_meta(const Metadata& meta, const std::string& body_json) {
  Json out;
  out["meta"] = meta.json();
  const Json body = Json::parse(body_json);
  for (const auto& [k, v] : body.items()) out[k] = v;
  return out.dump(2) + "\n";
}

void add_common(CLI::App* sub, Common& c, bool needs_input) {
  CLI::Option* in = sub->add_option("--input,-i", c.input, "joint distribution (.csv or .json)");
  if (needs_input) in->check(CLI::ExistingFile);
  sub->add_option("--output,-o", c.output, "output path (stdout when omitted)");
  sub->add_option("--config", c.config, "JSON file of option values; command-line flags win")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "random seed");
}

Common solver_defaults(double tol, int restarts) {
  Common c;
  c.tol = tol;
  c.restarts = restarts;
  return c;
}

OnsetOptions onset_options(const Common& c, long max_iter, double detect_eps, double damping) {
  OnsetOptions o;
  o.seed = c.seed;
  o.tol = c.tol;
  o.max_restarts = c.restarts;
  o.max_iter = max_iter;
  o.detect_eps = detect_eps;
  o.damping = damping;
  return o;
}

std::string path_stem(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

ClassParams parse_class(const std::string& text, ClassFamily family) {
  const std::vector<double> v = parse_values(text);
  if (v.empty() || v.size() > 2) throw InvalidArgument("class parameters '" + text + "' must be 'a' or 'a,b'");
  ClassParams c;
  c.a = v[0];
  c.b = v.size() == 2 ? v[1] : (family == ClassFamily::gaussian ? 1.0 : 0.0);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-onset analysis for the discrete information bottleneck"};
  app.set_version_flag("--version", std::string("ibonset ") + IBONSET_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  // onset ------------------------------------------------------------------
  Common onset_c = solver_defaults(1e-11, 32);
  long onset_max_iter = 100000;
  double onset_detect = 1e-4;
  double onset_damping = 1.0;
  CLI::App* onset_cmd = app.add_subcommand("onset", "critical beta, perturbative predictions and chi^2 bound");
  onset_cmd->option_defaults()->always_capture_default();
  add_common(onset_cmd, onset_c, true);
  onset_cmd->add_option("--tol", onset_c.tol, "fixed-point tolerance on (r, beta_c)");
  onset_cmd->add_option("--restarts", onset_c.restarts, "random restarts")->check(CLI::PositiveNumber);
  onset_cmd->add_option("--max-iter", onset_max_iter, "iterations per restart")->check(CLI::PositiveNumber);
  onset_cmd->add_option("--detect-eps", onset_detect, "L1 distance below which r counts as p");
  onset_cmd->add_option("--damping", onset_damping, "relaxation weight in (0, 1]");

  // frontier ---------------------------------------------------------------
  Common fr_c = solver_defaults(1e-10, 4);
  std::string fr_grid = "auto";
  std::string fr_pred_out;
  long fr_max_iter = 100000;
  int fr_z = 0;
  CLI::App* fr_cmd = app.add_subcommand("frontier", "exact IB frontier over a beta grid plus predicted overlay");
  fr_cmd->option_defaults()->always_capture_default();
  add_common(fr_cmd, fr_c, true);
  fr_cmd->add_option("--tol", fr_c.tol, "IB convergence tolerance");
  fr_cmd->add_option("--restarts", fr_c.restarts, "fresh starts per beta")->check(CLI::PositiveNumber);
  fr_cmd->add_option("--beta-grid", fr_grid, "'auto[:n]', 'start:stop:n' or 'b1,b2,...'");
  fr_cmd->add_option("--prediction-output", fr_pred_out, "predicted frontier CSV (default <output>.prediction.csv)");
  fr_cmd->add_option("--max-iter", fr_max_iter, "IB iterations per start")->check(CLI::PositiveNumber);
  fr_cmd->add_option("--z-cardinality", fr_z, "|Z| (0 means |X|)");

  // chi2 -------------------------------------------------------------------
  Common chi_c;
  CLI::App* chi_cmd = app.add_subcommand("chi2", "maximal correlation, chi^2 information and symmetry");
  chi_cmd->option_defaults()->always_capture_default();
  add_common(chi_cmd, chi_c, true);

  // gauss ------------------------------------------------------------------
  Common ga_c = solver_defaults(1e-11, 32);
  double ga_rho = 0.5;
  int ga_bins = 128;
  double ga_trunc = 5.0;
  bool ga_no_disc = false;
  CLI::App* ga_cmd = app.add_subcommand("gauss", "closed-form Gaussian onset vs the discretized pipeline");
  ga_cmd->option_defaults()->always_capture_default();
  add_common(ga_cmd, ga_c, true);
  ga_cmd->add_option("--rho", ga_rho, "correlation of a unit-variance scalar pair (ignored with --input)");
  ga_cmd->add_option("--bins", ga_bins, "bins per axis for the discretized check");
  ga_cmd->add_option("--truncation", ga_trunc, "grid half-width in standard deviations");
  ga_cmd->add_flag("--no-discretize", ga_no_disc, "skip the discretized check");
  ga_cmd->add_option("--tol", ga_c.tol, "onset tolerance for the discretized check");
  ga_cmd->add_option("--restarts", ga_c.restarts, "onset restarts for the discretized check");

  // fig2 -------------------------------------------------------------------
  Common f2_c = solver_defaults(1e-11, 32);
  std::string f2_family = "gaussian";
  std::string f2_sweep;
  std::string f2_base;
  double f2_sigma = 1.0;
  int f2_bins = 256;
  CLI::App* f2_cmd = app.add_subcommand("fig2", "binary-classification sweep");
  f2_cmd->option_defaults()->always_capture_default();
  add_common(f2_cmd, f2_c, false);
  f2_cmd->add_option("--family", f2_family, "gaussian, exponential or poisson");
  f2_cmd->add_option("--sweep", f2_sweep, "values of the class-1 parameter (mean, rate or mean)");
  f2_cmd->add_option("--base", f2_base, "class-0 parameters 'a[,b]'");
  f2_cmd->add_option("--sigma", f2_sigma, "class-1 stddev for the gaussian family");
  f2_cmd->add_option("--bins", f2_bins, "grid bins (gaussian, exponential)");
  f2_cmd->add_option("--tol", f2_c.tol, "onset tolerance");
  f2_cmd->add_option("--restarts", f2_c.restarts, "onset restarts");
  f2_cmd->add_option("--jobs,-j", f2_c.jobs, "parallel sweep points")->check(CLI::PositiveNumber);

  // fig3 -------------------------------------------------------------------
  Common f3_c = solver_defaults(1e-11, 32);
  std::string f3_function = "linear";
  std::string f3_sweep = "0.05:1:8";
  int f3_xbins = 64;
  int f3_ybins = 64;
  CLI::App* f3_cmd = app.add_subcommand("fig3", "noisy functional relationship sweep over sigma");
  f3_cmd->option_defaults()->always_capture_default();
  add_common(f3_cmd, f3_c, false);
  f3_cmd->add_option("--function", f3_function, "linear, cubic, sigmoid or quadratic");
  f3_cmd->add_option("--sweep", f3_sweep, "noise standard deviations");
  f3_cmd->add_option("--x-bins", f3_xbins, "bins on (-1, 1)");
  f3_cmd->add_option("--y-bins", f3_ybins, "bins on the y range");
  f3_cmd->add_option("--tol", f3_c.tol, "onset tolerance");
  f3_cmd->add_option("--restarts", f3_c.restarts, "onset restarts");
  f3_cmd->add_option("--jobs,-j", f3_c.jobs, "parallel sweep points")->check(CLI::PositiveNumber);

  // gen --------------------------------------------------------------------
  Common gen_c;
  std::string gen_kind = "fig1";
  std::string gen_family = "gaussian";
  std::string gen_class0 = "0,1";
  std::string gen_class1 = "1,1";
  std::string gen_function = "linear";
  double gen_sigma = 0.3;
  double gen_rho = 0.5;
  int gen_bins = 0;
  double gen_trunc = 5.0;
  int gen_nx = 8;
  int gen_ny = 8;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic joint distribution");
  gen_cmd->option_defaults()->always_capture_default();
  add_common(gen_cmd, gen_c, false);
  gen_cmd->add_option("--kind", gen_kind, "fig1, binary, noisy, gauss or lognormal");
  gen_cmd->add_option("--family", gen_family, "binary: gaussian, exponential or poisson");
  gen_cmd->add_option("--class0", gen_class0, "binary: class-0 parameters 'a[,b]'");
  gen_cmd->add_option("--class1", gen_class1, "binary: class-1 parameters 'a[,b]'");
  gen_cmd->add_option("--function", gen_function, "noisy: linear, cubic, sigmoid or quadratic");
  gen_cmd->add_option("--sigma", gen_sigma, "noisy: noise stddev; lognormal: log-weight stddev");
  gen_cmd->add_option("--rho", gen_rho, "gauss: correlation");
  gen_cmd->add_option("--bins", gen_bins, "bins (0 means the family default)");
  gen_cmd->add_option("--truncation", gen_trunc, "gauss: grid half-width in standard deviations");
  gen_cmd->add_option("--nx", gen_nx, "lognormal: |X|");
  gen_cmd->add_option("--ny", gen_ny, "lognormal: |Y|");

  // validate ---------------------------------------------------------------
  Common va_c = solver_defaults(1e-11, 32);
  int va_cases = 200;
  CLI::App* va_cmd = app.add_subcommand("validate", "run the invariant suite on a joint");
  va_cmd->option_defaults()->always_capture_default();
  add_common(va_cmd, va_c, true);
  va_cmd->add_option("--cases", va_cases, "random encoders / directions per randomized check")
      ->check(CLI::PositiveNumber);
  va_cmd->add_option("--tol", va_c.tol, "onset tolerance");
  va_cmd->add_option("--restarts", va_c.restarts, "onset restarts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const std::vector<std::pair<CLI::App*, Common*>> commons{
        {onset_cmd, &onset_c}, {fr_cmd, &fr_c}, {chi_cmd, &chi_c}, {ga_cmd, &ga_c},
        {f2_cmd, &f2_c},       {f3_cmd, &f3_c}, {gen_cmd, &gen_c}, {va_cmd, &va_c}};
    Common* c = nullptr;
    for (const auto& [s, cc] : commons) {
      if (s == sub) c = cc;
    }
    if (!c->config.empty()) apply_config(sub, c->config);
    const Metadata meta = metadata_for(sub, c->seed);

    if (sub == onset_cmd) {
      if (c->input.empty()) throw InvalidArgument("--input is required");
      const JointDistribution joint = read_joint(c->input);
      const OnsetReport rep = analyze_onset(joint, onset_options(*c, onset_max_iter, onset_detect, onset_damping));
      emit(c->output, with_meta(meta, report_to_json(rep)));
      if (rep.status != Status::ok) std::cerr << "ibonset onset: " << rep.message << "\n";
      return exit_code(rep.status);
    }

    if (sub == fr_cmd) {
      if (c->input.empty()) throw InvalidArgument("--input is required");
      const JointDistribution joint = read_joint(c->input);
      const OnsetReport rep = analyze_onset(joint, onset_options(*c, 100000, 1e-4, 1.0));
      if (rep.status == Status::convergence_failure) throw ConvergenceError(rep.message);
      std::optional<double> beta_c;
      if (rep.onset) beta_c = rep.onset->beta_c;
      const std::vector<double> grid = parse_beta_grid(fr_grid, beta_c);
      IBOptions ib;
      ib.tol = c->tol;
      ib.max_iter = fr_max_iter;
      ib.seed = c->seed;
      ib.n_restarts = c->restarts;
      if (fr_z > 0) ib.z_cardinality = fr_z;
      const std::vector<FrontierPoint> points = frontier_sweep(joint, grid, ib);
      emit(c->output, frontier_to_csv(points, meta.lines()));
      std::string pred_path = fr_pred_out;
      if (pred_path.empty() && !c->output.empty() && c->output != "-") {
        pred_path = path_stem(c->output) + ".prediction.csv";
      }
      if (rep.prediction && !pred_path.empty()) {
        write_text(pred_path, predicted_frontier_csv(grid, *rep.prediction, meta.lines()));
      }
      if (rep.status != Status::ok) std::cerr << "ibonset frontier: " << rep.message << "\n";
      return exit_code(rep.status);
    }

    if (sub == chi_cmd) {
      if (c->input.empty()) throw InvalidArgument("--input is required");
      const JointDistribution joint = read_joint(c->input);
      const Chi2Analysis chi = eta_chi2(joint);
      Json body = Json::parse(chi2_to_json(chi));
      body["chi2_information"] = chi2_information(joint);
      const auto [fwd, bwd] = symmetry_check(joint);
      body["symmetry"] = {{"forward", fwd}, {"transposed", bwd}};
      emit(c->output, with_meta(meta, body.dump()));
      if (!chi.has_onset) {
        std::cerr << "ibonset chi2: sigma_2(B) vanishes; no onset\n";
        return exit_code(Status::no_onset);
      }
      return 0;
    }

    if (sub == ga_cmd) {
      const GaussianJoint g = c->input.empty() ? GaussianJoint::scalar(ga_rho) : gaussian_from_json(read_text(c->input));
      const GaussianOnset go = gaussian_onset(g);
      const MatchingResiduals res = onset_matching_residuals(g, go.beta_c, go.nu_direction, g.sigma_x());
      Json body;
      body["gaussian"] = Json::parse(gaussian_to_json(g));
      Json closed;
      closed["beta_c"] = go.beta_c;
      closed["lambda_min"] = go.lambda_min;
      closed["nu_direction"] = Json::array();
      for (Index i = 0; i < go.nu_direction.size(); ++i) closed["nu_direction"].push_back(go.nu_direction[i]);
      closed["spectrum"] = Json::array();
      for (Index i = 0; i < go.spectrum.size(); ++i) closed["spectrum"].push_back(go.spectrum[i]);
      closed["mutual_information_bits"] = gaussian_mutual_information(g);
      closed["matching_residuals"] = {{"quadratic_lhs", res.quadratic_lhs},
                                      {"quadratic_rhs", res.quadratic_rhs},
                                      {"quadratic", res.quadratic},
                                      {"linear", res.linear},
                                      {"constant", res.constant}};
      body["closed_form"] = closed;
      if (!ga_no_disc && g.dx() == 1 && g.dy() == 1) {
        const JointDistribution joint = discretize_gaussian(g, ga_bins, ga_trunc);
        const OnsetReport rep = analyze_onset(joint, onset_options(*c, 100000, 1e-4, 1.0));
        Json disc;
        disc["bins"] = ga_bins;
        disc["truncation"] = ga_trunc;
        disc["mutual_information_bits"] = rep.mi_bits;
        disc["status"] = status_name(rep.status);
        if (rep.onset) {
          disc["beta_c"] = rep.onset->beta_c;
          disc["kind"] = rep.onset->kind == OnsetKind::fixed_point ? "fixed_point" : "local_limit";
          disc["relative_error"] = (rep.onset->beta_c - go.beta_c) / go.beta_c;
        }
        if (rep.prediction) disc["i1_zy_bits"] = rep.prediction->i1_zy;
        body["discretized"] = disc;
      } else {
        body["discretized"] = nullptr;
      }
      emit(c->output, with_meta(meta, body.dump()));
      return 0;
    }

    if (sub == f2_cmd) {
      const ClassFamily family = family_from_name(f2_family);
      std::string sweep = f2_sweep;
      if (sweep.empty()) sweep = family == ClassFamily::gaussian ? "0.2:3:8" : "1.5:10:8";
      std::string base = f2_base;
      if (base.empty()) base = family == ClassFamily::gaussian ? "0,1" : "1";
      const ClassParams c0 = parse_class(base, family);
      const std::vector<double> params = sorted_values(sweep);
      auto make = [&](double v) {
        BinaryClassSpec spec;
        spec.family = family;
        spec.n_bins = f2_bins;
        spec.classes[0] = c0;
        spec.classes[1] = family == ClassFamily::gaussian ? ClassParams{v, f2_sigma} : ClassParams{v, 0.0};
        return binary_classification_joint(spec);
      };
      const auto rows = run_sweep(params, make, onset_options(*c, 100000, 1e-4, 1.0), c->jobs);
      const std::string name = family == ClassFamily::gaussian ? "mu" : (family == ClassFamily::exponential ? "rate" : "lambda2");
      emit(c->output, sweep_to_csv(rows, name, meta.lines()));
      return 0;
    }

    if (sub == f3_cmd) {
      const FunctionPreset f = preset_from_name(f3_function);
      const std::vector<double> params = sorted_values(f3_sweep);
      auto make = [&](double sigma) {
        NoisyFunctionSpec spec;
        spec.f = f;
        spec.sigma = sigma;
        spec.n_x_bins = f3_xbins;
        spec.n_y_bins = f3_ybins;
        return noisy_function_joint(spec);
      };
      const auto rows = run_sweep(params, make, onset_options(*c, 100000, 1e-4, 1.0), c->jobs);
      emit(c->output, sweep_to_csv(rows, "sigma", meta.lines()));
      return 0;
    }

    if (sub == gen_cmd) {
      std::optional<JointDistribution> joint;
      if (gen_kind == "fig1") {
        joint = fig1_joint();
      } else if (gen_kind == "binary") {
        BinaryClassSpec spec;
        spec.family = family_from_name(gen_family);
        spec.classes[0] = parse_class(gen_class0, spec.family);
        spec.classes[1] = parse_class(gen_class1, spec.family);
        if (gen_bins > 0) spec.n_bins = gen_bins;
        joint = binary_classification_joint(spec);
      } else if (gen_kind == "noisy") {
        NoisyFunctionSpec spec;
        spec.f = preset_from_name(gen_function);
        spec.sigma = gen_sigma;
        if (gen_bins > 0) spec.n_x_bins = spec.n_y_bins = gen_bins;
        joint = noisy_function_joint(spec);
      } else if (gen_kind == "gauss") {
        joint = discretize_gaussian(GaussianJoint::scalar(gen_rho), gen_bins > 0 ? gen_bins : 128, gen_trunc);
      } else if (gen_kind == "lognormal") {
        joint = lognormal_joint(gen_nx, gen_ny, c->seed, gen_sigma);
      } else {
        throw InvalidArgument("unknown --kind '" + gen_kind + "'");
      }
      const std::string& out = c->output;
      if (out.size() >= 5 && out.compare(out.size() - 5, 5, ".json") == 0) {
        Json body = Json::parse(joint_to_json(*joint));
        emit(out, with_meta(meta, body.dump()));
      } else {
        emit(out, joint_to_csv(*joint, meta.lines()));
      }
      return 0;
    }

    if (sub == va_cmd) {
      if (c->input.empty()) throw InvalidArgument("--input is required");
      const JointDistribution joint = read_joint(c->input);
      ValidationOptions vo;
      vo.onset = onset_options(*c, 100000, 1e-4, 1.0);
      vo.seed = c->seed;
      vo.random_cases = va_cases;
      const std::vector<CheckResult> checks = validate_joint(joint, vo);
      emit(c->output, with_meta(meta, checks_to_json(checks)));
      for (const auto& ch : checks) {
        if (!ch.passed) {
          std::cerr << "ibonset validate: " << ch.name << " failed (" << ch.value << " > " << ch.tolerance << ")\n";
        }
      }
      for (const auto& ch : checks) {
        if (!ch.passed) return kExitFailure;
      }
      return 0;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "ibonset " << sub->get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const NoOnsetError& e) {
    std::cerr << "ibonset " << sub->get_name() << ": " << e.what() << "\n";
    return exit_code(Status::no_onset);
  } catch (const ConvergenceError& e) {
    std::cerr << "ibonset " << sub->get_name() << ": " << e.what() << "\n";
    return exit_code(Status::convergence_failure);
  } catch (const HigherOrderRequired& e) {
    std::cerr << "ibonset " << sub->get_name() << ": " << e.what() << "\n";
    return exit_code(Status::higher_order);
  } catch (const std::exception& e) {
    std::cerr << "ibonset " << sub->get_name() << ": " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
