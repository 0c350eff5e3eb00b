#include "ibonset/pipeline.hpp"

#include "ibonset/error.hpp"
#include "ibonset/io.hpp"
#include "ibonset/random.hpp"
#include "json_convert.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ibonset {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

std::string header_block(const std::vector<std::string>& metadata) {
  std::string out;
  for (const auto& m : metadata) out += "# " + m + "\n";
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("'" + s + "' is not a number");
  }
  if (used != s.size()) throw InvalidArgument("'" + s + "' is not a number");
  return v;
}

long parse_count(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v) || v < 1.0) throw InvalidArgument("'" + s + "' is not a positive count");
  return static_cast<long>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) out.push_back(part);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> linspace(double a, double b, long n) {
  std::vector<double> out;
  if (n == 1) return {a};
  for (long k = 0; k < n; ++k) {
    out.push_back(k + 1 == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return out;
}

double chi2_div(const Vector& r, const Vector& p) { return ((r - p).array().square() / p.array()).sum(); }

CheckResult check(std::string name, double value, double tolerance) {
  return {std::move(name), std::isfinite(value) && value <= tolerance, value, tolerance};
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::ok:
      return "ok";
    case Status::no_onset:
      return "no_onset";
    case Status::convergence_failure:
      return "convergence_failure";
    case Status::higher_order:
      return "higher_order_required";
  }
  return "ok";
}

int exit_code(Status s) {
  switch (s) {
    case Status::ok:
      return 0;
    case Status::no_onset:
      return 3;
    case Status::convergence_failure:
      return 4;
    case Status::higher_order:
      return 5;
  }
  return 1;
}

OnsetReport analyze_onset(const JointDistribution& joint, const OnsetOptions& opts) {
  OnsetReport report;
  report.mi_bits = mutual_information(joint);
  report.chi2 = eta_chi2(joint);
  try {
    report.onset = solve_onset(joint, opts);
  } catch (const NoOnsetError& e) {
    report.status = Status::no_onset;
    report.message = e.what();
    return report;
  } catch (const ConvergenceError& e) {
    report.status = Status::convergence_failure;
    report.message = e.what();
    return report;
  }
  report.kappa_quadratic = kappa(joint, *report.onset);
  try {
    report.prediction = predict(joint, *report.onset);
  } catch (const HigherOrderRequired& e) {
    report.status = Status::higher_order;
    report.message = e.what();
  }
  return report;
}

std::string report_to_json(const OnsetReport& report) {
  detail::Json out;
  out["status"] = status_name(report.status);
  if (!report.message.empty()) out["message"] = report.message;
  out["mutual_information_bits"] = report.mi_bits;
  out["onset"] = report.onset ? detail::onset_json(*report.onset) : detail::Json(nullptr);
  if (report.onset) out["kappa_quadratic"] = report.kappa_quadratic;
  out["prediction"] = report.prediction ? detail::prediction_json(*report.prediction) : detail::Json(nullptr);
  out["chi2"] = detail::chi2_json(report.chi2);
  return out.dump(2) + "\n";
}

std::vector<SweepRow> run_sweep(std::span<const double> params,
                                const std::function<JointDistribution(double)>& make,
                                const OnsetOptions& opts, int jobs) {
  const std::function<SweepRow(std::size_t)> point = [&](std::size_t k) {
    const double param = params[k];
    try {
      const JointDistribution joint = make(param);
      const OnsetReport rep = analyze_onset(joint, opts);
      if (rep.status == Status::convergence_failure) throw ConvergenceError(rep.message);
      SweepRow row;
      row.param = param;
      row.mi_bits = rep.mi_bits;
      row.status = rep.status;
      row.beta_c = rep.onset ? rep.onset->beta_c : kNaN;
      row.beta_c_hat = rep.chi2.has_onset ? rep.chi2.beta_c_hat : kNaN;
      row.kind = rep.onset ? detail::kind_name(rep.onset->kind) : "";
      row.i1_zy = rep.prediction ? rep.prediction->i1_zy : kNaN;
      row.kappa = rep.prediction ? rep.prediction->kappa : kNaN;
      return row;
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("sweep point " + std::to_string(k) + " (" + format_double(param) + "): " + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("sweep point " + std::to_string(k) + " (" + format_double(param) + "): " + e.what());
    }
  };
  return parallel_map<SweepRow>(params.size(), jobs, point);
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& param_name,
                         const std::vector<std::string>& metadata) {
  std::string out = header_block(metadata);
  out += param_name + ",mi_bits,beta_c,beta_c_hat,i1_zy_bits,kappa,onset_kind,status\n";
  for (const auto& r : rows) {
    out += format_double(r.param) + "," + cell(r.mi_bits) + "," + cell(r.beta_c) + "," + cell(r.beta_c_hat) +
           "," + cell(r.i1_zy) + "," + cell(r.kappa) + "," + r.kind + "," + status_name(r.status) + "\n";
  }
  return out;
}

std::vector<double> parse_values(const std::string& spec) {
  if (spec.empty()) throw InvalidArgument("empty value list");
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw InvalidArgument("range '" + spec + "' must be start:stop:count");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    if (!(b >= a)) throw InvalidArgument("range '" + spec + "' must have stop >= start");
    return linspace(a, b, parse_count(parts[2]));
  }
  std::vector<double> out;
  for (const auto& part : split(spec, ',')) out.push_back(parse_double(part));
  return out;
}

std::vector<double> parse_beta_grid(const std::string& spec, std::optional<double> beta_c) {
  std::vector<double> grid;
  if (spec == "auto" || spec.rfind("auto:", 0) == 0) {
    if (!beta_c) throw InvalidArgument("--beta-grid auto needs an onset");
    const long n = spec == "auto" ? kAutoGridPoints : parse_count(spec.substr(5));
    grid = linspace(*beta_c - 0.2, *beta_c + 1.0, n);
  } else {
    grid = parse_values(spec);
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0) || !std::isfinite(grid[k])) throw InvalidArgument("beta values must be finite and >= 0");
    if (k > 0 && grid[k] < grid[k - 1]) throw InvalidArgument("beta grid must be ascending");
  }
  return grid;
}

std::string frontier_to_csv(const std::vector<FrontierPoint>& points,
                            const std::vector<std::string>& metadata) {
  std::string out = header_block(metadata);
  out += "beta,i_zx_bits,i_zy_bits,loss_bits,converged\n";
  for (const auto& p : points) {
    out += format_double(p.beta) + "," + format_double(p.i_zx) + "," + format_double(p.i_zy) + "," +
           format_double(p.loss) + "," + (p.converged ? "true" : "false") + "\n";
  }
  return out;
}

std::string predicted_frontier_csv(std::span<const double> beta_grid,
                                   const PerturbationPrediction& prediction,
                                   const std::vector<std::string>& metadata) {
  std::string out = header_block(metadata);
  out += "beta,eps,i_zx_bits,i_zy_bits,loss_bits\n";
  for (double beta : beta_grid) {
    const double eps = std::max(beta - prediction.beta_c, 0.0);
    out += format_double(beta) + "," + format_double(eps) + "," + format_double(eps * prediction.i1_zx) + "," +
           format_double(eps * prediction.i1_zy) + "," + format_double(eps * eps * prediction.l2 + 0.0) + "\n";
  }
  return out;
}

std::vector<CheckResult> validate_joint(const JointDistribution& joint, const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  const Index nx = joint.nx();

  out.push_back(check("joint_normalized", std::abs(joint.p().sum() - 1.0), 1e-12));
  out.push_back(check("marginals_consistent",
                      std::max((joint.p().rowwise().sum() - joint.px()).cwiseAbs().maxCoeff(),
                               (joint.p().colwise().sum().transpose() - joint.py()).cwiseAbs().maxCoeff()),
                      1e-15));
  out.push_back(check("mutual_information_nonnegative", -mutual_information(joint), 0.0));

  const Chi2Analysis chi = eta_chi2(joint);
  out.push_back(check("top_singular_value_is_one", std::abs(chi.singular_values[0] - 1.0), 1e-10));
  out.push_back(check("eta_chi2_equals_sigma2_squared", std::abs(chi.eta_chi2 - chi.sigma2 * chi.sigma2), 1e-12));
  const auto [fwd, bwd] = symmetry_check(joint);
  out.push_back(check("eta_chi2_symmetric", std::abs(fwd - bwd), 1e-10));
  out.push_back(check("chi2_information_frobenius",
                      std::abs(chi2_information(joint) - (divergence_transition_matrix(joint).squaredNorm() - 1.0)),
                      1e-10));

  double dpi = -std::numeric_limits<double>::infinity();
  Rng rng(opts.seed);
  for (int k = 0; k < opts.random_cases; ++k) {
    const Index nz = 2 + static_cast<Index>(rng.next() % 4);
    const Encoder q = random_encoder(nz, nx, rng.next());
    const EncoderInformation info = encoder_informations(q, joint);
    dpi = std::max(dpi, info.i_zy - info.i_zx);
  }
  out.push_back(check("data_processing_inequality", dpi, 1e-10));

  const double beta_for_kernel = chi.has_onset ? chi.beta_c_hat : 2.0;
  const Matrix kernel = hessian_kernel(joint, beta_for_kernel);
  out.push_back(check("kernel_rows_sum_to_zero", kernel.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12));
  out.push_back(check("kernel_symmetric", (kernel - kernel.transpose()).cwiseAbs().maxCoeff(), 1e-14));

  OnsetSolution onset;
  try {
    onset = solve_onset(joint, opts.onset);
  } catch (const NoOnsetError&) {
    out.push_back(check("eta_chi2_vanishes_without_onset", chi.eta_chi2, 1e-12));
    return out;
  }
  out.push_back(check("beta_c_at_least_one", 1.0 - onset.beta_c, 0.0));
  out.push_back(check("eta_chi2_below_eta_kl", chi.eta_chi2 - onset.eta_kl, 1e-9));
  if (onset.kind == OnsetKind::fixed_point) {
    out.push_back(check("fixed_point_residual", fixed_point_residual(joint, onset.r_x, onset.beta_c), 1e-8));
  }
  double ratio_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.random_cases; ++k) {
    Vector f(nx);
    const double spread = 0.25 + 2.0 * rng.uniform();
    for (Index x = 0; x < nx; ++x) f[x] = joint.px()[x] * std::exp(spread * rng.normal());
    const Distribution fd = Distribution::from_weights(f);
    if (kl_nats(fd.values(), joint.px()) <= 0.0) continue;
    ratio_excess = std::max(ratio_excess, kl_ratio(fd, joint) - onset.eta_kl);
  }
  out.push_back(check("kl_ratio_below_eta_kl", ratio_excess, 1e-9));

  const Vector u_x = onset.r_x.values().cwiseQuotient(joint.px());
  const double form = u_x.dot(hessian_kernel(joint, onset.beta_c) * u_x);
  const double k_direct = chi2_div(onset.r_x.values(), joint.px()) - onset.beta_c * chi2_div(onset.r_y.values(), joint.py());
  out.push_back(check("kappa_quadratic_form", std::abs(form - k_direct), 1e-12 * std::max(1.0, std::abs(form))));

  PerturbationPrediction pred;
  try {
    pred = predict(joint, onset);
  } catch (const HigherOrderRequired&) {
    return out;
  }
  out.push_back(check("i1_zx_equals_beta_c_i1_zy", std::abs(pred.i1_zx - pred.beta_c * pred.i1_zy),
                      1e-8 * std::max(1.0, std::abs(pred.i1_zx))));
  out.push_back(check("l2_equals_minus_half_i1_zy", std::abs(pred.l2 + 0.5 * pred.i1_zy),
                      1e-8 * std::max(1.0, std::abs(pred.l2))));
  out.push_back(check("l2_nonpositive", pred.l2, 0.0));
  if (pred.branch == PredictionBranch::new_letter) {
    const SeriesEncoder series = optimal_series(joint, onset, pred);
    const SeriesTerms loss = loss_series_eval(series, joint, onset.beta_c);
    out.push_back(check("optimal_series_first_order_loss", std::abs(loss.first), 1e-10));
    out.push_back(check("optimal_series_second_order_loss", std::abs(loss.second - pred.l2),
                        1e-8 * std::max(1.0, std::abs(pred.l2))));
    out.push_back(check("first_order_stationarity", first_order_stationarity_residual(series, joint, onset.beta_c), 1e-8));
    out.push_back(check("i1_zy_closure",
                        std::abs(pred.i1_zy - nats_to_bits(kl_nats(onset.r_y.values(), joint.py()) * pred.sum_q1_z1)),
                        1e-10 * std::max(1.0, pred.i1_zy)));
  }
  return out;
}

std::string checks_to_json(const std::vector<CheckResult>& checks) {
  detail::Json arr = detail::Json::array();
  bool all = true;
  for (const auto& c : checks) {
    detail::Json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["value"] = c.value;
    j["tolerance"] = c.tolerance;
    arr.push_back(j);
    all = all && c.passed;
  }
  detail::Json out;
  out["all_passed"] = all;
  out["checks"] = arr;
  return out.dump(2) + "\n";
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ibonset
