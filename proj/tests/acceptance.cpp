// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include "ibonset/chi2.hpp"
#include "ibonset/datagen.hpp"
#include "ibonset/error.hpp"
#include "ibonset/gaussian.hpp"
#include "ibonset/ibsolver.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/perturb.hpp"
#include "ibonset/pipeline.hpp"
#include "properties.hpp"
#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

using namespace ibonset;
using namespace ibonset::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Every joint that flows through the run, with its prediction when one exists.
struct Dataset {
  std::string name;
  JointDistribution joint;
  std::optional<OnsetReport> report;
};
std::vector<Dataset> g_datasets;

const OnsetReport& analyzed(Dataset& d) {
  if (!d.report) d.report = analyze_onset(d.joint, OnsetOptions{});
  return *d.report;
}

Verdict bsc_benchmark() {
  Verdict v;
  for (double delta : {0.1, 0.25, 0.4}) {
    const JointDistribution j = bsc(delta);
    Stopwatch sw;
    const OnsetSolution s = solve_onset(j);
    const double t = sw.seconds();
    const double expect = 1.0 / ((1 - 2 * delta) * (1 - 2 * delta));
    const double rel = std::abs(s.beta_c - expect) / expect;
    const double brute = eta_kl_bruteforce(j);
    const Chi2Analysis chi = eta_chi2(j);
    v.note(fmt("delta=%.2f beta_c=%.10f expected=%.10f rel=%.1e brute_eta=%.9f eta=%.9f beta_hat=%.10f %.3fs",
               delta, s.beta_c, expect, rel, brute, s.eta_kl, chi.beta_c_hat, t));
    v.require(rel <= 1e-6, fmt("delta=%.2f beta_c relative error", delta));
    v.require(brute <= s.eta_kl + 1e-6 && brute >= s.eta_kl - 1e-3, fmt("delta=%.2f brute-force oracle", delta));
    v.require(std::abs(chi.beta_c_hat - s.beta_c) <= 1e-9 * expect, fmt("delta=%.2f chi^2 coincidence", delta));
    v.require(t < 1.0, fmt("delta=%.2f runtime", delta));
    g_datasets.push_back({fmt("bsc_%.2f", delta), j, std::nullopt});
  }
  return v;
}

Verdict gaussian_closed_form() {
  Verdict v;
  Stopwatch sw;
  for (double rho : {0.3, 0.5, 0.8}) {
    const GaussianJoint g = GaussianJoint::scalar(rho);
    const double closed = gaussian_onset(g).beta_c;
    const double expect = 1.0 / (rho * rho);
    const JointDistribution j = discretize_gaussian(g, 128, 5.0);
    const OnsetSolution s = solve_onset(j);
    const double rel = std::abs(s.beta_c - expect) / expect;
    v.note(fmt("rho=%.1f closed=%.12f |closed-1/rho^2|=%.1e discretized=%.6f rel=%.2e", rho, closed,
               std::abs(closed - expect), s.beta_c, rel));
    v.require(std::abs(closed - expect) <= 1e-10, fmt("rho=%.1f closed form", rho));
    v.require(rel <= 0.02, fmt("rho=%.1f discretized within 2%%", rho));
    g_datasets.push_back({fmt("gauss_rho%.1f", rho), j, std::nullopt});
  }
  const double t = sw.seconds();
  v.note(fmt("runtime %.2fs", t));
  v.require(t < 10.0, "runtime");
  return v;
}

Verdict onset_equivalence() {
  Verdict v;
  Stopwatch sw;
  Rng rng(3);
  int accepted = 0;
  int refined = 0;
  double worst_above = -INFINITY;
  double worst_below = 0.0;
  while (accepted < 50) {
    const JointDistribution j = random_joint(rng, 4, 4, 1.5);
    if (mutual_information(j) <= 0.05) continue;
    ++accepted;
    const double eta = solve_onset(j).eta_kl;
    double brute = eta_kl_bruteforce(j, 32, 8);
    if (brute < eta - 1e-3) {
      ++refined;
      brute = std::max(brute, eta_kl_bruteforce(j, 64, 32));
    }
    worst_above = std::max(worst_above, brute - eta);
    worst_below = std::max(worst_below, eta - brute);
    v.require(brute <= eta + 1e-6, fmt("joint %d: oracle above eta_KL by %.2e", accepted, brute - eta));
    v.require(brute >= eta - 1e-3, fmt("joint %d: oracle below eta_KL by %.2e", accepted, eta - brute));
    if (accepted <= 10) g_datasets.push_back({fmt("random4x4_%d", accepted), j, std::nullopt});
  }
  const double t = sw.seconds();
  v.note(fmt("50 joints, max(brute-eta)=%.2e, max(eta-brute)=%.2e, refined %d, %.1fs", worst_above, worst_below,
             refined, t));
  v.require(t < 300.0, "runtime");
  return v;
}

// Exact solutions at beta_c + eps. Below beta_hat the uninformative encoder is
// still locally stable, so the grid continues past it and the sweep's
// downward pass carries the informative branch back to the onset.
std::map<double, FrontierPoint> exact_near_onset(const JointDistribution& j, double beta_c, double beta_hat) {
  const std::vector<double> eps_grid{0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64};
  std::vector<double> grid;
  for (double e : eps_grid) grid.push_back(beta_c + e);
  for (double e = 1.28; grid.back() < 1.5 * beta_hat; e *= 2) grid.push_back(beta_c + e);
  IBOptions o;
  o.tol = 1e-13;
  o.max_iter = 5000000;
  o.n_restarts = 3;
  const std::vector<FrontierPoint> pts = frontier_sweep(j, grid, o);
  std::map<double, FrontierPoint> out;
  for (std::size_t k = 0; k < eps_grid.size(); ++k) out[eps_grid[k]] = pts[k];
  return out;
}

Verdict perturbative_validation() {
  Verdict v;
  Stopwatch sw;
  std::vector<std::pair<std::string, JointDistribution>> joints{{"fig1", fig1_joint()}};
  Rng rng(11);
  while (joints.size() < 11) {
    const JointDistribution j = random_joint(rng, 4, 4, 1.5);
    if (mutual_information(j) <= 0.05) continue;
    joints.emplace_back(fmt("random%zu", joints.size()), j);
  }
  for (auto& [name, j] : joints) {
    Dataset d{name, j, std::nullopt};
    const OnsetReport& rep = analyzed(d);
    g_datasets.push_back(d);
    if (!rep.prediction) {
      v.require(false, name + ": no prediction (" + rep.message + ")");
      continue;
    }
    const PerturbationPrediction& pr = *rep.prediction;
    const auto exact = exact_near_onset(j, pr.beta_c, eta_chi2(j).beta_c_hat);
    double err_prev = NAN;
    double lerr_prev = NAN;
    std::string line = fmt("%s beta_c=%.6f branch=%s i1_zx=%.5f:", name.c_str(), pr.beta_c,
                           pr.branch == PredictionBranch::new_letter ? "new_letter" : "symmetric_split", pr.i1_zx);
    bool ratios_ok = true;
    bool loss_ok = true;
    for (double eps : {0.04, 0.02, 0.01}) {
      const FrontierPoint& p = exact.at(eps);
      const double err = std::abs(p.i_zx - eps * pr.i1_zx) / (eps * pr.i1_zx);
      const double lerr = std::abs(p.loss - eps * eps * pr.l2) / (eps * eps);
      line += fmt(" eps=%.2f rel=%.3e C=%.3f Lres/eps^2=%.2e", eps, err, err / eps, lerr);
      if (!std::isnan(err_prev)) {
        const double ratio = err_prev / err;
        line += fmt(" ratio=%.2f", ratio);
        ratios_ok = ratios_ok && ratio >= 1.5 && ratio <= 3.0;
        loss_ok = loss_ok && lerr < lerr_prev;
      }
      err_prev = err;
      lerr_prev = lerr;
    }
    v.note(line);
    v.require(ratios_ok, name + ": I_ZX error ratio per halving outside [1.5, 3]");
    v.require(loss_ok, name + ": loss residual / eps^2 not shrinking");
  }
  const double t = sw.seconds();
  v.note(fmt("runtime %.1fs", t));
  v.require(t < 600.0, "runtime");
  return v;
}

// Sweeps used by the trend and bound criteria; computed once.
struct SweepSet {
  std::string label;
  std::string param;
  std::vector<SweepRow> rows;
};
std::vector<SweepSet> g_sweeps;

void build_sweeps() {
  const OnsetOptions opts{};
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  struct BinaryFamily {
    std::string label;
    ClassFamily family;
    double sigma;  // class-1 standard deviation, gaussian only
  };
  const std::vector<BinaryFamily> families{{"binary gaussian", ClassFamily::gaussian, 1.0},
                                           {"binary gaussian sigma=0.5", ClassFamily::gaussian, 0.5},
                                           {"binary gaussian sigma=2", ClassFamily::gaussian, 2.0},
                                           {"binary exponential", ClassFamily::exponential, 0.0},
                                           {"binary poisson", ClassFamily::poisson, 0.0}};
  for (const BinaryFamily& bf : families) {
    const ClassFamily fam = bf.family;
    const std::vector<double> params = fam == ClassFamily::gaussian ? parse_values("0.2:3:8") : parse_values("1.5:10:8");
    auto make = [fam, sigma = bf.sigma](double v) {
      BinaryClassSpec s;
      s.family = fam;
      s.classes[0] = fam == ClassFamily::gaussian ? ClassParams{0.0, 1.0} : ClassParams{1.0, 0.0};
      s.classes[1] = fam == ClassFamily::gaussian ? ClassParams{v, sigma} : ClassParams{v, 0.0};
      return binary_classification_joint(s);
    };
    g_sweeps.push_back({bf.label, "class-1 parameter", run_sweep(params, make, opts, jobs)});
    for (double p : params) g_datasets.push_back({fmt("%s_%.3f", bf.label.c_str(), p), make(p), std::nullopt});
  }
  for (FunctionPreset f :
       {FunctionPreset::linear, FunctionPreset::cubic, FunctionPreset::sigmoid, FunctionPreset::quadratic}) {
    const std::vector<double> params = parse_values("0.05:1:8");
    auto make = [f](double sigma) {
      NoisyFunctionSpec s;
      s.f = f;
      s.sigma = sigma;
      return noisy_function_joint(s);
    };
    g_sweeps.push_back({"noisy " + preset_name(f), "sigma", run_sweep(params, make, opts, jobs)});
    for (double p : params) g_datasets.push_back({fmt("noisy_%s_%.3f", preset_name(f).c_str(), p), make(p), std::nullopt});
  }
}

Verdict bound_chain() {
  Verdict v;
  Rng rng(17);
  double worst = -INFINITY;
  double worst_beta = -INFINITY;
  for (int k = 0; k < 200; ++k) {
    const JointDistribution j = random_joint(rng, random_size(rng, 2, 6), random_size(rng, 2, 6), 1.5);
    if (mutual_information(j) <= kNoOnsetInformation) continue;
    const Chi2Analysis chi = eta_chi2(j);
    const OnsetSolution s = solve_onset(j);
    worst = std::max(worst, chi.eta_chi2 - s.eta_kl);
    worst_beta = std::max(worst_beta, (s.beta_c - chi.beta_c_hat) / s.beta_c);
  }
  v.note(fmt("200 random joints: max(eta_chi2 - eta_KL)=%.2e, max rel(beta_c - beta_hat)=%.2e", worst, worst_beta));
  v.require(worst <= 1e-9, "random joints: eta_chi2 <= eta_KL + 1e-9");
  v.require(worst_beta <= 1e-9, "random joints: beta_hat >= beta_c");
  double sweep_worst = -INFINITY;
  int points = 0;
  for (const auto& s : g_sweeps) {
    for (const auto& r : s.rows) {
      if (std::isnan(r.beta_c)) continue;
      ++points;
      sweep_worst = std::max(sweep_worst, 1.0 / r.beta_c_hat - 1.0 / r.beta_c);
    }
  }
  v.note(fmt("%d sweep points: max(eta_chi2 - eta_KL)=%.2e", points, sweep_worst));
  v.require(sweep_worst <= 1e-9, "sweep points: eta_chi2 <= eta_KL + 1e-9");
  // Unequal class widths break the x -> mu - x symmetry of the Gaussian
  // family, so the chi^2 onset must lie strictly above the true one, with the
  // gap closing towards the deterministic end.
  for (const auto& s : g_sweeps) {
    if (s.label.find("sigma=") == std::string::npos) continue;
    std::string line = s.label + " relative gap (beta_hat - beta_c)/beta_c:";
    double smallest = INFINITY;
    for (const auto& r : s.rows) {
      const double gap = (r.beta_c_hat - r.beta_c) / r.beta_c;
      smallest = std::min(smallest, gap);
      line += fmt(" %.3g", gap);
    }
    v.note(line);
    v.require(smallest > 1e-6, s.label + ": strict gap beta_hat > beta_c");
    const double first = (s.rows.front().beta_c_hat - s.rows.front().beta_c) / s.rows.front().beta_c;
    const double last = (s.rows.back().beta_c_hat - s.rows.back().beta_c) / s.rows.back().beta_c;
    v.require(last < first, s.label + ": gap narrows as I(X;Y) grows");
  }
  return v;
}

Verdict trend_reproduction() {
  Verdict v;
  for (const auto& s : g_sweeps) {
    bool complete = true;
    for (const auto& r : s.rows) complete = complete && r.status == Status::ok;
    if (!complete) {
      v.require(false, s.label + ": sweep has points without a prediction");
      continue;
    }
    std::string line = s.label + ":";
    if (s.label.rfind("binary", 0) == 0) {
      std::vector<SweepRow> rows = s.rows;
      std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.mi_bits < b.mi_bits; });
      std::vector<double> eta;
      std::vector<double> i1;
      for (const auto& r : rows) {
        eta.push_back(1.0 / r.beta_c);
        i1.push_back(r.i1_zy);
        line += fmt(" (%.3f,%.4f,%.4g)", r.mi_bits, 1.0 / r.beta_c, r.i1_zy);
      }
      v.note(line + "  [I(X;Y), eta_KL, i1_zy]");
      v.require(nondecreasing(eta, 1e-9), s.label + ": eta_KL nondecreasing in I(X;Y)");
      v.require(nondecreasing(i1, 1e-9), s.label + ": i1_zy nondecreasing in I(X;Y)");
    } else {
      std::vector<double> neg_i1;
      for (const auto& r : s.rows) {
        neg_i1.push_back(-r.i1_zy);
        line += fmt(" (%.3f,%.4g)", r.param, r.i1_zy);
      }
      v.note(line + "  [sigma, i1_zy]");
      bool strict = true;
      for (std::size_t k = 1; k < s.rows.size(); ++k) strict = strict && s.rows[k].i1_zy < s.rows[k - 1].i1_zy;
      v.require(strict, s.label + ": i1_zy decreasing in sigma");
    }
  }
  for (FunctionPreset f : {FunctionPreset::linear, FunctionPreset::cubic, FunctionPreset::sigmoid}) {
    NoisyFunctionSpec s;
    s.f = f;
    s.sigma = 0.01;
    const OnsetSolution on = solve_onset(noisy_function_joint(s));
    v.note(fmt("sigma=0.01 %s: beta_c=%.6f", preset_name(f).c_str(), on.beta_c));
    v.require(std::abs(on.beta_c - 1.0) <= 0.01, preset_name(f) + ": beta_c within 1% of 1 at sigma=0.01");
  }
  return v;
}

Verdict structural_identities() {
  Verdict v;
  int checked = 0;
  int higher_order = 0;
  double worst_zx = 0.0;
  double worst_l2 = 0.0;
  for (auto& d : g_datasets) {
    const OnsetReport& rep = analyzed(d);
    if (rep.status == Status::no_onset) continue;
    if (!rep.prediction) {
      ++higher_order;
      v.note(d.name + ": " + status_name(rep.status) + " (" + rep.message + ")");
      continue;
    }
    ++checked;
    const PerturbationPrediction& p = *rep.prediction;
    const double ezx = std::abs(p.i1_zx - p.beta_c * p.i1_zy);
    const double el2 = std::abs(p.l2 + p.i1_zy / 2);
    worst_zx = std::max(worst_zx, ezx);
    worst_l2 = std::max(worst_l2, el2);
    v.require(ezx <= 1e-8, d.name + fmt(": |i1_zx - beta_c i1_zy| = %.2e", ezx));
    v.require(el2 <= 1e-8, d.name + fmt(": |l2 + i1_zy/2| = %.2e", el2));
  }
  v.note(fmt("%d datasets with a prediction, %d without; max residuals %.2e and %.2e", checked, higher_order,
             worst_zx, worst_l2));
  return v;
}

Verdict series_expansion() {
  Verdict v;
  Rng rng(23);
  int counts[3] = {0, 0, 0};
  double worst_ratio = INFINITY;
  for (int k = 0; k < 100; ++k) {
    const SupportCase kind = static_cast<SupportCase>(k % 3);
    const JointDistribution j = random_joint(rng, random_size(rng, 2, 5), random_size(rng, 2, 5), 1.0);
    const SeriesEncoder se = random_series_encoder(rng, j.nx(), kind, 0.05);
    ++counts[k % 3];
    for (Side side : {Side::X, Side::Y}) {
      const SeriesTerms t = info_series_eval(se, j, side);
      auto remainder = [&](double eps) {
        return std::abs(exact_information(se.at(eps), j, side) - eps * t.first - eps * eps * t.second);
      };
      const double ratio = remainder(0.02) / remainder(0.01);
      worst_ratio = std::min(worst_ratio, ratio);
      v.require(ratio >= 7.0, fmt("encoder %d side %s: shrink ratio %.3f", k, side == Side::X ? "X" : "Y", ratio));
    }
  }
  v.note(fmt("100 encoders (%d base-only, %d with first-order letters, %d with second-order letters), min ratio %.3f",
             counts[0], counts[1], counts[2], worst_ratio));
  return v;
}

Verdict property_suite() {
  Verdict v;
  Stopwatch sw;
  for (const auto& o : probcore_ibsolver_properties(1000, 29)) {
    v.note(fmt("%-24s %d cases, %d failures, worst margin %.2e", o.name.c_str(), o.cases, o.failures, o.worst));
    v.require(o.failures == 0, o.name);
  }
  const double t = sw.seconds();
  v.note(fmt("runtime %.1fs", t));
  v.require(t < 120.0, "runtime");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  bool quiet = argc > 1 && std::strcmp(argv[1], "--quiet") == 0;
  int failed = 0;
  auto report = [&](int id, const char* title, const Verdict& v) {
    std::printf("[%s] %d %s\n", v.pass ? "PASS" : "FAIL", id, title);
    if (!quiet || !v.pass) {
      for (const auto& n : v.notes) std::printf("      %s\n", n.c_str());
    }
    std::fflush(stdout);
    if (!v.pass) ++failed;
  };
  auto guarded = [&](auto fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      Verdict v;
      v.require(false, std::string("exception: ") + e.what());
      return v;
    }
  };

  report(1, "BSC benchmark", guarded(bsc_benchmark));
  report(2, "Gaussian closed form", guarded(gaussian_closed_form));
  report(3, "onset equivalence with the brute-force supremum", guarded(onset_equivalence));
  report(4, "perturbative scaling against the exact solver", guarded(perturbative_validation));
  guarded([] {
    build_sweeps();
    return Verdict{};
  });
  report(5, "structural identities", guarded(structural_identities));
  report(6, "information series expansion", guarded(series_expansion));
  report(7, "bound chain", guarded(bound_chain));
  report(8, "trend reproduction", guarded(trend_reproduction));
  report(9, "probcore/ibsolver property suite", guarded(property_suite));
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
