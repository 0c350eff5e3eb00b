#pragma once
// End-to-end analyses behind the command-line tool: one-joint onset reports,
// parameter sweeps, frontier comparison tables and the invariant suite.

#include "ibonset/chi2.hpp"
#include "ibonset/ibsolver.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/perturb.hpp"
#include "ibonset/probcore.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace ibonset {

enum class Status { ok, no_onset, convergence_failure, higher_order };

const char* status_name(Status s);
// 0 ok, 3 no onset, 4 convergence failure, 5 kappa <= 0.
int exit_code(Status s);

struct OnsetReport {
  double mi_bits = 0.0;
  Chi2Analysis chi2;
  std::optional<OnsetSolution> onset;
  std::optional<PerturbationPrediction> prediction;
  double kappa_quadratic = 0.0;  // chi^2(r_x||p_x) - beta_c chi^2(r_y||p_y)
  Status status = Status::ok;
  std::string message;
};

OnsetReport analyze_onset(const JointDistribution& joint, const OnsetOptions& opts);
std::string report_to_json(const OnsetReport& report);

// Runs fn(0..n-1) on up to `jobs` threads; results keep index order. The first
// exception (by index) is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct SweepRow {
  double param = 0.0;
  double mi_bits = 0.0;
  double beta_c = 0.0;      // NaN without an onset
  double beta_c_hat = 0.0;  // NaN without an onset
  double i1_zy = 0.0;       // NaN unless status is ok
  double kappa = 0.0;       // NaN unless status is ok
  std::string kind;         // onset kind, empty without an onset
  Status status = Status::ok;
};

// Rows come back in the order of `params`. Invalid generator arguments and
// convergence failures are rethrown with the point index attached.
std::vector<SweepRow> run_sweep(std::span<const double> params,
                                const std::function<JointDistribution(double)>& make,
                                const OnsetOptions& opts, int jobs);
std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& param_name,
                         const std::vector<std::string>& metadata);

// "a:b:n" (n evenly spaced values), "v1,v2,..." or a single value.
std::vector<double> parse_values(const std::string& spec);
// As parse_values, plus "auto" / "auto:n" for n points on [beta_c - 0.2, beta_c + 1.0].
std::vector<double> parse_beta_grid(const std::string& spec, std::optional<double> beta_c);
inline constexpr int kAutoGridPoints = 49;

std::string frontier_to_csv(const std::vector<FrontierPoint>& points,
                            const std::vector<std::string>& metadata);

// eps = beta - beta_c clipped at 0; (eps i1_zx, eps i1_zy, eps^2 l2).
std::string predicted_frontier_csv(std::span<const double> beta_grid,
                                   const PerturbationPrediction& prediction,
                                   const std::vector<std::string>& metadata);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct ValidationOptions {
  OnsetOptions onset;
  std::uint64_t seed = 0;
  int random_cases = 200;
};

std::vector<CheckResult> validate_joint(const JointDistribution& joint, const ValidationOptions& opts);
std::string checks_to_json(const std::vector<CheckResult>& checks);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace ibonset
