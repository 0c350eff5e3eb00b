#include "ibonset/onset.hpp"

#include "ibonset/chi2.hpp"
#include "ibonset/error.hpp"
#include "ibonset/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

namespace ibonset {
namespace {

constexpr double kBetaMin = 1.0;
constexpr double kBetaMax = 1e6;
// A start whose distance to p keeps shrinking this many steps in a row while
// its ratio stays below the r -> p limit is drifting back to the trivial
// solution.
constexpr int kCreepWindow = 500;
// Range of offsets along the maximal-correlation direction tried before the
// random starts.
constexpr double kAxisFar = 0.5;
constexpr double kAxisNear = 1e-3;

enum class RunStatus { fixed_point, collapsed, unconverged };

struct RunResult {
  RunStatus status = RunStatus::unconverged;
  Vector r;
  double beta = 0.0;
  long iterations = 0;
};

struct Channel {
  const Vector& px;
  const Vector& py;
  Matrix pyx;       // |X| x |Y|
  Vector log_py;
};

double clamp_beta(double b) {
  if (!std::isfinite(b)) return kBetaMax;
  return std::clamp(b, kBetaMin, kBetaMax);
}

// Returns beta = KL_x/KL_y of the normalized r and overwrites ry.
double kl_ratio_inverse(const Channel& ch, const Vector& r, Vector& ry) {
  ry = ch.pyx.transpose() * r;
  const double kx = kl_nats(r, ch.px);
  const double ky = kl_nats(ry, ch.py);
  if (!(ky > 0.0)) return std::numeric_limits<double>::infinity();
  return kx / ky;
}

Vector random_start(const Vector& px, std::uint64_t seed) {
  Rng rng(seed);
  Vector r(px.size());
  for (Index x = 0; x < px.size(); ++x) r[x] = px[x] * std::exp(rng.normal());
  return r / r.sum();
}

// Starts on the line p (1 + t phi), phi the maximal-correlation direction
// scaled to max |phi| = 1. Where the ratio exceeds eta_chi2 only on one side of
// p and close to it, random starts rarely land in that basin, so each side
// contributes its best point of a geometric grid in t plus one far point.
std::vector<Vector> axis_starts(const JointDistribution& joint, const Channel& ch) {
  const Index nx = joint.nx();
  if (nx < 2) return {};
  const Matrix b = divergence_transition_matrix(joint);
  const linalg::SymmetricEigen eig = linalg::symmetric_eigen(b * b.transpose());
  Vector phi = eig.vectors.col(nx - 2).cwiseQuotient(joint.px().cwiseSqrt());
  phi /= phi.cwiseAbs().maxCoeff();
  auto on_line = [&](double t) {
    Vector r = joint.px().cwiseProduct(Vector::Ones(nx) + t * phi);
    return Vector(r / r.sum());
  };
  std::vector<Vector> out;
  Vector ry;
  for (double sign : {1.0, -1.0}) {
    out.push_back(on_line(sign * kAxisFar));
    double best_t = sign * kAxisFar;
    double best_beta = kl_ratio_inverse(ch, out.back(), ry);
    for (double t = kAxisFar / 2; t > kAxisNear; t /= 2) {
      const double beta = kl_ratio_inverse(ch, on_line(sign * t), ry);
      if (beta < best_beta) {
        best_beta = beta;
        best_t = sign * t;
      }
    }
    if (best_t != sign * kAxisFar) out.push_back(on_line(best_t));
  }
  return out;
}

// One undamped update r -> T(r) at beta = KL ratio of r. Returns false when r
// sits at p or the image loses all mass.
bool map_step(const Channel& ch, const Vector& r, double& beta, Vector& out) {
  const Index nx = ch.px.size();
  Vector ry;
  beta = kl_ratio_inverse(ch, r, ry);
  if (!std::isfinite(beta)) return false;
  // ln r(x) - ln p(x) = beta sum_y p(y|x) ln(r(y)/p(y)), which equals
  // -beta (KL[p(y|x)||r(y)] - KL[p(y|x)||p(y)]) without the cancellation.
  Vector log_ratio_y(ry.size());
  for (Index y = 0; y < ry.size(); ++y) {
    log_ratio_y[y] = ry[y] > 0.0 ? std::log(ry[y]) - ch.log_py[y] : -std::numeric_limits<double>::infinity();
  }
  Vector exponent(nx);
  for (Index x = 0; x < nx; ++x) {
    double s = 0.0;
    for (Index y = 0; y < ry.size(); ++y) {
      const double w = ch.pyx(x, y);
      if (w > 0.0) s += w * log_ratio_y[y];
    }
    exponent[x] = beta * s;
  }
  const double top = exponent.maxCoeff();
  if (top == -std::numeric_limits<double>::infinity()) return false;
  out.resize(nx);
  for (Index x = 0; x < nx; ++x) out[x] = ch.px[x] * std::exp(exponent[x] - top);
  out /= out.sum();
  return true;
}

// Gradient of R = KL(ry||py) / KL(r||p) in u = ln(r/p) coordinates.
bool ratio_gradient(const Channel& ch, const Vector& r, double& ratio, Vector& grad) {
  const Vector ry = ch.pyx.transpose() * r;
  const double kx = kl_nats(r, ch.px);
  const double ky = kl_nats(ry, ch.py);
  if (!(kx > 0.0) || (ry.array() <= 0.0).any() || (r.array() <= 0.0).any()) return false;
  ratio = ky / kx;
  const Vector log_ry = ry.array().log().matrix() - ch.log_py;
  const Vector d_kx = (r.array() / ch.px.array()).log().matrix();
  const Vector d_r = (ch.pyx * log_ry - ratio * d_kx) / kx;
  grad = r.cwiseProduct(d_r - Vector::Constant(r.size(), r.dot(d_r)));
  return true;
}

Vector from_log(const Channel& ch, const Vector& u) {
  Vector r = ch.px.cwiseProduct((u.array() - u.maxCoeff()).exp().matrix());
  return r / r.sum();
}

// Levenberg-Marquardt ascent of the ratio from r, Hessian by central
// differences of the gradient. Every accepted step raises R, so a start that
// beats the r -> p limit cannot fall back to p; a stationary point of R is a
// fixed point of the update. Close to p plain iteration needs ~1e6 steps for
// the same point.
std::optional<Vector> ratio_ascent(const Channel& ch, const Vector& start) {
  const Index nx = ch.px.size();
  Vector u = (start.array() / ch.px.array()).log().matrix();
  Vector r = from_log(ch, u);
  double ratio = 0.0;
  Vector grad;
  if (!ratio_gradient(ch, r, ratio, grad)) return std::nullopt;
  double mu = 1e-3 * std::max(1.0, ratio);
  constexpr double h = 1e-6;
  for (int step = 0; step < 200; ++step) {
    if (grad.cwiseAbs().maxCoeff() < 1e-14) return r;
    Matrix hess(nx, nx);
    for (Index x = 0; x < nx; ++x) {
      Vector up = u;
      Vector down = u;
      up[x] += h;
      down[x] -= h;
      double rp = 0.0;
      double rm = 0.0;
      Vector gp;
      Vector gm;
      if (!ratio_gradient(ch, from_log(ch, up), rp, gp) || !ratio_gradient(ch, from_log(ch, down), rm, gm)) {
        return std::nullopt;
      }
      hess.col(x) = (gp - gm) / (2 * h);
    }
    hess = 0.5 * (hess + hess.transpose());
    bool accepted = false;
    for (int k = 0; k < 40 && !accepted; ++k) {
      const Matrix m = Matrix::Identity(nx, nx) * mu - hess;
      const Vector delta = m.ldlt().solve(grad);
      const Vector trial_u = u + delta;
      const Vector trial = from_log(ch, trial_u);
      double trial_ratio = 0.0;
      Vector trial_grad;
      if (ratio_gradient(ch, trial, trial_ratio, trial_grad) && trial_ratio >= ratio) {
        const bool stalled = delta.cwiseAbs().maxCoeff() < 1e-13;
        u = trial_u;
        r = trial;
        ratio = trial_ratio;
        grad = trial_grad;
        mu = std::max(mu / 4, 1e-12);
        accepted = true;
        if (stalled) return r;
      } else {
        mu *= 4;
      }
    }
    if (!accepted) return r;
  }
  return r;
}

// Iteration counts at which a slow run that already beats the r -> p limit is
// handed to the ratio ascent.
constexpr long kPolishAt[] = {2000, 16000, 128000};

RunResult run_restart(const Channel& ch, const OnsetOptions& opts, double beta_local, Vector r) {
  Vector ry;
  double beta_prev = clamp_beta(kl_ratio_inverse(ch, r, ry));
  double alpha = opts.damping;
  double last_change = std::numeric_limits<double>::infinity();
  int rising = 0;
  bool damped = false;
  std::deque<double> distances;

  RunResult out;
  for (long it = 1; it <= opts.max_iter; ++it) {
    const Vector r_prev = r;
    r /= r.sum();
    double beta = 0.0;
    Vector r_new;
    if (!map_step(ch, r, beta, r_new)) {
      if (!std::isfinite(beta)) out = {RunStatus::collapsed, r, beta_local, it};
      return out;
    }
    r = (1.0 - alpha) * r + alpha * r_new;

    const double change =
        std::max((r - r_prev).cwiseAbs().maxCoeff(), std::abs(beta - beta_prev));
    beta_prev = beta;
    out.r = r;
    out.beta = beta;
    out.iterations = it;

    const double dist = (r - ch.px).lpNorm<1>();
    if (change < opts.tol) {
      out.status = dist > opts.detect_eps ? RunStatus::fixed_point : RunStatus::collapsed;
      return out;
    }
    if (dist < opts.detect_eps) {
      out.status = RunStatus::collapsed;
      return out;
    }
    // Near p the map is neutral along the maximal-correlation direction, so a
    // start that falls back towards p creeps instead of converging.
    distances.push_back(dist);
    if (static_cast<int>(distances.size()) > kCreepWindow) distances.pop_front();
    if (beta >= beta_local &&
        static_cast<int>(distances.size()) == kCreepWindow &&
        std::is_sorted(distances.rbegin(), distances.rend())) {
      out.status = RunStatus::collapsed;
      return out;
    }
    if (beta < beta_local && std::find(std::begin(kPolishAt), std::end(kPolishAt), it) != std::end(kPolishAt)) {
      if (const auto polished = ratio_ascent(ch, r)) {
        const double polished_beta = kl_ratio_inverse(ch, *polished, ry);
        Vector image;
        double image_beta = 0.0;
        if (map_step(ch, *polished, image_beta, image) && (image - *polished).cwiseAbs().maxCoeff() < opts.tol &&
            (*polished - ch.px).lpNorm<1>() > opts.detect_eps && polished_beta < beta_local) {
          out.r = *polished;
          out.beta = polished_beta;
          out.status = RunStatus::fixed_point;
          return out;
        }
      }
    }

    if (!damped) {
      rising = change > last_change ? rising + 1 : 0;
      if (rising >= 3 && it > 50) {
        alpha = std::min(alpha, 0.5);
        damped = true;
      }
    }
    last_change = change;
  }
  out.status = RunStatus::unconverged;
  return out;
}

}  // namespace

OnsetSolution solve_onset(const JointDistribution& joint, const OnsetOptions& opts) {
  if (!(opts.tol > 0.0) || !(opts.detect_eps > 0.0)) {
    throw InvalidArgument("solve_onset: tol and detect_eps must be positive");
  }
  if (opts.max_restarts < 1 || opts.max_iter < 1) {
    throw InvalidArgument("solve_onset: max_restarts and max_iter must be at least 1");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw InvalidArgument("solve_onset: damping must lie in (0, 1]");
  }
  const double mi = mutual_information(joint);
  if (mi <= kNoOnsetInformation) {
    throw NoOnsetError("I(X;Y) = " + std::to_string(mi) +
                       " bits; the joint is independent and eta_KL = 0");
  }
  const Chi2Analysis chi = eta_chi2(joint);
  if (!chi.has_onset) throw NoOnsetError("sigma_2(B) vanishes; no onset");
  const double beta_local = chi.beta_c_hat;

  Channel ch{joint.px(), joint.py(), conditional_y_given_x(joint), joint.py().array().log()};

  std::optional<RunResult> best;
  int found = 0;
  int collapsed = 0;
  const std::vector<Vector> axis = axis_starts(joint, ch);
  for (int k = 0; k < opts.max_restarts; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Vector start = ku < axis.size() ? axis[ku] : random_start(ch.px, stream_seed(opts.seed, ku));
    RunResult run = run_restart(ch, opts, beta_local, std::move(start));
    if (run.status == RunStatus::fixed_point) {
      ++found;
      if (!best || run.beta < best->beta) best = std::move(run);
    } else if (run.status == RunStatus::collapsed) {
      ++collapsed;
    }
  }

  OnsetSolution sol;
  sol.restarts_used = opts.max_restarts;
  sol.fixed_points_found = found;
  sol.collapsed = collapsed;
  // A fixed point only wins if its ratio beats the r -> p limit; runs stalled
  // in the neutral zone next to p tie with it.
  if (best && best->beta < beta_local * (1.0 - 1e-9)) {
    sol.kind = OnsetKind::fixed_point;
    sol.r_x = Distribution(best->r);
    sol.r_y = Distribution(Vector(ch.pyx.transpose() * sol.r_x.values()));
    sol.beta_c = kl_nats(sol.r_x.values(), joint.px()) / kl_nats(sol.r_y.values(), joint.py());
    sol.iterations = best->iterations;
  } else if (best || collapsed > 0) {
    sol.kind = OnsetKind::local_limit;
    sol.r_x = Distribution(joint.px());
    sol.r_y = Distribution(joint.py());
    sol.beta_c = beta_local;
  } else {
    throw ConvergenceError("solve_onset: none of " + std::to_string(opts.max_restarts) +
                           " restarts converged within " + std::to_string(opts.max_iter) +
                           " iterations (tol " + std::to_string(opts.tol) + ")");
  }
  sol.converged = true;
  sol.eta_kl = 1.0 / sol.beta_c;
  return sol;
}

double eta_kl(const JointDistribution& joint, const OnsetOptions& opts) {
  return solve_onset(joint, opts).eta_kl;
}

double kl_ratio(const Distribution& f, const JointDistribution& joint) {
  if (f.size() != joint.nx()) throw InvalidArgument("kl_ratio: f has the wrong alphabet size");
  const double kx = kl_nats(f.values(), joint.px());
  if (!(kx > 0.0)) throw InvalidArgument("kl_ratio: f equals p_x, the ratio is 0/0");
  const Vector fy = conditional_y_given_x(joint).transpose() * f.values();
  return kl_nats(fy, joint.py()) / kx;
}

namespace {

void enumerate_compositions(int parts, int total, std::vector<int>& current,
                            std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    current.push_back(k);
    enumerate_compositions(parts - 1, total - k, current, out);
    current.pop_back();
  }
}

}  // namespace

double eta_kl_bruteforce(const JointDistribution& joint, int resolution, int polish_starts) {
  const Index nx = joint.nx();
  if (nx > 4) throw InvalidArgument("eta_kl_bruteforce: |X| must be at most 4");
  if (resolution < 2) throw InvalidArgument("eta_kl_bruteforce: resolution must be at least 2");
  if (mutual_information(joint) <= kNoOnsetInformation) return 0.0;
  if (nx == 1) return 0.0;

  const Matrix pyx = conditional_y_given_x(joint);
  const Vector& px = joint.px();
  const Vector& py = joint.py();
  auto ratio = [&](const Vector& f) -> double {
    const double kx = kl_nats(f, px);
    if (!(kx > 0.0)) return -1.0;
    return kl_nats(pyx.transpose() * f, py) / kx;
  };

  std::vector<std::vector<int>> grid;
  std::vector<int> scratch;
  enumerate_compositions(static_cast<int>(nx), resolution, scratch, grid);
  std::vector<std::pair<double, Vector>> scored;
  scored.reserve(grid.size());
  for (const auto& c : grid) {
    Vector f(nx);
    for (Index i = 0; i < nx; ++i) f[i] = static_cast<double>(c[static_cast<std::size_t>(i)]) / resolution;
    const double v = ratio(f);
    if (v >= 0.0) scored.emplace_back(v, std::move(f));
  }
  // Grid points adjacent to p approximate the r -> p limit poorly; seed the
  // polish from p's neighbourhood as well.
  Vector near_p = px;
  near_p[0] += 1e-3 * (1.0 - px[0]);
  for (Index i = 1; i < nx; ++i) near_p[i] -= 1e-3 * px[i];
  scored.emplace_back(ratio(near_p), near_p);

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  double best = scored.front().first;
  const int starts = std::min<int>(polish_starts, static_cast<int>(scored.size()));
  for (int s = 0; s < starts; ++s) {
    Vector f = scored[static_cast<std::size_t>(s)].second;
    double value = scored[static_cast<std::size_t>(s)].first;
    double step = 1.0 / resolution;
    while (step > 1e-9) {
      bool improved = false;
      for (Index i = 0; i < nx; ++i) {
        for (Index j = 0; j < nx; ++j) {
          if (i == j) continue;
          const double move = std::min(step, f[j]);
          if (move <= 0.0) continue;
          Vector g = f;
          g[i] += move;
          g[j] -= move;
          const double v = ratio(g);
          if (v > value) {
            f = std::move(g);
            value = v;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, value);
  }
  return best;
}

double fixed_point_residual(const JointDistribution& joint, const Distribution& r_x,
                            double beta_c) {
  if (r_x.size() != joint.nx()) throw InvalidArgument("fixed_point_residual: size mismatch");
  const Matrix pyx = conditional_y_given_x(joint);
  const Vector ry = pyx.transpose() * r_x.values();
  double worst = 0.0;
  for (Index x = 0; x < joint.nx(); ++x) {
    const Vector row = pyx.row(x).transpose();
    const double shift = kl_nats(row, ry) - kl_nats(row, joint.py());
    const double lhs = r_x[x] > 0.0 ? std::log(r_x[x]) - std::log(joint.px()[x])
                                     : -std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(lhs + beta_c * shift));
  }
  return worst;
}

}  // namespace ibonset
