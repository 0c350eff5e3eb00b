#include "ibonset/ibsolver.hpp"

#include "ibonset/error.hpp"
#include "ibonset/random.hpp"

#include <cmath>
#include <limits>

namespace ibonset {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_beta(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw InvalidArgument("beta must be finite and nonnegative, got " + std::to_string(beta));
  }
}

void check_options(const IBOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (opts.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  if (opts.n_restarts < 1) throw InvalidArgument("n_restarts must be at least 1");
}

// Update map with the conditionals p(y|x) precomputed.
Matrix step(const Matrix& p_xy, const Matrix& p_y_given_x, const Vector& px, double beta,
            const Matrix& q) {
  const Index nz = q.rows();
  const Index nx = q.cols();
  const Index ny = p_xy.cols();

  const Vector qz = q * px;
  const Matrix joint_zy = q * p_xy;  // sum_x q(z|x) p(x,y)

  Matrix log_qyz = Matrix::Constant(nz, ny, -kInf);
  std::vector<bool> alive(static_cast<std::size_t>(nz));
  for (Index z = 0; z < nz; ++z) {
    alive[static_cast<std::size_t>(z)] = qz[z] >= kDeadCluster;
    if (!alive[static_cast<std::size_t>(z)]) continue;
    for (Index y = 0; y < ny; ++y) {
      const double v = joint_zy(z, y) / qz[z];
      if (v > 0.0) log_qyz(z, y) = std::log(v);
    }
  }

  Matrix out(nz, nx);
  Vector logits(nz);
  for (Index x = 0; x < nx; ++x) {
    double top = -kInf;
    for (Index z = 0; z < nz; ++z) {
      if (!alive[static_cast<std::size_t>(z)]) {
        logits[z] = -kInf;
        continue;
      }
      // KL[p(y|x) || q(y|z)] up to the z-independent entropy of p(y|x).
      double cross = 0.0;
      for (Index y = 0; y < ny; ++y) {
        const double w = p_y_given_x(x, y);
        if (w <= 0.0) continue;
        if (log_qyz(z, y) == -kInf) {
          cross = kInf;
          break;
        }
        cross -= w * log_qyz(z, y);
      }
      logits[z] = std::log(qz[z]) - beta * cross;
      top = std::max(top, logits[z]);
    }
    if (top == -kInf) {
      out.col(x) = q.col(x);  // every live cluster excludes this x; keep it
      continue;
    }
    double norm = 0.0;
    for (Index z = 0; z < nz; ++z) {
      const double v = logits[z] == -kInf ? 0.0 : std::exp(logits[z] - top);
      out(z, x) = v;
      norm += v;
    }
    out.col(x) /= norm;
  }
  return out;
}

IBSolution finish(const JointDistribution& joint, double beta, Matrix q, long iterations,
                  bool converged, std::vector<std::string> warnings) {
  IBSolution sol;
  sol.encoder = Encoder(std::move(q));
  const EncoderInformation info = encoder_informations(sol.encoder, joint);
  sol.beta = beta;
  sol.i_zx = info.i_zx;
  sol.i_zy = info.i_zy;
  sol.loss = info.i_zx - beta * info.i_zy;
  sol.iterations = iterations;
  sol.converged = converged;
  sol.warnings = std::move(warnings);
  return sol;
}

}  // namespace

Encoder ib_step(const JointDistribution& joint, double beta, const Encoder& q) {
  check_beta(beta);
  if (q.nx() != joint.nx()) throw InvalidArgument("ib_step: encoder/joint alphabet mismatch");
  return Encoder(step(joint.p(), conditional_y_given_x(joint), joint.px(), beta, q.q()));
}

double ib_loss(const JointDistribution& joint, double beta, const Encoder& q) {
  const EncoderInformation info = encoder_informations(q, joint);
  return info.i_zx - beta * info.i_zy;
}

Encoder random_encoder(Index nz, Index nx, std::uint64_t seed) {
  Rng rng(seed);
  Matrix w(nz, nx);
  for (Index x = 0; x < nx; ++x)
    for (Index z = 0; z < nz; ++z) w(z, x) = rng.uniform();
  return Encoder::from_weights(w);
}

IBSolution solve_ib_from(const JointDistribution& joint, double beta, Encoder init,
                         const IBOptions& opts) {
  check_beta(beta);
  check_options(opts);
  if (init.nx() != joint.nx()) throw InvalidArgument("solve_ib: encoder/joint alphabet mismatch");
  if (init.nz() < 2) throw InvalidArgument("solve_ib: z_cardinality must be at least 2");

  std::vector<std::string> warnings;
  if (init.nz() > joint.nx()) {
    warnings.push_back("z_cardinality " + std::to_string(init.nz()) + " exceeds |X| = " +
                       std::to_string(joint.nx()) + "; |Z| = |X| already suffices");
  }

  const Matrix pyx = conditional_y_given_x(joint);
  Matrix q = init.q();
  for (long it = 1; it <= opts.max_iter; ++it) {
    Matrix next = step(joint.p(), pyx, joint.px(), beta, q);
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change < opts.tol) return finish(joint, beta, std::move(q), it, true, std::move(warnings));
  }
  return finish(joint, beta, std::move(q), opts.max_iter, false, std::move(warnings));
}

IBSolution solve_ib(const JointDistribution& joint, double beta, const IBOptions& opts) {
  check_beta(beta);
  check_options(opts);
  const Index nz = opts.z_cardinality.value_or(joint.nx());
  if (nz < 2) throw InvalidArgument("solve_ib: z_cardinality must be at least 2");
  return solve_ib_from(joint, beta, random_encoder(nz, joint.nx(), opts.seed), opts);
}

IBSolution solve_ib_restarts(const JointDistribution& joint, double beta, const IBOptions& opts) {
  check_options(opts);
  std::optional<IBSolution> best;
  for (int k = 0; k < opts.n_restarts; ++k) {
    IBOptions one = opts;
    one.seed = stream_seed(opts.seed, static_cast<std::uint64_t>(k));
    IBSolution sol = solve_ib(joint, beta, one);
    if (!best || sol.loss < best->loss) best = std::move(sol);
  }
  return std::move(*best);
}

std::vector<FrontierPoint> frontier_sweep(const JointDistribution& joint,
                                          std::span<const double> beta_grid,
                                          const IBOptions& opts) {
  check_options(opts);
  for (std::size_t k = 1; k < beta_grid.size(); ++k) {
    if (beta_grid[k] < beta_grid[k - 1]) throw InvalidArgument("frontier_sweep: grid not sorted");
  }
  std::vector<FrontierPoint> out;
  std::vector<Encoder> encoders;
  out.reserve(beta_grid.size());
  encoders.reserve(beta_grid.size());
  for (std::size_t k = 0; k < beta_grid.size(); ++k) {
    const double beta = beta_grid[k];
    IBOptions fresh = opts;
    fresh.seed = stream_seed(opts.seed, static_cast<std::uint64_t>(k));
    IBSolution best = solve_ib_restarts(joint, beta, fresh);
    if (!encoders.empty()) {
      IBSolution warm = solve_ib_from(joint, beta, encoders.back(), opts);
      if (warm.loss <= best.loss) best = std::move(warm);
    }
    out.push_back({beta, best.i_zx, best.i_zy, best.loss, best.converged});
    encoders.push_back(std::move(best.encoder));
  }
  // Between the onset and the chi^2 instability the uninformative encoder is
  // still a local minimum, so fresh starts can miss the informative branch.
  // Walking back down from larger beta follows that branch.
  for (std::size_t k = beta_grid.size(); k-- > 1;) {
    IBSolution warm = solve_ib_from(joint, beta_grid[k - 1], encoders[k], opts);
    if (warm.loss < out[k - 1].loss) {
      out[k - 1] = {beta_grid[k - 1], warm.i_zx, warm.i_zy, warm.loss, warm.converged};
      encoders[k - 1] = std::move(warm.encoder);
    }
  }
  return out;
}

}  // namespace ibonset
