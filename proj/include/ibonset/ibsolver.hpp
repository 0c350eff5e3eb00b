#pragma once
/*
 * ibsolver.hpp - exact discrete information bottleneck solver.
 *
 * Self-consistent iteration of the IB equations for a fixed trade-off beta:
 *
 *   q(z)    <- sum_x q(z|x) p(x)
 *   q(y|z)  <- sum_x q(z|x) p(x,y) / q(z)
 *   q(z|x)  <- q(z) exp(-beta KL[p(y|x) || q(y|z)]),  renormalized over z
 *
 * The loss I(Z;X) - beta I(Z;Y) is nonincreasing along the iterates, but the
 * fixed point reached depends on the initialization, so restarts are used to
 * pick the best local optimum. Close to the learning onset the iteration slows
 * down critically (the contraction rate tends to one); the frontier sweep
 * warm-starts each beta from its neighbour and a high max_iter is expected
 * there.
 */

#include "ibonset/probcore.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ibonset {

struct IBOptions {
  std::optional<Index> z_cardinality;  // defaults to |X|
  double tol = 1e-10;                   // sup-norm change of q(z|x)
  long max_iter = 100000;
  std::uint64_t seed = 0;
  int n_restarts = 1;
};

struct IBSolution {
  Encoder encoder;
  double beta = 0.0;
  double i_zx = 0.0;  // bits
  double i_zy = 0.0;  // bits
  double loss = 0.0;  // bits
  long iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

struct FrontierPoint {
  double beta = 0.0;
  double i_zx = 0.0;
  double i_zy = 0.0;
  double loss = 0.0;
  bool converged = false;
};

// Clusters whose mass q(z) falls below this are dead and stay at zero.
inline constexpr double kDeadCluster = 1e-14;

// One application of the update map.
Encoder ib_step(const JointDistribution& joint, double beta, const Encoder& q);

// I(Z;X) - beta I(Z;Y) in bits.
double ib_loss(const JointDistribution& joint, double beta, const Encoder& q);

// Random strictly positive column-stochastic encoder.
Encoder random_encoder(Index nz, Index nx, std::uint64_t seed);

IBSolution solve_ib(const JointDistribution& joint, double beta, const IBOptions& opts = {});
IBSolution solve_ib_from(const JointDistribution& joint, double beta, Encoder init,
                         const IBOptions& opts = {});
// opts.n_restarts independent starts; restart k uses stream_seed(opts.seed, k).
IBSolution solve_ib_restarts(const JointDistribution& joint, double beta,
                             const IBOptions& opts = {});

// beta_grid must be ascending. Each point keeps the better of a warm start
// from the previous point's encoder and opts.n_restarts fresh starts; a second,
// descending pass then warm-starts each point from the next one and keeps any
// lower loss.
std::vector<FrontierPoint> frontier_sweep(const JointDistribution& joint,
                                          std::span<const double> beta_grid,
                                          const IBOptions& opts = {});

}  // namespace ibonset
