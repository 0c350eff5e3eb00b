#pragma once
/*
 * onset.hpp - first-order theory of the learning onset.
 *
 * The perturbative encoder r(x) and the critical trade-off beta_c solve
 *
 *   r(y)   = sum_x p(y|x) r(x)
 *   beta_c = KL[r(x)||p(x)] / KL[r(y)||p(y)]
 *   r(x)   = p(x) exp(-beta_c (KL[p(y|x)||r(y)] - KL[p(y|x)||p(y)]))
 *
 * and 1/beta_c is the KL contraction coefficient eta_KL of the channel p(y|x).
 * solve_onset iterates these equations from a few starts along the maximal-
 * correlation direction and then from random starts. Two outcomes are
 * possible:
 *
 *   fixed_point  a nontrivial solution r != p was found and its ratio beats
 *                the chi^2 limit below;
 *   local_limit  every start drifts back to r = p. The supremum of the KL
 *                ratio is then approached as r -> p, where it equals the
 *                squared maximal correlation sigma_2(B)^2, and beta_c is
 *                reported as 1/sigma_2^2 with r_x = p_x, r_y = p_y.
 */

#include "ibonset/probcore.hpp"

#include <cstdint>

namespace ibonset {

struct OnsetOptions {
  double tol = 1e-11;         // max(|r - r_prev|_inf, |beta - beta_prev|)
  double detect_eps = 1e-4;   // |r - p|_1 below this is the trivial solution
  int max_restarts = 32;
  long max_iter = 100000;
  std::uint64_t seed = 0;
  double damping = 1.0;       // relaxation weight; halved once on oscillation
};

enum class OnsetKind { fixed_point, local_limit };

struct OnsetSolution {
  double beta_c = 0.0;
  Distribution r_x;
  Distribution r_y;
  double eta_kl = 0.0;  // exactly 1 / beta_c
  int restarts_used = 0;
  bool converged = false;
  OnsetKind kind = OnsetKind::fixed_point;
  int fixed_points_found = 0;  // restarts that reached a nontrivial fixed point
  int collapsed = 0;           // restarts that drifted back to r = p
  long iterations = 0;         // of the returned restart
};

// Mutual information (bits) at or below which no onset exists.
inline constexpr double kNoOnsetInformation = 1e-10;

OnsetSolution solve_onset(const JointDistribution& joint, const OnsetOptions& opts = {});

double eta_kl(const JointDistribution& joint, const OnsetOptions& opts = {});

// KL[f_y||p_y] / KL[f||p_x] with f_y = sum_x p(y|x) f(x). Rejects f = p_x.
double kl_ratio(const Distribution& f, const JointDistribution& joint);

// Grid search of the KL ratio over the simplex of X (|X| <= 4) at the given
// resolution, then a shrinking pattern search around the best grid points.
// Every value is an attained ratio, so the result lower-bounds eta_KL.
double eta_kl_bruteforce(const JointDistribution& joint, int resolution = 32,
                         int polish_starts = 8);

// sup_x |ln r(x) - ln p(x) + beta_c (KL[p(y|x)||r(y)] - KL[p(y|x)||p(y)])|
double fixed_point_residual(const JointDistribution& joint, const Distribution& r_x,
                            double beta_c);

}  // namespace ibonset
