#pragma once
/*
 * perturb.hpp - second-order theory of the learning onset.
 *
 * Around beta = beta_c + eps the optimal encoder is written as
 *   q(z|x) = q0(z) + eps q1(z|x) + eps^2 q2(z|x) + ...
 * where representation letters split into Z0 = supp(q0) and the letters Z1,
 * Z2 that first gain mass at order one and two. The curvature
 *
 *   K(x,x') = delta(x,x') p(x) + (beta_c - 1) p(x) p(x')
 *             - beta_c sum_y p(y) p(x|y) p(x'|y)
 *   kappa   = sum_{x,x'} r(x) K(x,x') r(x') / (p(x) p(x'))
 *
 * fixes the mass s = sum_{z in Z1} q1(z) = KL[r_y||p_y] / kappa, and with it
 *
 *   I1_ZX = KL[r_x||p_x] s,   I1_ZY = KL[r_y||p_y] s,   L2 = -KL[r_y||p_y]^2 / (2 kappa).
 *
 * KL divergences enter in nats; the reported informations are then converted
 * to bits.
 *
 * When the onset is a local limit (r -> p along the maximal-correlation
 * direction phi, so kappa vanishes), the first informative encoder splits the
 * existing letters symmetrically, q(z|x) = 1/2 (1 +- a phi(x)), and the scale
 * of a is fixed by the quartic term of the loss,
 *
 *   c4 = (<phi^4>_p - beta_c <psi^4>_{p_y}) / 12,   psi(y) = sum_x p(x|y) phi(x),
 *
 * giving I1_ZX = 1/(8 beta_c c4) nats and the same two identities.
 */

#include "ibonset/onset.hpp"
#include "ibonset/probcore.hpp"

#include <vector>

namespace ibonset {

enum class PredictionBranch { new_letter, symmetric_split };

struct PerturbationPrediction {
  PredictionBranch branch = PredictionBranch::new_letter;
  double kappa = 0.0;      // c4 on the symmetric_split branch
  double sum_q1_z1 = 0.0;  // probability mass, dimensionless
  double l2 = 0.0;         // bits
  double i1_zx = 0.0;      // bits
  double i1_zy = 0.0;      // bits
  double beta_c = 0.0;
};

Matrix hessian_kernel(const JointDistribution& joint, double beta_c);

// chi^2(r_x||p_x) - beta_c chi^2(r_y||p_y), algebraically equal to the
// quadratic form of K in the direction r/p.
double kappa(const JointDistribution& joint, const OnsetSolution& onset);

// Throws HigherOrderRequired when kappa (or, for a local-limit onset, the
// quartic coefficient) is not safely positive.
PerturbationPrediction predict(const JointDistribution& joint, const OnsetSolution& onset);

// Symmetric-split branch on its own. Also requires a strict gap between the
// second and third singular values of B and that no asymmetric split lowers
// the quartic term.
PerturbationPrediction predict_symmetric_split(const JointDistribution& joint, double beta_c);

enum class Side { X, Y };

// Truncated power series of an encoder. The letters are classified once at
// construction:
//   Z0: q0(z) > 0
//   Z1: q0(z) = 0, q1(z|x) > 0 for some x (then q1(z|x) >= 0 everywhere)
//   Z2: q0(z) = q1(z|.) = 0, q2(z|x) > 0 for some x
class SeriesEncoder {
 public:
  enum class Order { zero, one, two, unused };

  SeriesEncoder(Distribution q0, Matrix q1, Matrix q2);

  const Distribution& q0() const { return q0_; }
  const Matrix& q1() const { return q1_; }
  const Matrix& q2() const { return q2_; }
  Index nz() const { return q1_.rows(); }
  Index nx() const { return q1_.cols(); }
  Order order(Index z) const { return order_[static_cast<std::size_t>(z)]; }

  // q0 + eps q1 + eps^2 q2; throws if that is not a valid encoder.
  Encoder at(double eps) const;

 private:
  Distribution q0_;
  Matrix q1_;
  Matrix q2_;
  std::vector<Order> order_;
};

struct SeriesTerms {
  double first = 0.0;   // bits
  double second = 0.0;  // bits
};

// (I1, I2) of I(Z;X) (side X) or I(Z;Y) (side Y).
SeriesTerms info_series_eval(const SeriesEncoder& se, const JointDistribution& joint, Side side);

// L1 = I1_ZX - beta_c I1_ZY,  L2 = I2_ZX - beta_c I2_ZY - I1_ZY.
SeriesTerms loss_series_eval(const SeriesEncoder& se, const JointDistribution& joint,
                             double beta_c);

// Two-letter series of the optimal encoder: q0 = (1, 0), q1(z1|x) = s r(x)/p(x)
// and q1(z0|x) = -q1(z1|x) with s = prediction.sum_q1_z1, q2 = 0.
SeriesEncoder optimal_series(const JointDistribution& joint, const OnsetSolution& onset,
                             const PerturbationPrediction& prediction);

// sup over z in Z1 and x of
//   |ln(q1(z|x)/q1(z)) - beta_c sum_y p(y|x) ln(q1(z|y)/q1(z))|.
double first_order_stationarity_residual(const SeriesEncoder& se, const JointDistribution& joint,
                                         double beta_c);

}  // namespace ibonset
