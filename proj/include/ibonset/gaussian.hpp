#pragma once
/*
 * gaussian.hpp - learning onset of zero-mean jointly Gaussian (X, Y).
 *
 * With the Gaussian ansatz R_X = N(nu_X, Sigma_X), the onset equations reduce
 * to the eigenproblem
 *
 *   (1 - beta_c (1 - Sigma_{X|Y} Sigma_X^{-1})) nu_X = 0,
 *
 * so beta_c = 1 / (1 - lambda_min) with lambda_min the smallest eigenvalue of
 * Sigma_{X|Y} Sigma_X^{-1}, and nu_X points along the matching eigenvector.
 * The spectrum is computed from the symmetric similar matrix
 * Sigma_X^{-1/2} Sigma_{X|Y} Sigma_X^{-1/2}.
 */

#include "ibonset/probcore.hpp"

namespace ibonset {

class GaussianJoint {
 public:
  // Rejects asymmetric or non-positive-definite blocks, a non-PD joint
  // covariance and a non-PD Sigma_{Y|X}.
  GaussianJoint(Matrix sigma_x, Matrix sigma_y, Matrix sigma_xy);
  // Unit-variance scalar pair with correlation rho.
  static GaussianJoint scalar(double rho);

  const Matrix& sigma_x() const { return sigma_x_; }
  const Matrix& sigma_y() const { return sigma_y_; }
  const Matrix& sigma_xy() const { return sigma_xy_; }
  Matrix sigma_yx() const { return sigma_xy_.transpose(); }
  const Matrix& sigma_y_given_x() const { return sigma_y_given_x_; }
  const Matrix& sigma_x_given_y() const { return sigma_x_given_y_; }
  Index dx() const { return sigma_x_.rows(); }
  Index dy() const { return sigma_y_.rows(); }

  // mu_{Y|x} = Sigma_YX Sigma_X^{-1} x
  Vector conditional_mean_y(const Vector& x) const;

 private:
  Matrix sigma_x_;
  Matrix sigma_y_;
  Matrix sigma_xy_;
  Matrix sigma_y_given_x_;
  Matrix sigma_x_given_y_;
};

struct GaussianReference {
  Vector mean;
  Matrix cov;
};

// KL[p(y|x) || N(reference.mean, reference.cov)] in nats.
double gaussian_kl_conditional(const GaussianJoint& g, const Vector& x,
                               const GaussianReference& reference);

struct GaussianOnset {
  double beta_c = 0.0;
  double lambda_min = 0.0;
  Vector nu_direction;  // unit eigenvector of Sigma_{X|Y} Sigma_X^{-1}
  Vector spectrum;      // ascending eigenvalues of Sigma_{X|Y} Sigma_X^{-1}
};

// Throws NoOnsetError when Sigma_XY = 0 (lambda_min = 1).
GaussianOnset gaussian_onset(const GaussianJoint& g);

// Residuals of the quadratic, linear and constant matching conditions of the
// Gaussian ansatz. Lambda_Y and nu_Y are the push-forwards of (nu_X, Lambda_X)
// through the channel.
struct MatchingResiduals {
  double quadratic_lhs = 0.0;  // ||Lambda_X^{-1} - Sigma_X^{-1}||_F
  double quadratic_rhs = 0.0;  // ||beta_c Sigma_X^{-1} Sigma_XY (Lambda_Y^{-1} - Sigma_Y^{-1}) Sigma_YX Sigma_X^{-1}||_F
  double quadratic = 0.0;      // norm of the difference
  double linear = 0.0;
  double constant = 0.0;
};
MatchingResiduals onset_matching_residuals(const GaussianJoint& g, double beta_c,
                                           const Vector& nu_x, const Matrix& lambda_x);

// I(X;Y) in bits.
double gaussian_mutual_information(const GaussianJoint& g);

// Bin masses of a scalar pair on an n_bins x n_bins grid spanning
// +-truncation standard deviations, renormalized.
JointDistribution discretize_gaussian(const GaussianJoint& g, int n_bins, double truncation);

}  // namespace ibonset
