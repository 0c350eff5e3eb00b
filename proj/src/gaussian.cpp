#include "ibonset/gaussian.hpp"

#include "ibonset/error.hpp"
#include "normal_cdf.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace ibonset {
namespace {

void require_spd(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + " must be a nonempty square matrix");
  }
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument(std::string(what) + " is not symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument(std::string(what) + " is not positive-definite");
  }
}

double log_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw InvalidArgument("log_det: matrix is not positive-definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix spd_inverse(const Matrix& m) {
  return Eigen::LLT<Matrix>(m).solve(Matrix::Identity(m.rows(), m.cols()));
}

}  // namespace

GaussianJoint::GaussianJoint(Matrix sigma_x, Matrix sigma_y, Matrix sigma_xy)
    : sigma_x_(std::move(sigma_x)), sigma_y_(std::move(sigma_y)), sigma_xy_(std::move(sigma_xy)) {
  require_spd(sigma_x_, "sigma_x");
  require_spd(sigma_y_, "sigma_y");
  if (sigma_xy_.rows() != sigma_x_.rows() || sigma_xy_.cols() != sigma_y_.rows()) {
    throw InvalidArgument("sigma_xy must be d_X x d_Y");
  }
  if (!sigma_xy_.allFinite()) throw InvalidArgument("sigma_xy has non-finite entries");
  const Index dx = sigma_x_.rows();
  const Index dy = sigma_y_.rows();
  Matrix full(dx + dy, dx + dy);
  full << sigma_x_, sigma_xy_, sigma_xy_.transpose(), sigma_y_;
  if (Eigen::LLT<Matrix>(full).info() != Eigen::Success) {
    throw InvalidArgument("joint covariance is not positive-definite");
  }
  sigma_y_given_x_ = sigma_y_ - sigma_xy_.transpose() * spd_inverse(sigma_x_) * sigma_xy_;
  sigma_y_given_x_ = 0.5 * (sigma_y_given_x_ + sigma_y_given_x_.transpose());
  sigma_x_given_y_ = sigma_x_ - sigma_xy_ * spd_inverse(sigma_y_) * sigma_xy_.transpose();
  sigma_x_given_y_ = 0.5 * (sigma_x_given_y_ + sigma_x_given_y_.transpose());
  require_spd(sigma_y_given_x_, "sigma_y_given_x");
}

GaussianJoint GaussianJoint::scalar(double rho) {
  if (!(std::abs(rho) < 1.0)) throw InvalidArgument("scalar Gaussian: |rho| must be below 1");
  return GaussianJoint(Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Constant(1, 1, rho));
}

Vector GaussianJoint::conditional_mean_y(const Vector& x) const {
  if (x.size() != dx()) throw InvalidArgument("conditional_mean_y: x has the wrong dimension");
  return sigma_xy_.transpose() * Eigen::LLT<Matrix>(sigma_x_).solve(x);
}

double gaussian_kl_conditional(const GaussianJoint& g, const Vector& x,
                               const GaussianReference& reference) {
  if (reference.mean.size() != g.dy()) throw InvalidArgument("reference mean has the wrong dimension");
  require_spd(reference.cov, "reference covariance");
  if (reference.cov.rows() != g.dy()) throw InvalidArgument("reference covariance has the wrong dimension");
  const Eigen::LLT<Matrix> ref(reference.cov);
  const Vector diff = g.conditional_mean_y(x) - reference.mean;
  const double quad = diff.dot(ref.solve(diff));
  const double trace = ref.solve(g.sigma_y_given_x()).trace();
  const double logdet = log_det_spd(reference.cov) - log_det_spd(g.sigma_y_given_x());
  return 0.5 * (quad + trace - static_cast<double>(g.dy()) + logdet);
}

GaussianOnset gaussian_onset(const GaussianJoint& g) {
  const linalg::SymmetricEigen sx = linalg::symmetric_eigen(g.sigma_x());
  const Vector root = sx.values.cwiseSqrt();
  const Matrix inv_sqrt = sx.vectors * root.cwiseInverse().asDiagonal() * sx.vectors.transpose();
  const Matrix sqrt_sx = sx.vectors * root.asDiagonal() * sx.vectors.transpose();
  Matrix s = inv_sqrt * g.sigma_x_given_y() * inv_sqrt;
  s = 0.5 * (s + s.transpose());
  const linalg::SymmetricEigen es = linalg::symmetric_eigen(s);

  GaussianOnset out;
  out.spectrum = es.values;
  out.lambda_min = es.values[0];
  if (out.lambda_min >= 1.0 - 1e-12) {
    throw NoOnsetError("Sigma_XY = 0: smallest eigenvalue of Sigma_{X|Y} Sigma_X^{-1} is 1");
  }
  out.beta_c = 1.0 / (1.0 - out.lambda_min);
  Vector phi = sqrt_sx * es.vectors.col(0);
  phi.normalize();
  Index lead = 0;
  phi.cwiseAbs().maxCoeff(&lead);
  if (phi[lead] < 0.0) phi = -phi;
  out.nu_direction = phi;
  return out;
}

MatchingResiduals onset_matching_residuals(const GaussianJoint& g, double beta_c,
                                           const Vector& nu_x, const Matrix& lambda_x) {
  require_spd(lambda_x, "lambda_x");
  if (nu_x.size() != g.dx() || lambda_x.rows() != g.dx()) {
    throw InvalidArgument("onset_matching_residuals: dimension mismatch");
  }
  const Matrix sx_inv = spd_inverse(g.sigma_x());
  const Matrix sy_inv = spd_inverse(g.sigma_y());
  const Matrix gain = g.sigma_yx() * sx_inv;  // y = gain x + noise
  const Matrix lambda_y = gain * lambda_x * gain.transpose() + g.sigma_y_given_x();
  const Vector nu_y = gain * nu_x;
  const Matrix lx_inv = spd_inverse(lambda_x);
  const Matrix ly_inv = spd_inverse(lambda_y);

  MatchingResiduals out;
  const Matrix lhs = lx_inv - sx_inv;
  const Matrix rhs = beta_c * gain.transpose() * (ly_inv - sy_inv) * gain;
  out.quadratic_lhs = lhs.norm();
  out.quadratic_rhs = rhs.norm();
  out.quadratic = (lhs - rhs).norm();
  out.linear = (lx_inv * nu_x - beta_c * gain.transpose() * ly_inv * nu_y).norm();
  const double const_lhs = nu_x.dot(lx_inv * nu_x);
  const double const_rhs =
      (log_det_spd(g.sigma_x()) - log_det_spd(lambda_x)) +
      beta_c * (nu_y.dot(ly_inv * nu_y) + ((ly_inv - sy_inv) * g.sigma_y_given_x()).trace() -
                (log_det_spd(g.sigma_y()) - log_det_spd(lambda_y)));
  out.constant = std::abs(const_lhs - const_rhs);
  return out;
}

double gaussian_mutual_information(const GaussianJoint& g) {
  return nats_to_bits(0.5 * (log_det_spd(g.sigma_y()) - log_det_spd(g.sigma_y_given_x())));
}

JointDistribution discretize_gaussian(const GaussianJoint& g, int n_bins, double truncation) {
  if (g.dx() != 1 || g.dy() != 1) throw InvalidArgument("discretize_gaussian: scalar pairs only");
  if (n_bins < 16) throw InvalidArgument("discretize_gaussian: n_bins must be at least 16");
  if (!(truncation > 0.0)) throw InvalidArgument("discretize_gaussian: truncation must be positive");
  const double sd_x = std::sqrt(g.sigma_x()(0, 0));
  const double sd_y = std::sqrt(g.sigma_y()(0, 0));
  const double rho = g.sigma_xy()(0, 0) / (sd_x * sd_y);
  if (std::abs(rho) >= 1.0 - 1e-12) {
    throw InvalidArgument("discretize_gaussian: |rho| = 1 puts all mass on a line");
  }
  const double noise = std::sqrt(1.0 - rho * rho);

  // Standardized edges.
  const double width = 2.0 * truncation / n_bins;
  Vector edges(n_bins + 1);
  for (int k = 0; k <= n_bins; ++k) edges[k] = -truncation + k * width;

  Matrix mass(n_bins, n_bins);
  using Rule = boost::math::quadrature::gauss<double, 20>;
  for (int i = 0; i < n_bins; ++i) {
    for (int j = 0; j < n_bins; ++j) {
      auto integrand = [&](double u) {
        const double density = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
        return density * detail::normal_interval((edges[j] - rho * u) / noise, (edges[j + 1] - rho * u) / noise);
      };
      mass(i, j) = Rule::integrate(integrand, edges[i], edges[i + 1]);
    }
  }
  const double covered = mass.sum();
  if (covered < 1.0 - 1e-3) {
    throw InvalidArgument("discretize_gaussian: truncation keeps only " + std::to_string(covered) +
                          " of the mass");
  }

  GridAxis gx{Vector(n_bins), Vector::Constant(n_bins, width * sd_x)};
  GridAxis gy{Vector(n_bins), Vector::Constant(n_bins, width * sd_y)};
  std::vector<std::string> xl;
  std::vector<std::string> yl;
  for (int k = 0; k < n_bins; ++k) {
    const double c = 0.5 * (edges[k] + edges[k + 1]);
    gx.centers[k] = c * sd_x;
    gy.centers[k] = c * sd_y;
    xl.push_back(std::to_string(gx.centers[k]));
    yl.push_back(std::to_string(gy.centers[k]));
  }
  return JointDistribution::from_weights(mass, std::move(xl), std::move(yl), std::move(gx),
                                         std::move(gy));
}

}  // namespace ibonset
