#include "doctest.h"
#include "ibonset/error.hpp"
#include "ibonset/gaussian.hpp"
#include "ibonset/onset.hpp"
#include "../support.hpp"

#include <cmath>

using namespace ibonset;
using namespace ibonset::testing;

namespace {

// Textbook KL between multivariate normals, in nats.
double kl_normal(const Vector& m0, const Matrix& s0, const Vector& m1, const Matrix& s1) {
  const Matrix s1_inv = s1.inverse();
  const Vector d = m1 - m0;
  return 0.5 * ((s1_inv * s0).trace() + d.dot(s1_inv * d) - static_cast<double>(m0.size()) +
                std::log(s1.determinant() / s0.determinant()));
}

GaussianJoint random_gaussian(Rng& rng, Index dx, Index dy) {
  const Index n = dx + dy;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) a(i, k) = rng.normal();
  const Matrix cov = a * a.transpose() + 0.5 * Matrix::Identity(n, n);
  return GaussianJoint(cov.topLeftCorner(dx, dx), cov.bottomRightCorner(dy, dy), cov.topRightCorner(dx, dy));
}

}  // namespace

TEST_SUITE("gaussian") {

TEST_CASE("conditional KL") {
  const GaussianJoint g = GaussianJoint::scalar(0.5);
  Vector x(1);
  x << 0.7;
  const GaussianReference self{g.conditional_mean_y(x), g.sigma_y_given_x()};
  CHECK(std::abs(gaussian_kl_conditional(g, x, self)) < 1e-15);
  x << 0.0;
  const GaussianReference marginal{Vector::Zero(1), g.sigma_y()};
  CHECK(gaussian_kl_conditional(g, x, marginal) ==
        doctest::Approx(0.5 * (0.75 - 1.0 + std::log(1.0 / 0.75))).epsilon(1e-14));
}

TEST_CASE("conditional KL against the textbook formula") {
  Rng rng(71);
  const GaussianJoint g = random_gaussian(rng, 2, 3);
  const GaussianReference ref{Vector::Constant(3, 0.4), g.sigma_y() + 0.3 * Matrix::Identity(3, 3)};
  for (int k = 0; k < 50; ++k) {
    Vector x(2);
    x << rng.normal(), rng.normal();
    const double expect = kl_normal(g.conditional_mean_y(x), g.sigma_y_given_x(), ref.mean, ref.cov);
    CHECK(std::abs(gaussian_kl_conditional(g, x, ref) - expect) < 1e-10);
  }
}

TEST_CASE("scalar onset") {
  const GaussianOnset o = gaussian_onset(GaussianJoint::scalar(0.5));
  CHECK(o.lambda_min == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(o.beta_c == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_onset(GaussianJoint::scalar(0.0)), NoOnsetError);
}

TEST_CASE("rank-one channel from two inputs") {
  Matrix sxy(2, 1);
  sxy << 0.6, 0.0;
  const GaussianJoint g(Matrix::Identity(2, 2), Matrix::Identity(1, 1), sxy);
  const GaussianOnset o = gaussian_onset(g);
  CHECK(o.beta_c == doctest::Approx(1.0 / 0.36).epsilon(1e-12));
  CHECK(std::abs(std::abs(o.nu_direction[0]) - 1.0) < 1e-12);
  CHECK(std::abs(o.nu_direction[1]) < 1e-12);
}

TEST_CASE("invalid covariances are rejected") {
  Matrix bad(2, 2);
  bad << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(GaussianJoint(bad, Matrix::Identity(1, 1), Matrix::Zero(2, 1)), InvalidArgument);
  Matrix big(1, 1);
  big << 1.2;
  CHECK_THROWS_AS(GaussianJoint(Matrix::Identity(1, 1), Matrix::Identity(1, 1), big), InvalidArgument);
}

TEST_CASE("onset is invariant under invertible maps of X") {
  Rng rng(72);
  const GaussianJoint g = random_gaussian(rng, 3, 2);
  Matrix a(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index k = 0; k < 3; ++k) a(i, k) = rng.normal();
  a += 3.0 * Matrix::Identity(3, 3);
  const GaussianJoint h(a * g.sigma_x() * a.transpose(), g.sigma_y(), a * g.sigma_xy());
  CHECK(gaussian_onset(h).beta_c == doctest::Approx(gaussian_onset(g).beta_c).epsilon(1e-10));
  CHECK(gaussian_mutual_information(h) == doctest::Approx(gaussian_mutual_information(g)).epsilon(1e-10));
}

TEST_CASE("eigenvector solves the matching conditions") {
  Rng rng(73);
  for (int k = 0; k < 10; ++k) {
    const GaussianJoint g = random_gaussian(rng, 1 + k % 3, 1 + k % 2);
    const GaussianOnset o = gaussian_onset(g);
    const MatchingResiduals r = onset_matching_residuals(g, o.beta_c, o.nu_direction, g.sigma_x());
    CHECK(r.quadratic < 1e-10);
    CHECK(r.linear < 1e-10);
    CHECK(r.constant < 1e-10);
    if (g.dx() > 1) {
      const Vector off = Vector::Ones(g.dx()).normalized();
      const double lin = onset_matching_residuals(g, o.beta_c, off, g.sigma_x()).linear;
      CHECK(lin > 1e-6);
    }
  }
}

TEST_CASE("discretized pair") {
  const JointDistribution ind = discretize_gaussian(GaussianJoint::scalar(0.0), 64, 5.0);
  CHECK(mutual_information(ind) < 1e-10);
  for (double rho : {0.3, 0.5, 0.8}) {
    const GaussianJoint g = GaussianJoint::scalar(rho);
    const double expect = -0.5 * std::log2(1 - rho * rho);
    CHECK(gaussian_mutual_information(g) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(mutual_information(discretize_gaussian(g, 128, 5.0)) == doctest::Approx(expect).epsilon(0.02));
  }
  CHECK_THROWS_AS(discretize_gaussian(GaussianJoint::scalar(0.5), 8, 5.0), InvalidArgument);
}

TEST_CASE("discretized onset approaches the closed form") {
  const GaussianJoint g = GaussianJoint::scalar(0.5);
  double last = INFINITY;
  for (int bins : {32, 64, 128}) {
    const double err = std::abs(solve_onset(discretize_gaussian(g, bins, 5.0)).beta_c - 4.0);
    CHECK(err < last);
    last = err;
  }
  CHECK(last / 4.0 < 0.02);
}

}
