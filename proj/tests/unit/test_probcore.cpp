#include "doctest.h"
#include "ibonset/probcore.hpp"
#include "../properties.hpp"

#include <cmath>

using namespace ibonset;
using namespace ibonset::testing;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double h2(double d) { return -d * std::log2(d) - (1 - d) * std::log2(1 - d); }

// Plain double sums in bits, kept independent of the library code paths.
double mi_oracle(const Matrix& p) {
  const Vector px = p.rowwise().sum();
  const Vector py = p.colwise().sum().transpose();
  double s = 0.0;
  for (Index i = 0; i < p.rows(); ++i)
    for (Index j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0) s += p(i, j) * std::log2(p(i, j) / (px[i] * py[j]));
  return s;
}

}  // namespace

TEST_SUITE("probcore") {

TEST_CASE("marginals by hand") {
  const JointDistribution j(mat2(0.4, 0.1, 0.2, 0.3));
  const auto [px, py] = marginals(j);
  CHECK(px[0] == doctest::Approx(0.5));
  CHECK(px[1] == doctest::Approx(0.5));
  CHECK(py[0] == doctest::Approx(0.6));
  CHECK(py[1] == doctest::Approx(0.4));
  const Matrix c = conditional_y_given_x(j);
  CHECK(c(0, 0) == doctest::Approx(0.8));
  CHECK(c(0, 1) == doctest::Approx(0.2));
}

TEST_CASE("conditionals of trivial joints") {
  const JointDistribution diag(mat2(0.5, 0, 0, 0.5));
  CHECK((conditional_y_given_x(diag) - Matrix::Identity(2, 2)).norm() < 1e-15);
  const JointDistribution ind(mat2(0.12, 0.28, 0.18, 0.42));
  const Matrix c = conditional_y_given_x(ind);
  for (Index x = 0; x < 2; ++x) CHECK((c.row(x).transpose() - ind.py()).norm() < 1e-14);
}

TEST_CASE("invalid joints are rejected") {
  CHECK_THROWS(JointDistribution(mat2(0.5, -0.1, 0.3, 0.3)));
  CHECK_THROWS(JointDistribution(mat2(0.5, 0.1, 0.3, 0.3)));
  CHECK_THROWS(JointDistribution(mat2(NAN, 0.5, 0.25, 0.25)));
}

TEST_CASE("zero rows and columns are stripped") {
  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = 0.5;
  p(2, 2) = 0.5;
  const JointDistribution j(p);
  CHECK(j.nx() == 2);
  CHECK(j.ny() == 2);
  CHECK(j.x_labels().size() == 2);
}

TEST_CASE("kl divergence") {
  const Distribution p(Vector::Constant(2, 0.5));
  Vector point(2);
  point << 1.0, 0.0;
  Vector skew(2);
  skew << 0.75, 0.25;
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(Distribution(point), p) == doctest::Approx(1.0));
  CHECK(kl_divergence(Distribution(skew), p) == doctest::Approx(0.18872).epsilon(1e-4));
  CHECK(std::isinf(kl_divergence(p, Distribution(point))));
}

TEST_CASE("mutual information") {
  CHECK(mutual_information(JointDistribution(mat2(0.25, 0.25, 0.25, 0.25))) == doctest::Approx(0.0));
  CHECK(mutual_information(JointDistribution(mat2(0.5, 0, 0, 0.5))) == doctest::Approx(1.0));
  CHECK(mutual_information(bsc(0.11)) == doctest::Approx(1.0 - h2(0.11)).epsilon(1e-12));
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const JointDistribution j = random_joint(rng, 4, 3, 1.5, 0.3);
    CHECK(std::abs(mutual_information(j) - mi_oracle(j.p())) < 1e-12);
  }
}

TEST_CASE("encoder informations") {
  Matrix w(3, 3);
  w << 0.20, 0.05, 0.02, 0.03, 0.25, 0.06, 0.04, 0.05, 0.30;
  const JointDistribution j = JointDistribution::from_weights(w);

  const EncoderInformation flat = encoder_informations(Encoder::uninformative(3, 3), j);
  CHECK(flat.i_zx == doctest::Approx(0.0));
  CHECK(flat.i_zy == doctest::Approx(0.0));

  const EncoderInformation id = encoder_informations(Encoder(Matrix::Identity(3, 3)), j);
  CHECK(id.i_zx == doctest::Approx(entropy(Distribution(j.px()))).epsilon(1e-12));
  CHECK(id.i_zy == doctest::Approx(mutual_information(j)).epsilon(1e-12));

  // The (Z, X) and (Z, Y) joints summed out directly.
  Rng rng(7);
  const Encoder q = random_encoder(rng, 4, 3, 1.0);
  Matrix zx(4, 3);
  for (Index z = 0; z < 4; ++z)
    for (Index x = 0; x < 3; ++x) zx(z, x) = q.q()(z, x) * j.px()[x];
  const Matrix zy = q.q() * j.p();
  const EncoderInformation info = encoder_informations(q, j);
  CHECK(std::abs(info.i_zx - mi_oracle(zx)) < 1e-12);
  CHECK(std::abs(info.i_zy - mi_oracle(zy)) < 1e-12);
}

TEST_CASE("divergence transition matrix") {
  const Vector ind_s = linalg::singular_values(
      divergence_transition_matrix(JointDistribution(mat2(0.12, 0.28, 0.18, 0.42))));
  CHECK(ind_s[0] == doctest::Approx(1.0));
  CHECK(ind_s[1] < 1e-12);
  const Matrix b = divergence_transition_matrix(JointDistribution(mat2(0.5, 0, 0, 0.5)));
  CHECK((b - Matrix::Identity(2, 2)).norm() < 1e-15);
  const Vector s = linalg::singular_values(divergence_transition_matrix(bsc(0.25)));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("property suite at reduced size") {
  for (const auto& o : probcore_ibsolver_properties(150, 101)) {
    INFO(o.name << " worst " << o.worst);
    CHECK(o.failures == 0);
  }
}

}
