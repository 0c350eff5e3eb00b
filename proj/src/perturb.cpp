#include "ibonset/perturb.hpp"

#include "ibonset/error.hpp"

#include <cmath>
#include <string>

namespace ibonset {
namespace {

constexpr double kColumnSumTolerance = 1e-12;
// kappa at or below this fraction of chi^2(r_x||p_x) counts as nonpositive.
constexpr double kKappaRelativeFloor = 1e-10;
// Relative spectral gap below which the split direction is ambiguous.
constexpr double kSplitGap = 1e-9;

double chi2_divergence(const Vector& r, const Vector& p) {
  return ((r - p).array().square() / p.array()).sum();
}

struct SideView {
  Vector weights;  // p(x) or p(y)
  Matrix c1;       // |Z| x n, q1(z|.) on this side
  Matrix c2;
};

SideView side_view(const SeriesEncoder& se, const JointDistribution& joint, Side side) {
  if (side == Side::X) return {joint.px(), se.q1(), se.q2()};
  const Matrix pxy = conditional_x_given_y(joint);
  return {joint.py(), se.q1() * pxy, se.q2() * pxy};
}

// c ln(c/m) with c = 0 contributing nothing.
double xlogratio(double c, double m) { return c > 0.0 ? c * std::log(c / m) : 0.0; }

}  // namespace

Matrix hessian_kernel(const JointDistribution& joint, double beta_c) {
  if (!(beta_c > 0.0)) throw InvalidArgument("hessian_kernel: beta_c must be positive");
  const Vector& px = joint.px();
  const Matrix& p = joint.p();
  Matrix k = (beta_c - 1.0) * (px * px.transpose());
  k.diagonal() += px;
  k -= beta_c * (p * joint.py().cwiseInverse().asDiagonal() * p.transpose());
  return k;
}

double kappa(const JointDistribution& joint, const OnsetSolution& onset) {
  if (onset.r_x.size() != joint.nx() || onset.r_y.size() != joint.ny()) {
    throw InvalidArgument("kappa: onset does not belong to this joint");
  }
  return chi2_divergence(onset.r_x.values(), joint.px()) -
         onset.beta_c * chi2_divergence(onset.r_y.values(), joint.py());
}

PerturbationPrediction predict(const JointDistribution& joint, const OnsetSolution& onset) {
  if (onset.kind == OnsetKind::local_limit) return predict_symmetric_split(joint, onset.beta_c);
  const double k = kappa(joint, onset);
  const double scale = chi2_divergence(onset.r_x.values(), joint.px());
  if (!(k > kKappaRelativeFloor * scale) || scale == 0.0) throw HigherOrderRequired(k);

  const double kl_x = kl_nats(onset.r_x.values(), joint.px());
  const double kl_y = kl_nats(onset.r_y.values(), joint.py());
  PerturbationPrediction out;
  out.kappa = k;
  out.beta_c = onset.beta_c;
  out.sum_q1_z1 = kl_y / k;
  out.i1_zx = nats_to_bits(kl_x * kl_y / k);
  out.i1_zy = nats_to_bits(kl_y * kl_y / k);
  out.l2 = nats_to_bits(-kl_y * kl_y / (2.0 * k));
  return out;
}

PerturbationPrediction predict_symmetric_split(const JointDistribution& joint, double beta_c) {
  if (!(beta_c >= 1.0)) throw InvalidArgument("predict_symmetric_split: beta_c must be at least 1");
  const Index nx = joint.nx();
  if (nx < 2) throw HigherOrderRequired(0.0, "a single input state cannot be split");
  const Matrix b = divergence_transition_matrix(joint);
  const linalg::SymmetricEigen eig = linalg::symmetric_eigen(b * b.transpose());
  // Ascending: the last eigenvector is sqrt(p), the one before it carries phi.
  const Index second = nx - 2;
  const double eta = eig.values[second];
  if (nx >= 3 && eig.values[second] - eig.values[second - 1] < kSplitGap * eta) {
    throw HigherOrderRequired(0.0, "sigma_2(B) is degenerate; the split direction is not unique");
  }
  const Vector& px = joint.px();
  const Vector& py = joint.py();
  const Vector sqrt_px = px.cwiseSqrt();
  const Vector phi = eig.vectors.col(second).cwiseQuotient(sqrt_px);
  const Vector psi = (joint.p().transpose() * phi).cwiseQuotient(py);

  const double d = px.dot(phi.array().pow(4).matrix()) - beta_c * py.dot(psi.array().pow(4).matrix());

  // Gain available to asymmetric splits through second-order corrections.
  const Vector g = (px.cwiseProduct(phi.cwiseAbs2()) - beta_c * joint.p() * psi.cwiseAbs2())
                       .cwiseQuotient(sqrt_px);
  double gain = 0.0;
  for (Index k = 0; k < second; ++k) {
    const double proj = eig.vectors.col(k).dot(g);
    const double stiffness = 1.0 - beta_c * eig.values[k];
    if (stiffness <= kSplitGap) {
      if (std::abs(proj) > kSplitGap) {
        throw HigherOrderRequired(0.0, "second-order correction is unbounded along a neutral direction");
      }
      continue;
    }
    gain += proj * proj / stiffness;
  }
  const double c4 = d / 12.0;
  if (!(c4 > 0.0)) {
    throw HigherOrderRequired(c4, "quartic coefficient c4 = " + std::to_string(c4) +
                                      " <= 0; a higher-order expansion is required");
  }
  if (!(c4 - gain / 8.0 > kKappaRelativeFloor * c4)) {
    throw HigherOrderRequired(c4, "an asymmetric split lowers the quartic term below zero");
  }

  const double i1_zx = 1.0 / (8.0 * beta_c * c4);
  PerturbationPrediction out;
  out.branch = PredictionBranch::symmetric_split;
  out.kappa = c4;
  out.beta_c = beta_c;
  out.sum_q1_z1 = 0.0;
  out.i1_zx = nats_to_bits(i1_zx);
  out.i1_zy = nats_to_bits(i1_zx / beta_c);
  out.l2 = -0.5 * out.i1_zy;
  return out;
}

// ---------------------------------------------------------------------------
// SeriesEncoder

SeriesEncoder::SeriesEncoder(Distribution q0, Matrix q1, Matrix q2)
    : q0_(std::move(q0)), q1_(std::move(q1)), q2_(std::move(q2)) {
  const Index nz = q0_.size();
  if (q1_.rows() != nz || q2_.rows() != nz || q1_.cols() != q2_.cols() || q1_.cols() == 0) {
    throw InvalidArgument("SeriesEncoder: q0, q1, q2 shapes disagree");
  }
  if (!q1_.allFinite() || !q2_.allFinite()) throw InvalidArgument("SeriesEncoder: non-finite entries");
  for (Index x = 0; x < q1_.cols(); ++x) {
    if (std::abs(q1_.col(x).sum()) > kColumnSumTolerance ||
        std::abs(q2_.col(x).sum()) > kColumnSumTolerance) {
      throw InvalidArgument("SeriesEncoder: correction columns must sum to zero (x = " +
                            std::to_string(x) + ")");
    }
  }
  order_.reserve(static_cast<std::size_t>(nz));
  for (Index z = 0; z < nz; ++z) {
    const std::string where = " (z = " + std::to_string(z) + ")";
    if (q0_[z] > 0.0) {
      order_.push_back(Order::zero);
      continue;
    }
    if (q1_.row(z).minCoeff() < 0.0) {
      throw InvalidArgument("SeriesEncoder: q1 negative outside supp(q0)" + where);
    }
    if (q1_.row(z).maxCoeff() > 0.0) {
      for (Index x = 0; x < q1_.cols(); ++x) {
        if (q1_(z, x) == 0.0 && q2_(z, x) != 0.0) {
          throw InvalidArgument("SeriesEncoder: Z1 letter with q1(z|x) = 0 but q2(z|x) != 0" +
                                where);
        }
      }
      order_.push_back(Order::one);
      continue;
    }
    if (q2_.row(z).minCoeff() < 0.0) {
      throw InvalidArgument("SeriesEncoder: q2 negative outside supp(q0) u supp(q1)" + where);
    }
    order_.push_back(q2_.row(z).maxCoeff() > 0.0 ? Order::two : Order::unused);
  }
}

Encoder SeriesEncoder::at(double eps) const {
  Matrix q = (q0_.values() * Eigen::RowVectorXd::Ones(nx())) + eps * q1_ + eps * eps * q2_;
  if (q.minCoeff() < 0.0) {
    throw InvalidArgument("SeriesEncoder::at: eps = " + std::to_string(eps) +
                          " gives negative probabilities");
  }
  return Encoder(std::move(q));
}

SeriesTerms info_series_eval(const SeriesEncoder& se, const JointDistribution& joint, Side side) {
  if (se.nx() != joint.nx()) throw InvalidArgument("info_series_eval: alphabet mismatch");
  const SideView v = side_view(se, joint, side);
  const Vector m1 = v.c1 * v.weights;  // q1(z)
  const Vector m2 = v.c2 * v.weights;  // q2(z)

  double first = 0.0;
  double second = 0.0;
  for (Index z = 0; z < se.nz(); ++z) {
    switch (se.order(z)) {
      case SeriesEncoder::Order::zero:
        for (Index i = 0; i < v.weights.size(); ++i) {
          const double d = v.c1(z, i) - m1[z];
          second += v.weights[i] * d * d / (2.0 * se.q0()[z]);
        }
        break;
      case SeriesEncoder::Order::one:
        for (Index i = 0; i < v.weights.size(); ++i) {
          const double c1 = v.c1(z, i);
          if (c1 <= 0.0) continue;
          const double log_ratio = std::log(c1 / m1[z]);
          first += v.weights[i] * c1 * log_ratio;
          second += v.weights[i] * v.c2(z, i) * log_ratio;
        }
        break;
      case SeriesEncoder::Order::two:
        for (Index i = 0; i < v.weights.size(); ++i) {
          second += v.weights[i] * xlogratio(v.c2(z, i), m2[z]);
        }
        break;
      case SeriesEncoder::Order::unused:
        break;
    }
  }
  return {nats_to_bits(first), nats_to_bits(second)};
}

SeriesTerms loss_series_eval(const SeriesEncoder& se, const JointDistribution& joint,
                             double beta_c) {
  const SeriesTerms ix = info_series_eval(se, joint, Side::X);
  const SeriesTerms iy = info_series_eval(se, joint, Side::Y);
  return {ix.first - beta_c * iy.first, ix.second - beta_c * iy.second - iy.first};
}

SeriesEncoder optimal_series(const JointDistribution& joint, const OnsetSolution& onset,
                             const PerturbationPrediction& prediction) {
  const Index nx = joint.nx();
  Matrix q1(2, nx);
  for (Index x = 0; x < nx; ++x) {
    const double v = prediction.sum_q1_z1 * onset.r_x[x] / joint.px()[x];
    q1(0, x) = -v;
    q1(1, x) = v;
  }
  Vector q0(2);
  q0 << 1.0, 0.0;
  return SeriesEncoder(Distribution(q0), std::move(q1), Matrix::Zero(2, nx));
}

double first_order_stationarity_residual(const SeriesEncoder& se, const JointDistribution& joint,
                                         double beta_c) {
  const Matrix pyx = conditional_y_given_x(joint);
  const Matrix c1y = se.q1() * conditional_x_given_y(joint);
  const Vector m1 = se.q1() * joint.px();
  double worst = 0.0;
  for (Index z = 0; z < se.nz(); ++z) {
    if (se.order(z) != SeriesEncoder::Order::one) continue;
    for (Index x = 0; x < se.nx(); ++x) {
      double rhs = 0.0;
      for (Index y = 0; y < joint.ny(); ++y) {
        if (pyx(x, y) > 0.0) rhs += pyx(x, y) * std::log(c1y(z, y) / m1[z]);
      }
      worst = std::max(worst, std::abs(std::log(se.q1()(z, x) / m1[z]) - beta_c * rhs));
    }
  }
  return worst;
}

}  // namespace ibonset
