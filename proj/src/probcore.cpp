#include "ibonset/probcore.hpp"

#include "ibonset/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ibonset {
namespace {

void check_finite_nonnegative(const Eigen::Ref<const Matrix>& m, const char* what) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidArgument(std::string(what) + ": entries must be finite and nonnegative");
      }
    }
  }
}

void zero_tiny(Eigen::Ref<Matrix> m) {
  m = (m.array() < kZeroMass).select(0.0, m);
}

std::vector<std::string> default_labels(char prefix, Index n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.push_back(std::string(1, prefix) + std::to_string(i));
  return out;
}

GridAxis select_bins(const GridAxis& g, const std::vector<Index>& keep) {
  GridAxis out{Vector(static_cast<Index>(keep.size())), Vector(static_cast<Index>(keep.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.centers[static_cast<Index>(k)] = g.centers[keep[k]];
    out.widths[static_cast<Index>(k)] = g.widths[keep[k]];
  }
  return out;
}

// (1+u) ln(1+u) - u, accurate for small |u|.
double relative_entropy_kernel(double u) {
  if (std::abs(u) < 1e-2) {
    // sum_{n>=2} (-1)^n u^n / (n (n-1))
    double term = u * u;
    double sum = 0.0;
    double sign = 1.0;
    for (int n = 2; n <= 9; ++n) {
      sum += sign * term / (n * (n - 1.0));
      term *= u;
      sign = -sign;
    }
    return sum;
  }
  return (1.0 + u) * std::log1p(u) - u;
}

}  // namespace

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(Vector values) : v_(std::move(values)) {
  if (v_.size() == 0) throw InvalidArgument("Distribution: empty vector");
  check_finite_nonnegative(v_, "Distribution");
  const double total = v_.sum();
  if (std::abs(total - 1.0) > kInputSumTolerance) {
    throw InvalidArgument("Distribution: total mass " + std::to_string(total) + " is not 1");
  }
  zero_tiny(v_);
  const double kept = v_.sum();
  if (kept <= 0.0) throw InvalidArgument("Distribution: no mass above threshold");
  if (kept != 1.0) v_ /= kept;
}

Distribution Distribution::from_weights(const Vector& weights) {
  check_finite_nonnegative(weights, "Distribution::from_weights");
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidArgument("Distribution::from_weights: zero total weight");
  return Distribution(weights / total);
}

Distribution Distribution::uniform(Index n) {
  if (n <= 0) throw InvalidArgument("Distribution::uniform: n must be positive");
  return Distribution(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(Matrix p, std::vector<std::string> x_labels,
                                     std::vector<std::string> y_labels,
                                     std::optional<GridAxis> x_grid,
                                     std::optional<GridAxis> y_grid) {
  if (p.rows() == 0 || p.cols() == 0) throw InvalidArgument("JointDistribution: empty matrix");
  check_finite_nonnegative(p, "JointDistribution");
  const double total = p.sum();
  if (std::abs(total - 1.0) > kInputSumTolerance) {
    throw InvalidArgument("JointDistribution: total mass " + std::to_string(total) + " is not 1");
  }
  if (x_labels.empty()) x_labels = default_labels('x', p.rows());
  if (y_labels.empty()) y_labels = default_labels('y', p.cols());
  if (static_cast<Index>(x_labels.size()) != p.rows() ||
      static_cast<Index>(y_labels.size()) != p.cols()) {
    throw InvalidArgument("JointDistribution: label count does not match matrix shape");
  }
  if ((x_grid && (x_grid->centers.size() != p.rows() || x_grid->widths.size() != p.rows())) ||
      (y_grid && (y_grid->centers.size() != p.cols() || y_grid->widths.size() != p.cols()))) {
    throw InvalidArgument("JointDistribution: grid size does not match matrix shape");
  }

  zero_tiny(p);
  std::vector<Index> rows;
  std::vector<Index> cols;
  for (Index i = 0; i < p.rows(); ++i)
    if (p.row(i).sum() > 0.0) rows.push_back(i);
  for (Index j = 0; j < p.cols(); ++j)
    if (p.col(j).sum() > 0.0) cols.push_back(j);
  if (rows.empty()) throw InvalidArgument("JointDistribution: no mass above threshold");

  p_.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      p_(static_cast<Index>(a), static_cast<Index>(b)) = p(rows[a], cols[b]);
  const double kept = p_.sum();
  if (kept != 1.0) p_ /= kept;

  for (Index i : rows) x_labels_.push_back(std::move(x_labels[static_cast<std::size_t>(i)]));
  for (Index j : cols) y_labels_.push_back(std::move(y_labels[static_cast<std::size_t>(j)]));
  if (x_grid) x_grid_ = select_bins(*x_grid, rows);
  if (y_grid) y_grid_ = select_bins(*y_grid, cols);

  px_ = p_.rowwise().sum();
  py_ = p_.colwise().sum().transpose();
}

JointDistribution JointDistribution::from_weights(const Matrix& w, std::vector<std::string> x_labels,
                                                  std::vector<std::string> y_labels,
                                                  std::optional<GridAxis> x_grid,
                                                  std::optional<GridAxis> y_grid) {
  check_finite_nonnegative(w, "JointDistribution::from_weights");
  const double total = w.sum();
  if (!(total > 0.0)) throw InvalidArgument("JointDistribution::from_weights: zero total weight");
  return JointDistribution(w / total, std::move(x_labels), std::move(y_labels), std::move(x_grid),
                           std::move(y_grid));
}

JointDistribution JointDistribution::transposed() const {
  return JointDistribution(p_.transpose(), y_labels_, x_labels_, y_grid_, x_grid_);
}

// ---------------------------------------------------------------------------
// Encoder

Encoder::Encoder(Matrix q) : q_(std::move(q)) {
  if (q_.rows() == 0 || q_.cols() == 0) throw InvalidArgument("Encoder: empty matrix");
  check_finite_nonnegative(q_, "Encoder");
  for (Index x = 0; x < q_.cols(); ++x) {
    const double s = q_.col(x).sum();
    if (std::abs(s - 1.0) > kInputSumTolerance) {
      throw InvalidArgument("Encoder: column " + std::to_string(x) + " sums to " +
                            std::to_string(s));
    }
    if (s != 1.0) q_.col(x) /= s;
  }
}

Encoder Encoder::from_weights(const Matrix& w) {
  check_finite_nonnegative(w, "Encoder::from_weights");
  Matrix q = w;
  for (Index x = 0; x < q.cols(); ++x) {
    const double s = q.col(x).sum();
    if (!(s > 0.0)) throw InvalidArgument("Encoder::from_weights: zero column");
    q.col(x) /= s;
  }
  return Encoder(std::move(q));
}

Encoder Encoder::uninformative(Index nz, Index nx) {
  return Encoder(Matrix::Constant(nz, nx, 1.0 / static_cast<double>(nz)));
}

// ---------------------------------------------------------------------------
// Operations

std::pair<Distribution, Distribution> marginals(const JointDistribution& joint) {
  return {Distribution(joint.px()), Distribution(joint.py())};
}

Matrix conditional_y_given_x(const JointDistribution& joint) {
  return joint.px().cwiseInverse().asDiagonal() * joint.p();
}

Matrix conditional_x_given_y(const JointDistribution& joint) {
  return joint.p() * joint.py().cwiseInverse().asDiagonal();
}

double kl_nats(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw InvalidArgument("kl_nats: size mismatch");
  // sum_i q_i phi(p_i/q_i - 1) with phi(u) = (1+u)ln(1+u) - u; every term is
  // nonnegative, so there is no cancellation near p = q.
  double sum = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (qi <= 0.0) {
      if (pi > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    if (pi <= 0.0) {
      sum += qi;
      continue;
    }
    const double u = pi / qi - 1.0;
    // Away from p = q the kernel form loses pi when 1 + u rounds to 0.
    sum += std::abs(u) < 1e-2 ? qi * relative_entropy_kernel(u) : pi * (std::log(pi) - std::log(qi)) - pi + qi;
  }
  return std::max(sum, 0.0);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  return nats_to_bits(kl_nats(p.values(), q.values()));
}

double entropy_nats(const Vector& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  return h;
}

double entropy(const Distribution& p) { return nats_to_bits(entropy_nats(p.values())); }

double mutual_information_nats(const JointDistribution& joint) {
  const Matrix& p = joint.p();
  const Vector& px = joint.px();
  const Vector& py = joint.py();
  double mi = 0.0;
  for (Index y = 0; y < p.cols(); ++y) {
    for (Index x = 0; x < p.rows(); ++x) {
      const double v = p(x, y);
      if (v > 0.0) mi += v * std::log(v / (px[x] * py[y]));
    }
  }
  return std::max(mi, 0.0);
}

double mutual_information(const JointDistribution& joint) {
  return nats_to_bits(mutual_information_nats(joint));
}

Vector encoder_marginal(const Encoder& q, const JointDistribution& joint) {
  if (q.nx() != joint.nx()) throw InvalidArgument("encoder/joint alphabet mismatch");
  return q.q() * joint.px();
}

Matrix encoder_given_y(const Encoder& q, const JointDistribution& joint) {
  if (q.nx() != joint.nx()) throw InvalidArgument("encoder/joint alphabet mismatch");
  return q.q() * conditional_x_given_y(joint);
}

EncoderInformation encoder_informations_nats(const Encoder& q, const JointDistribution& joint) {
  const Vector qz = encoder_marginal(q, joint);
  const Matrix qzy = encoder_given_y(q, joint);
  EncoderInformation out;
  for (Index x = 0; x < q.nx(); ++x) out.i_zx += joint.px()[x] * kl_nats(q.q().col(x), qz);
  for (Index y = 0; y < joint.ny(); ++y) out.i_zy += joint.py()[y] * kl_nats(qzy.col(y), qz);
  return out;
}

EncoderInformation encoder_informations(const Encoder& q, const JointDistribution& joint) {
  const EncoderInformation n = encoder_informations_nats(q, joint);
  return {nats_to_bits(n.i_zx), nats_to_bits(n.i_zy)};
}

Matrix divergence_transition_matrix(const JointDistribution& joint) {
  const Vector sx = joint.px().cwiseSqrt().cwiseInverse();
  const Vector sy = joint.py().cwiseSqrt().cwiseInverse();
  return sx.asDiagonal() * joint.p() * sy.asDiagonal();
}

namespace linalg {

Vector singular_values(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();  // Eigen sorts these in decreasing order
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw Error("symmetric_eigen: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace linalg

}  // namespace ibonset
