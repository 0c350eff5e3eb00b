#pragma once
/*
 * probcore.hpp - finite probability primitives.
 *
 * Everything here works on dense Eigen storage. Information quantities are
 * computed in nats internally (the *_nats functions) and reported in bits by
 * the unsuffixed public functions.
 *
 * Conventions:
 *   JointDistribution  p(x,y)  rows = x-states, columns = y-states
 *   Encoder            q(z|x)  rows = z-states, columns = x-states
 */

#include <Eigen/Dense>

#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ibonset {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Masses below this are exact zeros.
inline constexpr double kZeroMass = 1e-15;
// Allowed deviation of a total mass from 1.
inline constexpr double kNormTolerance = 1e-12;
// Raw inputs (files, user matrices) may be off by rounding up to this much
// before they are renormalized.
inline constexpr double kInputSumTolerance = 1e-6;

inline constexpr double nats_to_bits(double nats) { return nats / std::numbers::ln2; }
inline constexpr double bits_to_nats(double bits) { return bits * std::numbers::ln2; }

class Distribution {
 public:
  Distribution() = default;
  // Validates nonnegativity and unit mass (within kInputSumTolerance), zeroes
  // entries below kZeroMass and renormalizes.
  explicit Distribution(Vector values);
  static Distribution from_weights(const Vector& weights);
  static Distribution uniform(Index n);

  const Vector& values() const { return v_; }
  Index size() const { return v_.size(); }
  double operator[](Index i) const { return v_[i]; }

 private:
  Vector v_;
};

// Bin centers and widths of a discretized continuous axis.
struct GridAxis {
  Vector centers;
  Vector widths;
};

class JointDistribution {
 public:
  // Rejects negative or non-finite entries and totals off by more than
  // kInputSumTolerance; zeroes masses below kZeroMass, strips all-zero rows and
  // columns (with their labels and grid bins) and renormalizes.
  explicit JointDistribution(Matrix p, std::vector<std::string> x_labels = {},
                             std::vector<std::string> y_labels = {},
                             std::optional<GridAxis> x_grid = std::nullopt,
                             std::optional<GridAxis> y_grid = std::nullopt);
  // Same, after dividing by the total.
  static JointDistribution from_weights(const Matrix& w, std::vector<std::string> x_labels = {},
                                        std::vector<std::string> y_labels = {},
                                        std::optional<GridAxis> x_grid = std::nullopt,
                                        std::optional<GridAxis> y_grid = std::nullopt);

  const Matrix& p() const { return p_; }
  Index nx() const { return p_.rows(); }
  Index ny() const { return p_.cols(); }
  const Vector& px() const { return px_; }
  const Vector& py() const { return py_; }
  const std::vector<std::string>& x_labels() const { return x_labels_; }
  const std::vector<std::string>& y_labels() const { return y_labels_; }
  const std::optional<GridAxis>& x_grid() const { return x_grid_; }
  const std::optional<GridAxis>& y_grid() const { return y_grid_; }

  // Joint of (Y, X).
  JointDistribution transposed() const;

 private:
  Matrix p_;
  Vector px_;
  Vector py_;
  std::vector<std::string> x_labels_;
  std::vector<std::string> y_labels_;
  std::optional<GridAxis> x_grid_;
  std::optional<GridAxis> y_grid_;
};

// Column-stochastic q(z|x).
class Encoder {
 public:
  Encoder() = default;
  explicit Encoder(Matrix q);
  static Encoder from_weights(const Matrix& w);
  static Encoder uninformative(Index nz, Index nx);

  const Matrix& q() const { return q_; }
  Index nz() const { return q_.rows(); }
  Index nx() const { return q_.cols(); }

 private:
  Matrix q_;
};

std::pair<Distribution, Distribution> marginals(const JointDistribution& joint);

// |X| x |Y|, each row is p(.|x).
Matrix conditional_y_given_x(const JointDistribution& joint);
// |X| x |Y|, each column is p(.|y).
Matrix conditional_x_given_y(const JointDistribution& joint);

// KL(p||q) in nats for nonnegative vectors of equal total mass. Returns
// +infinity when p puts mass outside the support of q.
double kl_nats(const Vector& p, const Vector& q);
// KL(p||q) in bits; +infinity on a support violation.
double kl_divergence(const Distribution& p, const Distribution& q);

double entropy_nats(const Vector& p);
double entropy(const Distribution& p);

double mutual_information_nats(const JointDistribution& joint);
double mutual_information(const JointDistribution& joint);

struct EncoderInformation {
  double i_zx = 0.0;  // bits
  double i_zy = 0.0;  // bits
};

// Representation marginal q(z) and the conditional q(z|y) (|Z| x |Y|).
Vector encoder_marginal(const Encoder& q, const JointDistribution& joint);
Matrix encoder_given_y(const Encoder& q, const JointDistribution& joint);

EncoderInformation encoder_informations_nats(const Encoder& q, const JointDistribution& joint);
EncoderInformation encoder_informations(const Encoder& q, const JointDistribution& joint);

// B(x,y) = p(x,y) / sqrt(p(x) p(y)).
Matrix divergence_transition_matrix(const JointDistribution& joint);

namespace linalg {

// Singular values in descending order.
Vector singular_values(const Matrix& a);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns
};
SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace linalg

}  // namespace ibonset
