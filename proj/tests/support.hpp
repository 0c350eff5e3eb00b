#pragma once
// Random instance generators and small shared helpers for the test binaries.

#include "ibonset/perturb.hpp"
#include "ibonset/probcore.hpp"
#include "ibonset/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

namespace ibonset::testing {

// Log-normal weights; with `zero_fraction` > 0 some cells are dropped (rows
// and columns stay nonempty because the diagonal is kept).
inline JointDistribution random_joint(Rng& rng, Index nx, Index ny, double spread = 1.0,
                                      double zero_fraction = 0.0) {
  Matrix w(nx, ny);
  for (Index i = 0; i < nx; ++i) {
    for (Index j = 0; j < ny; ++j) {
      w(i, j) = std::exp(spread * rng.normal());
      if (zero_fraction > 0.0 && i % ny != j && rng.uniform() < zero_fraction) w(i, j) = 0.0;
    }
  }
  return JointDistribution::from_weights(w);
}

inline Index random_size(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Vector random_weights(Rng& rng, Index n, double spread = 1.0) {
  Vector w(n);
  for (Index i = 0; i < n; ++i) w[i] = std::exp(spread * rng.normal());
  return w;
}

inline Distribution random_distribution(Rng& rng, Index n, double spread = 1.0) {
  return Distribution::from_weights(random_weights(rng, n, spread));
}

inline Encoder random_encoder(Rng& rng, Index nz, Index nx, double spread = 1.0) {
  Matrix w(nz, nx);
  for (Index x = 0; x < nx; ++x) w.col(x) = random_weights(rng, nz, spread);
  return Encoder::from_weights(w);
}

inline JointDistribution bsc(double delta) {
  Matrix p(2, 2);
  p << (1 - delta) / 2, delta / 2, delta / 2, (1 - delta) / 2;
  return JointDistribution(p);
}

inline Matrix zero_sum_columns(Matrix m, const std::vector<Index>& adjust) {
  for (Index x = 0; x < m.cols(); ++x) {
    const double s = m.col(x).sum() / static_cast<double>(adjust.size());
    for (Index z : adjust) m(z, x) -= s;
  }
  return m;
}

enum class SupportCase { base_only, first_order_letter, second_order_letter };

// q0 uninformative on the first letters; the remaining letters gain mass at
// order one or two depending on `kind`. q1 is drawn at `amplitude` times the
// smallest base mass and q2 at amplitude^2, so the expansion runs in
// eps * amplitude.
inline SeriesEncoder random_series_encoder(Rng& rng, Index nx, SupportCase kind, double amplitude = 0.25) {
  const Index n0 = 2 + static_cast<Index>(rng.next() % 2);
  const Index extra = kind == SupportCase::base_only ? 0 : 1 + static_cast<Index>(rng.next() % 2);
  const Index nz = n0 + extra;
  Vector q0 = Vector::Zero(nz);
  q0.head(n0) = random_weights(rng, n0, 0.5);
  q0 /= q0.sum();
  const double scale = amplitude * q0.head(n0).minCoeff();
  std::vector<Index> base(static_cast<std::size_t>(n0));
  for (Index z = 0; z < n0; ++z) base[static_cast<std::size_t>(z)] = z;

  Matrix q1 = Matrix::Zero(nz, nx);
  Matrix q2 = Matrix::Zero(nz, nx);
  for (Index x = 0; x < nx; ++x) {
    for (Index z = 0; z < n0; ++z) {
      q1(z, x) = scale * rng.normal();
      q2(z, x) = amplitude * scale * rng.normal();
    }
    for (Index z = n0; z < nz; ++z) {
      const double u = scale * (0.2 + rng.uniform());
      if (kind == SupportCase::first_order_letter) {
        q1(z, x) = u;
        q2(z, x) = amplitude * u * rng.normal();
      } else if (kind == SupportCase::second_order_letter) {
        q2(z, x) = amplitude * u;
      }
    }
  }
  return SeriesEncoder(Distribution(q0), zero_sum_columns(q1, base), zero_sum_columns(q2, base));
}

// Exact I(Z;X) or I(Z;Y) in bits.
inline double exact_information(const Encoder& q, const JointDistribution& joint, Side side) {
  const EncoderInformation info = encoder_informations(q, joint);
  return side == Side::X ? info.i_zx : info.i_zy;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline bool nondecreasing(const std::vector<double>& v, double rel_slack) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - rel_slack * std::max(1.0, std::abs(v[i - 1]))) return false;
  }
  return true;
}

}  // namespace ibonset::testing
