#include "ibonset/datagen.hpp"

#include "ibonset/error.hpp"
#include "ibonset/random.hpp"
#include "normal_cdf.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace ibonset {
namespace {

constexpr double kMinCoverage = 1.0 - 1e-6;
constexpr double kEnvelopeSigmas = 6.0;
constexpr double kExponentialTail = 1e-9;
constexpr double kPoissonTail = 1e-12;

std::string short_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_class(ClassFamily family, const ClassParams& c) {
  switch (family) {
    case ClassFamily::gaussian:
      if (!std::isfinite(c.a) || !(c.b > 0.0) || !std::isfinite(c.b)) {
        throw InvalidArgument("gaussian class needs a finite mean and stddev > 0");
      }
      break;
    case ClassFamily::exponential:
    case ClassFamily::poisson:
      if (!(c.a > 0.0) || !std::isfinite(c.a)) {
        throw InvalidArgument(family_name(family) + " class needs a positive finite rate");
      }
      break;
  }
}

double poisson_pmf(double mean, long k) {
  return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

// Largest k with P(K > k) >= tail for either class.
long poisson_cutoff(double mean, double tail) {
  double cdf = 0.0;
  long k = 0;
  for (;; ++k) {
    cdf += poisson_pmf(mean, k);
    if (1.0 - cdf < tail && static_cast<double>(k) > mean) return k;
    if (k > 10'000'000) throw InvalidArgument("poisson mean too large for integer support");
  }
}

Matrix assemble_classes(const std::array<Vector, 2>& mass) {
  Matrix p(mass[0].size(), 2);
  for (int c = 0; c < 2; ++c) {
    const double total = mass[static_cast<std::size_t>(c)].sum();
    if (total < kMinCoverage) {
      throw InvalidArgument("grid covers only " + std::to_string(total) + " of class " +
                            std::to_string(c) + "'s mass");
    }
    p.col(c) = 0.5 * mass[static_cast<std::size_t>(c)] / total;
  }
  return p;
}

}  // namespace

double apply_preset(FunctionPreset f, double x) {
  switch (f) {
    case FunctionPreset::linear:
      return x;
    case FunctionPreset::cubic:
      return x * x * x;
    case FunctionPreset::sigmoid:
      return std::tanh(10.0 * x);
    case FunctionPreset::quadratic:
      return x * x;
  }
  return x;
}

FunctionPreset preset_from_name(const std::string& name) {
  if (name == "linear") return FunctionPreset::linear;
  if (name == "cubic") return FunctionPreset::cubic;
  if (name == "sigmoid") return FunctionPreset::sigmoid;
  if (name == "quadratic") return FunctionPreset::quadratic;
  throw InvalidArgument("unknown function preset '" + name +
                        "' (expected linear, cubic, sigmoid or quadratic)");
}

std::string preset_name(FunctionPreset f) {
  switch (f) {
    case FunctionPreset::linear:
      return "linear";
    case FunctionPreset::cubic:
      return "cubic";
    case FunctionPreset::sigmoid:
      return "sigmoid";
    case FunctionPreset::quadratic:
      return "quadratic";
  }
  return "linear";
}

ClassFamily family_from_name(const std::string& name) {
  if (name == "gaussian") return ClassFamily::gaussian;
  if (name == "exponential") return ClassFamily::exponential;
  if (name == "poisson") return ClassFamily::poisson;
  throw InvalidArgument("unknown class family '" + name +
                        "' (expected gaussian, exponential or poisson)");
}

std::string family_name(ClassFamily f) {
  switch (f) {
    case ClassFamily::gaussian:
      return "gaussian";
    case ClassFamily::exponential:
      return "exponential";
    case ClassFamily::poisson:
      return "poisson";
  }
  return "gaussian";
}

JointDistribution binary_classification_joint(const BinaryClassSpec& spec) {
  for (const auto& c : spec.classes) check_class(spec.family, c);
  const std::vector<std::string> y_labels{"y0", "y1"};

  if (spec.family == ClassFamily::poisson) {
    long top = 0;
    for (const auto& c : spec.classes) top = std::max(top, poisson_cutoff(c.a, kPoissonTail));
    long lo = 0;
    if (spec.range) {
      lo = static_cast<long>(std::ceil(spec.range->first));
      top = static_cast<long>(std::floor(spec.range->second));
      if (lo < 0 || top < lo) throw InvalidArgument("poisson range must be a nonempty subset of [0, inf)");
    }
    const Index n = top - lo + 1;
    std::array<Vector, 2> mass{Vector(n), Vector(n)};
    std::vector<std::string> x_labels;
    GridAxis grid{Vector(n), Vector::Ones(n)};
    for (Index i = 0; i < n; ++i) {
      const long k = lo + i;
      for (int c = 0; c < 2; ++c) mass[static_cast<std::size_t>(c)][i] = poisson_pmf(spec.classes[static_cast<std::size_t>(c)].a, k);
      x_labels.push_back(std::to_string(k));
      grid.centers[i] = static_cast<double>(k);
    }
    return JointDistribution(assemble_classes(mass), std::move(x_labels), y_labels, std::move(grid));
  }

  if (spec.n_bins < 2) throw InvalidArgument("n_bins must be at least 2");
  double lo = 0.0;
  double hi = 0.0;
  if (spec.range) {
    lo = spec.range->first;
    hi = spec.range->second;
  } else if (spec.family == ClassFamily::gaussian) {
    lo = std::min(spec.classes[0].a - kEnvelopeSigmas * spec.classes[0].b,
                  spec.classes[1].a - kEnvelopeSigmas * spec.classes[1].b);
    hi = std::max(spec.classes[0].a + kEnvelopeSigmas * spec.classes[0].b,
                  spec.classes[1].a + kEnvelopeSigmas * spec.classes[1].b);
  } else {
    lo = 0.0;
    hi = -std::log(kExponentialTail) / std::min(spec.classes[0].a, spec.classes[1].a);
  }
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("invalid x range");

  const Index n = spec.n_bins;
  const double width = (hi - lo) / static_cast<double>(n);
  std::array<Vector, 2> mass{Vector(n), Vector(n)};
  std::vector<std::string> x_labels;
  GridAxis grid{Vector(n), Vector::Constant(n, width)};
  for (Index i = 0; i < n; ++i) {
    const double a = lo + static_cast<double>(i) * width;
    const double b = i + 1 == n ? hi : a + width;
    for (int c = 0; c < 2; ++c) {
      const ClassParams& cp = spec.classes[static_cast<std::size_t>(c)];
      double m = 0.0;
      if (spec.family == ClassFamily::gaussian) {
        m = detail::normal_interval((a - cp.a) / cp.b, (b - cp.a) / cp.b);
      } else {
        const double a0 = std::max(a, 0.0);
        const double b0 = std::max(b, 0.0);
        m = std::exp(-cp.a * a0) * -std::expm1(-cp.a * (b0 - a0));
      }
      mass[static_cast<std::size_t>(c)][i] = m;
    }
    grid.centers[i] = 0.5 * (a + b);
    x_labels.push_back(short_label(grid.centers[i]));
  }
  return JointDistribution(assemble_classes(mass), std::move(x_labels), y_labels, std::move(grid));
}

JointDistribution noisy_function_joint(const NoisyFunctionSpec& spec) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) throw InvalidArgument("sigma must be positive");
  if (spec.n_x_bins < 2 || spec.n_y_bins < 2) throw InvalidArgument("grids need at least 2 bins per axis");

  const Index nx = spec.n_x_bins;
  const Index ny = spec.n_y_bins;
  const double x_width = 2.0 / static_cast<double>(nx);

  double f_lo = apply_preset(spec.f, -1.0);
  double f_hi = f_lo;
  for (int k = 0; k <= 4096; ++k) {
    const double v = apply_preset(spec.f, -1.0 + 2.0 * k / 4096.0);
    f_lo = std::min(f_lo, v);
    f_hi = std::max(f_hi, v);
  }
  double y_lo = f_lo - kEnvelopeSigmas * spec.sigma;
  double y_hi = f_hi + kEnvelopeSigmas * spec.sigma;
  if (spec.y_range) {
    y_lo = spec.y_range->first;
    y_hi = spec.y_range->second;
    if (!(y_hi > y_lo)) throw InvalidArgument("invalid y range");
  }
  const double y_width = (y_hi - y_lo) / static_cast<double>(ny);

  using Rule = boost::math::quadrature::gauss<double, 30>;
  Matrix p(nx, ny);
  for (Index i = 0; i < nx; ++i) {
    const double a = -1.0 + static_cast<double>(i) * x_width;
    const double b = a + x_width;
    double covered = 0.0;
    for (Index j = 0; j < ny; ++j) {
      const double c = y_lo + static_cast<double>(j) * y_width;
      const double d = j + 1 == ny ? y_hi : c + y_width;
      auto integrand = [&](double x) {
        const double fx = apply_preset(spec.f, x);
        return detail::normal_interval((c - fx) / spec.sigma, (d - fx) / spec.sigma);
      };
      // Uniform density 1/2 on (-1, 1).
      p(i, j) = 0.5 * Rule::integrate(integrand, a, b);
      covered += p(i, j);
    }
    if (covered < kMinCoverage * 0.5 * x_width) {
      throw InvalidArgument("y range covers only " + std::to_string(covered / (0.5 * x_width)) +
                            " of p(y|x) mass in x bin " + std::to_string(i));
    }
    // Each x bin keeps its full share so that p(x) stays uniform.
    p.row(i) *= 0.5 * x_width / covered;
  }

  GridAxis gx{Vector(nx), Vector::Constant(nx, x_width)};
  GridAxis gy{Vector(ny), Vector::Constant(ny, y_width)};
  std::vector<std::string> xl;
  std::vector<std::string> yl;
  for (Index i = 0; i < nx; ++i) {
    gx.centers[i] = -1.0 + (static_cast<double>(i) + 0.5) * x_width;
    xl.push_back(short_label(gx.centers[i]));
  }
  for (Index j = 0; j < ny; ++j) {
    gy.centers[j] = y_lo + (static_cast<double>(j) + 0.5) * y_width;
    yl.push_back(short_label(gy.centers[j]));
  }
  return JointDistribution::from_weights(p, std::move(xl), std::move(yl), std::move(gx), std::move(gy));
}

JointDistribution lognormal_joint(Index nx, Index ny, std::uint64_t seed, double sigma) {
  if (nx < 1 || ny < 1) throw InvalidArgument("lognormal_joint: empty alphabet");
  Rng rng(seed);
  Matrix w(nx, ny);
  for (Index i = 0; i < nx; ++i) {
    for (Index j = 0; j < ny; ++j) w(i, j) = std::exp(sigma * rng.normal());
  }
  return JointDistribution::from_weights(w);
}

JointDistribution fig1_joint() { return lognormal_joint(8, 8, kFig1Seed, 1.5); }

}  // namespace ibonset
