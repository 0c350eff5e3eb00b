#pragma once
// Synthetic joint distributions: small categorical joints, binary
// classification with parametric class conditionals, and noisy functional
// relationships Y = f(X) + N(0, sigma^2) with X ~ Unif(-1, 1).

#include "ibonset/probcore.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace ibonset {

enum class ClassFamily { gaussian, exponential, poisson };

// gaussian: (mean, stddev); exponential: (rate, unused); poisson: (mean, unused)
struct ClassParams {
  double a = 0.0;
  double b = 1.0;
};

struct BinaryClassSpec {
  ClassFamily family = ClassFamily::gaussian;
  std::array<ClassParams, 2> classes{};
  int n_bins = 256;                                // ignored for poisson
  std::optional<std::pair<double, double>> range;  // default: family envelope
};

// p(x, y) = p_family(x | y) / 2 on the binned support. Each class column is
// renormalized to 1/2 after checking that the grid covers at least 1 - 1e-6
// of its mass.
JointDistribution binary_classification_joint(const BinaryClassSpec& spec);

// Presets standing in for the function panel of the noisy-regression
// experiments:
//   linear     f(x) = x
//   cubic      f(x) = x^3
//   sigmoid    f(x) = tanh(10 x)
//   quadratic  f(x) = x^2
enum class FunctionPreset { linear, cubic, sigmoid, quadratic };

double apply_preset(FunctionPreset f, double x);
FunctionPreset preset_from_name(const std::string& name);
std::string preset_name(FunctionPreset f);
ClassFamily family_from_name(const std::string& name);
std::string family_name(ClassFamily f);

struct NoisyFunctionSpec {
  FunctionPreset f = FunctionPreset::linear;
  double sigma = 0.3;
  int n_x_bins = 64;
  int n_y_bins = 64;
  std::optional<std::pair<double, double>> y_range;  // default: f range +- 6 sigma
};

JointDistribution noisy_function_joint(const NoisyFunctionSpec& spec);

// Seeded 8x8 joint with log-normal weights, used for the frontier and
// perturbation comparisons; identical to data/fig1_joint.csv.
JointDistribution fig1_joint();
inline constexpr std::uint64_t kFig1Seed = 20240611;

// n_x x n_y joint with i.i.d. exp(sigma * N(0,1)) weights, normalized.
JointDistribution lognormal_joint(Index nx, Index ny, std::uint64_t seed, double sigma = 1.0);

}  // namespace ibonset
