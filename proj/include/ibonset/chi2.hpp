#pragma once

#include "ibonset/probcore.hpp"

#include <utility>

namespace ibonset {

// sigma_2 below this means no chi^2 onset.
inline constexpr double kNoOnsetSigma = 1e-12;

// Onset of the fixed-representation-space (chi^2) theory. eta_chi2 is the
// squared maximal correlation, i.e. sigma_2(B)^2.
struct Chi2Analysis {
  double eta_chi2 = 0.0;
  double beta_c_hat = 0.0;  // 1/eta_chi2, +inf without an onset
  double sigma2 = 0.0;
  Vector singular_values;  // of B, descending
  bool has_onset = false;
};

Chi2Analysis eta_chi2(const JointDistribution& joint);

// sum_{x,y} p(x)p(y) (p(x,y)/(p(x)p(y)) - 1)^2
double chi2_information(const JointDistribution& joint);

// eta_chi2 of (X,Y) and of (Y,X).
std::pair<double, double> symmetry_check(const JointDistribution& joint);

}  // namespace ibonset
