#include "ibonset/chi2.hpp"

#include <limits>

namespace ibonset {

Chi2Analysis eta_chi2(const JointDistribution& joint) {
  Chi2Analysis out;
  out.singular_values = linalg::singular_values(divergence_transition_matrix(joint));
  out.sigma2 = out.singular_values.size() > 1 ? out.singular_values[1] : 0.0;
  out.has_onset = out.sigma2 >= kNoOnsetSigma;
  out.eta_chi2 = out.sigma2 * out.sigma2;
  out.beta_c_hat =
      out.has_onset ? 1.0 / out.eta_chi2 : std::numeric_limits<double>::infinity();
  return out;
}

double chi2_information(const JointDistribution& joint) {
  const Matrix& p = joint.p();
  double total = 0.0;
  for (Index y = 0; y < p.cols(); ++y) {
    for (Index x = 0; x < p.rows(); ++x) {
      const double indep = joint.px()[x] * joint.py()[y];
      const double d = p(x, y) / indep - 1.0;
      total += indep * d * d;
    }
  }
  return total;
}

std::pair<double, double> symmetry_check(const JointDistribution& joint) {
  return {eta_chi2(joint).eta_chi2, eta_chi2(joint.transposed()).eta_chi2};
}

}  // namespace ibonset
