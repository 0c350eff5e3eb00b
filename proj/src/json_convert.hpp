#pragma once
// nlohmann conversions shared by io.cpp and pipeline.cpp.

#include "ibonset/chi2.hpp"
#include "ibonset/gaussian.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/perturb.hpp"
#include "ibonset/probcore.hpp"

#include <json.hpp>

namespace ibonset::detail {

using Json = nlohmann::ordered_json;

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

Vector vector_from_json(const Json& j, const char* what);
Matrix matrix_from_json(const Json& j, const char* what);

Json joint_json(const JointDistribution& joint);
JointDistribution joint_from(const Json& j);

Json onset_json(const OnsetSolution& onset);
Json prediction_json(const PerturbationPrediction& prediction);
Json chi2_json(const Chi2Analysis& analysis);
Json gaussian_json(const GaussianJoint& g);
GaussianJoint gaussian_from(const Json& j);

const char* kind_name(OnsetKind kind);
const char* branch_name(PredictionBranch branch);

}  // namespace ibonset::detail
