#pragma once
// Text formats for joints and analysis results.
//
// CSV: '#'-prefixed metadata lines, then a header "x,<y labels...>", then one
// row per x state "<x label>,<p(x,y)...>". Values are written with 17
// significant digits so a round trip is exact.
//
// JSON: {"p": [[...]], "x_labels": [...], "y_labels": [...]} with optional
// "x_grid"/"y_grid" objects {"centers": [...], "widths": [...]}.

#include "ibonset/chi2.hpp"
#include "ibonset/gaussian.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/perturb.hpp"
#include "ibonset/probcore.hpp"

#include <string>
#include <vector>

namespace ibonset {

std::string format_double(double v);

std::string joint_to_csv(const JointDistribution& joint,
                         const std::vector<std::string>& metadata = {});
JointDistribution joint_from_csv(const std::string& text);

std::string joint_to_json(const JointDistribution& joint);
JointDistribution joint_from_json(const std::string& text);

// Chooses the format from the extension (.csv / .json), falling back to the
// first non-blank character.
JointDistribution read_joint(const std::string& path);
void write_joint(const std::string& path, const JointDistribution& joint,
                 const std::vector<std::string>& metadata = {});

GaussianJoint gaussian_from_json(const std::string& text);
std::string gaussian_to_json(const GaussianJoint& g);

std::string onset_to_json(const OnsetSolution& onset);
std::string prediction_to_json(const PerturbationPrediction& prediction);
std::string chi2_to_json(const Chi2Analysis& analysis);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace ibonset
