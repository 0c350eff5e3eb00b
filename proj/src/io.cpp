#include "ibonset/io.hpp"

#include "ibonset/error.hpp"
#include "json_convert.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ibonset {
namespace detail {
namespace {

GridAxis grid_from(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("centers") || !j.contains("widths")) {
    throw InvalidArgument(std::string(what) + " must be an object with centers and widths");
  }
  return {vector_from_json(j.at("centers"), what), vector_from_json(j.at("widths"), what)};
}

Json grid_json(const GridAxis& g) {
  Json out;
  out["centers"] = to_json(g.centers);
  out["widths"] = to_json(g.widths);
  return out;
}

std::vector<std::string> labels_from(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw InvalidArgument(std::string(what) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw InvalidArgument(std::string(what) + " must be a nonempty array of rows");
  }
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from_json(j[i], what);
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw InvalidArgument(std::string(what) + ": ragged rows");
    }
    m.row(static_cast<Index>(i)) = row.transpose();
  }
  return m;
}

Json joint_json(const JointDistribution& joint) {
  Json out;
  out["p"] = to_json(joint.p());
  out["x_labels"] = joint.x_labels();
  out["y_labels"] = joint.y_labels();
  if (joint.x_grid()) out["x_grid"] = grid_json(*joint.x_grid());
  if (joint.y_grid()) out["y_grid"] = grid_json(*joint.y_grid());
  return out;
}

JointDistribution joint_from(const Json& j) {
  if (!j.is_object() || !j.contains("p")) throw InvalidArgument("joint JSON needs a \"p\" matrix");
  Matrix p = matrix_from_json(j.at("p"), "p");
  std::vector<std::string> xl;
  std::vector<std::string> yl;
  if (j.contains("x_labels")) xl = labels_from(j.at("x_labels"), "x_labels");
  if (j.contains("y_labels")) yl = labels_from(j.at("y_labels"), "y_labels");
  std::optional<GridAxis> gx;
  std::optional<GridAxis> gy;
  if (j.contains("x_grid")) gx = grid_from(j.at("x_grid"), "x_grid");
  if (j.contains("y_grid")) gy = grid_from(j.at("y_grid"), "y_grid");
  return JointDistribution(std::move(p), std::move(xl), std::move(yl), std::move(gx), std::move(gy));
}

const char* kind_name(OnsetKind kind) {
  return kind == OnsetKind::fixed_point ? "fixed_point" : "local_limit";
}

const char* branch_name(PredictionBranch branch) {
  return branch == PredictionBranch::new_letter ? "new_letter" : "symmetric_split";
}

Json onset_json(const OnsetSolution& onset) {
  Json out;
  out["beta_c"] = onset.beta_c;
  out["eta_kl"] = onset.eta_kl;
  out["r_x"] = to_json(onset.r_x.values());
  out["r_y"] = to_json(onset.r_y.values());
  out["converged"] = onset.converged;
  out["restarts_used"] = onset.restarts_used;
  out["kind"] = kind_name(onset.kind);
  out["fixed_points_found"] = onset.fixed_points_found;
  out["collapsed"] = onset.collapsed;
  return out;
}

Json prediction_json(const PerturbationPrediction& prediction) {
  Json out;
  out["beta_c"] = prediction.beta_c;
  out["kappa"] = prediction.kappa;
  out["sum_q1_z1"] = prediction.sum_q1_z1;
  out["l2_bits"] = prediction.l2;
  out["i1_zx_bits"] = prediction.i1_zx;
  out["i1_zy_bits"] = prediction.i1_zy;
  out["branch"] = branch_name(prediction.branch);
  return out;
}

Json chi2_json(const Chi2Analysis& analysis) {
  Json out;
  out["eta_chi2"] = analysis.eta_chi2;
  if (analysis.has_onset) {
    out["beta_c_hat"] = analysis.beta_c_hat;
  } else {
    out["beta_c_hat"] = nullptr;
  }
  out["sigma2"] = analysis.sigma2;
  out["singular_values"] = to_json(analysis.singular_values);
  return out;
}

Json gaussian_json(const GaussianJoint& g) {
  Json out;
  out["sigma_x"] = to_json(g.sigma_x());
  out["sigma_y"] = to_json(g.sigma_y());
  out["sigma_xy"] = to_json(g.sigma_xy());
  return out;
}

GaussianJoint gaussian_from(const Json& j) {
  if (!j.is_object() || !j.contains("sigma_x") || !j.contains("sigma_y") || !j.contains("sigma_xy")) {
    throw InvalidArgument("Gaussian JSON needs sigma_x, sigma_y and sigma_xy");
  }
  return GaussianJoint(matrix_from_json(j.at("sigma_x"), "sigma_x"),
                       matrix_from_json(j.at("sigma_y"), "sigma_y"),
                       matrix_from_json(j.at("sigma_xy"), "sigma_xy"));
}

}  // namespace detail

namespace {

detail::Json parse_json(const std::string& text) {
  try {
    return detail::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw InvalidArgument("CSV line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string joint_to_csv(const JointDistribution& joint, const std::vector<std::string>& metadata) {
  std::string out;
  for (const auto& m : metadata) out += "# " + m + "\n";
  out += "x";
  for (const auto& y : joint.y_labels()) out += "," + y;
  out += "\n";
  for (Index i = 0; i < joint.nx(); ++i) {
    out += joint.x_labels()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < joint.ny(); ++j) out += "," + format_double(joint.p()(i, j));
    out += "\n";
  }
  return out;
}

JointDistribution joint_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<std::string> x_labels;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells = split_commas(t);
    if (header.empty()) {
      if (cells.size() < 2) throw InvalidArgument("CSV header needs an x column and at least one y label");
      header = std::move(cells);
      continue;
    }
    if (cells.size() != header.size()) {
      throw InvalidArgument("CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    x_labels.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t k = 1; k < cells.size(); ++k) row.push_back(parse_number(cells[k], line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("CSV holds no probability rows");
  Matrix p(static_cast<Index>(rows.size()), static_cast<Index>(header.size() - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) p(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  std::vector<std::string> y_labels(header.begin() + 1, header.end());
  return JointDistribution(std::move(p), std::move(x_labels), std::move(y_labels));
}

std::string joint_to_json(const JointDistribution& joint) { return detail::joint_json(joint).dump(2) + "\n"; }

JointDistribution joint_from_json(const std::string& text) { return detail::joint_from(parse_json(text)); }

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  if (!f) throw Error("failed writing '" + path + "'");
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

JointDistribution read_joint(const std::string& path) {
  const std::string text = read_text(path);
  if (ends_with(path, ".json")) return joint_from_json(text);
  if (ends_with(path, ".csv")) return joint_from_csv(text);
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? joint_from_json(text) : joint_from_csv(text);
  }
  throw InvalidArgument("'" + path + "' is empty");
}

void write_joint(const std::string& path, const JointDistribution& joint,
                 const std::vector<std::string>& metadata) {
  write_text(path, ends_with(path, ".json") ? joint_to_json(joint) : joint_to_csv(joint, metadata));
}

GaussianJoint gaussian_from_json(const std::string& text) { return detail::gaussian_from(parse_json(text)); }
std::string gaussian_to_json(const GaussianJoint& g) { return detail::gaussian_json(g).dump(2) + "\n"; }

std::string onset_to_json(const OnsetSolution& onset) { return detail::onset_json(onset).dump(2) + "\n"; }
std::string prediction_to_json(const PerturbationPrediction& prediction) {
  return detail::prediction_json(prediction).dump(2) + "\n";
}
std::string chi2_to_json(const Chi2Analysis& analysis) { return detail::chi2_json(analysis).dump(2) + "\n"; }

}  // namespace ibonset
