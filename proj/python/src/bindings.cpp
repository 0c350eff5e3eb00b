// Python module ibonset._core: thin wrappers over the C++ library.

#include "ibonset/chi2.hpp"
#include "ibonset/datagen.hpp"
#include "ibonset/error.hpp"
#include "ibonset/gaussian.hpp"
#include "ibonset/ibsolver.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/perturb.hpp"
#include "ibonset/pipeline.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ibonset;

namespace {

OnsetOptions onset_options(double tol, int restarts, long max_iter, std::uint64_t seed) {
  OnsetOptions o;
  o.tol = tol;
  o.max_restarts = restarts;
  o.max_iter = max_iter;
  o.seed = seed;
  return o;
}

py::dict report_dict(const OnsetReport& rep) {
  py::dict d;
  d["status"] = status_name(rep.status);
  d["message"] = rep.message;
  d["mutual_information_bits"] = rep.mi_bits;
  d["eta_chi2"] = rep.chi2.eta_chi2;
  d["beta_c_hat"] = rep.chi2.has_onset ? py::object(py::float_(rep.chi2.beta_c_hat)) : py::none();
  if (rep.onset) {
    d["beta_c"] = rep.onset->beta_c;
    d["eta_kl"] = rep.onset->eta_kl;
    d["kind"] = rep.onset->kind == OnsetKind::fixed_point ? "fixed_point" : "local_limit";
    d["r_x"] = rep.onset->r_x.values();
  }
  if (rep.prediction) {
    const PerturbationPrediction& p = *rep.prediction;
    d["branch"] = p.branch == PredictionBranch::new_letter ? "new_letter" : "symmetric_split";
    d["kappa"] = p.kappa;
    d["l2_bits"] = p.l2;
    d["i1_zx_bits"] = p.i1_zx;
    d["i1_zy_bits"] = p.i1_zy;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information bottleneck learning onset: exact solver, onset theory and chi^2 bounds";
  m.attr("__version__") = IBONSET_VERSION;

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NoOnsetError>(m, "NoOnsetError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<HigherOrderRequired>(m, "HigherOrderRequired", error.ptr());

  py::class_<JointDistribution>(m, "Joint")
      .def(py::init([](const Matrix& p) { return JointDistribution(p); }), py::arg("p"))
      .def_static("from_weights", [](const Matrix& w) { return JointDistribution::from_weights(w); })
      .def_property_readonly("p", &JointDistribution::p)
      .def_property_readonly("px", &JointDistribution::px)
      .def_property_readonly("py", &JointDistribution::py)
      .def_property_readonly("shape", [](const JointDistribution& j) { return py::make_tuple(j.nx(), j.ny()); })
      .def("transposed", &JointDistribution::transposed)
      .def("__repr__", [](const JointDistribution& j) {
        return "<Joint " + std::to_string(j.nx()) + "x" + std::to_string(j.ny()) + ">";
      });

  m.def("mutual_information", &mutual_information, py::arg("joint"), "I(X;Y) in bits");
  m.def("kl_divergence", [](const Vector& p, const Vector& q) { return nats_to_bits(kl_nats(p, q)); },
        py::arg("p"), py::arg("q"), "KL(p||q) in bits; inf on a support violation");

  py::class_<Chi2Analysis>(m, "Chi2Analysis")
      .def_readonly("eta_chi2", &Chi2Analysis::eta_chi2)
      .def_readonly("beta_c_hat", &Chi2Analysis::beta_c_hat)
      .def_readonly("sigma2", &Chi2Analysis::sigma2)
      .def_readonly("singular_values", &Chi2Analysis::singular_values)
      .def_readonly("has_onset", &Chi2Analysis::has_onset);
  m.def("eta_chi2", &eta_chi2, py::arg("joint"));
  m.def("chi2_information", &chi2_information, py::arg("joint"));

  py::class_<OnsetSolution>(m, "OnsetSolution")
      .def_readonly("beta_c", &OnsetSolution::beta_c)
      .def_readonly("eta_kl", &OnsetSolution::eta_kl)
      .def_property_readonly("r_x", [](const OnsetSolution& s) { return s.r_x.values(); })
      .def_property_readonly("r_y", [](const OnsetSolution& s) { return s.r_y.values(); })
      .def_property_readonly("kind", [](const OnsetSolution& s) {
        return s.kind == OnsetKind::fixed_point ? "fixed_point" : "local_limit";
      })
      .def_readonly("fixed_points_found", &OnsetSolution::fixed_points_found)
      .def_readonly("collapsed", &OnsetSolution::collapsed);
  m.def("solve_onset",
        [](const JointDistribution& j, double tol, int restarts, long max_iter, std::uint64_t seed) {
          py::gil_scoped_release release;
          return solve_onset(j, onset_options(tol, restarts, max_iter, seed));
        },
        py::arg("joint"), py::arg("tol") = 1e-11, py::arg("restarts") = 32, py::arg("max_iter") = 100000,
        py::arg("seed") = 0);
  m.def("kl_ratio", [](const Vector& f, const JointDistribution& j) { return kl_ratio(Distribution(f), j); },
        py::arg("f"), py::arg("joint"));
  m.def("eta_kl_bruteforce", &eta_kl_bruteforce, py::arg("joint"), py::arg("resolution") = 32,
        py::arg("polish_starts") = 8);

  m.def("analyze_onset",
        [](const JointDistribution& j, double tol, int restarts, std::uint64_t seed) {
          OnsetReport rep;
          {
            py::gil_scoped_release release;
            rep = analyze_onset(j, onset_options(tol, restarts, 100000, seed));
          }
          return report_dict(rep);
        },
        py::arg("joint"), py::arg("tol") = 1e-11, py::arg("restarts") = 32, py::arg("seed") = 0,
        "onset, chi^2 bound and second-order prediction as a dict");

  py::class_<IBSolution>(m, "IBSolution")
      .def_property_readonly("encoder", [](const IBSolution& s) { return s.encoder.q(); })
      .def_readonly("beta", &IBSolution::beta)
      .def_readonly("i_zx", &IBSolution::i_zx)
      .def_readonly("i_zy", &IBSolution::i_zy)
      .def_readonly("loss", &IBSolution::loss)
      .def_readonly("iterations", &IBSolution::iterations)
      .def_readonly("converged", &IBSolution::converged);
  m.def("solve_ib",
        [](const JointDistribution& j, double beta, int restarts, double tol, long max_iter, std::uint64_t seed) {
          IBOptions o;
          o.n_restarts = restarts;
          o.tol = tol;
          o.max_iter = max_iter;
          o.seed = seed;
          py::gil_scoped_release release;
          return solve_ib_restarts(j, beta, o);
        },
        py::arg("joint"), py::arg("beta"), py::arg("restarts") = 1, py::arg("tol") = 1e-10,
        py::arg("max_iter") = 100000, py::arg("seed") = 0);
  m.def("frontier",
        [](const JointDistribution& j, std::vector<double> grid, int restarts, double tol, long max_iter) {
          IBOptions o;
          o.n_restarts = restarts;
          o.tol = tol;
          o.max_iter = max_iter;
          std::vector<FrontierPoint> pts;
          {
            py::gil_scoped_release release;
            pts = frontier_sweep(j, grid, o);
          }
          Matrix out(static_cast<Index>(pts.size()), 4);
          for (std::size_t k = 0; k < pts.size(); ++k) {
            out.row(static_cast<Index>(k)) << pts[k].beta, pts[k].i_zx, pts[k].i_zy, pts[k].loss;
          }
          return out;
        },
        py::arg("joint"), py::arg("betas"), py::arg("restarts") = 1, py::arg("tol") = 1e-10,
        py::arg("max_iter") = 100000, "rows of (beta, I(Z;X), I(Z;Y), loss) in bits");

  py::class_<GaussianOnset>(m, "GaussianOnset")
      .def_readonly("beta_c", &GaussianOnset::beta_c)
      .def_readonly("lambda_min", &GaussianOnset::lambda_min)
      .def_readonly("nu_direction", &GaussianOnset::nu_direction)
      .def_readonly("spectrum", &GaussianOnset::spectrum);
  m.def("gaussian_onset",
        [](const Matrix& sx, const Matrix& sy, const Matrix& sxy) { return gaussian_onset(GaussianJoint(sx, sy, sxy)); },
        py::arg("sigma_x"), py::arg("sigma_y"), py::arg("sigma_xy"));
  m.def("discretize_gaussian",
        [](double rho, int bins, double truncation) {
          return discretize_gaussian(GaussianJoint::scalar(rho), bins, truncation);
        },
        py::arg("rho"), py::arg("bins") = 128, py::arg("truncation") = 5.0);

  m.def("fig1_joint", &fig1_joint);
  m.def("binary_classification",
        [](const std::string& family, std::pair<double, double> class0, std::pair<double, double> class1, int bins) {
          BinaryClassSpec s;
          s.family = family_from_name(family);
          s.classes[0] = {class0.first, class0.second};
          s.classes[1] = {class1.first, class1.second};
          s.n_bins = bins;
          return binary_classification_joint(s);
        },
        py::arg("family"), py::arg("class0"), py::arg("class1"), py::arg("bins") = 256);
  m.def("noisy_function",
        [](const std::string& function, double sigma, int x_bins, int y_bins) {
          NoisyFunctionSpec s;
          s.f = preset_from_name(function);
          s.sigma = sigma;
          s.n_x_bins = x_bins;
          s.n_y_bins = y_bins;
          return noisy_function_joint(s);
        },
        py::arg("function"), py::arg("sigma"), py::arg("x_bins") = 64, py::arg("y_bins") = 64);
}
