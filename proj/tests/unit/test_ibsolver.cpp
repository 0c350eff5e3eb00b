#include "doctest.h"
#include "ibonset/datagen.hpp"
#include "ibonset/error.hpp"
#include "ibonset/ibsolver.hpp"
#include "ibonset/onset.hpp"
#include "ibonset/pipeline.hpp"
#include "../support.hpp"

#include <cmath>

using namespace ibonset;
using namespace ibonset::testing;

namespace {

JointDistribution diagonal() {
  Matrix p(2, 2);
  p << 0.5, 0, 0, 0.5;
  return JointDistribution(p);
}

double fig1_beta_c() {
  static const double b = solve_onset(fig1_joint()).beta_c;
  return b;
}

}  // namespace

TEST_SUITE("ibsolver") {

TEST_CASE("below beta = 1 the solution is uninformative") {
  Rng rng(1);
  const JointDistribution j = random_joint(rng, 4, 3);
  const IBSolution s = solve_ib(j, 0.5);
  CHECK(std::abs(s.i_zx) < 1e-8);
  CHECK(std::abs(s.i_zy) < 1e-8);
  CHECK(std::abs(s.loss) < 1e-8);
}

TEST_CASE("a deterministic channel saturates both informations") {
  IBOptions o;
  o.n_restarts = 4;
  const IBSolution s = solve_ib_restarts(diagonal(), 100.0, o);
  CHECK(s.i_zx == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.i_zy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("uninformative below the onset, informative above") {
  const JointDistribution j = fig1_joint();
  IBOptions o;
  o.n_restarts = 4;
  const IBSolution below = solve_ib_restarts(j, fig1_beta_c() - 0.05, o);
  CHECK(std::abs(below.loss) < 1e-8);
  const IBSolution above = solve_ib_restarts(j, fig1_beta_c() + 0.5, o);
  CHECK(above.loss < -1e-6);
}

TEST_CASE("one restart equals a plain solve with the same seed") {
  Rng rng(2);
  const JointDistribution j = random_joint(rng, 3, 3, 1.5);
  IBOptions o;
  o.seed = 99;
  o.n_restarts = 1;
  const IBSolution a = solve_ib(j, 3.0, o);
  const IBSolution b = solve_ib_restarts(j, 3.0, o);
  CHECK(a.loss == b.loss);
  CHECK((a.encoder.q() - b.encoder.q()).norm() == 0.0);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(solve_ib(diagonal(), -1.0), InvalidArgument);
  IBOptions o;
  o.z_cardinality = 5;
  const IBSolution s = solve_ib(diagonal(), 2.0, o);
  CHECK_FALSE(s.warnings.empty());
  const std::vector<double> unsorted{2.0, 1.0};
  CHECK_THROWS_AS(frontier_sweep(diagonal(), unsorted), InvalidArgument);
}

TEST_CASE("frontier below the onset stays at the origin") {
  const std::vector<double> grid{0.2, 0.6, 1.0, fig1_beta_c() - 0.1};
  for (const FrontierPoint& p : frontier_sweep(fig1_joint(), grid)) {
    CHECK(std::abs(p.i_zx) < 1e-8);
    CHECK(std::abs(p.i_zy) < 1e-8);
  }
}

TEST_CASE("frontier saturates on a deterministic channel") {
  const std::vector<double> grid{2.0, 10.0, 100.0};
  const std::vector<FrontierPoint> pts = frontier_sweep(diagonal(), grid);
  CHECK(pts.back().i_zx == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pts.back().i_zy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("frontier is monotone and concave") {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(fig1_beta_c() + 0.25 * k);
  grid.push_back(50.0);
  IBOptions o;
  o.tol = 1e-12;
  o.max_iter = 2000000;
  const std::vector<FrontierPoint> pts = frontier_sweep(fig1_joint(), grid, o);
  double last_slope = INFINITY;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    CHECK(pts[k].i_zx >= pts[k - 1].i_zx - 1e-9);
    CHECK(pts[k].i_zy >= pts[k - 1].i_zy - 1e-9);
    const double dx = pts[k].i_zx - pts[k - 1].i_zx;
    if (dx < 1e-6) continue;
    const double slope = (pts[k].i_zy - pts[k - 1].i_zy) / dx;
    CHECK(slope >= -1e-9);
    CHECK(slope <= 1.0 + 1e-9);
    CHECK(slope <= last_slope + 1e-6);
    last_slope = slope;
  }
}

TEST_CASE("near the onset the frontier follows the first-order prediction") {
  const JointDistribution j = fig1_joint();
  const OnsetReport rep = analyze_onset(j, OnsetOptions{});
  REQUIRE(rep.prediction);
  const double beta_c = rep.prediction->beta_c;
  const std::vector<double> grid{beta_c + 0.01, beta_c + 0.02, beta_c + 0.04, beta_c + 0.5};
  IBOptions o;
  o.tol = 1e-13;
  o.max_iter = 5000000;
  const std::vector<FrontierPoint> pts = frontier_sweep(j, grid, o);
  CHECK(pts[0].i_zy == doctest::Approx(0.01 * rep.prediction->i1_zy).epsilon(0.1));
  // slope of the SDPI line at the origin
  CHECK(pts[0].i_zy / pts[0].i_zx == doctest::Approx(1.0 / beta_c).epsilon(0.02));
}

}
