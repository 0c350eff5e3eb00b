#include "doctest.h"
#include "ibonset/io.hpp"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(IBONSET_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("ibonset_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  ibonset::write_text(p.string(), text);
  return p.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("onset on the binary symmetric channel") {
  const std::string in = write("bsc.csv", "x,a,b\n0,0.375,0.125\n1,0.125,0.375\n");
  const Run r = run("onset -i " + in);
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["onset"]["beta_c"].get<double>() == doctest::Approx(4.0));
  CHECK(j["chi2"]["beta_c_hat"].get<double>() == doctest::Approx(4.0));
  CHECK(j["meta"].contains("config_hash"));
}

TEST_CASE("exit codes") {
  const std::string ind = write("ind.csv", "x,a,b\n0,0.12,0.28\n1,0.18,0.42\n");
  CHECK(run("onset -i " + ind).code == 3);
  CHECK(run("onset").code == 2);
  CHECK(run("onset -i " + ind + " --restarts nope").code == 2);
  CHECK(run("nosuchcommand").code == 2);
  const std::string bad = write("bad.csv", "x,a,b\n0,0.5\n");
  CHECK(run("onset -i " + bad).code == 2);
  const std::string cfg = write("cfg.json", "{\"no-such-key\": 1}");
  const std::string bsc = write("bsc2.csv", "x,a,b\n0,0.375,0.125\n1,0.125,0.375\n");
  CHECK(run("onset -i " + bsc + " --config " + cfg).code == 2);
}

TEST_CASE("config values apply unless a flag overrides them") {
  const std::string bsc = write("bsc3.csv", "x,a,b\n0,0.375,0.125\n1,0.125,0.375\n");
  const std::string cfg = write("cfg2.json", "{\"restarts\": 3, \"seed\": 5}");
  const Json a = Json::parse(run("onset -i " + bsc + " --config " + cfg).out);
  CHECK(a["onset"]["restarts_used"] == 3);
  CHECK(a["meta"]["seed"].dump().find('5') != std::string::npos);
  const Json b = Json::parse(run("onset -i " + bsc + " --config " + cfg + " --restarts 2").out);
  CHECK(b["onset"]["restarts_used"] == 2);
}

TEST_CASE("generated files are byte-identical across runs") {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  REQUIRE(run("gen --kind fig1 -o " + a.string()).code == 0);
  REQUIRE(run("gen --kind fig1 -o " + b.string()).code == 0);
  const std::string ta = ibonset::read_text(a.string());
  CHECK(ta == ibonset::read_text(b.string()));
  CHECK(ta.find("# tool: ibonset") != std::string::npos);
  CHECK(ta.find("# config_hash: ") != std::string::npos);
  CHECK(ta.find("# seed: ") != std::string::npos);
}

TEST_CASE("frontier below the onset is all zero") {
  const std::string bsc = write("bsc4.csv", "x,a,b\n0,0.375,0.125\n1,0.125,0.375\n");
  const fs::path out = scratch() / "front.csv";
  REQUIRE(run("frontier -i " + bsc + " --beta-grid 1,2,3 -o " + out.string()).code == 0);
  const std::string text = ibonset::read_text(out.string());
  CHECK(text.find("beta,i_zx_bits,i_zy_bits,loss_bits,converged") != std::string::npos);
  std::size_t rows = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    for (int k = 0; k < 3; ++k) {
      std::getline(cells, cell, ',');
      CHECK(std::abs(std::stod(cell)) < 1e-12);
    }
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(fs::exists(scratch() / "front.prediction.csv"));
}

TEST_CASE("sweeps are sorted by parameter") {
  const fs::path out = scratch() / "f3.csv";
  REQUIRE(run("fig3 --function linear --sweep 0.9,0.3,0.6 --x-bins 16 --y-bins 16 -o " + out.string()).code == 0);
  const std::string text = ibonset::read_text(out.string());
  const auto p3 = text.find("\n0.29");
  const auto p6 = text.find("\n0.59");
  const auto p9 = text.find("\n0.9");
  REQUIRE(p3 != std::string::npos);
  CHECK(p3 < p6);
  CHECK(p6 < p9);
}

TEST_CASE("gauss reports closed form and discretization") {
  const Json j = Json::parse(run("gauss --rho 0.5").out);
  CHECK(j["closed_form"]["beta_c"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(j["discretized"]["relative_error"].get<double>()) < 0.02);
}

TEST_CASE("validate passes on a clean joint") {
  const fs::path in = scratch() / "fig1.csv";
  REQUIRE(run("gen --kind fig1 -o " + in.string()).code == 0);
  CHECK(run("validate --cases 20 -i " + in.string()).code == 0);
}

}
