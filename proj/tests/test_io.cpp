#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "mws/io.hpp"

using namespace mws;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mws_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("config round trip") {
  const char* text = R"({
    "curve": {"kind": "periodic", "epsilon": 0.5, "omega": 0.4},
    "spectrum": "random:7",
    "tau": 1.25,
    "discretization": {"M": 128, "steps": 300, "N": 5, "quadrature_points": 9000},
    "observation": {"kind": "point", "a": 0.41, "p": 1.5},
    "output_dir": "out",
    "seed": 99
  })";
  auto j = io::json::parse(text);
  auto cfg = io::parse_config(j);
  CHECK(cfg.curve.kind == "periodic");
  CHECK(cfg.curve.omega == 0.4);
  CHECK(cfg.tau == 1.25);
  CHECK(cfg.M == 128);
  CHECK(cfg.N == 5);
  CHECK(cfg.obs_kind == "point");
  CHECK(cfg.obs_a == 0.41);
  CHECK(cfg.p == 1.5);
  CHECK(cfg.seed == 99);
  // parse -> serialize -> parse is the identity
  auto j2 = io::to_json(cfg);
  auto cfg2 = io::parse_config(j2);
  CHECK(io::to_json(cfg2) == j2);

  CHECK_THROWS_AS(io::parse_config(io::json::parse(R"({"tau": -1})")), io::ConfigError);
  CHECK_THROWS_AS(io::parse_config(io::json::parse(R"({"discretization": {"M": 2}})")),
                  io::ConfigError);
  // truncation.N alias accepted
  auto cfg3 = io::parse_config(io::json::parse(R"({"truncation": {"N": 11}})"));
  CHECK(cfg3.N == 11);
}

TEST_CASE("curve flag parsing") {
  auto lin = io::parse_curve_flag("linear:0.5");
  CHECK(lin.kind == "linear");
  CHECK(lin.epsilon == 0.5);
  auto per = io::parse_curve_flag("periodic:0.3:0.7");
  CHECK(per.omega == 0.7);
  auto tab = io::parse_curve_flag("tabulated:/tmp/c.csv");
  CHECK(tab.path == "/tmp/c.csv");
  CHECK_THROWS_AS(io::parse_curve_flag("spline:1"), io::ConfigError);
  CHECK_THROWS_AS(io::parse_curve_flag("linear:abc"), io::ConfigError);
}

TEST_CASE("spectrum presets") {
  auto m3 = io::make_spectrum("mode:3", 8, 0.5);
  REQUIRE(m3.coefficients.size() == 8);
  CHECK(m3.coefficients[2] == cplx(1.0));
  CHECK(m3.coefficients[0] == cplx(0.0));

  auto r1 = io::make_spectrum("random:42", 6, 0.5);
  auto r2 = io::make_spectrum("random:42", 6, 0.5);
  for (std::size_t k = 0; k < 6; ++k) CHECK(r1.coefficients[k] == r2.coefficients[k]);

  auto hat = io::make_spectrum("hat", 8, 0.0);
  // odd-mode dominance of the symmetric hat profile
  CHECK(std::abs(hat.coefficients[0]) > std::abs(hat.coefficients[1]) * 10.0);
  auto par = io::make_spectrum("parabola", 8, 0.3);
  CHECK(std::abs(par.coefficients[0]) > 0.1);

  CHECK_THROWS_AS(io::make_spectrum("gauss", 4, 0.0), io::ConfigError);
  CHECK_THROWS_AS(io::make_spectrum("mode:0", 4, 0.0), io::ConfigError);
}

TEST_CASE("spectrum CSV round trip") {
  TempDir tmp;
  const auto file = (tmp.path / "spec.csv").string();
  auto spec = spectral::random_spectrum(5, 0.4, 77);
  io::save_spectrum_csv(file, spec);
  auto back = io::load_spectrum_csv(file, 0.4);
  REQUIRE(back.coefficients.size() == 5);
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(std::abs(back.coefficients[k] - spec.coefficients[k]) < 1e-15);
  auto viaflag = io::make_spectrum("file:" + file, 5, 0.4);
  CHECK(viaflag.coefficients.size() == 5);
}

TEST_CASE("tabulated curve CSV") {
  TempDir tmp;
  const auto file = (tmp.path / "curve.csv").string();
  {
    std::ofstream out(file);
    out << "t,l,lp,lpp\n";
    for (int k = 0; k <= 20; ++k) {
      const double t = 0.1 * k;
      out << t << ',' << 1.0 + 0.2 * t << ",0.2,0\n";
    }
  }
  auto curve = io::make_curve({"tabulated", 0.0, 0.0, file}, 1.5);
  CHECK(curve.eval(1.0).l == doctest::Approx(1.2).epsilon(1e-9));
  CHECK_THROWS_AS(io::make_curve({"tabulated", 0.0, 0.0, file + ".missing"}, 1.0),
                  io::ConfigError);
}

TEST_CASE("CSV writers") {
  auto spec = spectral::SineSpectrum{{cplx(1.0)}, 0.5};
  auto curve = curves::BoundaryCurve::linear(0.5, 0.5);
  auto traj = pde::solve(spec, curve, 0.5, 32, 8);
  std::ostringstream trace;
  io::write_trace_csv(trace, traj);
  std::istringstream lines(trace.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,re_left,im_left,re_right,im_right,abs2_left,abs2_right");
  std::size_t rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 9);

  auto tr = energy::energies(traj);
  std::ostringstream en;
  io::write_energy_csv(en, tr, curve);
  CHECK(en.str().rfind("t,E,F,lE_residual,F_var_residual,poincare_margin", 0) == 0);

  std::ostringstream sw;
  io::write_sweep_csv(sw, {{0.5, 1.0, 8, "boundary_both", 1.0, 2.0, 2.0, 0.6}});
  CHECK(sw.str().rfind("epsilon,tau,N,kind,c_est,C_est,cond,T_param", 0) == 0);

  std::ostringstream dump(std::ios::binary);
  io::write_state_dump(dump, traj);
  CHECK(dump.str().size() == 24 + 9 * 33 * 8);  // header + (steps+1)(M+1) float pairs
}

TEST_CASE("observation kind parsing") {
  CHECK(io::parse_obs_kind("boundary_left") == observability::ObservationKind::BoundaryLeft);
  CHECK(io::parse_obs_kind("point") == observability::ObservationKind::Point);
  CHECK_THROWS_AS(io::parse_obs_kind("corner"), io::ConfigError);
}
