#pragma once

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mws/control.hpp"
#include "mws/curves.hpp"
#include "mws/energy.hpp"
#include "mws/observability.hpp"
#include "mws/pde.hpp"
#include "mws/spectral.hpp"

namespace mws::io {

using json = nlohmann::ordered_json;
using curves::BoundaryCurve;
using spectral::SineSpectrum;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurveSpec {
  std::string kind = "linear";  // linear | periodic | tabulated
  double epsilon = 0.5;
  double omega = 0.0;
  std::string path;  // tabulated CSV
};

struct RunConfig {
  CurveSpec curve;
  std::string spectrum = "mode:1";  // preset or file:path
  double tau = 1.0;
  std::size_t M = 256;
  std::size_t steps = 256;
  std::size_t N = 8;
  std::size_t quadrature_points = 0;  // 0 = per-module default
  std::string obs_kind = "boundary_both";
  double obs_a = 0.5;
  double p = 1.0;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
};

inline RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    if (j.contains("curve")) {
      const auto& cj = j.at("curve");
      c.curve.kind = cj.at("kind").get<std::string>();
      if (c.curve.kind == "tabulated")
        c.curve.path = cj.at("path").get<std::string>();
      else
        c.curve.epsilon = cj.at("epsilon").get<double>();
      if (c.curve.kind == "periodic") c.curve.omega = cj.at("omega").get<double>();
    }
    if (j.contains("spectrum")) c.spectrum = j.at("spectrum").get<std::string>();
    if (j.contains("tau")) c.tau = j.at("tau").get<double>();
    if (j.contains("discretization")) {
      const auto& d = j.at("discretization");
      if (d.contains("M")) c.M = d.at("M").get<std::size_t>();
      if (d.contains("steps")) c.steps = d.at("steps").get<std::size_t>();
      if (d.contains("N")) c.N = d.at("N").get<std::size_t>();
      if (d.contains("quadrature_points"))
        c.quadrature_points = d.at("quadrature_points").get<std::size_t>();
    }
    if (j.contains("truncation") && j.at("truncation").contains("N"))
      c.N = j.at("truncation").at("N").get<std::size_t>();
    if (j.contains("observation")) {
      const auto& o = j.at("observation");
      if (o.contains("kind")) c.obs_kind = o.at("kind").get<std::string>();
      if (o.contains("a")) c.obs_a = o.at("a").get<double>();
      if (o.contains("p")) c.p = o.at("p").get<double>();
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.tau <= 0.0) throw ConfigError("config: tau must be positive");
  if (c.M < 8) throw ConfigError("config: grid M must be >= 8");
  if (c.steps < 1 || c.N < 1) throw ConfigError("config: steps and N must be >= 1");
  return c;
}

inline json to_json(const RunConfig& c) {
  json cj;
  cj["kind"] = c.curve.kind;
  if (c.curve.kind == "tabulated")
    cj["path"] = c.curve.path;
  else
    cj["epsilon"] = c.curve.epsilon;
  if (c.curve.kind == "periodic") cj["omega"] = c.curve.omega;
  return json{{"curve", cj},
              {"spectrum", c.spectrum},
              {"tau", c.tau},
              {"discretization",
               {{"M", c.M}, {"steps", c.steps}, {"N", c.N},
                {"quadrature_points", c.quadrature_points}}},
              {"observation", {{"kind", c.obs_kind}, {"a", c.obs_a}, {"p", c.p}}},
              {"output_dir", c.output_dir},
              {"seed", c.seed}};
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------- curves

inline curves::TabulatedCurve load_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("curve csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("curve csv: empty file");
  std::vector<double> ts, ls;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw ConfigError("curve csv: need at least t,l columns");
    ts.push_back(row[0]);
    ls.push_back(row[1]);
  }
  return curves::TabulatedCurve::from_samples(std::move(ts), std::move(ls));
}

inline BoundaryCurve make_curve(const CurveSpec& spec, double horizon) {
  if (spec.kind == "linear") return BoundaryCurve::linear(spec.epsilon, horizon);
  if (spec.kind == "periodic")
    return BoundaryCurve::periodic(spec.epsilon, spec.omega, horizon);
  if (spec.kind == "tabulated")
    return BoundaryCurve::tabulated(load_curve_csv(spec.path), horizon);
  throw ConfigError("curve: unknown kind '" + spec.kind + "'");
}

/// Parses the --curve flag syntax: linear:eps | periodic:eps:omega | tabulated:path.
inline CurveSpec parse_curve_flag(const std::string& flag) {
  CurveSpec spec;
  std::istringstream ss(flag);
  std::string kind;
  std::getline(ss, kind, ':');
  spec.kind = kind;
  try {
    if (kind == "linear") {
      std::string e;
      std::getline(ss, e, ':');
      spec.epsilon = std::stod(e);
    } else if (kind == "periodic") {
      std::string e, o;
      std::getline(ss, e, ':');
      std::getline(ss, o, ':');
      spec.epsilon = std::stod(e);
      spec.omega = std::stod(o);
    } else if (kind == "tabulated") {
      std::getline(ss, spec.path);
    } else {
      throw ConfigError("curve: unknown kind '" + kind + "'");
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("curve: malformed flag '" + flag + "'");
  }
  return spec;
}

// -------------------------------------------------------------- spectra

inline SineSpectrum load_spectrum_csv(const std::string& path, double eps) {
  std::ifstream in(path);
  if (!in) throw ConfigError("spectrum csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("spectrum csv: empty file");
  SineSpectrum spec;
  spec.epsilon = eps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string n, re, im;
    std::getline(ss, n, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    const std::size_t idx = std::stoul(n);
    if (idx < 1) throw ConfigError("spectrum csv: mode index must be >= 1");
    if (spec.coefficients.size() < idx) spec.coefficients.resize(idx);
    spec.coefficients[idx - 1] = cplx(std::stod(re), std::stod(im));
  }
  if (spec.coefficients.empty()) throw ConfigError("spectrum csv: no coefficients");
  return spec;
}

inline void save_spectrum_csv(const std::string& path, const SineSpectrum& spec) {
  std::ofstream out(path);
  out << "n,re,im\n" << std::setprecision(17);
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k)
    out << (k + 1) << ',' << spec.coefficients[k].real() << ','
        << spec.coefficients[k].imag() << '\n';
}

/// Preset names: "mode:k", "hat", "parabola", "random:seed", "file:path".
inline SineSpectrum make_spectrum(const std::string& name, std::size_t N, double eps) {
  if (name.rfind("mode:", 0) == 0) {
    const std::size_t k = std::stoul(name.substr(5));
    if (k < 1) throw ConfigError("spectrum: mode index must be >= 1");
    SineSpectrum spec;
    spec.epsilon = eps;
    spec.coefficients.assign(std::max(N, k), cplx(0.0));
    spec.coefficients[k - 1] = 1.0;
    return spec;
  }
  if (name.rfind("random:", 0) == 0)
    return spectral::random_spectrum(N, eps, std::stoull(name.substr(7)));
  if (name.rfind("file:", 0) == 0) return load_spectrum_csv(name.substr(5), eps);
  if (name == "hat") {
    return spectral::project_initial(
        [](double x) { return cplx(1.0 - std::abs(2.0 * x - 1.0), 0.0); }, N, eps);
  }
  if (name == "parabola") {
    return spectral::project_initial([](double x) { return cplx(x * (1.0 - x), 0.0); }, N, eps);
  }
  throw ConfigError("spectrum: unknown preset '" + name + "'");
}

// ---------------------------------------------------------------- writers

inline void write_trace_csv(std::ostream& out, const pde::Trajectory& traj) {
  out << "t,re_left,im_left,re_right,im_right,abs2_left,abs2_right\n"
      << std::setprecision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& tr = traj.traces[k];
    out << traj.states[k].t << ',' << tr.left.real() << ',' << tr.left.imag() << ','
        << tr.right.real() << ',' << tr.right.imag() << ',' << std::norm(tr.left) << ','
        << std::norm(tr.right) << '\n';
  }
}

inline void write_energy_csv(std::ostream& out, const energy::EnergyTrace& tr,
                             const BoundaryCurve& curve) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  out << "t,E,F,lE_residual,F_var_residual,poincare_margin\n" << std::setprecision(17);
  const double E0 = tr.E.empty() ? 0.0 : tr.E.front();
  const double F0 = tr.F.empty() ? 0.0 : tr.F.front();
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double l = curve.eval(tr.times[k]).l;
    const double le_res = E0 == 0.0 ? 0.0 : std::abs(l * tr.E[k] - E0) / E0;
    const double fv_res =
        F0 == 0.0 ? 0.0 : std::abs(tr.F[k] - l * F0 + l * tr.right_trace_accum[k]) / F0;
    out << tr.times[k] << ',' << tr.E[k] << ',' << tr.F[k] << ',' << le_res << ',' << fv_res
        << ',' << tr.F[k] - pi2 * tr.E[k] << '\n';
  }
}

struct SweepRow {
  double epsilon, tau;
  std::size_t N;
  std::string kind;
  double c_est, C_est, cond, T_param;
};

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "epsilon,tau,N,kind,c_est,C_est,cond,T_param\n" << std::setprecision(17);
  for (const auto& r : rows)
    out << r.epsilon << ',' << r.tau << ',' << r.N << ',' << r.kind << ',' << r.c_est << ','
        << r.C_est << ',' << r.cond << ',' << r.T_param << '\n';
}

inline json control_report(const control::ControlSolution& cs, const std::string& kind,
                           double epsilon, double tau) {
  return json{{"kind", kind},
              {"N", cs.w0.size()},
              {"epsilon", epsilon},
              {"tau", tau},
              {"cond_G", cs.cond},
              {"residual", cs.residual},
              {"target_norm", cs.target.norm()},
              {"w0_norm", cs.w0.norm()}};
}

/// Binary trajectory dump: uint64 M, uint64 steps, float64 tau, then states
/// in time order, each value as a (float32 re, float32 im) pair, row-major.
inline void write_state_dump(std::ostream& out, const pde::Trajectory& traj) {
  const std::uint64_t M = traj.states.front().grid_size();
  const std::uint64_t steps = traj.steps();
  const double tau = traj.states.back().t;
  out.write(reinterpret_cast<const char*>(&M), sizeof(M));
  out.write(reinterpret_cast<const char*>(&steps), sizeof(steps));
  out.write(reinterpret_cast<const char*>(&tau), sizeof(tau));
  for (const auto& s : traj.states)
    for (const cplx& v : s.values) {
      const float re = static_cast<float>(v.real()), im = static_cast<float>(v.imag());
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
}

inline observability::ObservationKind parse_obs_kind(const std::string& s) {
  using observability::ObservationKind;
  if (s == "boundary_left") return ObservationKind::BoundaryLeft;
  if (s == "boundary_right") return ObservationKind::BoundaryRight;
  if (s == "boundary_both") return ObservationKind::BoundaryBoth;
  if (s == "point") return ObservationKind::Point;
  throw ConfigError("observation: unknown kind '" + s + "'");
}

}  // namespace mws::io
