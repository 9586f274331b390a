#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mws/observability.hpp"
#include "mws/pde.hpp"

namespace mws::control {

using mws::cplx;
using curves::BoundaryCurve;
using observability::GramianMatrix;
using observability::ObservationKind;
using spectral::SineSpectrum;

/// Tridiagonal realization of A(t)* = -A(t) - l'(t)/l(t) on the interior grid.
struct AdjointStamp {
  double t = 0.0;
  std::size_t M = 0;
  std::vector<cplx> lower, diag, upper;

  std::vector<cplx> apply(const std::vector<cplx>& w) const {
    pde::OperatorStamp st{t, M, lower, diag, upper};
    return st.apply(w);
  }
};

inline AdjointStamp adjoint_stamp(const BoundaryCurve& curve, double t, std::size_t M) {
  const pde::OperatorStamp a = pde::assemble_operator(curve, t, M);
  const auto ev = curve.eval(t);
  const double shift = ev.lp / ev.l;
  AdjointStamp st;
  st.t = t;
  st.M = M;
  st.lower.resize(M - 2);
  st.diag.resize(M - 1);
  st.upper.resize(M - 2);
  for (std::size_t j = 0; j < M - 1; ++j) st.diag[j] = -a.diag[j] - shift;
  for (std::size_t j = 0; j < M - 2; ++j) {
    st.lower[j] = -a.lower[j];
    st.upper[j] = -a.upper[j];
  }
  return st;
}

namespace detail {

/// Observation waveforms of the spectral modes for the linear wall, as
/// rows of Phi(t): boundary kinds observe u_x, point kind observes u(a,t).
inline Eigen::VectorXcd waveform_row(double eps, double t, std::size_t N, ObservationKind kind,
                                     double a, bool right_component = false) {
  const double pi = std::numbers::pi;
  const double l = 1.0 + eps * t;
  Eigen::VectorXcd row(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const cplx osc = std::exp(cplx(0.0, -double(n * n) * pi * pi * t / l));
    cplx v;
    if (kind == ObservationKind::Point) {
      v = std::sqrt(2.0 / l) * std::exp(cplx(0.0, eps * a * a / (4.0 * l))) *
          std::sin(double(n) * pi * a / l) * osc;
    } else if (!right_component) {
      v = std::sqrt(2.0 / l) * (double(n) * pi / l) * osc;
    } else {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      v = sign * std::sqrt(2.0 / l) * (double(n) * pi / l) *
          std::exp(cplx(0.0, eps * l / 4.0)) * osc;
    }
    row(n - 1) = v;
  }
  return row;
}

inline std::vector<Eigen::VectorXcd> waveform_rows(double eps, double t, std::size_t N,
                                                   ObservationKind kind, double a) {
  switch (kind) {
    case ObservationKind::BoundaryLeft:
      return {waveform_row(eps, t, N, kind, a, false)};
    case ObservationKind::BoundaryRight:
      return {waveform_row(eps, t, N, kind, a, true)};
    case ObservationKind::BoundaryBoth:
      return {waveform_row(eps, t, N, kind, a, false), waveform_row(eps, t, N, kind, a, true)};
    case ObservationKind::Point:
      return {waveform_row(eps, t, N, kind, a, false)};
  }
  return {};
}

/// Quadratic interpolation of a grid state at an interior ordinate.
inline cplx interp_state(const pde::FixedState& s, double y) {
  const std::size_t M = s.grid_size();
  const double h = 1.0 / double(M);
  double jr = y / h;
  std::size_t j = static_cast<std::size_t>(jr);
  if (j == 0) j = 1;
  if (j > M - 1) j = M - 1;
  const double x0 = double(j - 1) * h, x1 = double(j) * h, x2 = double(j + 1) * h;
  const cplx f0 = s.values[j - 1], f1 = s.values[j], f2 = s.values[j + 1];
  const double l0 = (y - x1) * (y - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (y - x0) * (y - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (y - x0) * (y - x1) / ((x2 - x0) * (x2 - x1));
  return f0 * l0 + f1 * l1 + f2 * l2;
}

}  // namespace detail

struct DualityReport {
  double pairing;          // Re <w0, z(0)>
  double output_energy;    // int |C w|^2 dt
  double residual;         // |pairing - output_energy| / output_energy
};

/// Verifies <w0, z(0)> = int_0^tau |C(t) w(t)|^2 dt: w from the
/// Crank-Nicolson solver, z(0) by retrograde accumulation of C* C w against
/// the mode waveforms.  Returns 0 for zero data.
inline DualityReport duality_residual(const SineSpectrum& spec, const BoundaryCurve& curve,
                                      double tau, ObservationKind kind, double a, std::size_t M,
                                      std::size_t steps) {
  if (!curve.is_linear())
    throw std::invalid_argument("duality_residual: spectral waveforms need the linear wall");
  const double eps = curve.linear_rate();
  const std::size_t N = spec.modes();
  const pde::Trajectory traj = pde::solve(spec, curve, tau, M, steps);
  const std::size_t K = traj.states.size();
  const double dt = tau / double(K - 1);

  // observed output per time sample
  std::vector<std::vector<cplx>> output(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double t = traj.states[k].t;
    const double l = curve.eval(t).l;
    switch (kind) {
      case ObservationKind::BoundaryLeft:
        output[k] = {traj.traces[k].left / l};
        break;
      case ObservationKind::BoundaryRight:
        output[k] = {traj.traces[k].right / l};
        break;
      case ObservationKind::BoundaryBoth:
        output[k] = {traj.traces[k].left / l, traj.traces[k].right / l};
        break;
      case ObservationKind::Point:
        output[k] = {detail::interp_state(traj.states[k], a / l)};
        break;
    }
  }

  // retrograde accumulation: z' = -A* z - C* C w, z(tau) = 0, read in the
  // frozen spectral coordinates where the A* transport is already absorbed
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(N);
  auto source = [&](std::size_t k) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(N);
    const auto rows = detail::waveform_rows(eps, traj.states[k].t, N, kind, a);
    for (std::size_t c = 0; c < rows.size(); ++c) g += rows[c].conjugate() * output[k][c];
    return g;
  };
  Eigen::VectorXcd g_next = source(K - 1);
  for (std::size_t k = K - 1; k-- > 0;) {
    Eigen::VectorXcd g_here = source(k);
    z += 0.5 * dt * (g_here + g_next);
    g_next.swap(g_here);
  }

  std::vector<double> times(K), e(K);
  for (std::size_t k = 0; k < K; ++k) {
    times[k] = traj.states[k].t;
    double s = 0.0;
    for (const cplx& v : output[k]) s += std::norm(v);
    e[k] = s;
  }
  const double energy = trapezoid_samples(times, e);
  if (energy == 0.0) return {0.0, 0.0, 0.0};

  cplx pairing = 0.0;
  for (std::size_t n = 0; n < N; ++n) pairing += std::conj(spec.coefficients[n]) * z(n);
  return {pairing.real(), energy, std::abs(pairing - energy) / energy};
}

class NonObservableError : public std::runtime_error {
 public:
  NonObservableError(std::string msg, std::vector<cplx> kernel)
      : std::runtime_error(std::move(msg)), kernel_(std::move(kernel)) {}
  const std::vector<cplx>& kernel() const { return kernel_; }

 private:
  std::vector<cplx> kernel_;
};

struct ControlSolution {
  Eigen::VectorXcd w0;        // chosen initial datum, spectral coordinates
  Eigen::VectorXcd target;    // requested z(0)
  Eigen::VectorXcd achieved;  // z(0) from the retrograde re-simulation
  double residual = 0.0;      // |achieved - target| / |target|
  double cond = 0.0;          // condition number of the Gramian
};

/// Steers the retrograde problem to `target`: solves G w0 = target and
/// re-simulates z(0) by retrograde trapezoid integration of the observed
/// waveforms on an independent fine time grid.
inline ControlSolution steer(const GramianMatrix& gm, const Eigen::VectorXcd& target,
                             std::size_t resim_steps = 40000) {
  const std::size_t N = gm.modes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gm.G);
  const double trace = gm.G.real().trace();
  const double min_ev = es.eigenvalues()(0);
  if (min_ev < 1e-12 * trace) {
    Eigen::VectorXcd k = es.eigenvectors().col(0);
    throw NonObservableError(
        "steer: Gramian numerically singular (min eigenvalue " + std::to_string(min_ev) + ")",
        std::vector<cplx>(k.data(), k.data() + k.size()));
  }
  ControlSolution cs;
  cs.target = target;
  cs.cond = es.eigenvalues()(N - 1) / min_ev;
  cs.w0 = gm.G.ldlt().solve(target);

  // retrograde re-simulation on its own grid
  const double dt = gm.tau / double(resim_steps);
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(N);
  auto g_at = [&](double t) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(N);
    for (const auto& row : detail::waveform_rows(gm.epsilon, t, N, gm.kind, gm.a)) {
      const cplx obs = (row.array() * cs.w0.array()).sum();
      g += row.conjugate() * obs;
    }
    return g;
  };
  Eigen::VectorXcd g_next = g_at(gm.tau);
  for (std::size_t k = resim_steps; k-- > 0;) {
    Eigen::VectorXcd g_here = g_at(dt * double(k));
    z += 0.5 * dt * (g_here + g_next);
    g_next.swap(g_here);
  }
  cs.achieved = z;
  const double tn = target.norm();
  cs.residual = tn == 0.0 ? (cs.achieved).norm() : (cs.achieved - target).norm() / tn;
  return cs;
}

struct DualProblemDescriptor {
  std::string kind;                       // left | right | both
  std::string equation;                   // moving-domain dual equation
  std::vector<std::string> controlled;    // controlled endpoints
  std::vector<std::string> boundary_data; // Dirichlet datum per endpoint
  std::string terminal_condition;
};

/// Metadata record of the moving-domain dual control problem; labels
/// outputs, performs no computation.
inline DualProblemDescriptor dual_problem_descriptor(ObservationKind kind) {
  DualProblemDescriptor d;
  d.equation = "i h_t + h_xx - i (l'/l) h = 0 on 0 < x < l(t)";
  d.terminal_condition = "h(x,tau) = 0";
  switch (kind) {
    case ObservationKind::BoundaryLeft:
      d.kind = "left";
      d.controlled = {"x=0"};
      d.boundary_data = {"h(0,t) = -i l(t)^3 u_x(0,t)"};
      break;
    case ObservationKind::BoundaryRight:
      d.kind = "right";
      d.controlled = {"x=l(t)"};
      d.boundary_data = {"h(l(t),t) = -i l(t)^3 u_x(l(t),t)"};
      break;
    case ObservationKind::BoundaryBoth:
      d.kind = "both";
      d.controlled = {"x=0", "x=l(t)"};
      d.boundary_data = {"h(0,t) = -i l(t)^3 u_x(0,t)", "h(l(t),t) = -i l(t)^3 u_x(l(t),t)"};
      break;
    default:
      throw std::invalid_argument("dual_problem_descriptor: boundary kinds only");
  }
  return d;
}

}  // namespace mws::control
