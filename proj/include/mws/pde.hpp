#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "mws/curves.hpp"
#include "mws/spectral.hpp"

namespace mws::pde {

using mws::cplx;
using curves::BoundaryCurve;
using spectral::SineSpectrum;

/// State on the fixed domain [0,1], uniform grid y_j = j/M, Dirichlet ends.
struct FixedState {
  std::vector<cplx> values;  // size M+1, values[0] = values[M] = 0
  double t = 0.0;

  std::size_t grid_size() const { return values.empty() ? 0 : values.size() - 1; }

  double l2_norm() const {
    const double h = 1.0 / static_cast<double>(grid_size());
    double s = 0.0;  // trapezoid; endpoint terms vanish with the BC
    for (const cplx& v : values) s += std::norm(v);
    return std::sqrt(s * h);
  }
};

struct BoundaryTraces {
  cplx left;   // w_y(0,t)
  cplx right;  // w_y(1,t)
};

/// Time-indexed fixed-domain solution with per-step boundary traces.
struct Trajectory {
  std::vector<FixedState> states;
  std::vector<BoundaryTraces> traces;  // aligned with states
  BoundaryCurve curve;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Tridiagonal realization of A(t)w = (i/l^2) w_yy + (l'/l) y w_y on the
/// interior grid points j = 1..M-1; Dirichlet rows are implicit.
struct OperatorStamp {
  double t = 0.0;
  std::size_t M = 0;
  std::vector<cplx> lower, diag, upper;  // sizes M-2, M-1, M-2

  /// Applies the stamp to a full grid vector (Dirichlet ends assumed).
  std::vector<cplx> apply(const std::vector<cplx>& w) const {
    if (w.size() != M + 1) throw std::invalid_argument("OperatorStamp::apply: size mismatch");
    std::vector<cplx> out(M + 1, cplx(0.0));
    for (std::size_t j = 1; j < M; ++j) {
      cplx v = diag[j - 1] * w[j];
      if (j > 1) v += lower[j - 2] * w[j - 1];
      if (j < M - 1) v += upper[j - 1] * w[j + 1];
      // boundary neighbours are zero by the Dirichlet condition
      out[j] = v;
    }
    return out;
  }
};

inline OperatorStamp assemble_operator(const BoundaryCurve& curve, double t, std::size_t M) {
  if (M < 8) throw std::invalid_argument("assemble_operator: M >= 8 required");
  const auto ev = curve.eval(t);
  const double h = 1.0 / static_cast<double>(M);
  const cplx diff = cplx(0.0, 1.0) / (ev.l * ev.l * h * h);
  const double drift = ev.lp / ev.l;
  OperatorStamp st;
  st.t = t;
  st.M = M;
  st.lower.resize(M - 2);
  st.diag.resize(M - 1);
  st.upper.resize(M - 2);
  for (std::size_t j = 1; j < M; ++j) {
    const double yj = h * static_cast<double>(j);
    st.diag[j - 1] = -2.0 * diff;
    if (j > 1) st.lower[j - 2] = diff - drift * yj / (2.0 * h);
    if (j < M - 1) st.upper[j - 1] = diff + drift * yj / (2.0 * h);
  }
  return st;
}

/// Thomas solve for a complex tridiagonal system (in-place scratch copies).
inline std::vector<cplx> solve_tridiagonal(std::vector<cplx> lower, std::vector<cplx> diag,
                                           std::vector<cplx> upper, std::vector<cplx> rhs,
                                           const std::string& context) {
  const std::size_t n = diag.size();
  for (std::size_t j = 1; j < n; ++j) {
    if (std::abs(diag[j - 1]) == 0.0)
      throw std::runtime_error("singular tridiagonal system: " + context);
    const cplx m = lower[j - 1] / diag[j - 1];
    diag[j] -= m * upper[j - 1];
    rhs[j] -= m * rhs[j - 1];
  }
  if (std::abs(diag[n - 1]) == 0.0)
    throw std::runtime_error("singular tridiagonal system: " + context);
  std::vector<cplx> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) x[j] = (rhs[j] - upper[j] * x[j + 1]) / diag[j];
  return x;
}

/// One Crank-Nicolson step with the midpoint operator:
/// (I - dt/2 A(t+dt/2)) w_new = (I + dt/2 A(t+dt/2)) w_old.
inline FixedState step(const FixedState& state, const BoundaryCurve& curve, double dt,
                       std::size_t M) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
  if (state.values.size() != M + 1) throw std::invalid_argument("step: state/grid mismatch");
  const OperatorStamp st = assemble_operator(curve, state.t + 0.5 * dt, M);
  const std::size_t n = M - 1;
  std::vector<cplx> rhs(n), dlo(n - 1), ddi(n), dup(n - 1);
  const cplx half = cplx(0.5 * dt, 0.0);
  for (std::size_t j = 1; j < M; ++j) {
    cplx v = (1.0 + half * st.diag[j - 1]) * state.values[j];
    if (j > 1) v += half * st.lower[j - 2] * state.values[j - 1];
    if (j < M - 1) v += half * st.upper[j - 1] * state.values[j + 1];
    rhs[j - 1] = v;
    ddi[j - 1] = 1.0 - half * st.diag[j - 1];
    if (j > 1) dlo[j - 2] = -half * st.lower[j - 2];
    if (j < M - 1) dup[j - 1] = -half * st.upper[j - 1];
  }
  FixedState out;
  out.t = state.t + dt;
  out.values.assign(M + 1, cplx(0.0));
  const std::string ctx = "t=" + std::to_string(state.t) + " dt=" + std::to_string(dt) +
                          " M=" + std::to_string(M);
  auto interior = solve_tridiagonal(std::move(dlo), std::move(ddi), std::move(dup),
                                    std::move(rhs), ctx);
  for (std::size_t j = 1; j < M; ++j) out.values[j] = interior[j - 1];
  return out;
}

/// Second-order one-sided boundary derivatives.
inline BoundaryTraces boundary_traces(const FixedState& s) {
  const std::size_t M = s.grid_size();
  const double h = 1.0 / static_cast<double>(M);
  BoundaryTraces tr;
  tr.left = (-3.0 * s.values[0] + 4.0 * s.values[1] - s.values[2]) / (2.0 * h);
  tr.right = (3.0 * s.values[M] - 4.0 * s.values[M - 1] + s.values[M - 2]) / (2.0 * h);
  return tr;
}

/// Crank-Nicolson time-stepping of the transformed problem; initial grid
/// data is sampled pointwise from the spectral reconstruction.
inline Trajectory solve(const SineSpectrum& spec, const BoundaryCurve& curve, double tau,
                        std::size_t M, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("solve: steps >= 1 required");
  const double dt = tau / static_cast<double>(steps);
  FixedState state;
  state.t = 0.0;
  state.values.resize(M + 1);
  for (std::size_t j = 0; j <= M; ++j)
    state.values[j] = spectral::reconstruct(spec, static_cast<double>(j) / M);
  state.values.front() = state.values.back() = cplx(0.0);

  Trajectory traj{{}, {}, curve};
  traj.states.reserve(steps + 1);
  traj.traces.reserve(steps + 1);
  traj.states.push_back(state);
  traj.traces.push_back(boundary_traces(state));
  for (std::size_t k = 0; k < steps; ++k) {
    state = step(state, curve, dt, M);
    state.t = dt * static_cast<double>(k + 1);  // avoid accumulated roundoff
    traj.states.push_back(state);
    traj.traces.push_back(boundary_traces(state));
  }
  return traj;
}

/// sup_{[0,tau]} |l'(t) / (2 l(t))| plus a small margin; any coercivity
/// shift above this value makes Re<(A(t)+w I)u,u> positive.
inline double coercivity_shift(const BoundaryCurve& curve, double tau) {
  return 0.5 * curve.sup_log_derivative(tau) + 1e-9;
}

}  // namespace mws::pde
