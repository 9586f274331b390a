#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "mws/pde.hpp"
#include "mws/quad.hpp"
#include "mws/spectral.hpp"

namespace mws::exact {

using mws::cplx;
using spectral::SineSpectrum;

/// Truncated series solution for the linearly moving wall l(t) = 1 + eps*t:
/// u(x,t) = sum a_n sqrt(2/l) sin(n pi x / l) e^{i(eps x^2/(4l) - n^2 pi^2 t/l)}.
/// eps = 0 degenerates to the autonomous particle-in-a-box series.
struct ExactSolution {
  SineSpectrum spectrum;
  double epsilon = 0.0;

  double ell(double t) const { return 1.0 + epsilon * t; }
};

namespace detail {
inline cplx series_u(const ExactSolution& sol, double x, double t) {
  const double pi = std::numbers::pi;
  const double l = sol.ell(t);
  const double amp = std::sqrt(2.0 / l);
  const cplx chirp = std::exp(cplx(0.0, sol.epsilon * x * x / (4.0 * l)));
  cplx sum = 0.0;
  for (std::size_t k = 0; k < sol.spectrum.coefficients.size(); ++k) {
    const double n = double(k) + 1.0;
    sum += sol.spectrum.coefficients[k] * std::sin(n * pi * x / l) *
           std::exp(cplx(0.0, -n * n * pi * pi * t / l));
  }
  return amp * chirp * sum;
}
}  // namespace detail

inline cplx eval_u(const ExactSolution& sol, double x, double t) {
  if (t < 0.0) throw std::domain_error("eval_u: t must be nonnegative");
  if (x < -1e-12 || x > sol.ell(t) + 1e-12)
    throw std::domain_error("eval_u: x outside [0, l(t)]");
  return detail::series_u(sol, x, t);
}

/// Same series without the domain guard; the formula extends smoothly and
/// finite-difference probes near the moving endpoint need that extension.
inline cplx eval_u_unchecked(const ExactSolution& sol, double x, double t) {
  return detail::series_u(sol, x, t);
}

/// u_x(0,t) = sum a_n sqrt(2/l) e^{-i pi^2 n^2 t/l} n pi / l.
inline cplx neumann_trace_left(const ExactSolution& sol, double t) {
  const double pi = std::numbers::pi;
  const double l = sol.ell(t);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < sol.spectrum.coefficients.size(); ++k) {
    const double n = double(k) + 1.0;
    sum += sol.spectrum.coefficients[k] * (n * pi / l) *
           std::exp(cplx(0.0, -n * n * pi * pi * t / l));
  }
  return std::sqrt(2.0 / l) * sum;
}

/// u_x(l(t),t) = sum (-1)^n a_n sqrt(2/l) e^{-i pi^2 n^2 t/l} (n pi / l) e^{i eps l/4}.
inline cplx neumann_trace_right(const ExactSolution& sol, double t) {
  const double pi = std::numbers::pi;
  const double l = sol.ell(t);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < sol.spectrum.coefficients.size(); ++k) {
    const double n = double(k) + 1.0;
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^n for n = k+1
    sum += sign * sol.spectrum.coefficients[k] * (n * pi / l) *
           std::exp(cplx(0.0, -n * n * pi * pi * t / l));
  }
  return std::sqrt(2.0 / l) * std::exp(cplx(0.0, sol.epsilon * l / 4.0)) * sum;
}

inline cplx point_observation(const ExactSolution& sol, double a, double t) {
  if (a <= 0.0 || a >= 1.0)
    throw std::domain_error("point_observation: a must lie in (0,1)");
  return eval_u(sol, a, t);
}

/// Fixed-domain transform w(y,t) = u(l(t) y, t).
inline cplx eval_w(const ExactSolution& sol, double y, double t) {
  return detail::series_u(sol, sol.ell(t) * y, t);
}

/// d/dy of the transform, differentiated term by term.
inline cplx eval_w_y(const ExactSolution& sol, double y, double t) {
  const double pi = std::numbers::pi;
  const double l = sol.ell(t);
  const cplx chirp = std::exp(cplx(0.0, sol.epsilon * l * y * y / 4.0));
  cplx sum = 0.0;
  for (std::size_t k = 0; k < sol.spectrum.coefficients.size(); ++k) {
    const double n = double(k) + 1.0;
    sum += sol.spectrum.coefficients[k] * std::exp(cplx(0.0, -n * n * pi * pi * t / l)) *
           (n * pi * std::cos(n * pi * y) +
            cplx(0.0, sol.epsilon * l * y / 2.0) * std::sin(n * pi * y));
  }
  return std::sqrt(2.0 / l) * chirp * sum;
}

/// Samples the transformed solution on the uniform fixed grid, with the
/// boundary traces taken from the analytic series (not finite differences).
inline pde::Trajectory sample_trajectory(const ExactSolution& sol, double tau, std::size_t M,
                                         std::size_t steps) {
  pde::Trajectory traj{{}, {}, curves::BoundaryCurve::linear(sol.epsilon, tau)};
  traj.states.reserve(steps + 1);
  traj.traces.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = tau * static_cast<double>(k) / static_cast<double>(steps);
    pde::FixedState s;
    s.t = t;
    s.values.resize(M + 1);
    for (std::size_t j = 0; j <= M; ++j)
      s.values[j] = eval_w(sol, static_cast<double>(j) / M, t);
    s.values.front() = s.values.back() = cplx(0.0);
    const double l = sol.ell(t);
    traj.states.push_back(std::move(s));
    traj.traces.push_back({l * neumann_trace_left(sol, t), l * neumann_trace_right(sol, t)});
  }
  return traj;
}

/// Gram matrix of b_n(t) = (sqrt(pi)/(sqrt(2) l(t))) e^{-i pi^2 n^2 t/l(t)}
/// over [0, 2/(pi - 2 eps)], computed by composite Simpson quadrature.
/// The system is orthonormal, so the result approximates the identity.
inline Eigen::MatrixXcd bn_gram(double eps, std::size_t N, std::size_t quadrature_points = 0) {
  const double pi = std::numbers::pi;
  if (eps <= 0.0 || eps >= pi / 2.0)
    throw std::domain_error("bn_gram: eps must lie in (0, pi/2)");
  if (quadrature_points == 0) quadrature_points = 200 * N * N;
  const double tau = 2.0 / (pi - 2.0 * eps);
  Eigen::MatrixXcd G(N, N);
  for (std::size_t m = 1; m <= N; ++m)
    for (std::size_t n = 1; n <= N; ++n) {
      G(m - 1, n - 1) = simpson(
          [&](double t) {
            const double l = 1.0 + eps * t;
            const double phase = pi * pi * (double(n * n) - double(m * m)) * t / l;
            return (pi / (2.0 * l * l)) * std::exp(cplx(0.0, phase));
          },
          0.0, tau, quadrature_points);
    }
  return G;
}

/// Inner products <f, b_n> of a same-shape waveform with phase rate +c pi^2
/// against the b_n system (used to exhibit that the system is not a basis).
inline Eigen::VectorXcd bn_inner_products(double eps, double phase_rate, std::size_t N,
                                          std::size_t quadrature_points = 0) {
  const double pi = std::numbers::pi;
  if (eps <= 0.0 || eps >= pi / 2.0)
    throw std::domain_error("bn_inner_products: eps must lie in (0, pi/2)");
  if (quadrature_points == 0) quadrature_points = 200 * N * N;
  const double tau = 2.0 / (pi - 2.0 * eps);
  Eigen::VectorXcd v(N);
  for (std::size_t n = 1; n <= N; ++n) {
    v(n - 1) = simpson(
        [&](double t) {
          const double l = 1.0 + eps * t;
          const double phase = (phase_rate + double(n * n)) * pi * pi * t / l;
          return (pi / (2.0 * l * l)) * std::exp(cplx(0.0, phase));
        },
        0.0, tau, quadrature_points);
  }
  return v;
}

}  // namespace mws::exact
