#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mws/curves.hpp"
#include "mws/exact.hpp"
#include "mws/pde.hpp"
#include "mws/quad.hpp"
#include "mws/spectral.hpp"

namespace mws::observability {

using mws::cplx;
using curves::BoundaryCurve;
using exact::ExactSolution;
using spectral::SineSpectrum;

/// Real-valued multiplier q(y) with its derivatives and exact sup-norms.
struct MultiplierFunction {
  std::string name;
  std::function<double(double)> q, qy, qyy;
  double sup_q, sup_qy, sup_qyy;

  static MultiplierFunction left_weight() {  // q(0)=1, q(1)=0
    return {"1-y", [](double y) { return 1.0 - y; }, [](double) { return -1.0; },
            [](double) { return 0.0; }, 1.0, 1.0, 0.0};
  }
  static MultiplierFunction right_weight() {  // q(0)=0, q(1)=1
    return {"y", [](double y) { return y; }, [](double) { return 1.0; },
            [](double) { return 0.0; }, 1.0, 1.0, 0.0};
  }
};

/// Explicit admissibility constant
/// C1(tau) = [(5 l^2 + (pi^2-3) l + pi^2)/(4 l)] |q|_inf
///         + [pi (l-1)/2 + int_0^tau dt/l] |q_y|_inf
///         + [int_0^tau pi/(2 l) dt] |q_yy|_inf,  l = l(tau).
inline double admissibility_constant(const BoundaryCurve& curve, double tau,
                                     const MultiplierFunction& q) {
  const double pi = std::numbers::pi;
  const double l = curve.eval(tau).l;
  double int_inv_l;
  if (curve.is_linear()) {
    const double e = curve.linear_rate();
    int_inv_l = (e == 0.0) ? tau : std::log1p(e * tau) / e;
  } else {
    int_inv_l = simpson([&](double t) { return 1.0 / curve.eval(t).l; }, 0.0, tau, 4096);
  }
  const double term_q = (5.0 * l * l + (pi * pi - 3.0) * l + pi * pi) / (4.0 * l) * q.sup_q;
  const double term_qy = (0.5 * pi * (l - 1.0) + int_inv_l) * q.sup_qy;
  const double term_qyy = 0.5 * pi * int_inv_l * q.sup_qyy;
  return term_q + term_qy + term_qyy;
}

enum class ObservationKind { BoundaryLeft, BoundaryRight, BoundaryBoth, Point };

inline std::string to_string(ObservationKind k) {
  switch (k) {
    case ObservationKind::BoundaryLeft: return "boundary_left";
    case ObservationKind::BoundaryRight: return "boundary_right";
    case ObservationKind::BoundaryBoth: return "boundary_both";
    case ObservationKind::Point: return "point";
  }
  return "?";
}

/// Observation Gramian on the truncated spectral space together with the
/// weight matrix defining the norm on the data side.
struct GramianMatrix {
  Eigen::MatrixXcd G;
  Eigen::VectorXd W_diag;  // positive; diag(pi^2 n^2) for H^1_0, ones for L2
  double tau = 0.0;
  double epsilon = 0.0;
  ObservationKind kind = ObservationKind::BoundaryBoth;
  double a = 0.0;  // interior point for kind == Point

  std::size_t modes() const { return static_cast<std::size_t>(G.rows()); }
};

namespace detail {

/// int_0^S (1 - eps s) e^{-i pi^2 delta s} ds; the s = t/l(t) substitution
/// turns the boundary-trace products into this pure-exponential integral.
inline cplx trace_product_integral(double eps, double S, double delta) {
  const double pi = std::numbers::pi;
  if (delta == 0.0) return cplx(S - 0.5 * eps * S * S, 0.0);
  const cplx ia(0.0, -pi * pi * delta);
  const cplx eS = std::exp(ia * S);
  return ((1.0 - eps * S) * eS - 1.0) / ia + (eps / ia) * (eS - 1.0) / ia;
}

}  // namespace detail

/// Neumann-trace Gramian for the linear wall, assembled in closed form
/// (exactly, no quadrature).  Weight matrix: diag(pi^2 n^2).
inline GramianMatrix boundary_gramian(double eps, double tau, std::size_t N,
                                      ObservationKind which) {
  if (eps < 0.0) throw std::domain_error("boundary_gramian: eps must be nonnegative");
  if (N < 1) throw std::invalid_argument("boundary_gramian: N >= 1");
  if (which == ObservationKind::Point)
    throw std::invalid_argument("boundary_gramian: use point_gramian for point observation");
  const double pi = std::numbers::pi;
  const double S = tau / (1.0 + eps * tau);
  GramianMatrix gm;
  gm.tau = tau;
  gm.epsilon = eps;
  gm.kind = which;
  gm.G.resize(N, N);
  gm.W_diag.resize(N);
  for (std::size_t n = 1; n <= N; ++n) gm.W_diag(n - 1) = pi * pi * double(n * n);
  for (std::size_t m = 1; m <= N; ++m)
    for (std::size_t n = 1; n <= N; ++n) {
      const double delta = double(n * n) - double(m * m);
      const cplx base =
          2.0 * pi * pi * double(m) * double(n) * detail::trace_product_integral(eps, S, delta);
      double factor = 0.0;
      const double parity = ((m + n) % 2 == 0) ? 1.0 : -1.0;
      switch (which) {
        case ObservationKind::BoundaryLeft: factor = 1.0; break;
        case ObservationKind::BoundaryRight: factor = parity; break;
        case ObservationKind::BoundaryBoth: factor = 1.0 + parity; break;
        default: break;
      }
      gm.G(m - 1, n - 1) = factor * base;
    }
  return gm;
}

/// Point-observation Gramian from the waveforms
/// psi_n(t) = sqrt(2/l) e^{-i pi^2 n^2 t/l} sin(n pi a / l), assembled as a
/// positively weighted sum of outer products (hence PSD by construction).
/// Weight matrix: identity (L2 normalization).
inline GramianMatrix point_gramian(double eps, double a, double tau, std::size_t N,
                                   std::size_t quadrature_points = 0) {
  if (a <= 0.0 || a >= 1.0) throw std::domain_error("point_gramian: a must lie in (0,1)");
  if (eps < 0.0) throw std::domain_error("point_gramian: eps must be nonnegative");
  const double pi = std::numbers::pi;
  if (quadrature_points == 0)
    quadrature_points = std::max<std::size_t>(
        4000, static_cast<std::size_t>(64.0 * double(N * N) * tau) + 1000);
  quadrature_points = even_intervals(quadrature_points);
  GramianMatrix gm;
  gm.tau = tau;
  gm.epsilon = eps;
  gm.kind = ObservationKind::Point;
  gm.a = a;
  gm.W_diag = Eigen::VectorXd::Ones(N);
  gm.G = Eigen::MatrixXcd::Zero(N, N);
  const double h = tau / double(quadrature_points);
  Eigen::VectorXcd psi(N);
  for (std::size_t k = 0; k <= quadrature_points; ++k) {
    const double t = h * double(k);
    const double l = 1.0 + eps * t;
    for (std::size_t n = 1; n <= N; ++n)
      psi(n - 1) = std::sqrt(2.0 / l) * std::sin(double(n) * pi * a / l) *
                   std::exp(cplx(0.0, -double(n * n) * pi * pi * t / l));
    double w = (k == 0 || k == quadrature_points) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    gm.G.noalias() += (w * h / 3.0) * psi.conjugate() * psi.transpose();
  }
  return gm;
}

struct ObservabilityConstants {
  double c_est;  // smallest generalized eigenvalue of (G, W)
  double C_est;  // largest
};

/// Sharp constants over the truncated space: extremal generalized
/// eigenvalues of (G, W) via the symmetric reduction W^{-1/2} G W^{-1/2}.
inline ObservabilityConstants observability_constant_estimate(const GramianMatrix& gm) {
  const auto N = gm.G.rows();
  const double scale = std::max(gm.G.cwiseAbs().maxCoeff(), 1e-300);
  if ((gm.G - gm.G.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("observability_constant_estimate: Gramian not Hermitian");
  Eigen::VectorXd winv = gm.W_diag.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd B = winv.asDiagonal() * gm.G * winv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (B + B.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(N - 1)};
}

/// Eigenvector of the smallest generalized eigenvalue, in spectral coordinates.
inline Eigen::VectorXcd min_eigenvector(const GramianMatrix& gm) {
  Eigen::VectorXd winv = gm.W_diag.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd B = winv.asDiagonal() * gm.G * winv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (B + B.adjoint()));
  return winv.asDiagonal() * es.eigenvectors().col(0);
}

/// Brute-force lower envelope of the Rayleigh quotient a^H G a / a^H W a
/// over seeded random unit-W-norm spectra.  Always >= c_est.
inline double random_search_min(const GramianMatrix& gm, std::size_t samples = 100000,
                                std::uint64_t seed = 20240817) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto N = gm.G.rows();
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd a(N);
  for (std::size_t s = 0; s < samples; ++s) {
    double wn = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      a(k) = cplx(g(rng), g(rng));
      wn += gm.W_diag(k) * std::norm(a(k));
    }
    const double rq = (a.adjoint() * gm.G * a).real()(0, 0) / wn;
    best = std::min(best, rq);
  }
  return best;
}

/// Boundary-trace energy over the H^1_0 norm of the initial state:
/// [int_0^tau (|u_x(0,t)|^2 + |u_x(l,t)|^2) dt] / |u0|^2_{H^1_0}.
inline double admissibility_ratio(const ExactSolution& sol, double tau) {
  const auto& a = sol.spectrum.coefficients;
  const std::size_t N = a.size();
  const double h1 = spectral::h1_seminorms(sol.spectrum).exact;
  if (h1 == 0.0) throw std::domain_error("admissibility_ratio: zero initial data");
  const auto gl = boundary_gramian(sol.epsilon, tau, N, ObservationKind::BoundaryBoth);
  Eigen::VectorXcd av(N);
  for (std::size_t k = 0; k < N; ++k) av(k) = a[k];
  const double num = (av.adjoint() * gl.G * av).real()(0, 0);
  return num / (h1 * h1);
}

/// Same ratio read off a discrete trajectory (u_x = w_y / l at both walls).
inline double admissibility_ratio(const pde::Trajectory& traj) {
  std::vector<double> t, f;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double l = traj.curve.eval(traj.states[k].t).l;
    t.push_back(traj.states[k].t);
    f.push_back((std::norm(traj.traces[k].left) + std::norm(traj.traces[k].right)) / (l * l));
  }
  const auto& s0 = traj.states.front();
  const std::size_t M = s0.grid_size();
  const double h = 1.0 / double(M);
  double h1sq = 0.0;
  for (std::size_t j = 0; j < M; ++j) h1sq += std::norm((s0.values[j + 1] - s0.values[j]) / h) * h;
  if (h1sq == 0.0) throw std::domain_error("admissibility_ratio: zero initial data");
  return trapezoid_samples(t, f) / h1sq;
}

/// Numerical evaluation of the multiplier identity: returns |sum of terms|
/// normalized by the largest term magnitude (trapezoid in both variables;
/// boundary w_y from the recorded traces, interior by centered differences).
inline double multiplier_residual(const pde::Trajectory& traj, const MultiplierFunction& q) {
  const std::size_t K = traj.states.size();
  if (K < 2) throw std::invalid_argument("multiplier_residual: need a time-resolved trajectory");
  const std::size_t M = traj.states.front().grid_size();
  const double h = 1.0 / double(M);

  auto wy_at = [&](std::size_t k, std::size_t j) -> cplx {
    if (j == 0) return traj.traces[k].left;
    if (j == M) return traj.traces[k].right;
    return (traj.states[k].values[j + 1] - traj.states[k].values[j - 1]) / (2.0 * h);
  };

  // spatial boundary bracket at t = 0 and t = tau
  auto bracket = [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= M; ++j) {
      const double wgt = (j == 0 || j == M) ? 0.5 : 1.0;
      const cplx v = cplx(0.0, 0.5) * q.q(h * double(j)) * std::conj(wy_at(k, j)) *
                     traj.states[k].values[j];
      acc += wgt * v.real();
    }
    return acc * h;
  };
  const double term1 = bracket(K - 1) - bracket(0);
  const double term2 = 0.0;  // q_t == 0 for the presets

  std::vector<double> times(K), f3(K), f4(K), f5(K), f6(K), f7(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double t = traj.states[k].t;
    const auto ev = traj.curve.eval(t);
    times[k] = t;
    f3[k] = (q.q(1.0) * std::norm(traj.traces[k].right) -
             q.q(0.0) * std::norm(traj.traces[k].left)) /
            (2.0 * ev.l * ev.l);
    double a4 = 0.0, a5 = 0.0, a6 = 0.0, a7 = 0.0;
    for (std::size_t j = 0; j <= M; ++j) {
      const double wgt = (j == 0 || j == M) ? 0.5 : 1.0;
      const double y = h * double(j);
      const cplx wy = wy_at(k, j);
      const cplx w = traj.states[k].values[j];
      a4 += wgt * std::norm(wy) * q.qy(y);
      a5 += wgt * (wy * std::conj(w) * q.qyy(y)).real();
      a6 += wgt * (cplx(0.0, 1.0) * y * q.q(y) * std::norm(wy)).real();
      a7 += wgt * (cplx(0.0, 0.5) * y * wy * std::conj(w) * q.qy(y)).real();
    }
    f4[k] = -a4 * h / (ev.l * ev.l);
    f5[k] = -a5 * h / (2.0 * ev.l * ev.l);
    f6[k] = -a6 * h * ev.lp / ev.l;
    f7[k] = -a7 * h * ev.lp / ev.l;
  }
  const double term3 = trapezoid_samples(times, f3);
  const double term4 = trapezoid_samples(times, f4);
  const double term5 = trapezoid_samples(times, f5);
  const double term6 = trapezoid_samples(times, f6);
  const double term7 = trapezoid_samples(times, f7);

  const double terms[] = {term1, term2, term3, term4, term5, term6, term7};
  double sum = 0.0, largest = 0.0;
  for (double v : terms) {
    sum += v;
    largest = std::max(largest, std::abs(v));
  }
  // Natural scale of the identity: the q-weighted boundary energy.  When the
  // terms vanish analytically (constant q, frozen wall) the largest term is
  // pure roundoff and must not be used as the denominator.
  std::vector<double> fs(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto ev = traj.curve.eval(times[k]);
    fs[k] = q.sup_q *
            (std::norm(traj.traces[k].right) + std::norm(traj.traces[k].left)) /
            (2.0 * ev.l * ev.l);
  }
  const double scale = std::max(largest, trapezoid_samples(times, fs));
  if (scale == 0.0) return 0.0;
  return std::abs(sum) / scale;
}

/// (int_0^tau |u(a,t)|^p dt)^{1/p} by dense quadrature.
inline double lp_observation(const ExactSolution& sol, double a, double tau, double p,
                             std::size_t quadrature_points = 0) {
  if (p <= 0.0 || p >= 2.0) throw std::domain_error("lp_observation: p must lie in (0,2)");
  if (a <= 0.0 || a >= 1.0) throw std::domain_error("lp_observation: a must lie in (0,1)");
  const std::size_t N = sol.spectrum.modes();
  if (quadrature_points == 0)
    quadrature_points = std::max<std::size_t>(
        4000, static_cast<std::size_t>(64.0 * double(N * N) * tau) + 1000);
  const double integral = simpson(
      [&](double t) { return std::pow(std::abs(exact::eval_u_unchecked(sol, a, t)), p); }, 0.0,
      tau, quadrature_points);
  return std::pow(integral, 1.0 / p);
}

/// int_0^tau |u(a,t)|^p dt (un-rooted; used by the Hoelder-chain checks).
inline double lp_power_integral(const ExactSolution& sol, double a, double tau, double p,
                                std::size_t quadrature_points = 20000) {
  return simpson(
      [&](double t) { return std::pow(std::abs(exact::eval_u_unchecked(sol, a, t)), p); }, 0.0,
      tau, quadrature_points);
}

}  // namespace mws::observability
