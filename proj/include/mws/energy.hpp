#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mws/curves.hpp"
#include "mws/exact.hpp"
#include "mws/pde.hpp"
#include "mws/quad.hpp"

namespace mws::energy {

using curves::BoundaryCurve;

/// E(t) = 1/2 int |w|^2, F(t) = 1/2 int |w_y|^2, plus the accumulated
/// right-boundary term int_0^t l'(s)/(2 l(s)^2) |w_y(1,s)|^2 ds.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> E;
  std::vector<double> F;
  std::vector<double> right_trace_accum;
};

/// Energies of a discrete trajectory: trapezoid in space, centered
/// differences for w_y (one-sided at the walls), recorded traces for the
/// time accumulator.
inline EnergyTrace energies(const pde::Trajectory& traj) {
  if (traj.states.empty()) throw std::invalid_argument("energies: empty trajectory");
  EnergyTrace tr;
  const std::size_t M = traj.states.front().grid_size();
  const double h = 1.0 / static_cast<double>(M);
  std::vector<double> weight(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    tr.times.push_back(s.t);
    double e = 0.0;
    for (std::size_t j = 1; j < M; ++j) e += std::norm(s.values[j]);
    tr.E.push_back(0.5 * e * h);  // Dirichlet endpoints contribute nothing
    double f = 0.5 * (std::norm(traj.traces[k].left) + std::norm(traj.traces[k].right));
    for (std::size_t j = 1; j < M; ++j)
      f += std::norm((s.values[j + 1] - s.values[j - 1]) / (2.0 * h));
    tr.F.push_back(0.5 * f * h);
    const auto ev = traj.curve.eval(s.t);
    weight[k] = ev.lp / (2.0 * ev.l * ev.l) * std::norm(traj.traces[k].right);
  }
  tr.right_trace_accum = cumulative_trapezoid(tr.times, weight);
  return tr;
}

/// High-accuracy energy trace of the exact series: Simpson in space on the
/// analytic w and w_y, dense Simpson-sampled accumulator in time.
inline EnergyTrace exact_energy_trace(const exact::ExactSolution& sol, double tau,
                                      std::size_t time_samples = 101,
                                      std::size_t space_points = 2048,
                                      std::size_t accum_oversample = 600) {
  if (time_samples < 2) throw std::invalid_argument("exact_energy_trace: time_samples >= 2");
  EnergyTrace tr;
  // accumulator on a fine grid, then read off at the coarse sample times
  const std::size_t fine_per = std::max<std::size_t>(accum_oversample, 2);
  const std::size_t nfine = even_intervals((time_samples - 1) * fine_per);
  std::vector<double> tfine(nfine + 1), wfine(nfine + 1);
  for (std::size_t k = 0; k <= nfine; ++k) {
    const double t = tau * static_cast<double>(k) / static_cast<double>(nfine);
    const double l = sol.ell(t);
    tfine[k] = t;
    wfine[k] = sol.epsilon / (2.0 * l * l) * std::norm(l * exact::neumann_trace_right(sol, t));
  }
  const std::vector<double> accum_fine = cumulative_trapezoid(tfine, wfine);

  for (std::size_t k = 0; k < time_samples; ++k) {
    const double t = tau * static_cast<double>(k) / static_cast<double>(time_samples - 1);
    tr.times.push_back(t);
    tr.E.push_back(0.5 * simpson([&](double y) { return std::norm(exact::eval_w(sol, y, t)); },
                                 0.0, 1.0, space_points));
    tr.F.push_back(0.5 * simpson([&](double y) { return std::norm(exact::eval_w_y(sol, y, t)); },
                                 0.0, 1.0, space_points));
    tr.right_trace_accum.push_back(accum_fine[k * fine_per]);
  }
  return tr;
}

/// max_k | l(t_k) E(t_k) - E(0) | / E(0)  (zero data gives zero residual).
inline double check_first_identity(const EnergyTrace& trace, const BoundaryCurve& curve) {
  if (trace.E.empty()) return 0.0;
  const double E0 = trace.E.front();
  if (E0 == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    worst = std::max(worst, std::abs(curve.eval(trace.times[k]).l * trace.E[k] - E0) / E0);
  return worst;
}

struct SecondEnergyBounds {
  bool lower_ok = false;        // pi^2/l(t) E(0) <= F(t)
  bool upper_ok = false;        // F(t) <= l(t) F(0)
  double lower_margin = 0.0;    // min over t of F(t) - pi^2/l(t) E(0)
  double upper_margin = 0.0;    // min over t of l(t) F(0) - F(t)
  bool theory_applies = true;   // l' >= 0 on the horizon
};

inline SecondEnergyBounds check_second_bounds(const EnergyTrace& trace,
                                              const BoundaryCurve& curve,
                                              double rel_tol = 1e-6) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  SecondEnergyBounds b;
  if (trace.F.empty()) return b;
  const double E0 = trace.E.front(), F0 = trace.F.front();
  const double scale = std::max(F0, 1e-300);
  b.lower_ok = b.upper_ok = true;
  b.lower_margin = b.upper_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const auto ev = curve.eval(trace.times[k]);
    if (ev.lp < -1e-12) b.theory_applies = false;
    const double lo = trace.F[k] - pi2 / ev.l * E0;
    const double up = ev.l * F0 - trace.F[k];
    b.lower_margin = std::min(b.lower_margin, lo);
    b.upper_margin = std::min(b.upper_margin, up);
    if (lo < -rel_tol * scale) b.lower_ok = false;
    if (up < -rel_tol * scale) b.upper_ok = false;
  }
  return b;
}

/// Residual of the variation-of-constants form
/// F(t) = l(t) F(0) - l(t) int_0^t l'(s)/(2 l(s)^2) |w_y(1,s)|^2 ds,
/// relative to F(0).
inline double f_variation_residual(const EnergyTrace& trace, const BoundaryCurve& curve) {
  if (trace.F.empty()) return 0.0;
  const double F0 = trace.F.front();
  if (F0 == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double l = curve.eval(trace.times[k]).l;
    worst = std::max(
        worst, std::abs(trace.F[k] - l * F0 + l * trace.right_trace_accum[k]) / F0);
  }
  return worst;
}

}  // namespace mws::energy
