#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mws/exact.hpp"
#include "mws/pde.hpp"

using namespace mws;
using namespace mws::pde;
const double pi = std::numbers::pi;

namespace {

// discrete L2 inner product h * sum conj(v) w over the full grid
cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const double h = 1.0 / double(a.size() - 1);
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(b[j]) * a[j];
  return s * h;
}

// smooth random Dirichlet grid vector from a handful of sine modes
std::vector<cplx> smooth_vector(std::size_t M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> c(5);
  for (auto& v : c) v = cplx(g(rng), g(rng));
  std::vector<cplx> w(M + 1, cplx(0.0));
  for (std::size_t j = 1; j < M; ++j) {
    const double y = double(j) / double(M);
    for (int n = 1; n <= 5; ++n) w[j] += c[n - 1] * std::sin(n * pi * y);
  }
  return w;
}

}  // namespace

TEST_CASE("operator stamp structure") {
  const std::size_t M = 16;
  const double h = 1.0 / double(M);
  // autonomous: pure i * Laplacian / h^2
  auto st0 = assemble_operator(curves::BoundaryCurve::linear(0.0, 1.0), 0.3, M);
  for (std::size_t j = 0; j < M - 1; ++j)
    CHECK(std::abs(st0.diag[j] - cplx(0.0, -2.0) / (h * h)) < 1e-12);
  for (std::size_t j = 0; j < M - 2; ++j) {
    CHECK(std::abs(st0.lower[j] - cplx(0.0, 1.0) / (h * h)) < 1e-12);
    CHECK(std::abs(st0.upper[j] - cplx(0.0, 1.0) / (h * h)) < 1e-12);
  }
  // linear wall at t=0: diffusion i/h^2, drift 0.5 y_j / (2h)
  auto st = assemble_operator(curves::BoundaryCurve::linear(0.5, 1.0), 0.0, M);
  const std::size_t j = 5;
  const double yj = h * double(j);
  CHECK(std::abs(st.upper[j - 1] - (cplx(0.0, 1.0) / (h * h) + 0.5 * yj / (2.0 * h))) < 1e-12);
  CHECK(std::abs(st.lower[j - 2] - (cplx(0.0, 1.0) / (h * h) - 0.5 * yj / (2.0 * h))) < 1e-12);
  CHECK_THROWS_AS(assemble_operator(curves::BoundaryCurve::linear(0.5, 1.0), 0.0, 4),
                  std::invalid_argument);
}

TEST_CASE("interior rows annihilate constants") {
  const std::size_t M = 32;
  auto st = assemble_operator(curves::BoundaryCurve::linear(0.5, 1.0), 0.4, M);
  std::vector<cplx> ones(M + 1, cplx(1.0));
  auto out = st.apply(ones);
  for (std::size_t j = 2; j < M - 1; ++j) CHECK(std::abs(out[j]) < 1e-9);
}

TEST_CASE("step: zero stays zero, autonomous norm conservation") {
  const std::size_t M = 64;
  auto curve = curves::BoundaryCurve::linear(0.0, 1.0);
  FixedState z;
  z.values.assign(M + 1, cplx(0.0));
  auto z1 = step(z, curve, 0.01, M);
  for (const auto& v : z1.values) CHECK(std::abs(v) == 0.0);

  FixedState s;
  s.values = smooth_vector(M, 17);
  const double n0 = s.l2_norm();
  for (int k = 0; k < 100; ++k) s = step(s, curve, 0.005, M);
  CHECK(std::abs(s.l2_norm() - n0) < 1e-12 * n0 * 100);
  CHECK_THROWS_AS(step(s, curve, -0.1, M), std::invalid_argument);
}

TEST_CASE("one CN step tracks the exact transformed solution") {
  const std::size_t M = 512;
  const double dt = 0.002;  // one-step CN error ~ dt^3 |A^3 w| / 12
  exact::ExactSolution sol{{{cplx(1.0)}, 0.5}, 0.5};
  auto curve = curves::BoundaryCurve::linear(0.5, 1.0);
  FixedState s;
  s.t = 0.0;
  s.values.resize(M + 1);
  for (std::size_t j = 0; j <= M; ++j) s.values[j] = exact::eval_w(sol, double(j) / M, 0.0);
  auto s1 = step(s, curve, dt, M);
  double e2 = 0.0;
  for (std::size_t j = 0; j <= M; ++j)
    e2 += std::norm(s1.values[j] - exact::eval_w(sol, double(j) / M, dt));
  CHECK(std::sqrt(e2 / double(M)) < 1e-5);
}

TEST_CASE("solve: autonomous closed form") {
  const std::size_t M = 200, steps = 400;
  const double tau = 0.1;
  auto traj = solve({{cplx(1.0)}, 0.0}, curves::BoundaryCurve::linear(0.0, tau), tau, M, steps);
  const cplx phase = std::exp(cplx(0.0, -pi * pi * tau));
  double e2 = 0.0;
  for (std::size_t j = 0; j <= M; ++j) {
    const cplx ref = std::sqrt(2.0) * phase * std::sin(pi * double(j) / double(M));
    e2 += std::norm(traj.states.back().values[j] - ref);
  }
  CHECK(std::sqrt(e2 / double(M)) < 1e-4);
}

TEST_CASE("solve: order-2 convergence against the exact series") {
  const double eps = 0.5, tau = 1.0;
  const double r = 1.0 / std::sqrt(2.0);
  spectral::SineSpectrum spec{{cplx(r), cplx(0.0, r)}, eps};
  exact::ExactSolution sol{spec, eps};
  auto err_at = [&](std::size_t M) {
    auto traj = solve(spec, curves::BoundaryCurve::linear(eps, tau), tau, M, M);
    double e2 = 0.0;
    for (std::size_t j = 0; j <= M; ++j)
      e2 += std::norm(traj.states.back().values[j] - exact::eval_w(sol, double(j) / M, tau));
    return std::sqrt(e2 / double(M));
  };
  const double e1 = err_at(64), e2 = err_at(128), e3 = err_at(256);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  CHECK(o1 > 1.8);
  CHECK(o1 < 2.2);
  CHECK(o2 > 1.8);
  CHECK(o2 < 2.2);
}

TEST_CASE("solve: zero data, bookkeeping") {
  auto traj = solve({{cplx(0.0), cplx(0.0)}, 0.5}, curves::BoundaryCurve::linear(0.5, 1.0), 1.0,
                    32, 8);
  REQUIRE(traj.states.size() == 9);
  REQUIRE(traj.traces.size() == 9);
  for (const auto& s : traj.states)
    for (const auto& v : s.values) CHECK(std::abs(v) == 0.0);
  for (std::size_t k = 1; k < traj.states.size(); ++k)
    CHECK(traj.states[k].t > traj.states[k - 1].t);
}

TEST_CASE("solver traces approach the analytic traces") {
  const double eps = 0.5, tau = 0.5;
  spectral::SineSpectrum spec{{cplx(1.0)}, eps};
  exact::ExactSolution sol{spec, eps};
  auto trace_err = [&](std::size_t M) {
    auto traj = solve(spec, curves::BoundaryCurve::linear(eps, tau), tau, M, M);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const double t = traj.states[k].t;
      const double l = sol.ell(t);
      worst = std::max(worst,
                       std::abs(traj.traces[k].left - l * exact::neumann_trace_left(sol, t)));
      worst = std::max(worst,
                       std::abs(traj.traces[k].right - l * exact::neumann_trace_right(sol, t)));
    }
    return worst;
  };
  const double e1 = trace_err(128), e2 = trace_err(256);
  CHECK(e2 < 5e-3);
  CHECK(e2 < 0.4 * e1);  // roughly O(h^2 + dt^2)
}

TEST_CASE("coercivity identity") {
  const std::size_t M = 256;
  auto curve = curves::BoundaryCurve::linear(0.5, 1.0);
  const double t = 0.3;
  const auto ev = curve.eval(t);
  const double omega = coercivity_shift(curve, 1.0);
  auto st = assemble_operator(curve, t, M);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto w = smooth_vector(M, seed);
    auto aw = st.apply(w);
    const double lhs = (inner(aw, w) + omega * inner(w, w)).real();
    const double rhs = (omega - ev.lp / (2.0 * ev.l)) * inner(w, w).real();
    CHECK(std::abs(lhs - rhs) < 1e-3 * std::abs(inner(w, w).real()));
  }
}

TEST_CASE("coercivity shift values") {
  CHECK(coercivity_shift(curves::BoundaryCurve::linear(0.5, 1.0), 1.0) ==
        doctest::Approx(0.25).epsilon(1e-6));
  CHECK(coercivity_shift(curves::BoundaryCurve::linear(0.0, 1.0), 1.0) < 1e-8);
  const double s = coercivity_shift(curves::BoundaryCurve::periodic(0.5, 0.4, 1.0), 1.0);
  CHECK(s == doctest::Approx(0.1).epsilon(1e-3));  // sup at t=0: eps*omega/2
}
