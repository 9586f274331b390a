#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mws/exact.hpp"

using namespace mws;
using namespace mws::exact;
const double pi = std::numbers::pi;

namespace {
ExactSolution make(std::vector<cplx> a, double eps) {
  return ExactSolution{{std::move(a), eps}, eps};
}
}  // namespace

TEST_CASE("Dirichlet traces vanish at both walls") {
  auto sol = make({cplx(0.3, 0.1), cplx(-0.2, 0.5), cplx(0.0, -0.7)}, 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double t = ut(rng);
    CHECK(std::abs(eval_u(sol, 0.0, t)) < 1e-12);
    CHECK(std::abs(eval_u(sol, sol.ell(t), t)) < 1e-12);
  }
}

TEST_CASE("autonomous degenerate case") {
  auto sol = make({cplx(1.0)}, 0.0);
  for (double t : {0.0, 0.37, 1.4}) {
    const cplx expect = std::sqrt(2.0) * std::exp(cplx(0.0, -pi * pi * t));
    CHECK(std::abs(eval_u(sol, 0.5, t) - expect) < 1e-12);
  }
  // multi-mode: equals the standard series
  auto multi = make({cplx(0.5, 0.2), cplx(-0.3, 0.4), cplx(0.1, -0.6)}, 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double x = u01(rng), t = 2.0 * u01(rng);
    cplx ref = 0.0;
    for (int n = 1; n <= 3; ++n)
      ref += multi.spectrum.coefficients[n - 1] * std::sqrt(2.0) * std::sin(n * pi * x) *
             std::exp(cplx(0.0, -double(n * n) * pi * pi * t));
    CHECK(std::abs(eval_u(multi, x, t) - ref) < 1e-12);
  }
}

TEST_CASE("domain guard") {
  auto sol = make({cplx(1.0)}, 0.5);
  CHECK_THROWS_AS(eval_u(sol, 1.2, 0.0), std::domain_error);  // l(0)=1
  CHECK_THROWS_AS(eval_u(sol, -0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(eval_u(sol, 0.5, -0.5), std::domain_error);
  CHECK(std::abs(eval_u(sol, 1.2, 1.0)) > 0.0);  // inside the grown interval
}

TEST_CASE("neumann trace, left wall") {
  CHECK(std::abs(neumann_trace_left(make({cplx(1.0)}, 0.0), 0.0) - std::sqrt(2.0) * pi) < 1e-12);
  CHECK(std::abs(neumann_trace_left(make({cplx(0.0), cplx(0.0)}, 0.5), 0.7)) == 0.0);
  // finite-difference oracle
  auto sol = make({cplx(1.0), cplx(1.0)}, 0.5);
  const double t = 0.2, h = 1e-6;
  const cplx fd = (eval_u(sol, 2.0 * h, t) - eval_u(sol, 0.0, t)) / (2.0 * h);
  CHECK(std::abs(fd - neumann_trace_left(sol, t)) < 1e-5);
}

TEST_CASE("neumann trace, right wall") {
  CHECK(std::abs(neumann_trace_right(make({cplx(1.0)}, 0.0), 0.0) + std::sqrt(2.0) * pi) < 1e-12);
  CHECK(std::abs(neumann_trace_right(make({cplx(0.0), cplx(1.0)}, 0.0), 0.0) -
                 2.0 * std::sqrt(2.0) * pi) < 1e-12);
  auto sol = make({cplx(1.0), cplx(0.0), cplx(1.0)}, 0.5);
  const double t = 0.4, h = 1e-6, l = sol.ell(t);
  const cplx fd = (eval_u(sol, l, t) - eval_u(sol, l - 2.0 * h, t)) / (2.0 * h);
  CHECK(std::abs(fd - neumann_trace_right(sol, t)) < 1e-5);
}

TEST_CASE("moving-wall remark: eps u_x + u_t vanishes at the right wall") {
  auto sol = make({cplx(0.4, 0.1), cplx(0.3, -0.2), cplx(-0.1, 0.5)}, 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.1, 1.5);
  const double k = 1e-5;
  for (int s = 0; s < 20; ++s) {
    const double t = ut(rng), x = sol.ell(t);
    const cplx u_t = (eval_u_unchecked(sol, x, t + k) - eval_u_unchecked(sol, x, t - k)) / (2.0 * k);
    const cplx r = 0.5 * neumann_trace_right(sol, t) + u_t;
    CHECK(std::abs(r) < 1e-4);
  }
}

TEST_CASE("point observation") {
  // rational-point degeneracy at eps = 0
  auto even = make({cplx(0.0), cplx(1.0)}, 0.0);
  for (double t : {0.0, 0.5, 1.3}) CHECK(std::abs(point_observation(even, 0.5, t)) < 1e-15);
  // the moving wall removes it
  auto moving = make({cplx(0.0), cplx(1.0)}, 0.5);
  CHECK(std::abs(point_observation(moving, 0.5, 1.0)) > 0.1);
  // definitional consistency
  auto sol = make({cplx(0.2, 0.3), cplx(0.5, -0.1)}, 0.3);
  CHECK(point_observation(sol, 0.3, 0.7) == eval_u(sol, 0.3, 0.7));
  CHECK_THROWS_AS(point_observation(sol, 1.0, 0.1), std::domain_error);
}

TEST_CASE("fixed-domain transform and its derivative") {
  auto sol = make({cplx(0.6, -0.2), cplx(0.1, 0.4)}, 0.5);
  const double t = 0.8, h = 1e-6;
  for (double y : {0.21, 0.5, 0.9}) {
    CHECK(std::abs(eval_w(sol, y, t) - eval_u(sol, sol.ell(t) * y, t)) < 1e-14);
    const cplx fd = (eval_w(sol, y + h, t) - eval_w(sol, y - h, t)) / (2.0 * h);
    CHECK(std::abs(fd - eval_w_y(sol, y, t)) < 1e-6);
  }
}

TEST_CASE("sampled trajectory carries analytic traces") {
  auto sol = make({cplx(1.0), cplx(0.0, 1.0)}, 0.5);
  auto traj = sample_trajectory(sol, 1.0, 64, 16);
  REQUIRE(traj.states.size() == 17);
  REQUIRE(traj.traces.size() == 17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = traj.states[k].t;
    const double l = sol.ell(t);
    CHECK(std::abs(traj.traces[k].left - l * neumann_trace_left(sol, t)) < 1e-14);
    CHECK(std::abs(traj.traces[k].right - l * neumann_trace_right(sol, t)) < 1e-14);
    CHECK(std::abs(traj.states[k].values.front()) == 0.0);
    CHECK(std::abs(traj.states[k].values.back()) == 0.0);
  }
}

TEST_CASE("b_n orthonormal system") {
  // substitution identity tau/l(tau) = 2/pi at eps = 0.5
  const double eps = 0.5, tau = 2.0 / (pi - 2.0 * eps);
  CHECK(tau == doctest::Approx(2.0 / (pi - 1.0)).epsilon(1e-12));  // ~0.93388
  CHECK(tau / (1.0 + eps * tau) == doctest::Approx(2.0 / pi).epsilon(1e-12));

  auto G = bn_gram(eps, 6);
  const auto dev = (G - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff();
  CHECK(dev < 1e-6);

  // the +3 i pi^2 phase waveform is orthogonal to every b_n
  auto v = bn_inner_products(eps, 3.0, 6);
  for (int n = 0; n < 6; ++n) CHECK(std::abs(v(n)) < 1e-6);

  CHECK_THROWS_AS(bn_gram(0.0, 4), std::domain_error);
  CHECK_THROWS_AS(bn_gram(pi / 2.0, 4), std::domain_error);
}
