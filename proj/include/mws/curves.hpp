#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mws::curves {

struct CurveEval {
  double l;    // wall position
  double lp;   // wall velocity
  double lpp;  // wall acceleration
};

/// Tabulated wall trajectory, interpolated by a monotone cubic Hermite
/// spline (Fritsch-Carlson slopes).  First and second derivatives come
/// from the interpolant itself, not from the tabulated lp/lpp columns.
struct TabulatedCurve {
  std::vector<double> t;
  std::vector<double> l;
  std::vector<double> slope;  // Hermite slopes at the knots

  static TabulatedCurve from_samples(std::vector<double> ts, std::vector<double> ls) {
    if (ts.size() != ls.size() || ts.size() < 2)
      throw std::invalid_argument("tabulated curve: need at least two (t,l) samples");
    for (std::size_t k = 1; k < ts.size(); ++k)
      if (ts[k] <= ts[k - 1])
        throw std::invalid_argument("tabulated curve: timestamps must increase");
    if (std::abs(ls.front() - 1.0) > 1e-9)
      throw std::invalid_argument("tabulated curve: l(0) must equal 1");
    ls.front() = 1.0;
    TabulatedCurve c{std::move(ts), std::move(ls), {}};
    c.compute_slopes();
    return c;
  }

  void compute_slopes() {
    const std::size_t n = t.size();
    std::vector<double> d(n - 1);  // secant slopes
    for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (l[k + 1] - l[k]) / (t[k + 1] - t[k]);
    slope.assign(n, 0.0);
    slope[0] = d[0];
    slope[n - 1] = d[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k)
      slope[k] = (d[k - 1] * d[k] > 0.0) ? 0.5 * (d[k - 1] + d[k]) : 0.0;
    // Fritsch-Carlson limiter keeps the interpolant monotone per interval.
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (d[k] == 0.0) { slope[k] = slope[k + 1] = 0.0; continue; }
      const double a = slope[k] / d[k], b = slope[k + 1] / d[k];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double f = 3.0 / std::sqrt(s);
        slope[k] = f * a * d[k];
        slope[k + 1] = f * b * d[k];
      }
    }
  }

  CurveEval eval(double tt) const {
    if (tt < t.front() - 1e-12 || tt > t.back() + 1e-12)
      throw std::domain_error("tabulated curve: t outside sample range");
    tt = std::clamp(tt, t.front(), t.back());
    auto it = std::upper_bound(t.begin(), t.end(), tt);
    std::size_t k = (it == t.begin()) ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    if (k + 1 >= t.size()) k = t.size() - 2;
    const double h = t[k + 1] - t[k], s = (tt - t[k]) / h;
    const double y0 = l[k], y1 = l[k + 1], m0 = slope[k] * h, m1 = slope[k + 1] * h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    const double dh00 = 6 * s * (s - 1), dh10 = (1 - s) * (1 - 3 * s);
    const double dh01 = 6 * s * (1 - s), dh11 = s * (3 * s - 2);
    const double d2h00 = 12 * s - 6, d2h10 = 6 * s - 4;
    const double d2h01 = 6 - 12 * s, d2h11 = 6 * s - 2;
    return {h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1,
            (dh00 * y0 + dh10 * m0 + dh01 * y1 + dh11 * m1) / h,
            (d2h00 * y0 + d2h10 * m0 + d2h01 * y1 + d2h11 * m1) / (h * h)};
  }
};

struct Linear { double epsilon = 0.0; };                    // l(t) = 1 + eps*t
struct Periodic { double epsilon = 0.0; double omega = 0.0; };  // l(t) = 1 + eps*sin(omega*t)

/// Wall trajectory l(t), normalized to l(0) = 1.  Immutable after
/// construction; all operations are pure.
class BoundaryCurve {
 public:
  using Kind = std::variant<Linear, Periodic, TabulatedCurve>;

  BoundaryCurve(Kind kind, double horizon) : kind_(std::move(kind)), horizon_(horizon) {
    if (horizon_ < 0.0) throw std::invalid_argument("curve horizon must be nonnegative");
    if (auto* p = std::get_if<Periodic>(&kind_)) {
      if (std::abs(p->epsilon) >= 1.0)
        throw std::invalid_argument("periodic curve: |epsilon| must be < 1 so l stays positive");
    }
    // l must stay strictly positive on [0, horizon].
    for (int k = 0; k <= 256; ++k) {
      const double t = horizon_ * k / 256.0;
      if (eval(t).l <= 0.0) throw std::invalid_argument("curve: l(t) must stay positive");
    }
  }

  static BoundaryCurve linear(double eps, double horizon) {
    return BoundaryCurve(Linear{eps}, horizon);
  }
  static BoundaryCurve periodic(double eps, double omega, double horizon) {
    return BoundaryCurve(Periodic{eps, omega}, horizon);
  }
  static BoundaryCurve tabulated(TabulatedCurve tab, double horizon) {
    if (horizon > tab.t.back() + 1e-12)
      throw std::invalid_argument("tabulated curve: horizon exceeds sample range");
    return BoundaryCurve(Kind{std::move(tab)}, horizon);
  }

  double horizon() const { return horizon_; }
  bool is_linear() const { return std::holds_alternative<Linear>(kind_); }
  bool is_periodic() const { return std::holds_alternative<Periodic>(kind_); }
  bool is_tabulated() const { return std::holds_alternative<TabulatedCurve>(kind_); }
  const Kind& kind() const { return kind_; }

  double linear_rate() const { return std::get<Linear>(kind_).epsilon; }
  const Periodic& periodic_params() const { return std::get<Periodic>(kind_); }

  CurveEval eval(double t) const {
    if (t < -1e-12 || t > horizon_ + 1e-12)
      throw std::domain_error("curve eval: t outside [0, horizon]");
    t = std::clamp(t, 0.0, horizon_);
    return std::visit(
        [t](const auto& c) -> CurveEval {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Linear>) {
            return {1.0 + c.epsilon * t, c.epsilon, 0.0};
          } else if constexpr (std::is_same_v<T, Periodic>) {
            const double s = std::sin(c.omega * t), co = std::cos(c.omega * t);
            return {1.0 + c.epsilon * s, c.epsilon * c.omega * co,
                    -c.epsilon * c.omega * c.omega * s};
          } else {
            return c.eval(t);
          }
        },
        kind_);
  }

  /// sup over [0,tau] of |l'(t)/l(t)|, closed form for the analytic kinds.
  double sup_log_derivative(double tau) const {
    if (is_linear()) {
      const double e = linear_rate();
      // |e/(1+e t)| is maximal at t=0 for e>=0, at t=tau for e<0.
      return e >= 0.0 ? e : std::abs(e / (1.0 + e * tau));
    }
    double sup = 0.0;
    const int n = 8192;
    for (int k = 0; k <= n; ++k) {
      const auto ev = eval(tau * k / n);
      sup = std::max(sup, std::abs(ev.lp / ev.l));
    }
    return sup;
  }

 private:
  Kind kind_;
  double horizon_;
};

/// Outcome of the structural window check on the curve.
struct WindowReport {
  bool positive_derivative = false;
  bool product_bound_ok = false;       // l'(t) l(t) < 1/pi on (0,tau)
  double integrated_consequence = 0.0; // 2*tau + pi*(1 - l(tau)^2)
  bool consequence_positive = false;
  bool admissible = false;
};

/// Largest observation horizon for the linear wall l(t) = 1 + eps*t,
/// valid for eps in (0, 2/pi).
inline double linear_tau_max(double eps) {
  const double pi = std::numbers::pi;
  if (eps <= 0.0 || eps >= 2.0 / pi)
    throw std::domain_error("linear_tau_max: eps must lie in (0, 2/pi)");
  return (1.0 / eps) * (2.0 / (eps * pi) - 1.0);
}

/// Checks the structural curve conditions on (0,tau).  For the analytic
/// kinds a closed-form worst-case bound decides; sampling on grid_points
/// uniform nodes (strict inequalities, tolerance 1e-12) decides otherwise.
/// The integrated consequence 2*tau + pi*(1 - l(tau)^2) is reported
/// verbatim; for the linear wall the closed-form window and this value
/// can disagree, which consequence_positive makes visible.
inline WindowReport check_observability_window(const BoundaryCurve& curve, double tau,
                                               std::size_t grid_points = 64) {
  if (grid_points < 2) throw std::invalid_argument("check_observability_window: grid_points >= 2");
  const double pi = std::numbers::pi;
  const double tol = 1e-12;
  WindowReport rep;

  const double ltau = curve.eval(tau).l;
  rep.integrated_consequence = 2.0 * tau + pi * (1.0 - ltau * ltau);
  rep.consequence_positive = rep.integrated_consequence > 0.0;

  if (curve.is_linear()) {
    const double e = curve.linear_rate();
    rep.positive_derivative = e > tol;
    rep.product_bound_ok =
        e > tol && e < 2.0 / pi - tol && tau < linear_tau_max(e) - tol;
  } else if (curve.is_periodic()) {
    const auto [e, om] = curve.periodic_params();
    rep.positive_derivative = e > tol && om > tol && tau < 0.5 * pi / om - tol;
    rep.product_bound_ok = rep.positive_derivative && e * om * (1.0 + e) < 1.0 / pi - tol;
  } else {
    bool pos = true, prod = true;
    for (std::size_t k = 1; k < grid_points; ++k) {
      const double t = tau * static_cast<double>(k) / static_cast<double>(grid_points);
      const auto ev = curve.eval(t);
      pos = pos && ev.lp > tol;
      prod = prod && ev.lp * ev.l < 1.0 / pi - tol;
    }
    rep.positive_derivative = pos;
    rep.product_bound_ok = pos && prod;
  }
  rep.admissible = rep.positive_derivative && rep.product_bound_ok;
  return rep;
}

}  // namespace mws::curves
