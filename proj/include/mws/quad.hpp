#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace mws {

using cplx = std::complex<double>;

// Round up to an even number of subintervals (Simpson needs one).
inline std::size_t even_intervals(std::size_t n) { return n % 2 == 0 ? n : n + 1; }

/// Composite Simpson rule on [a,b] with n subintervals (n made even).
template <class F>
auto simpson(F&& f, double a, double b, std::size_t n)
    -> std::invoke_result_t<F, double> {
  if (n < 2) n = 2;
  n = even_intervals(n);
  const double h = (b - a) / static_cast<double>(n);
  using R = std::invoke_result_t<F, double>;
  R acc = f(a) + f(b);
  for (std::size_t k = 1; k < n; ++k) {
    const double x = a + h * static_cast<double>(k);
    acc += f(x) * (k % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * (h / 3.0);
}

/// Composite trapezoid rule on [a,b] with n subintervals.
template <class F>
auto trapezoid(F&& f, double a, double b, std::size_t n)
    -> std::invoke_result_t<F, double> {
  if (n < 1) n = 1;
  const double h = (b - a) / static_cast<double>(n);
  using R = std::invoke_result_t<F, double>;
  R acc = 0.5 * (f(a) + f(b));
  for (std::size_t k = 1; k < n; ++k) acc += f(a + h * static_cast<double>(k));
  return acc * h;
}

/// Trapezoid rule over tabulated samples with nonuniform abscissae.
inline double trapezoid_samples(const std::vector<double>& t,
                                const std::vector<double>& f) {
  if (t.size() != f.size() || t.size() < 2)
    throw std::invalid_argument("trapezoid_samples: need matching samples");
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k)
    acc += 0.5 * (f[k] + f[k + 1]) * (t[k + 1] - t[k]);
  return acc;
}

/// Running trapezoid integral; out[k] = integral over [t0, t_k].
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                                const std::vector<double>& f) {
  if (t.size() != f.size()) throw std::invalid_argument("cumulative_trapezoid: size mismatch");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k)
    out[k] = out[k - 1] + 0.5 * (f[k] + f[k - 1]) * (t[k] - t[k - 1]);
  return out;
}

}  // namespace mws
