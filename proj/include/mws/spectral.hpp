#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mws/quad.hpp"

namespace mws::spectral {

using mws::cplx;

/// Finite sine spectrum (a_1..a_N) of the initial state in the chirped
/// basis sqrt(2) e^{i eps x^2/4} sin(n pi x).
struct SineSpectrum {
  std::vector<cplx> coefficients;  // index k holds a_{k+1}
  double epsilon = 0.0;

  std::size_t modes() const { return coefficients.size(); }

  /// Canonical form: trailing all-zero coefficients removed (one mode kept).
  SineSpectrum trimmed() const {
    SineSpectrum s = *this;
    while (s.coefficients.size() > 1 && std::abs(s.coefficients.back()) == 0.0)
      s.coefficients.pop_back();
    return s;
  }
};

inline double l2_norm(const SineSpectrum& spec) {
  double s = 0.0;
  for (const cplx& a : spec.coefficients) s += std::norm(a);
  return std::sqrt(s);
}

/// u0(x) = sqrt(2) sum a_n e^{i eps x^2/4} sin(n pi x).
inline cplx reconstruct(const SineSpectrum& spec, double x) {
  const double pi = std::numbers::pi;
  cplx sum = 0.0;
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k)
    sum += spec.coefficients[k] * std::sin((double(k) + 1.0) * pi * x);
  return std::sqrt(2.0) * std::exp(cplx(0.0, spec.epsilon * x * x / 4.0)) * sum;
}

/// d/dx of the reconstruction (chirp included).
inline cplx reconstruct_derivative(const SineSpectrum& spec, double x) {
  const double pi = std::numbers::pi;
  cplx sum = 0.0;
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k) {
    const double n = double(k) + 1.0;
    sum += spec.coefficients[k] *
           (cplx(0.0, spec.epsilon * x / 2.0) * std::sin(n * pi * x) +
            n * pi * std::cos(n * pi * x));
  }
  return std::sqrt(2.0) * std::exp(cplx(0.0, spec.epsilon * x * x / 4.0)) * sum;
}

/// Projects u0 onto the first N chirped sine modes by composite Simpson
/// quadrature: a_n = int_0^1 u0(x) sqrt(2) e^{-i eps x^2/4} sin(n pi x) dx.
inline SineSpectrum project_initial(const std::function<cplx(double)>& u0, std::size_t N,
                                    double eps, std::size_t quadrature_points = 0) {
  if (N < 1) throw std::invalid_argument("project_initial: N >= 1 required");
  if (quadrature_points == 0) quadrature_points = 64 * N;
  if (quadrature_points < 4 * N)
    throw std::invalid_argument("project_initial: quadrature_points < 4N cannot resolve mode N");
  const double pi = std::numbers::pi;
  SineSpectrum spec;
  spec.epsilon = eps;
  spec.coefficients.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double n = double(k) + 1.0;
    spec.coefficients[k] = simpson(
        [&](double x) {
          return u0(x) * std::sqrt(2.0) * std::exp(cplx(0.0, -eps * x * x / 4.0)) *
                 std::sin(n * pi * x);
        },
        0.0, 1.0, quadrature_points);
  }
  return spec;
}

struct H1Seminorms {
  double spectral;  // sqrt(sum n^2 |a_n|^2)
  double exact;     // quadrature H^1_0 seminorm of the chirped reconstruction
};

/// Both H^1_0 readings of the spectrum.  Nominally
/// pi * spectral <= exact <= sqrt(pi^2 + eps^2/2) * spectral, but the chirp
/// cross term perturbs both ends by O(eps); the bracket is exact at eps = 0.
inline H1Seminorms h1_seminorms(const SineSpectrum& spec, std::size_t quadrature_points = 0) {
  if (quadrature_points == 0)
    quadrature_points = std::max<std::size_t>(2048, 128 * spec.modes());
  double weighted = 0.0;
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k) {
    const double n = double(k) + 1.0;
    weighted += n * n * std::norm(spec.coefficients[k]);
  }
  const double exact2 = simpson(
      [&](double x) { return std::norm(reconstruct_derivative(spec, x)); }, 0.0, 1.0,
      quadrature_points);
  return {std::sqrt(weighted), std::sqrt(exact2)};
}

/// Seeded random spectrum, normalized to unit l2 norm.
inline SineSpectrum random_spectrum(std::size_t N, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SineSpectrum spec;
  spec.epsilon = eps;
  spec.coefficients.resize(N);
  for (auto& a : spec.coefficients) a = cplx(g(rng), g(rng));
  const double nrm = l2_norm(spec);
  for (auto& a : spec.coefficients) a /= nrm;
  return spec;
}

/// Seeded random spectrum with unit spectral H^1_0 weight sum(pi^2 n^2 |a_n|^2) = 1.
inline SineSpectrum random_h1_spectrum(std::size_t N, double eps, std::uint64_t seed) {
  SineSpectrum spec = random_spectrum(N, eps, seed);
  const double pi = std::numbers::pi;
  double w = 0.0;
  for (std::size_t k = 0; k < N; ++k)
    w += pi * pi * (k + 1.0) * (k + 1.0) * std::norm(spec.coefficients[k]);
  const double s = std::sqrt(w);
  for (auto& a : spec.coefficients) a /= s;
  return spec;
}

}  // namespace mws::spectral
