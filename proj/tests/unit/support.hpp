#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "chaos/torus_fourier.hpp"

namespace testing_support {

using chaos::Complex;
using chaos::FreqVec;
using chaos::SpectralField;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline FreqVec fv(std::vector<int> comps, int d = 1) { return FreqVec(d, std::move(comps)); }

// Random field with `count` nonzero coefficients; conjugate-symmetric when real.
inline SpectralField random_field(std::mt19937_64& rng, int m, int d, int cutoff, int count, bool real = false) {
  std::uniform_int_distribution<int> idx(-cutoff, cutoff);
  std::normal_distribution<double> g;
  SpectralField f(m, d, cutoff, real);
  FreqVec xi(m, d);
  for (int i = 0; i < count; ++i) {
    for (int k = 0; k < m; ++k) {
      for (int c = 0; c < d; ++c) xi(k, c) = idx(rng);
    }
    const Complex v{g(rng), g(rng)};
    if (real) {
      if (xi == xi.negated()) {
        f.set(xi, v.real());
      } else {
        f.set(xi, v);
        f.set(xi.negated(), std::conj(v));
      }
    } else {
      f.set(xi, v);
    }
  }
  return f;
}

// Trigonometric sum over the stored coefficients, written independently of
// eval_field.
inline Complex direct_sum(const SpectralField& f, const std::vector<double>& point) {
  Complex acc{};
  f.for_each([&](const FreqVec& xi, Complex v) {
    double phase = 0.0;
    for (std::size_t i = 0; i < xi.components().size(); ++i) phase += xi.components()[i] * point[i];
    acc += v * Complex(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
  });
  return acc;
}

// Fourier coefficient of a function sampled on a uniform G-point grid of T^1.
template <class Fn>
Complex grid_coeff_1d(Fn&& fn, int G, int xi) {
  Complex acc{};
  for (int j = 0; j < G; ++j) {
    const double x = static_cast<double>(j) / G;
    acc += fn(x) * std::polar(1.0, -kTwoPi * xi * x);
  }
  return acc / static_cast<double>(G);
}

template <class Fn>
Complex grid_coeff_2d(Fn&& fn, int G, int xi, int eta) {
  Complex acc{};
  for (int j = 0; j < G; ++j) {
    for (int l = 0; l < G; ++l) {
      const double x = static_cast<double>(j) / G;
      const double y = static_cast<double>(l) / G;
      acc += fn(x, y) * std::polar(1.0, -kTwoPi * (xi * x + eta * y));
    }
  }
  return acc / static_cast<double>(G) / static_cast<double>(G);
}

}  // namespace testing_support
