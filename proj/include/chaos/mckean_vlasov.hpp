#pragma once

// Integrating-factor Euler solvers for the mean-field density rho_t and for
// the pair correction b_t (the limit of N g_2), both in Fourier space.

#include <string>
#include <vector>

#include "chaos/torus_fourier.hpp"

namespace chaos {

struct PdeRunConfig {
  double sigma = 1.0;
  double dt = 1e-3;
  double t_end = 0.0;
  std::vector<double> obs_times;
  int cutoff = 8;
  KernelSpec kernel;
  SpectralField rho0;
  /// Reverses the sign of the y-transport term rho(y) b(x, z) in the b
  /// equation, for comparison with the alternative sign convention.
  bool flip_y_transport = false;

  std::vector<std::string> violations() const;
  void validate() const;
  std::int64_t num_steps() const;
};

struct FieldTrajectory {
  std::vector<double> times;
  std::vector<SpectralField> fields;
};

/// -H_1(rho (x) rho) with the second factor as the integrated variable.
SpectralField mv_rhs(const SpectralField& rho, const KernelSpec& kernel);

/// rho^{n+1} = heat(rho^n + dt mv_rhs(rho^n)), mode 0 pinned to 1. Records
/// obs_times (nearest grid step), or every grid step when `every_step`.
FieldTrajectory solve_rho(const PdeRunConfig& config, bool every_step = false);

/// Right-hand side of the b equation without the diffusion term.
SpectralField b_rhs(const SpectralField& b, const SpectralField& rho, const KernelSpec& kernel,
                    bool flip_y_transport = false);

/// Same stepping for b with b_0 = 0. `rho_steps` must hold rho at every grid
/// step 0..num_steps (solve_rho with every_step = true).
FieldTrajectory solve_b(const FieldTrajectory& rho_steps, const PdeRunConfig& config);

}  // namespace chaos
