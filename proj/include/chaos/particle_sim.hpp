#pragma once

// Monte Carlo simulation of N diffusing particles on T^d interacting through
// the mean-field drift (1/N) sum_j K(X_i, X_j), discretized by Euler-Maruyama.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chaos/torus_fourier.hpp"

namespace chaos {

enum class DriftMode { direct, spectral };

struct SimConfig {
  int N = 2;
  int d = 1;
  double sigma = 1.0;
  double dt = 1e-3;
  double t_end = 0.0;
  std::vector<double> obs_times;
  int replicas = 1;
  std::uint64_t seed = 0;
  KernelSpec kernel;
  SpectralField rho0;
  DriftMode drift_mode = DriftMode::spectral;
  /// Rejection-sampling envelope; defaults to the l1 norm of rho0's modes.
  std::optional<double> envelope;

  /// Every violated invariant, empty when the config is valid.
  std::vector<std::string> violations() const;
  /// Throws std::invalid_argument listing all violations.
  void validate() const;
  std::int64_t num_steps() const;
};

/// Per-replica random stream, a pure function of (seed, replica).
std::mt19937_64 replica_rng(std::uint64_t seed, std::uint64_t replica);

/// Throws if the density is negative at any point of a ~4096-point grid.
void check_density(const SpectralField& rho0);

/// N i.i.d. draws from rho0 by rejection against a uniform proposal; returns
/// N*d coordinates, particle-major.
std::vector<double> sample_initial(const SpectralField& rho0, int N, std::mt19937_64& rng,
                                   std::optional<double> envelope = std::nullopt);

/// Reusable buffers for the spectral drift.
class DriftWorkspace {
 public:
  void compute(std::span<const double> positions, int d, const KernelSpec& kernel, std::span<double> out);

 private:
  std::vector<Complex> powers_;
  std::vector<Complex> weights_;
  std::vector<std::size_t> lambda_off_;
  std::vector<std::size_t> eta_off_;
};

/// out[i*d + c] = (1/N) sum_j K_c(x_i, x_j), self term included.
std::vector<double> drift(std::span<const double> positions, int d, const KernelSpec& kernel, DriftMode mode);

/// Positions of all replicas at one time, replica-major then particle-major.
struct Snapshot {
  double time = 0.0;
  int replicas = 0;
  int N = 0;
  int d = 1;
  std::vector<double> positions;

  std::span<const double> replica(int r) const {
    return {positions.data() + static_cast<std::ptrdiff_t>(r) * N * d, static_cast<std::size_t>(N * d)};
  }
};

class Ensemble {
 public:
  /// Samples the initial state of every replica from config.rho0.
  explicit Ensemble(const SimConfig& config);

  double time() const { return time_; }
  std::int64_t steps_taken() const { return steps_; }
  int replicas() const { return static_cast<int>(states_.size()); }
  std::span<const double> positions(int replica) const { return states_.at(static_cast<std::size_t>(replica)).x; }
  Snapshot snapshot() const;

  /// Advances every replica by one Euler-Maruyama step.
  void advance(const SimConfig& config, int threads = 1);

 private:
  struct ReplicaState {
    std::vector<double> x;
    std::mt19937_64 rng;
  };
  friend std::vector<Snapshot> run(const SimConfig& config, int threads);
  static void advance_replica(ReplicaState& state, const SimConfig& config, DriftWorkspace& ws,
                              std::vector<double>& drift_buf);

  int N_ = 0;
  int d_ = 1;
  double time_ = 0.0;
  std::int64_t steps_ = 0;
  std::vector<ReplicaState> states_;
};

/// One Euler-Maruyama step on a copy of the ensemble.
Ensemble step(Ensemble ensemble, const SimConfig& config);

/// Integrates to t_end, recording a snapshot at every obs_time (snapped to
/// the nearest grid step); with no obs_times the final state is recorded.
std::vector<Snapshot> run(const SimConfig& config, int threads = 1);

}  // namespace chaos
