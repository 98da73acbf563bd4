#pragma once

// U-statistic estimates of marginal Fourier modes from particle snapshots,
// their Moebius combination into correlation functions, and N-scaling fits.

#include <map>
#include <span>
#include <vector>

#include "chaos/particle_sim.hpp"
#include "chaos/torus_fourier.hpp"

namespace chaos {

/// e_xi = sum_i exp(-2 pi i xi . X_i) for every xi in the box |xi|_inf <= P.
class PowerSumTable {
 public:
  PowerSumTable(std::span<const double> positions, int d, int max_index);

  int dim() const { return d_; }
  int max_index() const { return P_; }
  int particles() const { return n_; }
  /// Frequencies outside the table box throw std::out_of_range.
  Complex operator()(std::span<const int> xi) const;

 private:
  int d_;
  int P_;
  int n_;
  std::vector<Complex> table_;
};

/// Power sums at an explicit list of frequencies (each of length d).
std::map<std::vector<int>, Complex> power_sums(std::span<const double> positions, int d,
                                               const std::vector<std::vector<int>>& freqs);

/// Unbiased U-statistic estimate of the j-marginal Fourier mode at xi (j =
/// xi.num_vars() slots). Zero slots are integrated out exactly.
Complex marginal_fourier(const PowerSumTable& sums, const FreqVec& xi);

struct FreqProbe {
  int num_vars = 2;
  std::vector<FreqVec> freqs;
  bool include_zero_planes = false;

  /// Every tuple in the box |xi|_inf <= cutoff (zero-free unless asked).
  static FreqProbe box(int num_vars, int d, int cutoff, bool include_zero_planes);
  /// Tuples whose components are drawn from `values` in each slot and axis.
  static FreqProbe grid(int num_vars, int d, const std::vector<int>& values, bool include_zero_planes);
  /// Deduplicates, checks shapes and drops zero-containing tuples unless
  /// include_zero_planes.
  void normalize();
  int max_index() const;
};

struct CorrelationEstimate {
  FreqVec xi;
  Complex mean;
  double se_re = 0.0;
  double se_im = 0.0;
};

struct ChaosEntry {
  int m = 0;
  double time = 0.0;
  int N = 0;
  int replicas = 0;
  std::vector<CorrelationEstimate> values;
  /// Norms over zero-free probed frequencies with jackknife standard errors.
  double linf = 0.0;
  double linf_se = 0.0;
  double l2 = 0.0;
  double l2_se = 0.0;
};

/// Replica-averaged f_j for j <= m, Moebius-combined into g_[m] at each probed
/// frequency; standard errors by delete-one-replica jackknife.
ChaosEntry estimate_correlations(const Snapshot& snapshot, int m, const FreqProbe& probe, int threads = 1);

struct ChaosNorms {
  double linf = 0.0;
  double l2 = 0.0;
};

/// Norms over the zero-free entries; throws when none remain.
ChaosNorms chaos_norms(const std::vector<CorrelationEstimate>& values, int m);

/// Estimated g_[m] as a field on the given box (unprobed modes are zero).
SpectralField correlation_field(const ChaosEntry& entry, int d, int cutoff);

struct ScalingFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  /// Every norm sits within two standard errors of zero.
  bool degenerate = false;
};

/// Weighted least squares of log(norm) on log(N), weights (norm/se)^2.
ScalingFit fit_scaling(std::span<const double> Ns, std::span<const double> norms, std::span<const double> ses);

struct ScalingStudy {
  std::vector<ChaosEntry> entries;
  /// One fit per observation time, in obs_times order.
  std::vector<ScalingFit> fits;
};

/// Runs the template config at every N and fits linf norms of g_[m] against N.
ScalingStudy scaling_study(const SimConfig& base, const std::vector<int>& Ns, int m, const FreqProbe& probe,
                           int threads = 1);

}  // namespace chaos
