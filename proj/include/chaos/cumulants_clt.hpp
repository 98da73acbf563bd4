#pragma once

// Cumulants of the linear statistic (1/N) sum_i phi(X_i): empirical estimates,
// the correlation-function expansion, bound audits and normal-approximation
// diagnostics.

#include <span>
#include <vector>

#include "chaos/partitions.hpp"
#include "chaos/particle_sim.hpp"
#include "chaos/torus_fourier.hpp"

namespace chaos {

/// Real test function with finitely many Fourier modes.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(SpectralField phi);

  static TestFunction constant(int d, double value);
  /// cos(2 pi k x) on T^1.
  static TestFunction cosine(int k = 1);
  /// Fejer kernel of the given order on T^1: sum_{|k|<=n} (1 - |k|/(n+1)) e^{2 pi i k x}.
  static TestFunction fejer(int order);

  const SpectralField& field() const { return phi_; }
  int dim() const { return phi_.dim(); }
  double l1_norm() const { return l1_; }
  double operator()(std::span<const double> x) const;
  /// phi^k by self-convolution of the coefficients, box grown to k * support.
  SpectralField power(int k) const;

 private:
  SpectralField phi_;
  double l1_ = 0.0;
};

/// (1/N) sum_i phi(X_i) for one replica.
double linear_statistic(std::span<const double> positions, const TestFunction& phi);
/// One value per replica.
std::vector<double> linear_statistics(const Snapshot& snapshot, const TestFunction& phi);

struct CumulantEstimate {
  std::vector<double> values;
  std::vector<double> ses;
};

/// Cumulants from raw sample moments; jackknife standard errors.
CumulantEstimate empirical_cumulants(std::span<const double> samples, int max_order);

/// sum_F Fhat(xi) Ghat(-xi) over the nonzero modes of f.
Complex pairing(const SpectralField& f, const SpectralField& g);

/// kappa_m from correlation functions: g[k] is g_k on variables 0..k-1.
double cumulants_from_correlations(const TestFunction& phi, const FieldFamily& g, std::int64_t N, int m);

struct BoundCheck {
  int order = 0;
  double value = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool pass = true;
};

/// (8 |phi|_l1)^m (m!)^4 / N^(m-1)
double cumulant_bound(const TestFunction& phi, int m, std::int64_t N);

/// values[k] and ses[k] belong to order k+1. Fails when |kappa| - se > bound.
std::vector<BoundCheck> cumulant_bound_audit(const TestFunction& phi, std::span<const double> values,
                                             std::span<const double> ses, std::int64_t N);

struct BerryEsseenDiagnostic {
  double gamma = 3.0;
  double delta = 0.0;
  /// delta^(-1/(1+2 gamma))
  double rate = 0.0;
};

/// Parameter implied by the cumulant bound for the standardized statistic
/// with limiting variance N Var = limit_variance.
BerryEsseenDiagnostic berry_esseen(const TestFunction& phi, std::int64_t N, double limit_variance);

struct KsResult {
  double distance = 0.0;
  /// Sample variance below 1e-12: centred only, not scaled.
  bool degenerate = false;
};

/// Kolmogorov distance between the standardized sample and N(0, 1).
KsResult ks_distance(std::span<const double> samples);

/// int phi^2 d rho - (int phi d rho)^2 + int phi (x) phi d b
double variance_limit(const TestFunction& phi, const SpectralField& rho, const SpectralField& b);

}  // namespace chaos
