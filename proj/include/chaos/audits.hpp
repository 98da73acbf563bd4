#pragma once

// Exhaustive and randomized audits of the combinatorial and operator bounds.

#include <cstdint>
#include <span>
#include <vector>

namespace chaos {

struct PartitionAuditRow {
  int m = 0;
  std::size_t partitions = 0;
  /// max over rho and N of |K_N(rho)| N^(|rho|-1) / m!
  double worst_ratio = 0.0;
  std::int64_t max_abs_coeff_sum = 0;
  /// |K_N(rho)| <= m! N^(1-|rho|) for every rho and N, exactly.
  bool bound_ok = true;
  /// C_l(K(x, rho)) = 0 for l < |rho| - 1.
  bool low_coeffs_zero = true;
  /// sum_l |C_l| <= m!.
  bool coeff_sum_ok = true;
  /// K(1/N, rho) equals the defining sum for K_N(rho), exactly.
  bool polynomial_matches = true;

  bool pass() const { return bound_ok && low_coeffs_zero && coeff_sum_ok && polynomial_matches; }
};

/// One row per m = 1..max_m, every partition of [m], every N in Ns.
std::vector<PartitionAuditRow> partition_audit(int max_m, std::span<const std::int64_t> Ns);

struct OperatorAuditShape {
  int trials = 1000;
  int cutoff = 3;
  std::vector<int> dims{1, 2};
  int max_vars = 3;
  int max_kernel_modes = 3;
  int nonzeros = 24;
};

struct OperatorAuditResult {
  int trials = 0;
  /// min over trials of l1_mass * |h| - |inv_grad(op h)| per operator and norm.
  double min_slack_H_l2 = 0.0;
  double min_slack_S_l2 = 0.0;
  double min_slack_H_linf = 0.0;
  double min_slack_S_linf = 0.0;
  /// Largest output coefficient found on the xi_k = 0 plane.
  double zero_plane_max = 0.0;
  int violations = 0;

  bool pass() const { return violations == 0; }
};

/// Random fields and random finite-mode kernels; a trial violates when any
/// slack is below -tolerance or the xi_k = 0 plane is not annihilated.
OperatorAuditResult operator_norm_audit(const OperatorAuditShape& shape, std::uint64_t seed,
                                        double tolerance = 1e-12);

}  // namespace chaos
