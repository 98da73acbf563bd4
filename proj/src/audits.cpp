#include "chaos/audits.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "chaos/partitions.hpp"
#include "chaos/torus_fourier.hpp"

namespace chaos {

std::vector<PartitionAuditRow> partition_audit(int max_m, std::span<const std::int64_t> Ns) {
  if (max_m < 1 || max_m > 10) throw std::invalid_argument("partition_audit: max_m must lie in 1..10");
  for (auto N : Ns) {
    if (N < 1) throw std::invalid_argument("partition_audit: N must be >= 1");
  }
  std::vector<PartitionAuditRow> rows;
  BigInt fact = 1;
  for (int m = 1; m <= max_m; ++m) {
    fact *= m;
    PartitionAuditRow row;
    row.m = m;
    Rational worst = 0;
    for (const auto& rho : enumerate_partitions(m)) {
      ++row.partitions;
      const auto poly = K_polynomial(rho);
      for (int l = 0; l < rho.num_blocks() - 1; ++l) {
        if (poly.coeff(l) != 0) row.low_coeffs_zero = false;
      }
      row.max_abs_coeff_sum = std::max(row.max_abs_coeff_sum, poly.abs_coeff_sum());
      if (BigInt(poly.abs_coeff_sum()) > fact) row.coeff_sum_ok = false;

      const auto direct = K_N_eval(rho, Ns);
      for (std::size_t k = 0; k < Ns.size(); ++k) {
        const Rational& K = direct[k];
        if (poly.eval(Rational(1, Ns[k])) != K) row.polynomial_matches = false;
        BigInt scale = 1;
        for (int i = 1; i < rho.num_blocks(); ++i) scale *= Ns[k];
        const Rational ratio = abs(K) * Rational(scale) / Rational(fact);
        if (ratio > 1) row.bound_ok = false;
        worst = std::max(worst, ratio);
      }
    }
    row.worst_ratio = worst.convert_to<double>();
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct AuditRng {
  explicit AuditRng(std::uint64_t seed) : gen(seed) {}
  int uniform(int lo, int hi) { return boost::random::uniform_int_distribution<int>(lo, hi)(gen); }
  double gauss() { return boost::random::normal_distribution<double>()(gen); }
  Complex cgauss() {
    const double re = gauss();
    return {re, gauss()};
  }
  std::mt19937_64 gen;
};

KernelSpec random_kernel(AuditRng& rng, int d, int max_index, int max_modes) {
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<Complex>> modes;
  const int count = rng.uniform(1, max_modes);
  for (int i = 0; i < count; ++i) {
    std::vector<int> lambda(static_cast<std::size_t>(d)), eta(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
      lambda[c] = rng.uniform(-max_index, max_index);
      eta[c] = rng.uniform(-max_index, max_index);
    }
    std::vector<int> nl(lambda), ne(eta);
    for (int c = 0; c < d; ++c) {
      nl[c] = -nl[c];
      ne[c] = -ne[c];
    }
    if (modes.count({lambda, eta})) continue;
    std::vector<Complex> coeff(static_cast<std::size_t>(d)), partner(static_cast<std::size_t>(d));
    const bool self_partner = lambda == nl && eta == ne;
    for (int c = 0; c < d; ++c) {
      coeff[c] = self_partner ? Complex(rng.gauss()) : rng.cgauss();
      partner[c] = std::conj(coeff[c]);
    }
    modes[{lambda, eta}] = coeff;
    modes[{nl, ne}] = partner;
  }
  std::vector<KernelMode> list;
  for (const auto& [key, coeff] : modes) list.push_back(KernelMode{key.first, key.second, coeff});
  return KernelSpec(d, std::move(list));
}

SpectralField random_field(AuditRng& rng, int num_vars, int d, int cutoff, int nonzeros) {
  SpectralField f(num_vars, d, cutoff);
  FreqVec xi(num_vars, d);
  for (int i = 0; i < nonzeros; ++i) {
    for (int k = 0; k < num_vars; ++k) {
      for (int c = 0; c < d; ++c) xi(k, c) = rng.uniform(-cutoff, cutoff);
    }
    f.set(xi, rng.cgauss());
  }
  return f;
}

double zero_plane_max(const SpectralField& f, int slot) {
  double worst = 0.0;
  f.for_each([&](const FreqVec& xi, Complex v) {
    if (xi.slot_is_zero(slot)) worst = std::max(worst, std::abs(v));
  });
  return worst;
}

}  // namespace

OperatorAuditResult operator_norm_audit(const OperatorAuditShape& shape, std::uint64_t seed, double tolerance) {
  if (shape.trials < 1 || shape.cutoff < 1 || shape.dims.empty() || shape.max_vars < 1 ||
      shape.max_kernel_modes < 1 || shape.nonzeros < 1) {
    throw std::invalid_argument("operator_norm_audit: every shape parameter must be positive");
  }
  AuditRng rng(seed);
  OperatorAuditResult res;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  res.min_slack_H_l2 = res.min_slack_S_l2 = res.min_slack_H_linf = res.min_slack_S_linf = kInf;

  for (int t = 0; t < shape.trials; ++t) {
    const int d = shape.dims[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(shape.dims.size()) - 1))];
    const int m = rng.uniform(1, shape.max_vars);
    const auto kernel = random_kernel(rng, d, shape.cutoff, shape.max_kernel_modes);
    const double mass = kernel.l1_mass();

    std::vector<int> labels;
    for (int k = 0; k < m; ++k) labels.push_back(k);
    labels.insert(labels.begin(), kStar);
    const auto h_star = random_field(rng, m + 1, d, shape.cutoff, shape.nonzeros).relabeled(labels);
    const auto h = random_field(rng, m, d, shape.cutoff, shape.nonzeros);
    const int k = rng.uniform(0, m - 1);
    const int l = rng.uniform(0, m - 1);

    const auto H = apply_H(kernel, h_star, k);
    const auto S = apply_S(kernel, h, k, l);
    const auto nH = norms(apply_inv_grad(H, k));
    const auto nS = norms(apply_inv_grad(S, k));
    const auto nh_star = norms(h_star);
    const auto nh = norms(h);

    const double sH2 = mass * nh_star.l2 - nH.l2;
    const double sHi = mass * nh_star.linf - nH.linf;
    const double sS2 = mass * nh.l2 - nS.l2;
    const double sSi = mass * nh.linf - nS.linf;
    res.min_slack_H_l2 = std::min(res.min_slack_H_l2, sH2);
    res.min_slack_H_linf = std::min(res.min_slack_H_linf, sHi);
    res.min_slack_S_l2 = std::min(res.min_slack_S_l2, sS2);
    res.min_slack_S_linf = std::min(res.min_slack_S_linf, sSi);
    const double zp = std::max(zero_plane_max(H, H.slot_of(k)), zero_plane_max(S, S.slot_of(k)));
    res.zero_plane_max = std::max(res.zero_plane_max, zp);
    if (std::min({sH2, sHi, sS2, sSi}) < -tolerance || zp != 0.0) ++res.violations;
    ++res.trials;
  }
  return res;
}

}  // namespace chaos
