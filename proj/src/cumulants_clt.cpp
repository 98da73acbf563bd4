#include "chaos/cumulants_clt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace chaos {

namespace {

SpectralField convolve(const SpectralField& a, const SpectralField& b) {
  SpectralField out(1, a.dim(), a.cutoff() + b.cutoff(), a.real_tag() && b.real_tag());
  FreqVec sum(1, a.dim());
  a.for_each([&](const FreqVec& xa, Complex va) {
    b.for_each([&](const FreqVec& xb, Complex vb) {
      for (int c = 0; c < a.dim(); ++c) sum(0, c) = xa(0, c) + xb(0, c);
      out.add(sum, va * vb);
    });
  });
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TestFunction::TestFunction(SpectralField phi) : phi_(std::move(phi)) {
  if (phi_.num_vars() != 1) throw std::invalid_argument("TestFunction: phi must have one variable");
  if (phi_.conjugate_asymmetry() > 1e-12) throw std::invalid_argument("TestFunction: phi is not real-valued");
  phi_ = phi_.relabeled({0});
  phi_.set_real_tag(true);
  phi_.for_each([&](const FreqVec&, Complex v) { l1_ += std::abs(v); });
}

TestFunction TestFunction::constant(int d, double value) {
  return TestFunction(SpectralField::constant(1, d, 0, value));
}

TestFunction TestFunction::cosine(int k) {
  if (k == 0) return constant(1, 1.0);
  SpectralField f(1, 1, std::abs(k), true);
  f.set(FreqVec(1, std::vector<int>{k}), 0.5);
  f.set(FreqVec(1, std::vector<int>{-k}), 0.5);
  return TestFunction(std::move(f));
}

TestFunction TestFunction::fejer(int order) {
  if (order < 0) throw std::invalid_argument("TestFunction::fejer: negative order");
  SpectralField f(1, 1, order, true);
  for (int k = -order; k <= order; ++k) {
    f.set(FreqVec(1, std::vector<int>{k}), 1.0 - static_cast<double>(std::abs(k)) / (order + 1));
  }
  return TestFunction(std::move(f));
}

double TestFunction::operator()(std::span<const double> x) const { return eval_field(phi_, x).real(); }

SpectralField TestFunction::power(int k) const {
  if (k < 1) throw std::invalid_argument("TestFunction::power: exponent must be >= 1");
  const int r = phi_.support_radius();
  SpectralField base = phi_.with_cutoff(r);
  SpectralField acc = base;
  for (int i = 1; i < k; ++i) acc = convolve(acc, base);
  acc.set_real_tag(true);
  return acc;
}

double linear_statistic(std::span<const double> positions, const TestFunction& phi) {
  const int d = phi.dim();
  if (positions.empty() || positions.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("linear_statistic: coordinate count is not a positive multiple of the dimension");
  }
  const std::size_t n = positions.size() / static_cast<std::size_t>(d);
  std::vector<std::pair<std::vector<double>, Complex>> modes;
  phi.field().for_each([&](const FreqVec& xi, Complex v) {
    modes.emplace_back(std::vector<double>(xi.components().begin(), xi.components().end()), v);
  });
  Complex acc{};
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [xi, v] : modes) {
      double phase = 0.0;
      for (int c = 0; c < d; ++c) phase += xi[c] * positions[i * d + c];
      acc += v * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
  }
  acc /= static_cast<double>(n);
  if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, phi.l1_norm())) {
    throw std::runtime_error("linear_statistic: imaginary part " + std::to_string(acc.imag()) + " is not negligible");
  }
  return acc.real();
}

std::vector<double> linear_statistics(const Snapshot& snapshot, const TestFunction& phi) {
  if (snapshot.d != phi.dim()) throw std::invalid_argument("linear_statistics: dimension mismatch");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(snapshot.replicas));
  for (int r = 0; r < snapshot.replicas; ++r) out.push_back(linear_statistic(snapshot.replica(r), phi));
  return out;
}

CumulantEstimate empirical_cumulants(std::span<const double> samples, int max_order) {
  if (max_order < 1) throw std::invalid_argument("empirical_cumulants: max_order must be >= 1");
  const std::size_t R = samples.size();
  if (R < static_cast<std::size_t>(10 * max_order) || R < 2) {
    throw std::invalid_argument("empirical_cumulants: need at least " + std::to_string(10 * max_order) +
                                " samples, got " + std::to_string(R));
  }
  // Cumulants beyond the first are shift invariant; centring limits cancellation.
  const double shift = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(R);
  const auto K = static_cast<std::size_t>(max_order);
  std::vector<double> sums(K, 0.0);
  std::vector<double> pw(R * K);
  for (std::size_t r = 0; r < R; ++r) {
    double p = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      p *= samples[r] - shift;
      pw[r * K + k] = p;
      sums[k] += p;
    }
  }
  auto cumulants_from = [&](const std::vector<double>& moments) {
    auto kappa = moments_to_cumulants<double>(moments);
    kappa[0] += shift;
    return kappa;
  };
  std::vector<double> moments(K);
  for (std::size_t k = 0; k < K; ++k) moments[k] = sums[k] / static_cast<double>(R);

  CumulantEstimate est;
  est.values = cumulants_from(moments);
  std::vector<std::vector<double>> loo(K, std::vector<double>(R));
  std::vector<double> m_r(K);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) m_r[k] = (sums[k] - pw[r * K + k]) / static_cast<double>(R - 1);
    const auto kr = cumulants_from(m_r);
    for (std::size_t k = 0; k < K; ++k) loo[k][r] = kr[k];
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double mean = std::accumulate(loo[k].begin(), loo[k].end(), 0.0) / static_cast<double>(R);
    double ss = 0.0;
    for (double v : loo[k]) ss += (v - mean) * (v - mean);
    est.ses.push_back(std::sqrt(static_cast<double>(R - 1) / static_cast<double>(R) * ss));
  }
  return est;
}

Complex pairing(const SpectralField& f, const SpectralField& g) {
  if (f.num_vars() != g.num_vars() || f.dim() != g.dim()) throw std::invalid_argument("pairing: shape mismatch");
  Complex acc{};
  f.for_each([&](const FreqVec& xi, Complex v) { acc += v * g.coeff(xi.negated()); });
  return acc;
}

double cumulants_from_correlations(const TestFunction& phi, const FieldFamily& g, std::int64_t N, int m) {
  if (m < 1) throw std::invalid_argument("cumulants_from_correlations: m must be >= 1");
  if (N < 1) throw std::invalid_argument("cumulants_from_correlations: N must be >= 1");
  for (int k = 1; k <= m; ++k) {
    auto it = g.find(k);
    if (it == g.end()) throw std::invalid_argument("cumulants_from_correlations: correlation of order " + std::to_string(k) + " missing");
    if (it->second.num_vars() != k) throw std::invalid_argument("cumulants_from_correlations: correlation of order " + std::to_string(k) + " has the wrong arity");
  }
  std::vector<SpectralField> powers(static_cast<std::size_t>(m) + 1);
  for (int k = 1; k <= m; ++k) powers[k] = phi.power(k);

  double kappa = 0.0;
  for (const auto& pi : enumerate_partitions(m)) {
    const auto sizes = pi.block_sizes();
    const int nb = pi.num_blocks();
    double inner = 0.0;
    for (const auto& rho : enumerate_partitions(nb)) {
      double term = K_N_eval(rho, N).convert_to<double>();
      for (const auto& group : rho.blocks()) {
        SpectralField F;
        for (std::size_t s = 0; s < group.size(); ++s) {
          auto piece = powers[sizes[group[s]]].relabeled({static_cast<int>(s)});
          F = s == 0 ? piece : tensor_product(F, piece);
        }
        term *= pairing(F, g.at(static_cast<int>(group.size()))).real();
      }
      inner += term;
    }
    kappa += std::pow(static_cast<double>(N), nb - m) * inner;
  }
  return kappa;
}

double cumulant_bound(const TestFunction& phi, int m, std::int64_t N) {
  if (m < 1 || N < 1) throw std::invalid_argument("cumulant_bound: need m >= 1 and N >= 1");
  return std::pow(8.0 * phi.l1_norm(), m) * std::pow(factorial(m), 4) / std::pow(static_cast<double>(N), m - 1);
}

std::vector<BoundCheck> cumulant_bound_audit(const TestFunction& phi, std::span<const double> values,
                                             std::span<const double> ses, std::int64_t N) {
  if (values.size() != ses.size()) throw std::invalid_argument("cumulant_bound_audit: values and ses differ in length");
  std::vector<BoundCheck> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    BoundCheck c;
    c.order = static_cast<int>(k) + 1;
    c.value = values[k];
    c.se = ses[k];
    c.bound = cumulant_bound(phi, c.order, N);
    c.pass = std::abs(c.value) - c.se <= c.bound;
    out.push_back(c);
  }
  return out;
}

BerryEsseenDiagnostic berry_esseen(const TestFunction& phi, std::int64_t N, double limit_variance) {
  if (!(limit_variance > 0.0)) throw std::invalid_argument("berry_esseen: limiting variance must be positive");
  if (!(phi.l1_norm() > 0.0)) throw std::invalid_argument("berry_esseen: phi vanishes");
  BerryEsseenDiagnostic diag;
  const double c = std::sqrt(limit_variance) / (8.0 * phi.l1_norm());
  diag.delta = std::sqrt(static_cast<double>(N)) * std::min(c, c * c * c);
  diag.rate = std::pow(diag.delta, -1.0 / (1.0 + 2.0 * diag.gamma));
  return diag;
}

KsResult ks_distance(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("ks_distance: need at least 2 samples");
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(n - 1);
  KsResult res;
  res.degenerate = var < 1e-12;
  const double scale = res.degenerate ? 1.0 : std::sqrt(var);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (samples[i] - mean) / scale;
  std::sort(z.begin(), z.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    res.distance = std::max({res.distance, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return res;
}

double variance_limit(const TestFunction& phi, const SpectralField& rho, const SpectralField& b) {
  if (rho.num_vars() != 1 || b.num_vars() != 2) throw std::invalid_argument("variance_limit: expected rho(x) and b(x, y)");
  const auto p = phi.field();
  const double second = pairing(phi.power(2), rho).real();
  const double first = pairing(p, rho).real();
  const auto pp = tensor_product(p.relabeled({0}), p.relabeled({1}));
  const double pair = pairing(pp, b).real();
  return second - first * first + pair;
}

}  // namespace chaos
