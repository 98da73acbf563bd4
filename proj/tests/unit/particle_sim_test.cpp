#include <gtest/gtest.h>

#include <boost/random/uniform_01.hpp>

#include <algorithm>

#include "chaos/particle_sim.hpp"
#include "support.hpp"

using namespace chaos;
using testing_support::fv;
using testing_support::kTwoPi;

namespace {

SpectralField cosine_density(double amplitude) {
  SpectralField f(1, 1, 1, true);
  f.set(fv({0}), 1.0);
  f.set(fv({1}), amplitude / 2);
  f.set(fv({-1}), amplitude / 2);
  f.set_probability_tag(true);
  return f;
}

SpectralField uniform_density(int d) {
  auto f = SpectralField::constant(1, d, 1, 1.0);
  f.set_real_tag(true);
  return f;
}

SimConfig base_config() {
  SimConfig c;
  c.N = 8;
  c.sigma = 0.5;
  c.dt = 1e-3;
  c.t_end = 0.01;
  c.replicas = 3;
  c.seed = 99;
  c.kernel = KernelSpec::kuramoto();
  c.rho0 = cosine_density(0.5);
  return c;
}

std::vector<double> direct_pair_sum(std::span<const double> x, int d, const KernelSpec& k) {
  const std::size_t n = x.size() / d;
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = k.evaluate(x.subspan(i * d, d), x.subspan(j * d, d));
      for (int c = 0; c < d; ++c) out[i * d + c] += v[c] / n;
    }
  }
  return out;
}

KernelSpec random_kernel_2d(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<KernelMode> modes;
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> keys{
      {{1, 0}, {-1, 0}}, {{0, 1}, {1, -1}}, {{2, 1}, {0, 0}}};
  for (const auto& [lam, eta] : keys) {
    const std::vector<Complex> c{{g(rng), g(rng)}, {g(rng), g(rng)}};
    modes.push_back({lam, eta, c});
    std::vector<int> nl{-lam[0], -lam[1]}, ne{-eta[0], -eta[1]};
    modes.push_back({nl, ne, {std::conj(c[0]), std::conj(c[1])}});
  }
  return KernelSpec(2, std::move(modes));
}

}  // namespace

TEST(SimConfig, ViolationsAreAllReported) {
  auto c = base_config();
  c.dt = 0.0;
  c.N = 1;
  c.obs_times = {2.0};
  const auto v = c.violations();
  EXPECT_EQ(v.size(), 3u);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_TRUE(base_config().violations().empty());
}

TEST(SampleInitial, UniformAcceptsEveryProposal) {
  std::mt19937_64 rng(5), shadow(5);
  const auto x = sample_initial(uniform_density(2), 50, rng, 1.0);
  boost::random::uniform_01<double> u;
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(x[2 * i], u(shadow));
    EXPECT_EQ(x[2 * i + 1], u(shadow));
    u(shadow);  // acceptance draw
  }
  for (double v : x) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(SampleInitial, CosineModeMean) {
  std::mt19937_64 rng(6);
  const int n = 200000;
  const auto x = sample_initial(cosine_density(0.5), n, rng);
  double s = 0.0;
  for (double v : x) s += std::cos(kTwoPi * v);
  EXPECT_NEAR(s / n, 0.25, 3.0 / std::sqrt(n));
}

TEST(SampleInitial, KolmogorovSmirnovAgainstQuadratureCdf) {
  std::mt19937_64 rng(7);
  const int n = 100000;
  auto x = sample_initial(cosine_density(0.5), n, rng);
  std::sort(x.begin(), x.end());
  // CDF by trapezoid quadrature of the density on a fine grid
  const int G = 20000;
  std::vector<double> cdf(G + 1, 0.0);
  auto rho = [](double t) { return 1.0 + 0.5 * std::cos(kTwoPi * t); };
  for (int k = 1; k <= G; ++k) cdf[k] = cdf[k - 1] + 0.5 * (rho((k - 1.0) / G) + rho(double(k) / G)) / G;
  auto F = [&](double t) {
    const double pos = t * G;
    const int k = std::min(G - 1, static_cast<int>(pos));
    return cdf[k] + (pos - k) * (cdf[k + 1] - cdf[k]);
  };
  double D = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = F(x[i]);
    D = std::max({D, std::abs(f - double(i) / n), std::abs(double(i + 1) / n - f)});
  }
  EXPECT_LT(D, 1.628 / std::sqrt(n));
}

TEST(SampleInitial, NegativeDensityRejected) {
  EXPECT_THROW(check_density(cosine_density(2.5)), std::invalid_argument);
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_initial(cosine_density(2.5), 4, rng), std::invalid_argument);
  EXPECT_THROW(sample_initial(cosine_density(0.5), 4, rng, 1.2), std::invalid_argument);  // envelope below max
}

TEST(Drift, ZeroKernel) {
  const std::vector<double> x{0.1, 0.7, 0.3};
  for (auto mode : {DriftMode::direct, DriftMode::spectral}) {
    for (double v : drift(x, 1, KernelSpec::zero(1), mode)) EXPECT_EQ(v, 0.0);
  }
}

TEST(Drift, TwoParticleHandValue) {
  const std::vector<double> x{0.0, 0.25};
  for (auto mode : {DriftMode::direct, DriftMode::spectral}) {
    const auto v = drift(x, 1, KernelSpec::kuramoto(), mode);
    EXPECT_NEAR(v[0], 0.5, 1e-15);
    EXPECT_NEAR(v[1], -0.5, 1e-15);
  }
}

TEST(Drift, SpectralMatchesPairSum) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int N : {2, 5, 33}) {
    std::vector<double> x1(N);
    for (auto& v : x1) v = u(rng);
    const auto k1 = KernelSpec::kuramoto(1.7);
    const auto oracle1 = direct_pair_sum(x1, 1, k1);
    const auto s1 = drift(x1, 1, k1, DriftMode::spectral);
    const auto d1 = drift(x1, 1, k1, DriftMode::direct);
    for (int i = 0; i < N; ++i) {
      EXPECT_NEAR(s1[i], oracle1[i], 1e-12);
      EXPECT_NEAR(d1[i], oracle1[i], 1e-12);
    }
    std::vector<double> x2(2 * N);
    for (auto& v : x2) v = u(rng);
    const auto k2 = random_kernel_2d(rng);
    const auto oracle2 = direct_pair_sum(x2, 2, k2);
    const auto s2 = drift(x2, 2, k2, DriftMode::spectral);
    for (int i = 0; i < 2 * N; ++i) EXPECT_NEAR(s2[i], oracle2[i], 1e-12);
  }
}

TEST(Drift, PeriodicInPositions) {
  const std::vector<double> x{0.1, 0.45, 0.8}, shifted{1.1, -0.55, 2.8};
  const auto a = drift(x, 1, KernelSpec::kuramoto(), DriftMode::spectral);
  const auto b = drift(shifted, 1, KernelSpec::kuramoto(), DriftMode::spectral);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Step, NoNoiseNoKernelIsStatic) {
  auto c = base_config();
  c.sigma = 0.0;
  c.kernel = KernelSpec::zero(1);
  const Ensemble e0(c);
  const auto e1 = step(e0, c);
  for (int r = 0; r < c.replicas; ++r) {
    const auto a = e0.positions(r), b = e1.positions(r);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
  EXPECT_DOUBLE_EQ(e1.time(), c.dt);
}

TEST(Step, BrownianIncrementVariance) {
  auto c = base_config();
  c.kernel = KernelSpec::zero(1);
  c.rho0 = uniform_density(1);
  c.N = 200;
  c.replicas = 10;
  c.sigma = 0.3;
  Ensemble e(c);
  const int steps = 200;
  std::vector<double> unwrapped(static_cast<std::size_t>(c.N * c.replicas), 0.0);
  auto prev = e.snapshot().positions;
  for (int s = 0; s < steps; ++s) {
    e.advance(c);
    const auto now = e.snapshot().positions;
    for (std::size_t i = 0; i < now.size(); ++i) {
      double dx = now[i] - prev[i];
      dx -= std::round(dx);  // single-step increments are far below 1/2
      unwrapped[i] += dx;
    }
    prev = now;
  }
  double mean = 0.0, sq = 0.0;
  for (double v : unwrapped) {
    mean += v;
    sq += v * v;
  }
  const double n = static_cast<double>(unwrapped.size());
  mean /= n;
  const double var = sq / n - mean * mean;
  const double expect = 2.0 * c.sigma * steps * c.dt;
  EXPECT_NEAR(var, expect, 4.0 * expect * std::sqrt(2.0 / n));
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(expect / n));
}

TEST(Run, SameSeedIsBitIdentical) {
  auto c = base_config();
  c.obs_times = {0.005, 0.01};
  const auto a = run(c, 1);
  const auto b = run(c, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].positions, b[k].positions);
  c.seed += 1;
  EXPECT_NE(run(c, 1)[0].positions, a[0].positions);
}

TEST(Run, MatchesRepeatedSteps) {
  auto c = base_config();
  Ensemble e(c);
  for (int s = 0; s < 10; ++s) e.advance(c);
  const auto snaps = run(c);
  ASSERT_EQ(snaps.size(), 1u);
  EXPECT_EQ(snaps[0].positions, e.snapshot().positions);
}

TEST(Run, ZeroHorizonGivesInitialSample) {
  auto c = base_config();
  c.t_end = 0.0;
  const auto snaps = run(c);
  ASSERT_EQ(snaps.size(), 1u);
  EXPECT_EQ(snaps[0].time, 0.0);
  EXPECT_EQ(snaps[0].positions, Ensemble(c).snapshot().positions);
}

TEST(Run, ObservationTimesSnapToGrid) {
  auto c = base_config();
  c.dt = 0.003;
  c.t_end = 1.0;
  c.N = 2;
  c.replicas = 1;
  c.obs_times = {0.0, 0.5, 1.0};
  const auto snaps = run(c);
  ASSERT_EQ(snaps.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(std::abs(snaps[k].time - c.obs_times[k]), c.dt / 2 + 1e-12);
}

TEST(Run, HeatDecayOfFirstMode) {
  auto c = base_config();
  c.kernel = KernelSpec::zero(1);
  c.N = 400;
  c.replicas = 100;
  c.t_end = 1.0;
  c.dt = 2e-3;
  const auto snap = run(c).front();
  std::vector<double> per;
  for (int r = 0; r < snap.replicas; ++r) {
    double s = 0.0;
    for (double v : snap.replica(r)) s += std::cos(kTwoPi * v);
    per.push_back(s / snap.N);
  }
  double mean = 0.0, sq = 0.0;
  for (double v : per) mean += v;
  mean /= per.size();
  for (double v : per) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (per.size() - 1) / per.size());
  EXPECT_NEAR(mean, 0.25 * std::exp(-4 * std::numbers::pi * std::numbers::pi * 0.5), 3 * se);
}

TEST(Rng, ReplicaStreamsDifferAndRepeat) {
  auto a = replica_rng(1, 0), b = replica_rng(1, 0), c = replica_rng(1, 1), d = replica_rng(2, 0);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}
