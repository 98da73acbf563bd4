#include <gtest/gtest.h>

#include "chaos/mckean_vlasov.hpp"
#include "support.hpp"

using namespace chaos;
using testing_support::fv;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField cosine_density(double amplitude, int cutoff = 1) {
  SpectralField f(1, 1, cutoff, true);
  f.set(fv({0}), 1.0);
  f.set(fv({1}), amplitude / 2);
  f.set(fv({-1}), amplitude / 2);
  f.set_probability_tag(true);
  return f;
}

PdeRunConfig config(double sigma, double dt, double t_end, KernelSpec k, SpectralField rho0) {
  PdeRunConfig c;
  c.sigma = sigma;
  c.dt = dt;
  c.t_end = t_end;
  c.kernel = std::move(k);
  c.rho0 = std::move(rho0);
  c.cutoff = 6;
  return c;
}

double linf_diff(const SpectralField& a, const SpectralField& b) { return norms(a - b).linf; }

}  // namespace

TEST(MvRhs, ZeroKernel) { EXPECT_EQ(norms(mv_rhs(cosine_density(0.5), KernelSpec::zero(1))).linf, 0.0); }

TEST(MvRhs, UniformIsStationaryUnderKuramoto) {
  EXPECT_EQ(norms(mv_rhs(cosine_density(0.0), KernelSpec::kuramoto(3.0))).linf, 0.0);
}

TEST(MvRhs, ModeZeroVanishesAndHandValue) {
  const auto out = mv_rhs(cosine_density(0.5, 3), KernelSpec::kuramoto(1.0));
  EXPECT_EQ(out.coeff(fv({0})), Complex{});
  // -div(rho * (K * rho)) with K * rho = -(a/2) sin(2 pi x) * ... gives a mode-2 term only:
  // drift u(x) = int -sin(2 pi (x - y)) (1 + a cos 2 pi y) dy = -(a/2) sin(2 pi x)
  // rho u = -(a/2) sin(2 pi x) - (a^2/4) sin(4 pi x); -d/dx picks 2 pi (a/2) cos + 4 pi (a^2/4) cos(4 pi x)
  const double a = 0.5;
  EXPECT_NEAR(out.coeff(fv({1})).real(), 2 * kPi * (a / 2) / 2, 1e-14);
  EXPECT_NEAR(out.coeff(fv({2})).real(), 4 * kPi * (a * a / 4) / 2, 1e-14);
  EXPECT_NEAR(std::abs(out.coeff(fv({1})).imag()), 0.0, 1e-14);
}

TEST(SolveRho, ZeroKernelIsHeatFlowPerStep) {
  auto c = config(0.7, 0.01, 0.2, KernelSpec::zero(1), cosine_density(0.8));
  c.obs_times = {0.1, 0.2};
  const auto traj = solve_rho(c);
  ASSERT_EQ(traj.fields.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    const double decay = std::exp(-0.7 * 4 * kPi * kPi * traj.times[k]);
    EXPECT_NEAR(traj.fields[k].coeff(fv({1})).real(), 0.4 * decay, 1e-14);
  }
}

TEST(SolveRho, MassAndSymmetryPreserved) {
  auto c = config(0.3, 0.01, 0.5, KernelSpec::kuramoto(2.0), cosine_density(0.9));
  const auto traj = solve_rho(c, true);
  ASSERT_EQ(traj.fields.size(), 51u);
  for (const auto& f : traj.fields) {
    EXPECT_EQ(f.coeff(fv({0})), Complex{1.0});
    EXPECT_LE(f.conjugate_asymmetry(), 1e-15);
  }
}

TEST(SolveRho, BlowUpGuard) {
  auto c = config(0.0, 0.5, 50.0, KernelSpec::kuramoto(400.0), cosine_density(0.9));
  EXPECT_THROW(solve_rho(c), std::runtime_error);
}

TEST(SolveRho, ConfigViolations) {
  auto c = config(0.3, 0.0, 1.0, KernelSpec::kuramoto(), cosine_density(0.5));
  c.cutoff = 0;
  EXPECT_EQ(c.violations().size(), 2u);
  EXPECT_THROW(solve_rho(c), std::invalid_argument);
}

TEST(SolveRho, FirstOrderSelfConvergence) {
  // successive differences u(dt) - u(dt/2) and u(dt/2) - u(dt/4)
  auto base = config(0.1, 0.005, 0.5, KernelSpec::kuramoto(4.0), cosine_density(0.9));
  std::vector<SpectralField> sol;
  for (double dt : {0.005, 0.0025, 0.00125}) {
    auto c = base;
    c.dt = dt;
    sol.push_back(solve_rho(c).fields.back());
  }
  const double ratio = linf_diff(sol[0], sol[1]) / linf_diff(sol[1], sol[2]);
  EXPECT_NEAR(ratio, 2.0, 0.3);
}

TEST(SolveB, ZeroKernelStaysZero) {
  auto c = config(0.5, 0.01, 0.3, KernelSpec::zero(1), cosine_density(0.5));
  const auto b = solve_b(solve_rho(c, true), c);
  EXPECT_EQ(norms(b.fields.back()).linf, 0.0);
}

TEST(SolveB, SymmetricAndReal) {
  auto c = config(0.4, 0.01, 0.5, KernelSpec::kuramoto(2.0), cosine_density(0.8));
  c.obs_times = {0.1, 0.3, 0.5};
  const auto b = solve_b(solve_rho(c, true), c);
  for (const auto& f : b.fields) {
    EXPECT_GT(norms(f).linf, 0.0);
    EXPECT_LE(f.conjugate_asymmetry(), 1e-14);
    double asym = 0.0;
    f.for_each([&](const FreqVec& xi, Complex v) {
      asym = std::max(asym, std::abs(v - f.coeff(fv({xi(1, 0), xi(0, 0)}))));
    });
    EXPECT_LE(asym, 1e-12);
  }
}

TEST(SolveB, DiscreteFixedPointForUniformDensity) {
  // For uniform rho the (1,-1) mode obeys beta' = -8 pi^2 sigma beta + alpha beta + 2 pi
  // with alpha = 2 pi (alpha = 0 with the y transport flipped); the Lawson step is affine in beta.
  const double sigma = 2.0, dt = 1e-3;
  auto c = config(sigma, dt, 1.0, KernelSpec::kuramoto(1.0), cosine_density(0.0));
  const auto rho = solve_rho(c, true);
  const double q = std::exp(-8 * kPi * kPi * sigma * dt);
  for (bool flip : {false, true}) {
    c.flip_y_transport = flip;
    const double alpha = flip ? 0.0 : 2 * kPi;
    const double fixed = q * dt * 2 * kPi / (1 - q * (1 + alpha * dt));
    const auto b = solve_b(rho, c).fields.back();
    EXPECT_NEAR(b.coeff(fv({1, -1})).real(), fixed, 1e-10);
    EXPECT_NEAR(b.coeff(fv({-1, 1})).real(), fixed, 1e-10);
    EXPECT_NEAR(std::abs(b.coeff(fv({1, 1}))), 0.0, 1e-15);
  }
  // continuous-time equilibrium 1/(4 pi sigma - 1) approached as dt -> 0
  c.flip_y_transport = false;
  c.dt = 1e-4;
  const auto fine = solve_b(solve_rho(c, true), c).fields.back();
  EXPECT_NEAR(fine.coeff(fv({1, -1})).real(), 1.0 / (8 * kPi - 1), 0.01 / (8 * kPi - 1));
}

TEST(SolveB, FirstOrderSelfConvergence) {
  auto base = config(0.1, 0.005, 0.5, KernelSpec::kuramoto(4.0), cosine_density(0.9));
  std::vector<SpectralField> sol;
  for (double dt : {0.005, 0.0025, 0.00125}) {
    auto c = base;
    c.dt = dt;
    sol.push_back(solve_b(solve_rho(c, true), c).fields.back());
  }
  const double ratio = linf_diff(sol[0], sol[1]) / linf_diff(sol[1], sol[2]);
  EXPECT_NEAR(ratio, 2.0, 0.3);
}

TEST(SolveB, GridMismatchRejected) {
  auto c = config(0.5, 0.01, 0.1, KernelSpec::kuramoto(), cosine_density(0.5));
  auto coarse = c;
  coarse.dt = 0.02;
  EXPECT_THROW(solve_b(solve_rho(coarse, true), c), std::invalid_argument);
  EXPECT_THROW(solve_b(solve_rho(c, false), c), std::invalid_argument);
}
