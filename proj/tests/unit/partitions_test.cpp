#include <gtest/gtest.h>

#include <set>

#include "chaos/audits.hpp"
#include "chaos/partitions.hpp"
#include "chaos/serialization.hpp"
#include "support.hpp"

using namespace chaos;
using testing_support::fv;
using testing_support::random_field;

namespace {

// Bell numbers from the Bell triangle.
std::vector<std::uint64_t> bell_triangle(int n) {
  std::vector<std::uint64_t> bell{1};
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    bell.push_back(next.front());
    row = std::move(next);
  }
  return bell;
}

// iota >= rho: every block of rho sits inside one block of iota.
bool coarser_or_equal(const SetPartition& iota, const SetPartition& rho) {
  for (const auto& b : rho.blocks()) {
    for (const auto& c : iota.blocks()) {
      const bool first_in = std::find(c.begin(), c.end(), b.front()) != c.end();
      if (!first_in) continue;
      for (int e : b) {
        if (std::find(c.begin(), c.end(), e) == c.end()) return false;
      }
    }
  }
  return true;
}

Rational K_N_oracle(const SetPartition& rho, std::int64_t N) {
  Rational total = 0;
  for (const auto& iota : enumerate_partitions(rho.size())) {
    if (!coarser_or_equal(iota, rho)) continue;
    const int k = iota.num_blocks();
    BigInt f = 1;
    for (int i = 2; i < k; ++i) f *= i;
    Rational term = (k % 2 == 1) ? Rational(f) : Rational(-f);
    for (const auto& c : iota.blocks()) {
      for (int r = 1; r < static_cast<int>(c.size()); ++r) term *= Rational(N - r, N);
    }
    total += term;
  }
  return total;
}

SetPartition P(int m, std::vector<std::vector<int>> blocks) { return SetPartition(m, std::move(blocks)); }

}  // namespace

TEST(Enumerate, SmallCounts) {
  EXPECT_EQ(enumerate_partitions(1).size(), 1u);
  EXPECT_EQ(enumerate_partitions(3).size(), 5u);
  EXPECT_EQ(enumerate_partitions(8).size(), 4140u);
}

TEST(Enumerate, BellTriangleAndUniqueness) {
  const auto bell = bell_triangle(10);
  for (int m = 1; m <= 10; ++m) {
    const auto parts = enumerate_partitions(m);
    ASSERT_EQ(parts.size(), bell[m]) << "m=" << m;
    if (m <= 7) {
      std::set<std::vector<std::vector<int>>> seen;
      for (const auto& p : parts) {
        for (std::size_t i = 0; i + 1 < p.blocks().size(); ++i) {
          EXPECT_LT(p.blocks()[i].front(), p.blocks()[i + 1].front());
        }
        seen.insert(p.blocks());
      }
      EXPECT_EQ(seen.size(), parts.size());
    }
  }
}

TEST(Enumerate, CountBelowPartitionBound) {
  const auto bell = bell_triangle(10);
  double fact = 1.0;
  for (int m = 1; m <= 10; ++m) {
    fact *= m;
    EXPECT_LE(static_cast<double>(bell[m]), std::ldexp(fact, m - 1));
  }
}

TEST(Enumerate, RangeGuard) {
  EXPECT_THROW(enumerate_partitions(0), std::invalid_argument);
  EXPECT_THROW(enumerate_partitions(13), std::invalid_argument);
}

TEST(SetPartitionType, ValidationAndCanonicalForm) {
  const auto p = P(4, {{3, 1}, {0}, {2}});
  EXPECT_EQ(p.blocks(), (std::vector<std::vector<int>>{{0}, {1, 3}, {2}}));
  EXPECT_EQ(p.block_of(3), 1);
  EXPECT_THROW(P(3, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(P(3, {{0, 1}, {1, 2}}), std::invalid_argument);
  EXPECT_THROW(P(3, {{0, 1, 2}, {}}), std::invalid_argument);
  EXPECT_THROW(P(2, {{0, 5}}), std::invalid_argument);
}

TEST(SetPartitionType, JsonRoundTrip) {
  const auto p = P(5, {{4, 0}, {1, 2}, {3}});
  const Json j = to_json(p);
  EXPECT_EQ(j, Json::parse("[[0,4],[1,2],[3]]"));
  EXPECT_EQ(partition_from_json(j), p);
}

TEST(Refines, Examples) {
  const auto singles = SetPartition::singletons(3);
  const auto whole = SetPartition::single_block(3);
  for (const auto& s : enumerate_partitions(3)) {
    EXPECT_TRUE(refines(s, singles));
    EXPECT_TRUE(refines(whole, s));
  }
  const auto a = P(3, {{0, 1}, {2}});
  const auto b = P(3, {{0, 2}, {1}});
  EXPECT_FALSE(refines(a, b));
  EXPECT_FALSE(refines(b, a));
  EXPECT_THROW(refines(a, SetPartition::singletons(4)), std::invalid_argument);
}

TEST(Refines, IsAPartialOrder) {
  const auto parts = enumerate_partitions(4);
  for (const auto& x : parts) {
    EXPECT_TRUE(refines(x, x));
    for (const auto& y : parts) {
      EXPECT_EQ(refines(x, y), coarser_or_equal(x, y));
      if (refines(x, y) && refines(y, x)) EXPECT_EQ(x, y);
      for (const auto& z : parts) {
        if (refines(x, y) && refines(y, z)) EXPECT_TRUE(refines(x, z));
      }
    }
  }
}

TEST(Coarsenings, MatchFilteredEnumeration) {
  for (const auto& rho : enumerate_partitions(5)) {
    std::size_t expect = 0;
    for (const auto& iota : enumerate_partitions(5)) expect += coarser_or_equal(iota, rho) ? 1 : 0;
    EXPECT_EQ(coarsenings(rho).size(), expect);
  }
}

TEST(MobiusIdentity, Examples) {
  EXPECT_EQ(mobius_identity_check(SetPartition::single_block(3)), 1);
  EXPECT_EQ(mobius_identity_check(P(2, {{0}, {1}})), 0);
}

TEST(MobiusIdentity, ExhaustiveToSix) {
  for (int m = 1; m <= 6; ++m) {
    for (const auto& pi : enumerate_partitions(m)) {
      EXPECT_EQ(mobius_identity_check(pi), pi.num_blocks() == 1 ? 1 : 0);
    }
  }
}

TEST(MarginalsToCorrelations, LowOrders) {
  std::mt19937_64 rng(21);
  FieldFamily f;
  for (int k = 1; k <= 3; ++k) f[k] = random_field(rng, k, 1, 2, 6);
  EXPECT_EQ(norms(marginals_to_correlations(f, 1) - f[1]).linf, 0.0);

  const auto g2 = marginals_to_correlations(f, 2);
  const auto expect2 = f[2] - tensor_product(f[1], f[1].relabeled({1}));
  EXPECT_LE(norms(g2 - expect2).linf, 1e-14);

  auto at = [&](int k, std::vector<int> labels) { return f[k].relabeled(std::move(labels)); };
  auto expect3 = f[3];
  expect3 -= tensor_product(at(1, {0}), at(2, {1, 2}));
  expect3 -= tensor_product(at(1, {1}), at(2, {0, 2}));
  expect3 -= tensor_product(at(1, {2}), at(2, {0, 1}));
  auto triple = tensor_product(tensor_product(at(1, {0}), at(1, {1})), at(1, {2}));
  triple *= Complex{2.0};
  expect3 += triple;
  EXPECT_LE(norms(marginals_to_correlations(f, 3) - expect3).linf, 1e-13);
}

TEST(CorrelationsToMarginals, LowOrders) {
  std::mt19937_64 rng(22);
  FieldFamily g;
  for (int k = 1; k <= 2; ++k) g[k] = random_field(rng, k, 1, 2, 6);
  EXPECT_EQ(norms(correlations_to_marginals(g, 1) - g[1]).linf, 0.0);
  const auto expect = g[2] + tensor_product(g[1], g[1].relabeled({1}));
  EXPECT_LE(norms(correlations_to_marginals(g, 2) - expect).linf, 1e-14);
}

TEST(CorrelationsToMarginals, RoundTripRandom) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 3; ++trial) {
    FieldFamily f;
    for (int k = 1; k <= 4; ++k) f[k] = random_field(rng, k, 1, 1, 5);
    FieldFamily g;
    for (int k = 1; k <= 4; ++k) g[k] = marginals_to_correlations(f, k);
    for (int k = 1; k <= 4; ++k) {
      EXPECT_LE(norms(correlations_to_marginals(g, k) - f[k]).linf, 1e-12) << "k=" << k;
    }
  }
}

TEST(CorrelationsToMarginals, MissingMemberThrows) {
  FieldFamily g;
  g[1] = SpectralField(1, 1, 1);
  EXPECT_THROW(correlations_to_marginals(g, 2), std::invalid_argument);
  EXPECT_THROW(marginals_to_correlations(g, 2), std::invalid_argument);
}

TEST(Cumulants, StandardNormal) {
  const std::vector<double> mu{0, 1, 0, 3};
  const auto k = moments_to_cumulants<double>(mu);
  EXPECT_EQ(k, (std::vector<double>{0, 1, 0, 0}));
}

TEST(Cumulants, ThirdOrderFormula) {
  const std::vector<double> mu{0.7, 1.9, -2.3};
  const auto k = moments_to_cumulants<double>(mu);
  EXPECT_NEAR(k[2], mu[2] - 3 * mu[1] * mu[0] + 2 * mu[0] * mu[0] * mu[0], 1e-14);
}

TEST(Cumulants, PoissonExact) {
  const Rational lam = 2;
  const std::vector<Rational> mu{lam, lam + lam * lam, lam + 3 * lam * lam + lam * lam * lam};
  const auto k = moments_to_cumulants<Rational>(mu);
  EXPECT_EQ(k, (std::vector<Rational>{2, 2, 2}));
}

TEST(Cumulants, RoundTrips) {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Rational> q;
    for (int i = 0; i < 6; ++i) q.emplace_back(num(rng), den(rng));
    // moments of a random five-atom law on [-1, 1]
    std::vector<double> atoms(5), weights(5);
    double total = 0.0;
    for (int a = 0; a < 5; ++a) {
      atoms[a] = u(rng);
      weights[a] = u(rng) + 1.0;
      total += weights[a];
    }
    std::vector<double> x(6, 0.0);
    for (int i = 0; i < 6; ++i) {
      for (int a = 0; a < 5; ++a) x[i] += weights[a] / total * std::pow(atoms[a], i + 1);
    }
    EXPECT_EQ(cumulants_to_moments<Rational>(moments_to_cumulants<Rational>(q)), q);
    const auto back = cumulants_to_moments<double>(moments_to_cumulants<double>(x));
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(back[i], x[i], 1e-12 * std::max(1.0, std::abs(x[i])));
  }
  EXPECT_THROW(moments_to_cumulants<double>(std::vector<double>{}), std::invalid_argument);
}

TEST(KN, Examples) {
  for (std::int64_t N : {1, 2, 5, 64}) {
    EXPECT_EQ(K_N_eval(P(1, {{0}}), N), Rational(1));
    EXPECT_EQ(K_N_eval(P(2, {{0}, {1}}), N), Rational(-1, N));
    EXPECT_EQ(K_N_eval(P(2, {{0, 1}}), N), Rational(N - 1, N));
  }
  EXPECT_THROW(K_N_eval(P(1, {{0}}), 0), std::invalid_argument);
}

TEST(KN, MatchesOracle) {
  const std::int64_t Ns[] = {1, 2, 3, 7, 100};
  for (int m = 1; m <= 5; ++m) {
    for (const auto& rho : enumerate_partitions(m)) {
      const auto multi = K_N_eval(rho, Ns);
      for (std::size_t i = 0; i < std::size(Ns); ++i) {
        EXPECT_EQ(multi[i], K_N_oracle(rho, Ns[i]));
        EXPECT_EQ(K_polynomial(rho).eval(Rational(1, Ns[i])), multi[i]);
      }
    }
  }
}

TEST(KPolynomial, TwoSingletons) {
  const auto p = K_polynomial(P(2, {{0}, {1}}));
  EXPECT_EQ(p.coeffs(), (std::vector<std::int64_t>{0, -1}));
}

TEST(KPolynomial, Arithmetic) {
  const IntPolynomial a({1, -2}), b({3, 0, 1});
  EXPECT_EQ((a * b).coeffs(), (std::vector<std::int64_t>{3, -6, 1, -2}));
  IntPolynomial c({1, 1});
  c += IntPolynomial({-1, -1});
  EXPECT_EQ(c.degree(), -1);
  EXPECT_EQ(b.eval(Rational(1, 2)), Rational(13, 4));
  EXPECT_THROW(IntPolynomial({INT64_MAX}) * IntPolynomial({2}), std::overflow_error);
}

TEST(PartitionAudit, ExhaustiveToEight) {
  std::vector<std::int64_t> Ns;
  for (std::int64_t N = 1; N <= 1024; N *= 2) Ns.push_back(N);
  const auto rows = partition_audit(8, Ns);
  ASSERT_EQ(rows.size(), 8u);
  const auto bell = bell_triangle(8);
  double fact = 1.0;
  for (const auto& r : rows) {
    fact *= r.m;
    EXPECT_EQ(r.partitions, bell[r.m]);
    EXPECT_TRUE(r.bound_ok) << "m=" << r.m;
    EXPECT_TRUE(r.low_coeffs_zero) << "m=" << r.m;
    EXPECT_TRUE(r.coeff_sum_ok) << "m=" << r.m;
    EXPECT_TRUE(r.polynomial_matches) << "m=" << r.m;
    EXPECT_LE(r.worst_ratio, 1.0);
    EXPECT_LE(static_cast<double>(r.max_abs_coeff_sum), fact);
  }
}
