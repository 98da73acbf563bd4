#pragma once

// Set partitions of {0..m-1}, Moebius inversion on the partition lattice and
// the combinatorial weights that link cumulants of linear statistics to
// correlation functions.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "chaos/torus_fourier.hpp"

namespace chaos {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class SetPartition {
 public:
  SetPartition() = default;
  /// Validates that the blocks cover {0..size-1} disjointly; stores them in
  /// canonical form (each block sorted, blocks ordered by least element).
  SetPartition(int size, std::vector<std::vector<int>> blocks);

  static SetPartition singletons(int size);
  static SetPartition single_block(int size);
  /// From a restricted growth string: element i goes to block rgs[i].
  static SetPartition from_rgs(std::span<const int> rgs);

  int size() const { return size_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int block_of(int element) const { return block_index_.at(static_cast<std::size_t>(element)); }
  std::vector<int> block_sizes() const;

  bool operator==(const SetPartition& other) const { return blocks_ == other.blocks_; }

 private:
  int size_ = 0;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_index_;
};

/// All partitions of {0..m-1} in restricted-growth-string order, 1 <= m <= 12.
std::vector<SetPartition> enumerate_partitions(int m);

/// True iff every block of `fine` lies inside a block of `coarse`.
bool refines(const SetPartition& coarse, const SetPartition& fine);

/// Every partition that `fine` refines (including `fine` itself).
std::vector<SetPartition> coarsenings(const SetPartition& fine);

/// (-1)^(k-1) (k-1)!
std::int64_t mobius_weight(int num_blocks);

/// Sum of mobius_weight(|sigma|) over all coarsenings sigma of pi.
std::int64_t mobius_identity_check(const SetPartition& pi);

/// Marginals and correlations are stored one field per cardinality; the
/// field for cardinality k carries k variables.
using FieldFamily = std::map<int, SpectralField>;

/// g_[m] = sum_pi mobius_weight(|pi|) (x)_{P in pi} f_{|P|} on variables 0..m-1.
SpectralField marginals_to_correlations(const FieldFamily& marginals, int m);

/// f_[j] = sum_pi (x)_{P in pi} g_{|P|} on variables 0..j-1.
SpectralField correlations_to_marginals(const FieldFamily& correlations, int j);

template <class T>
std::vector<T> moments_to_cumulants(std::span<const T> moments) {
  if (moments.empty()) throw std::invalid_argument("moments_to_cumulants: empty input");
  std::vector<T> out;
  for (int n = 1; n <= static_cast<int>(moments.size()); ++n) {
    T acc = T(0);
    for (const auto& pi : enumerate_partitions(n)) {
      T term = T(mobius_weight(pi.num_blocks()));
      for (const auto& b : pi.blocks()) term *= moments[b.size() - 1];
      acc += term;
    }
    out.push_back(acc);
  }
  return out;
}

template <class T>
std::vector<T> cumulants_to_moments(std::span<const T> cumulants) {
  if (cumulants.empty()) throw std::invalid_argument("cumulants_to_moments: empty input");
  std::vector<T> out;
  for (int n = 1; n <= static_cast<int>(cumulants.size()); ++n) {
    T acc = T(0);
    for (const auto& pi : enumerate_partitions(n)) {
      T term = T(1);
      for (const auto& b : pi.blocks()) term *= cumulants[b.size() - 1];
      acc += term;
    }
    out.push_back(acc);
  }
  return out;
}

/// Exact K_N(rho) = sum over coarsenings iota of rho of
/// mobius_weight(|iota|) prod_{C in iota} prod_{r=1}^{|C|-1} (1 - r/N).
Rational K_N_eval(const SetPartition& rho, std::int64_t N);
/// The same for several N, sharing one pass over the coarsenings.
std::vector<Rational> K_N_eval(const SetPartition& rho, std::span<const std::int64_t> Ns);

/// Polynomial with integer coefficients, coeffs[l] multiplies x^l.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<std::int64_t> coeffs);

  const std::vector<std::int64_t>& coeffs() const { return coeffs_; }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::int64_t coeff(int l) const;
  std::int64_t abs_coeff_sum() const;
  Rational eval(const Rational& x) const;

  IntPolynomial operator*(const IntPolynomial& other) const;
  IntPolynomial& operator+=(const IntPolynomial& other);

 private:
  void trim();
  std::vector<std::int64_t> coeffs_;
};

/// K(x, rho) with K(1/N, rho) = K_N(rho).
IntPolynomial K_polynomial(const SetPartition& rho);

}  // namespace chaos
