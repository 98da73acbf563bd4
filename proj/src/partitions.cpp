#include "chaos/partitions.hpp"

#include <algorithm>
#include <string>

namespace chaos {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in polynomial arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in polynomial arithmetic");
  return r;
}

// Advances a restricted growth string to its successor; false after the last.
bool next_rgs(std::vector<int>& rgs, std::vector<int>& prefix_max) {
  const int n = static_cast<int>(rgs.size());
  for (int i = n - 1; i >= 1; --i) {
    if (rgs[i] <= prefix_max[i - 1]) {
      ++rgs[i];
      prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
      for (int j = i + 1; j < n; ++j) {
        rgs[j] = 0;
        prefix_max[j] = prefix_max[i];
      }
      return true;
    }
  }
  return false;
}

}  // namespace

SetPartition::SetPartition(int size, std::vector<std::vector<int>> blocks) : size_(size) {
  if (size < 0) throw std::invalid_argument("SetPartition: negative ground-set size");
  block_index_.assign(static_cast<std::size_t>(size), -1);
  for (auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("SetPartition: empty block");
    std::sort(b.begin(), b.end());
    for (int e : b) {
      if (e < 0 || e >= size) throw std::invalid_argument("SetPartition: element " + std::to_string(e) + " outside ground set");
      if (block_index_[e] != -1) throw std::invalid_argument("SetPartition: element " + std::to_string(e) + " in two blocks");
      block_index_[e] = 0;
    }
  }
  for (int e = 0; e < size; ++e) {
    if (block_index_[e] == -1) throw std::invalid_argument("SetPartition: element " + std::to_string(e) + " not covered");
  }
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  blocks_ = std::move(blocks);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (int e : blocks_[i]) block_index_[e] = static_cast<int>(i);
  }
}

SetPartition SetPartition::singletons(int size) {
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < size; ++i) blocks.push_back({i});
  return SetPartition(size, std::move(blocks));
}

SetPartition SetPartition::single_block(int size) {
  std::vector<int> all(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) all[i] = i;
  return SetPartition(size, {all});
}

SetPartition SetPartition::from_rgs(std::span<const int> rgs) {
  std::vector<std::vector<int>> blocks;
  for (std::size_t i = 0; i < rgs.size(); ++i) {
    const auto b = static_cast<std::size_t>(rgs[i]);
    if (b > blocks.size()) throw std::invalid_argument("SetPartition::from_rgs: not a restricted growth string");
    if (b == blocks.size()) blocks.emplace_back();
    blocks[b].push_back(static_cast<int>(i));
  }
  return SetPartition(static_cast<int>(rgs.size()), std::move(blocks));
}

std::vector<int> SetPartition::block_sizes() const {
  std::vector<int> s;
  for (const auto& b : blocks_) s.push_back(static_cast<int>(b.size()));
  return s;
}

std::vector<SetPartition> enumerate_partitions(int m) {
  if (m < 1 || m > 12) throw std::invalid_argument("enumerate_partitions: m must lie in 1..12");
  std::vector<SetPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(m), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(m), 0);
  do {
    out.push_back(SetPartition::from_rgs(rgs));
  } while (next_rgs(rgs, prefix_max));
  return out;
}

bool refines(const SetPartition& coarse, const SetPartition& fine) {
  if (coarse.size() != fine.size()) throw std::invalid_argument("refines: partitions of different ground sets");
  for (const auto& b : fine.blocks()) {
    const int target = coarse.block_of(b.front());
    for (int e : b) {
      if (coarse.block_of(e) != target) return false;
    }
  }
  return true;
}

std::vector<SetPartition> coarsenings(const SetPartition& fine) {
  std::vector<SetPartition> out;
  const int k = fine.num_blocks();
  if (k == 0) return {fine};
  for (const auto& merge : enumerate_partitions(k)) {
    std::vector<std::vector<int>> blocks;
    for (const auto& group : merge.blocks()) {
      std::vector<int> merged;
      for (int bi : group) {
        const auto& b = fine.blocks()[bi];
        merged.insert(merged.end(), b.begin(), b.end());
      }
      blocks.push_back(std::move(merged));
    }
    out.emplace_back(fine.size(), std::move(blocks));
  }
  return out;
}

std::int64_t mobius_weight(int num_blocks) {
  if (num_blocks < 1) throw std::invalid_argument("mobius_weight: need at least one block");
  std::int64_t f = 1;
  for (int i = 2; i < num_blocks; ++i) f = checked_mul(f, i);
  return (num_blocks % 2 == 1) ? f : -f;
}

std::int64_t mobius_identity_check(const SetPartition& pi) {
  std::int64_t sum = 0;
  for (const auto& sigma : coarsenings(pi)) sum += mobius_weight(sigma.num_blocks());
  return sum;
}

namespace {

const SpectralField& family_member(const FieldFamily& family, int k, const char* what) {
  auto it = family.find(k);
  if (it == family.end()) throw std::invalid_argument(std::string(what) + " of order " + std::to_string(k) + " missing");
  if (it->second.num_vars() != k) {
    throw std::invalid_argument(std::string(what) + " of order " + std::to_string(k) + " has the wrong number of variables");
  }
  return it->second;
}

SpectralField block_product(const FieldFamily& family, const SetPartition& pi, const char* what) {
  SpectralField acc;
  bool first = true;
  for (const auto& b : pi.blocks()) {
    auto piece = family_member(family, static_cast<int>(b.size()), what).relabeled(b);
    if (first) {
      acc = std::move(piece);
      first = false;
    } else {
      acc = tensor_product(acc, piece);
    }
  }
  return acc;
}

SpectralField partition_sum(const FieldFamily& family, int m, bool weighted, const char* what) {
  if (m < 1) throw std::invalid_argument(std::string(what) + ": order must be >= 1");
  int cutoff = 0;
  int dim = 0;
  bool real = true;
  for (int k = 1; k <= m; ++k) {
    const auto& f = family_member(family, k, what);
    cutoff = std::max(cutoff, f.cutoff());
    if (dim != 0 && f.dim() != dim) throw std::invalid_argument(std::string(what) + ": mixed space dimensions");
    dim = f.dim();
    real = real && f.real_tag();
  }
  SpectralField out(m, dim, cutoff, real);
  for (const auto& pi : enumerate_partitions(m)) {
    auto term = block_product(family, pi, what);
    if (weighted) term *= Complex(static_cast<double>(mobius_weight(pi.num_blocks())));
    out += term;
  }
  out.set_real_tag(real);
  return out;
}

}  // namespace

SpectralField marginals_to_correlations(const FieldFamily& marginals, int m) {
  return partition_sum(marginals, m, true, "marginal");
}

SpectralField correlations_to_marginals(const FieldFamily& correlations, int j) {
  return partition_sum(correlations, j, false, "correlation");
}

Rational K_N_eval(const SetPartition& rho, std::int64_t N) {
  const std::int64_t Ns[] = {N};
  return K_N_eval(rho, Ns).front();
}

std::vector<Rational> K_N_eval(const SetPartition& rho, std::span<const std::int64_t> Ns) {
  for (auto N : Ns) {
    if (N < 1) throw std::invalid_argument("K_N: N must be >= 1");
  }
  std::vector<BigInt> scaled(Ns.size(), 0);
  for (const auto& iota : coarsenings(rho)) {
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      const std::int64_t N = Ns[k];
      BigInt term = mobius_weight(iota.num_blocks());
      for (const auto& c : iota.blocks()) {
        for (std::int64_t r = 1; r < static_cast<std::int64_t>(c.size()); ++r) term *= (N - r);
      }
      for (int i = 1; i < iota.num_blocks(); ++i) term *= N;
      scaled[k] += term;
    }
  }
  std::vector<Rational> out;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    BigInt denom = 1;
    for (int i = 1; i < rho.size(); ++i) denom *= Ns[k];
    out.emplace_back(scaled[k], denom);
  }
  return out;
}

IntPolynomial::IntPolynomial(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void IntPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

std::int64_t IntPolynomial::coeff(int l) const {
  return (l < 0 || l >= static_cast<int>(coeffs_.size())) ? 0 : coeffs_[l];
}

std::int64_t IntPolynomial::abs_coeff_sum() const {
  std::int64_t s = 0;
  for (auto c : coeffs_) s = checked_add(s, c < 0 ? -c : c);
  return s;
}

Rational IntPolynomial::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + Rational(*it);
  return acc;
}

IntPolynomial IntPolynomial::operator*(const IntPolynomial& other) const {
  if (coeffs_.empty() || other.coeffs_.empty()) return {};
  std::vector<std::int64_t> r(coeffs_.size() + other.coeffs_.size() - 1, 0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) {
      r[i + j] = checked_add(r[i + j], checked_mul(coeffs_[i], other.coeffs_[j]));
    }
  }
  return IntPolynomial(std::move(r));
}

IntPolynomial& IntPolynomial::operator+=(const IntPolynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] = checked_add(coeffs_[i], other.coeffs_[i]);
  trim();
  return *this;
}

IntPolynomial K_polynomial(const SetPartition& rho) {
  IntPolynomial total;
  for (const auto& iota : coarsenings(rho)) {
    IntPolynomial term({mobius_weight(iota.num_blocks())});
    for (const auto& c : iota.blocks()) {
      for (std::int64_t r = 1; r < static_cast<std::int64_t>(c.size()); ++r) term = term * IntPolynomial({1, -r});
    }
    total += term;
  }
  return total;
}

}  // namespace chaos
