#pragma once

// Fourier algebra on (T^d)^m.
//
// A SpectralField holds the truncated Fourier coefficients of a function of m
// torus variables, each variable living in T^d = [0,1)^d:
//
//   h(x_1..x_m) = sum_{xi} coeff(xi) exp(2 pi i sum_k xi_k . x_k),  |xi|_inf <= M.
//
// Every variable slot carries an integer label. Operators address variables by
// label; tensor products keep slots sorted by label. The label kStar marks the
// variable integrated out by apply_H.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace chaos {

using Complex = std::complex<double>;

inline constexpr int kStar = -1;

/// Integer frequency tuple (xi_1, ..., xi_m), each xi_k in Z^d, stored
/// slot-major.
class FreqVec {
 public:
  FreqVec() = default;
  FreqVec(int num_vars, int dim);
  FreqVec(int dim, std::vector<int> components);

  int num_vars() const { return dim_ == 0 ? 0 : static_cast<int>(comps_.size()) / dim_; }
  int dim() const { return dim_; }

  int operator()(int slot, int c) const { return comps_[static_cast<std::size_t>(slot * dim_ + c)]; }
  int& operator()(int slot, int c) { return comps_[static_cast<std::size_t>(slot * dim_ + c)]; }

  std::span<const int> slot(int k) const {
    return {comps_.data() + static_cast<std::ptrdiff_t>(k) * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<int>& components() const { return comps_; }

  int max_abs() const;
  bool slot_is_zero(int k) const;
  bool has_zero_slot() const;
  long squared_norm(int k) const;
  FreqVec negated() const;

  auto operator<=>(const FreqVec&) const = default;

 private:
  int dim_ = 1;
  std::vector<int> comps_;
};

class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int num_vars, int dim, int cutoff, bool real = false);

  /// Field whose only nonzero coefficient is coeff(0) = value.
  static SpectralField constant(int num_vars, int dim, int cutoff, Complex value);

  int num_vars() const { return num_vars_; }
  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }

  const std::vector<int>& labels() const { return labels_; }
  int slot_of(int label) const;
  bool has_label(int label) const;
  /// Same coefficients, new labels (one per slot, distinct).
  SpectralField relabeled(std::vector<int> labels) const;

  bool real_tag() const { return real_; }
  void set_real_tag(bool real) { real_ = real; }
  bool probability_tag() const { return probability_; }
  void set_probability_tag(bool p) { probability_ = p; }

  bool is_sparse() const { return num_vars_ >= 3; }
  bool in_box(const FreqVec& xi) const;

  Complex coeff(const FreqVec& xi) const;
  void set(const FreqVec& xi, Complex value);
  void add(const FreqVec& xi, Complex value);

  /// Visits every stored nonzero coefficient in increasing flat-index order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    if (is_sparse()) {
      for (const auto& [flat, v] : sparse_) fn(decode(flat), v);
    } else {
      for (std::size_t i = 0; i < dense_.size(); ++i) {
        if (dense_[i] != Complex{}) fn(decode(static_cast<std::int64_t>(i)), dense_[i]);
      }
    }
  }

  std::size_t nonzero_count() const;

  /// Copy into a box of a different cutoff; modes outside the new box are
  /// dropped.
  SpectralField with_cutoff(int cutoff) const;
  /// Largest |xi|_inf over nonzero coefficients (0 for an empty field).
  int support_radius() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex s);

  /// Max |coeff(-xi) - conj(coeff(xi))|.
  double conjugate_asymmetry() const;

 private:
  std::int64_t encode(const FreqVec& xi) const;
  FreqVec decode(std::int64_t flat) const;
  void check_compatible(const SpectralField& other) const;

  int num_vars_ = 0;
  int dim_ = 1;
  int cutoff_ = 0;
  bool real_ = false;
  bool probability_ = false;
  std::vector<int> labels_;
  std::vector<Complex> dense_;
  std::map<std::int64_t, Complex> sparse_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(Complex s, SpectralField a);

/// One Fourier mode of the kernel: K_hat(lambda, eta) in C^d.
struct KernelMode {
  std::vector<int> lambda;
  std::vector<int> eta;
  std::vector<Complex> coeff;
};

/// Interaction kernel K: T^d x T^d -> R^d with finitely many Fourier modes,
///   K(x, y) = sum K_hat(lambda, eta) exp(2 pi i (lambda.x + eta.y)).
class KernelSpec {
 public:
  KernelSpec() = default;
  KernelSpec(int dim, std::vector<KernelMode> modes);

  static KernelSpec zero(int dim);
  /// K(x, y) = -coupling * sin(2 pi (x - y)) on T^1.
  static KernelSpec kuramoto(double coupling = 1.0);

  int dim() const { return dim_; }
  const std::vector<KernelMode>& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }
  /// sum over modes of |K_hat(lambda, eta)| (Euclidean norm in C^d).
  double l1_mass() const { return l1_mass_; }
  /// Largest |lambda|_inf or |eta|_inf.
  int max_mode_index() const;

  /// Direct evaluation of the real vector K(x, y).
  std::vector<double> evaluate(std::span<const double> x, std::span<const double> y) const;

 private:
  int dim_ = 1;
  std::vector<KernelMode> modes_;
  double l1_mass_ = 0.0;
};

struct FieldNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

/// h(point); point holds m*d coordinates in slot order.
Complex eval_field(const SpectralField& field, std::span<const double> point);

/// Fourier side of div_{x_k} int K(x_k, x_*) h dx_*. The input must carry a
/// kStar-labelled slot, which the output drops.
SpectralField apply_H(const KernelSpec& kernel, const SpectralField& field, int k);

/// Fourier side of div_{x_k} (K(x_k, x_l) h); k == l is the diagonal K(x, x).
SpectralField apply_S(const KernelSpec& kernel, const SpectralField& field, int k, int l);

/// coeff(xi) / |2 pi xi_k| off the xi_k = 0 plane, zero on it.
SpectralField apply_inv_grad(const SpectralField& field, int k);

/// Heat semigroup exp(sigma t sum_k Delta_k).
SpectralField heat_propagate(const SpectralField& field, double sigma, double dt);

/// f (x) g over disjoint label sets; slots of the result are sorted by label.
SpectralField tensor_product(const SpectralField& f, const SpectralField& g);

/// Truncated Plancherel L2 norm and the hat-l-infinity norm.
FieldNorms norms(const SpectralField& field);

}  // namespace chaos
