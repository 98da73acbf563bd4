#include "chaos/torus_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace chaos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxDenseEntries = std::size_t{1} << 26;

}  // namespace

FreqVec::FreqVec(int num_vars, int dim)
    : dim_(dim), comps_(static_cast<std::size_t>(num_vars * dim), 0) {
  if (num_vars < 0 || dim < 1) throw std::invalid_argument("FreqVec: bad shape");
}

FreqVec::FreqVec(int dim, std::vector<int> components) : dim_(dim), comps_(std::move(components)) {
  if (dim < 1 || comps_.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("FreqVec: component count is not a multiple of the dimension");
  }
}

int FreqVec::max_abs() const {
  int r = 0;
  for (int c : comps_) r = std::max(r, std::abs(c));
  return r;
}

bool FreqVec::slot_is_zero(int k) const {
  auto s = slot(k);
  return std::all_of(s.begin(), s.end(), [](int c) { return c == 0; });
}

bool FreqVec::has_zero_slot() const {
  for (int k = 0; k < num_vars(); ++k) {
    if (slot_is_zero(k)) return true;
  }
  return false;
}

long FreqVec::squared_norm(int k) const {
  long s = 0;
  for (int c : slot(k)) s += static_cast<long>(c) * c;
  return s;
}

FreqVec FreqVec::negated() const {
  FreqVec r = *this;
  for (int& c : r.comps_) c = -c;
  return r;
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(int num_vars, int dim, int cutoff, bool real)
    : num_vars_(num_vars), dim_(dim), cutoff_(cutoff), real_(real) {
  if (num_vars < 0 || dim < 1 || cutoff < 0) {
    throw std::invalid_argument("SpectralField: need num_vars >= 0, dim >= 1, cutoff >= 0");
  }
  labels_.resize(static_cast<std::size_t>(num_vars));
  std::iota(labels_.begin(), labels_.end(), 0);
  const double bits = num_vars * dim * std::log2(2.0 * cutoff + 1.0);
  if (bits > 62.0) throw std::invalid_argument("SpectralField: cutoff box too large to index");
  if (!is_sparse()) {
    std::size_t n = 1;
    for (int i = 0; i < num_vars * dim; ++i) n *= static_cast<std::size_t>(2 * cutoff + 1);
    if (n > kMaxDenseEntries) throw std::invalid_argument("SpectralField: dense box too large");
    dense_.assign(n, Complex{});
  }
}

SpectralField SpectralField::constant(int num_vars, int dim, int cutoff, Complex value) {
  SpectralField f(num_vars, dim, cutoff, value.imag() == 0.0);
  f.set(FreqVec(num_vars, dim), value);
  return f;
}

int SpectralField::slot_of(int label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw std::out_of_range("SpectralField: no variable labelled " + std::to_string(label));
  }
  return static_cast<int>(it - labels_.begin());
}

bool SpectralField::has_label(int label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

SpectralField SpectralField::relabeled(std::vector<int> labels) const {
  if (labels.size() != labels_.size()) throw std::invalid_argument("relabeled: label count mismatch");
  auto sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("relabeled: duplicate labels");
  }
  SpectralField r = *this;
  r.labels_ = std::move(labels);
  return r;
}

bool SpectralField::in_box(const FreqVec& xi) const {
  if (xi.dim() != dim_ || xi.num_vars() != num_vars_) return false;
  return xi.max_abs() <= cutoff_;
}

std::int64_t SpectralField::encode(const FreqVec& xi) const {
  const std::int64_t side = 2 * cutoff_ + 1;
  std::int64_t flat = 0;
  std::int64_t stride = 1;
  for (int c : xi.components()) {
    flat += (c + cutoff_) * stride;
    stride *= side;
  }
  return flat;
}

FreqVec SpectralField::decode(std::int64_t flat) const {
  const std::int64_t side = 2 * cutoff_ + 1;
  FreqVec xi(num_vars_, dim_);
  for (int k = 0; k < num_vars_; ++k) {
    for (int c = 0; c < dim_; ++c) {
      xi(k, c) = static_cast<int>(flat % side) - cutoff_;
      flat /= side;
    }
  }
  return xi;
}

Complex SpectralField::coeff(const FreqVec& xi) const {
  if (xi.dim() != dim_ || xi.num_vars() != num_vars_) {
    throw std::invalid_argument("SpectralField::coeff: frequency shape mismatch");
  }
  if (xi.max_abs() > cutoff_) return {};
  const auto flat = encode(xi);
  if (is_sparse()) {
    auto it = sparse_.find(flat);
    return it == sparse_.end() ? Complex{} : it->second;
  }
  return dense_[static_cast<std::size_t>(flat)];
}

void SpectralField::set(const FreqVec& xi, Complex value) {
  if (!in_box(xi)) throw std::out_of_range("SpectralField::set: frequency outside the cutoff box");
  const auto flat = encode(xi);
  if (is_sparse()) {
    if (value == Complex{}) {
      sparse_.erase(flat);
    } else {
      sparse_[flat] = value;
    }
  } else {
    dense_[static_cast<std::size_t>(flat)] = value;
  }
}

void SpectralField::add(const FreqVec& xi, Complex value) {
  if (!in_box(xi)) throw std::out_of_range("SpectralField::add: frequency outside the cutoff box");
  const auto flat = encode(xi);
  if (is_sparse()) {
    sparse_[flat] += value;
  } else {
    dense_[static_cast<std::size_t>(flat)] += value;
  }
}

std::size_t SpectralField::nonzero_count() const {
  if (is_sparse()) {
    return static_cast<std::size_t>(std::count_if(sparse_.begin(), sparse_.end(),
                                                  [](const auto& kv) { return kv.second != Complex{}; }));
  }
  return static_cast<std::size_t>(
      std::count_if(dense_.begin(), dense_.end(), [](Complex v) { return v != Complex{}; }));
}

SpectralField SpectralField::with_cutoff(int cutoff) const {
  SpectralField r(num_vars_, dim_, cutoff, real_);
  r.probability_ = probability_;
  r.labels_ = labels_;
  for_each([&](const FreqVec& xi, Complex v) {
    if (xi.max_abs() <= cutoff) r.set(xi, v);
  });
  return r;
}

int SpectralField::support_radius() const {
  int r = 0;
  for_each([&](const FreqVec& xi, Complex) { r = std::max(r, xi.max_abs()); });
  return r;
}

void SpectralField::check_compatible(const SpectralField& other) const {
  if (other.num_vars_ != num_vars_ || other.dim_ != dim_ || other.labels_ != labels_) {
    throw std::invalid_argument("SpectralField: arithmetic on fields over different variables");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_compatible(other);
  if (other.cutoff_ > cutoff_) *this = with_cutoff(other.cutoff_);
  other.for_each([&](const FreqVec& xi, Complex v) { add(xi, v); });
  real_ = real_ && other.real_;
  probability_ = false;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_compatible(other);
  if (other.cutoff_ > cutoff_) *this = with_cutoff(other.cutoff_);
  other.for_each([&](const FreqVec& xi, Complex v) { add(xi, -v); });
  real_ = real_ && other.real_;
  probability_ = false;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  if (is_sparse()) {
    for (auto& kv : sparse_) kv.second *= s;
  } else {
    for (auto& v : dense_) v *= s;
  }
  real_ = real_ && s.imag() == 0.0;
  probability_ = probability_ && s == Complex{1.0};
  return *this;
}

double SpectralField::conjugate_asymmetry() const {
  double worst = 0.0;
  for_each([&](const FreqVec& xi, Complex v) {
    worst = std::max(worst, std::abs(coeff(xi.negated()) - std::conj(v)));
  });
  return worst;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

// ---------------------------------------------------------------------------

KernelSpec::KernelSpec(int dim, std::vector<KernelMode> modes) : dim_(dim), modes_(std::move(modes)) {
  if (dim < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
  double scale = 0.0;
  for (const auto& m : modes_) {
    if (static_cast<int>(m.lambda.size()) != dim || static_cast<int>(m.eta.size()) != dim ||
        static_cast<int>(m.coeff.size()) != dim) {
      throw std::invalid_argument("KernelSpec: mode with wrong dimension");
    }
    double sq = 0.0;
    for (auto c : m.coeff) sq += std::norm(c);
    l1_mass_ += std::sqrt(sq);
    for (auto c : m.coeff) scale = std::max(scale, std::abs(c));
  }
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& a = modes_[i];
    bool found = false;
    for (std::size_t j = 0; j < modes_.size(); ++j) {
      const auto& b = modes_[j];
      if (j != i && b.lambda == a.lambda && b.eta == a.eta) {
        throw std::invalid_argument("KernelSpec: duplicate mode");
      }
      bool mirrored = true;
      for (int c = 0; c < dim; ++c) {
        mirrored = mirrored && b.lambda[c] == -a.lambda[c] && b.eta[c] == -a.eta[c];
      }
      if (!mirrored) continue;
      found = true;
      for (int c = 0; c < dim; ++c) {
        if (std::abs(b.coeff[c] - std::conj(a.coeff[c])) > tol) {
          throw std::invalid_argument("KernelSpec: modes violate conjugate symmetry (K must be real)");
        }
      }
    }
    if (!found) throw std::invalid_argument("KernelSpec: mode without its conjugate partner");
  }
}

KernelSpec KernelSpec::zero(int dim) { return KernelSpec(dim, {}); }

KernelSpec KernelSpec::kuramoto(double coupling) {
  const Complex c{0.0, 0.5 * coupling};
  return KernelSpec(1, {KernelMode{{1}, {-1}, {c}}, KernelMode{{-1}, {1}, {std::conj(c)}}});
}

int KernelSpec::max_mode_index() const {
  int r = 0;
  for (const auto& m : modes_) {
    for (int c = 0; c < dim_; ++c) r = std::max({r, std::abs(m.lambda[c]), std::abs(m.eta[c])});
  }
  return r;
}

std::vector<double> KernelSpec::evaluate(std::span<const double> x, std::span<const double> y) const {
  if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_) {
    throw std::invalid_argument("KernelSpec::evaluate: point dimension mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
  for (const auto& m : modes_) {
    double phase = 0.0;
    for (int c = 0; c < dim_; ++c) phase += m.lambda[c] * x[c] + m.eta[c] * y[c];
    const Complex e = std::polar(1.0, kTwoPi * phase);
    for (int c = 0; c < dim_; ++c) out[c] += (m.coeff[c] * e).real();
  }
  return out;
}

// ---------------------------------------------------------------------------

Complex eval_field(const SpectralField& field, std::span<const double> point) {
  const int m = field.num_vars();
  const int d = field.dim();
  if (static_cast<int>(point.size()) != m * d) {
    throw std::invalid_argument("eval_field: point arity does not match the field's variables");
  }
  Complex acc{};
  field.for_each([&](const FreqVec& xi, Complex v) {
    double phase = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) phase += xi.components()[i] * point[i];
    acc += v * std::polar(1.0, kTwoPi * phase);
  });
  return acc;
}

namespace {

// (2 pi i xi_k) . K_hat for output frequency slot k.
Complex divergence_factor(const FreqVec& out, int slot, const std::vector<Complex>& coeff) {
  Complex s{};
  for (int c = 0; c < out.dim(); ++c) s += static_cast<double>(out(slot, c)) * coeff[c];
  return Complex{0.0, kTwoPi} * s;
}

void check_kernel_dim(const KernelSpec& kernel, const SpectralField& field) {
  if (!kernel.empty() && kernel.dim() != field.dim()) {
    throw std::invalid_argument("kernel and field have different space dimensions");
  }
}

}  // namespace

SpectralField apply_H(const KernelSpec& kernel, const SpectralField& field, int k) {
  check_kernel_dim(kernel, field);
  if (k == kStar) throw std::invalid_argument("apply_H: k must differ from the star variable");
  if (!field.has_label(kStar)) throw std::invalid_argument("apply_H: field has no star variable");
  const int star = field.slot_of(kStar);
  const int ks = field.slot_of(k);
  const int m = field.num_vars();
  const int d = field.dim();

  SpectralField out(m - 1, d, field.cutoff(), field.real_tag());
  std::vector<int> labels;
  for (int s = 0; s < m; ++s) {
    if (s != star) labels.push_back(field.labels()[s]);
  }
  out = out.relabeled(labels);
  const int ko = ks < star ? ks : ks - 1;

  FreqVec xo(m - 1, d);
  field.for_each([&](const FreqVec& xi, Complex v) {
    for (const auto& mode : kernel.modes()) {
      bool hit = true;
      for (int c = 0; c < d && hit; ++c) hit = xi(star, c) == -mode.eta[c];
      if (!hit) continue;
      for (int s = 0, so = 0; s < m; ++s) {
        if (s == star) continue;
        for (int c = 0; c < d; ++c) xo(so, c) = xi(s, c);
        ++so;
      }
      for (int c = 0; c < d; ++c) xo(ko, c) += mode.lambda[c];
      if (xo.max_abs() > out.cutoff()) continue;
      out.add(xo, divergence_factor(xo, ko, mode.coeff) * v);
    }
  });
  return out;
}

SpectralField apply_S(const KernelSpec& kernel, const SpectralField& field, int k, int l) {
  check_kernel_dim(kernel, field);
  const int ks = field.slot_of(k);
  const int ls = field.slot_of(l);
  const int d = field.dim();

  SpectralField out(field.num_vars(), d, field.cutoff(), field.real_tag());
  out = out.relabeled(field.labels());
  field.for_each([&](const FreqVec& xi, Complex v) {
    for (const auto& mode : kernel.modes()) {
      FreqVec xo = xi;
      for (int c = 0; c < d; ++c) {
        xo(ks, c) += mode.lambda[c];
        xo(ls, c) += mode.eta[c];
      }
      if (xo.max_abs() > out.cutoff()) continue;
      out.add(xo, divergence_factor(xo, ks, mode.coeff) * v);
    }
  });
  return out;
}

SpectralField apply_inv_grad(const SpectralField& field, int k) {
  const int ks = field.slot_of(k);
  SpectralField out(field.num_vars(), field.dim(), field.cutoff(), field.real_tag());
  out = out.relabeled(field.labels());
  field.for_each([&](const FreqVec& xi, Complex v) {
    if (xi.slot_is_zero(ks)) return;
    out.set(xi, v / (kTwoPi * std::sqrt(static_cast<double>(xi.squared_norm(ks)))));
  });
  return out;
}

SpectralField heat_propagate(const SpectralField& field, double sigma, double dt) {
  if (dt < 0.0) throw std::invalid_argument("heat_propagate: negative time step");
  if (sigma < 0.0) throw std::invalid_argument("heat_propagate: negative diffusion coefficient");
  SpectralField out = field;
  const double rate = sigma * kTwoPi * kTwoPi * dt;
  field.for_each([&](const FreqVec& xi, Complex v) {
    long sq = 0;
    for (int k = 0; k < xi.num_vars(); ++k) sq += xi.squared_norm(k);
    out.set(xi, v * std::exp(-rate * static_cast<double>(sq)));
  });
  return out;
}

SpectralField tensor_product(const SpectralField& f, const SpectralField& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("tensor_product: dimension mismatch");
  for (int a : f.labels()) {
    if (g.has_label(a)) {
      throw std::invalid_argument("tensor_product: overlapping variable label " + std::to_string(a));
    }
  }
  const int mf = f.num_vars();
  const int m = mf + g.num_vars();
  const int d = f.dim();

  std::vector<int> labels = f.labels();
  labels.insert(labels.end(), g.labels().begin(), g.labels().end());
  // order[s] = concatenated slot placed at output slot s
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return labels[a] < labels[b]; });
  std::vector<int> sorted_labels(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) sorted_labels[s] = labels[order[s]];

  SpectralField out(m, d, std::max(f.cutoff(), g.cutoff()), f.real_tag() && g.real_tag());
  out = out.relabeled(sorted_labels);
  out.set_probability_tag(f.probability_tag() && g.probability_tag());

  FreqVec xo(m, d);
  f.for_each([&](const FreqVec& xf, Complex vf) {
    g.for_each([&](const FreqVec& xg, Complex vg) {
      for (int s = 0; s < m; ++s) {
        const int src = order[s];
        for (int c = 0; c < d; ++c) xo(s, c) = src < mf ? xf(src, c) : xg(src - mf, c);
      }
      out.add(xo, vf * vg);
    });
  });
  return out;
}

FieldNorms norms(const SpectralField& field) {
  FieldNorms n;
  double sq = 0.0;
  field.for_each([&](const FreqVec&, Complex v) {
    sq += std::norm(v);
    n.linf = std::max(n.linf, std::abs(v));
  });
  n.l2 = std::sqrt(sq);
  return n;
}

}  // namespace chaos
