#include "chaos/chaos_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "chaos/parallel.hpp"
#include "chaos/partitions.hpp"

namespace chaos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxOrder = 3;

const std::vector<SetPartition>& partitions_of(int j) {
  static const std::vector<std::vector<SetPartition>> cache = [] {
    std::vector<std::vector<SetPartition>> c(7);
    for (int k = 1; k <= 6; ++k) c[k] = enumerate_partitions(k);
    return c;
  }();
  if (j < 1 || j > 6) throw std::invalid_argument("marginal order outside 1..6");
  return cache[j];
}

std::size_t box_index(std::span<const int> xi, int P) {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int c : xi) {
    if (c < -P || c > P) throw std::out_of_range("frequency outside the power-sum table");
    flat += static_cast<std::size_t>(c + P) * stride;
    stride *= static_cast<std::size_t>(2 * P + 1);
  }
  return flat;
}

// Sub-tuple of xi on the given slots with zero slots removed.
FreqVec reduced(const FreqVec& xi, const std::vector<int>& slots) {
  std::vector<int> comps;
  for (int s : slots) {
    if (xi.slot_is_zero(s)) continue;
    auto v = xi.slot(s);
    comps.insert(comps.end(), v.begin(), v.end());
  }
  return FreqVec(xi.dim(), std::move(comps));
}

}  // namespace

PowerSumTable::PowerSumTable(std::span<const double> positions, int d, int max_index)
    : d_(d), P_(max_index), n_(0) {
  if (d < 1 || positions.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("PowerSumTable: coordinate count is not a multiple of the dimension");
  }
  if (max_index < 0) throw std::invalid_argument("PowerSumTable: negative max index");
  n_ = static_cast<int>(positions.size() / static_cast<std::size_t>(d));
  const std::size_t width = static_cast<std::size_t>(2 * P_ + 1);
  std::size_t size = 1;
  for (int c = 0; c < d; ++c) size *= width;
  if (size > (std::size_t{1} << 24)) throw std::invalid_argument("PowerSumTable: box too large");
  table_.assign(size, Complex{});

  std::vector<Complex> w(static_cast<std::size_t>(d) * width);
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int i = 0; i < n_; ++i) {
    for (int c = 0; c < d; ++c) {
      Complex* row = w.data() + static_cast<std::size_t>(c) * width + P_;
      const Complex z = std::polar(1.0, -kTwoPi * positions[static_cast<std::size_t>(i) * d + c]);
      Complex acc = 1.0;
      row[0] = acc;
      for (int p = 1; p <= P_; ++p) {
        acc *= z;
        row[p] = acc;
        row[-p] = std::conj(acc);
      }
    }
    if (d == 1) {
      for (std::size_t k = 0; k < width; ++k) table_[k] += w[k];
      continue;
    }
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < size; ++flat) {
      Complex e = w[static_cast<std::size_t>(idx[0])];
      for (int c = 1; c < d; ++c) e *= w[static_cast<std::size_t>(c) * width + static_cast<std::size_t>(idx[c])];
      table_[flat] += e;
      for (int c = 0; c < d && ++idx[c] == static_cast<int>(width); ++c) idx[c] = 0;
    }
  }
}

Complex PowerSumTable::operator()(std::span<const int> xi) const {
  if (static_cast<int>(xi.size()) != d_) throw std::invalid_argument("PowerSumTable: frequency dimension mismatch");
  return table_[box_index(xi, P_)];
}

std::map<std::vector<int>, Complex> power_sums(std::span<const double> positions, int d,
                                               const std::vector<std::vector<int>>& freqs) {
  int P = 0;
  for (const auto& f : freqs) {
    if (static_cast<int>(f.size()) != d) throw std::invalid_argument("power_sums: frequency dimension mismatch");
    for (int c : f) P = std::max(P, std::abs(c));
  }
  PowerSumTable table(positions, d, P);
  std::map<std::vector<int>, Complex> out;
  for (const auto& f : freqs) out[f] = table(f);
  return out;
}

Complex marginal_fourier(const PowerSumTable& sums, const FreqVec& xi) {
  const int j = xi.num_vars();
  if (xi.dim() != sums.dim()) throw std::invalid_argument("marginal_fourier: dimension mismatch");
  if (sums.particles() < j) {
    throw std::invalid_argument("marginal_fourier: need N >= j (N = " + std::to_string(sums.particles()) +
                                ", j = " + std::to_string(j) + ")");
  }
  std::vector<int> live;
  for (int k = 0; k < j; ++k) {
    if (!xi.slot_is_zero(k)) live.push_back(k);
  }
  const int jl = static_cast<int>(live.size());
  if (jl == 0) return 1.0;

  const int d = xi.dim();
  std::vector<int> block_freq(static_cast<std::size_t>(d));
  Complex acc{};
  for (const auto& pi : partitions_of(jl)) {
    // each block of size k carries (-1)^(k-1) (k-1)!
    Complex term = 1.0;
    for (const auto& b : pi.blocks()) {
      term *= static_cast<double>(mobius_weight(static_cast<int>(b.size())));
      std::fill(block_freq.begin(), block_freq.end(), 0);
      for (int e : b) {
        for (int c = 0; c < d; ++c) block_freq[c] += xi(live[e], c);
      }
      term *= sums(block_freq);
    }
    acc += term;
  }
  double falling = 1.0;
  for (int r = 0; r < jl; ++r) falling *= static_cast<double>(sums.particles() - r);
  return acc / falling;
}

// ---------------------------------------------------------------------------

FreqProbe FreqProbe::box(int num_vars, int d, int cutoff, bool include_zero_planes) {
  std::vector<int> values;
  for (int v = -cutoff; v <= cutoff; ++v) values.push_back(v);
  return grid(num_vars, d, values, include_zero_planes);
}

FreqProbe FreqProbe::grid(int num_vars, int d, const std::vector<int>& values, bool include_zero_planes) {
  if (num_vars < 1 || d < 1 || values.empty()) throw std::invalid_argument("FreqProbe::grid: bad shape");
  FreqProbe p;
  p.num_vars = num_vars;
  p.include_zero_planes = include_zero_planes;
  const int n = num_vars * d;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<int> comps(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) comps[k] = values[idx[k]];
    p.freqs.emplace_back(d, std::move(comps));
    int k = 0;
    while (k < n && ++idx[k] == values.size()) idx[k++] = 0;
    if (k == n) break;
  }
  p.normalize();
  return p;
}

void FreqProbe::normalize() {
  for (const auto& f : freqs) {
    if (f.num_vars() != num_vars) throw std::invalid_argument("FreqProbe: tuple with the wrong number of slots");
  }
  if (!include_zero_planes) {
    std::erase_if(freqs, [](const FreqVec& f) { return f.has_zero_slot(); });
  }
  std::sort(freqs.begin(), freqs.end());
  freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
}

int FreqProbe::max_index() const {
  int r = 0;
  for (const auto& f : freqs) r = std::max(r, f.max_abs());
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct CombinePlan {
  // For each probed tuple: (mobius weight, indices of the block marginals).
  std::vector<std::vector<std::pair<double, std::vector<std::size_t>>>> terms;
  std::vector<FreqVec> keys;
};

CombinePlan plan_combination(const FreqProbe& probe, int m) {
  CombinePlan plan;
  std::map<FreqVec, std::size_t> key_index;
  auto key_of = [&](const FreqVec& k) {
    auto [it, inserted] = key_index.emplace(k, plan.keys.size());
    if (inserted) plan.keys.push_back(k);
    return it->second;
  };
  for (const auto& xi : probe.freqs) {
    std::vector<std::pair<double, std::vector<std::size_t>>> t;
    for (const auto& pi : partitions_of(m)) {
      std::vector<std::size_t> parts;
      for (const auto& b : pi.blocks()) parts.push_back(key_of(reduced(xi, b)));
      t.emplace_back(static_cast<double>(mobius_weight(pi.num_blocks())), std::move(parts));
    }
    plan.terms.push_back(std::move(t));
  }
  return plan;
}

std::vector<Complex> combine(const CombinePlan& plan, std::span<const Complex> marginals) {
  std::vector<Complex> g;
  g.reserve(plan.terms.size());
  for (const auto& terms : plan.terms) {
    Complex acc{};
    for (const auto& [w, parts] : terms) {
      Complex prod = w;
      for (auto k : parts) prod *= marginals[k];
      acc += prod;
    }
    g.push_back(acc);
  }
  return g;
}

ChaosNorms norms_of(const std::vector<FreqVec>& freqs, std::span<const Complex> g) {
  ChaosNorms n;
  double sq = 0.0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (freqs[i].has_zero_slot()) continue;
    n.linf = std::max(n.linf, std::abs(g[i]));
    sq += std::norm(g[i]);
  }
  n.l2 = std::sqrt(sq);
  return n;
}

double jackknife_se(std::span<const double> loo) {
  const double R = static_cast<double>(loo.size());
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= R;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt((R - 1.0) / R * ss);
}

}  // namespace

ChaosEntry estimate_correlations(const Snapshot& snapshot, int m, const FreqProbe& probe, int threads) {
  if (m < 1 || m > kMaxOrder) throw std::invalid_argument("estimate_correlations: m must lie in 1..3");
  if (probe.num_vars != m) throw std::invalid_argument("estimate_correlations: probe arity differs from m");
  if (probe.freqs.empty()) throw std::invalid_argument("estimate_correlations: empty probe");
  if (snapshot.replicas < 2) throw std::invalid_argument("estimate_correlations: need at least 2 replicas for error bars");
  for (const auto& f : probe.freqs) {
    if (f.dim() != snapshot.d) throw std::invalid_argument("estimate_correlations: probe dimension differs from snapshot");
  }

  const auto plan = plan_combination(probe, m);
  const std::size_t K = plan.keys.size();
  const std::size_t R = static_cast<std::size_t>(snapshot.replicas);
  const int P = m * probe.max_index();

  std::vector<Complex> per_replica(R * K);
  parallel_for(R, threads, [&](std::size_t r) {
    PowerSumTable sums(snapshot.replica(static_cast<int>(r)), snapshot.d, P);
    for (std::size_t k = 0; k < K; ++k) per_replica[r * K + k] = marginal_fourier(sums, plan.keys[k]);
  });

  std::vector<Complex> total(K, Complex{});
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) total[k] += per_replica[r * K + k];
  }
  std::vector<Complex> mean(K);
  for (std::size_t k = 0; k < K; ++k) mean[k] = total[k] / static_cast<double>(R);
  const auto g = combine(plan, mean);

  const std::size_t F = probe.freqs.size();
  std::vector<double> loo_re(R * F), loo_im(R * F), loo_linf(R), loo_l2(R);
  parallel_for(R, threads, [&](std::size_t r) {
    std::vector<Complex> loo(K);
    for (std::size_t k = 0; k < K; ++k) loo[k] = (total[k] - per_replica[r * K + k]) / static_cast<double>(R - 1);
    const auto gr = combine(plan, loo);
    for (std::size_t i = 0; i < F; ++i) {
      loo_re[i * R + r] = gr[i].real();
      loo_im[i * R + r] = gr[i].imag();
    }
    const auto nr = norms_of(probe.freqs, gr);
    loo_linf[r] = nr.linf;
    loo_l2[r] = nr.l2;
  });

  ChaosEntry entry;
  entry.m = m;
  entry.time = snapshot.time;
  entry.N = snapshot.N;
  entry.replicas = snapshot.replicas;
  for (std::size_t i = 0; i < F; ++i) {
    const bool zero_plane = m >= 2 && probe.freqs[i].has_zero_slot();
    CorrelationEstimate est{probe.freqs[i], g[i], 0.0, 0.0};
    if (!zero_plane) {
      est.se_re = jackknife_se(std::span<const double>(loo_re).subspan(i * R, R));
      est.se_im = jackknife_se(std::span<const double>(loo_im).subspan(i * R, R));
    }
    entry.values.push_back(std::move(est));
  }
  const auto full = norms_of(probe.freqs, g);
  entry.linf = full.linf;
  entry.l2 = full.l2;
  entry.linf_se = jackknife_se(loo_linf);
  entry.l2_se = jackknife_se(loo_l2);
  return entry;
}

ChaosNorms chaos_norms(const std::vector<CorrelationEstimate>& values, int m) {
  std::vector<FreqVec> freqs;
  std::vector<Complex> g;
  for (const auto& v : values) {
    if (v.xi.num_vars() != m) throw std::invalid_argument("chaos_norms: estimate of the wrong order");
    freqs.push_back(v.xi);
    g.push_back(v.mean);
  }
  if (std::none_of(freqs.begin(), freqs.end(), [](const FreqVec& f) { return !f.has_zero_slot(); })) {
    throw std::invalid_argument("chaos_norms: no zero-free frequency probed");
  }
  return norms_of(freqs, g);
}

SpectralField correlation_field(const ChaosEntry& entry, int d, int cutoff) {
  SpectralField f(entry.m, d, cutoff);
  for (const auto& v : entry.values) {
    if (f.in_box(v.xi)) f.set(v.xi, v.mean);
  }
  return f;
}

ScalingFit fit_scaling(std::span<const double> Ns, std::span<const double> norms, std::span<const double> ses) {
  const std::size_t n = Ns.size();
  if (n < 2 || norms.size() != n || ses.size() != n) throw std::invalid_argument("fit_scaling: need >= 2 matched points");
  ScalingFit fit;
  fit.degenerate = true;
  bool all_se = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(Ns[i] > 0.0) || !(norms[i] > 0.0)) throw std::invalid_argument("fit_scaling: N and norms must be positive");
    if (norms[i] > 2.0 * ses[i]) fit.degenerate = false;
    all_se = all_se && ses[i] > 0.0;
  }
  std::vector<double> x(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(Ns[i]);
    y[i] = std::log(norms[i]);
    w[i] = all_se ? (norms[i] / ses[i]) * (norms[i] / ses[i]) : 1.0;
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xb = sx / sw;
  const double yb = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xb) * (x[i] - xb);
    sxy += w[i] * (x[i] - xb) * (y[i] - yb);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_scaling: all N values coincide");
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  if (all_se) {
    fit.slope_se = std::sqrt(1.0 / sxx);
  } else if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

ScalingStudy scaling_study(const SimConfig& base, const std::vector<int>& Ns, int m, const FreqProbe& probe,
                           int threads) {
  if (Ns.size() < 3) throw std::invalid_argument("scaling_study: need at least 3 values of N");
  ScalingStudy study;
  for (int N : Ns) {
    SimConfig cfg = base;
    cfg.N = N;
    const auto snaps = run(cfg, threads);
    for (const auto& s : snaps) study.entries.push_back(estimate_correlations(s, m, probe, threads));
  }
  const std::size_t T = study.entries.size() / Ns.size();
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> x, y, se;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      const auto& e = study.entries[k * T + t];
      x.push_back(static_cast<double>(Ns[k]));
      y.push_back(e.linf);
      se.push_back(e.linf_se);
    }
    study.fits.push_back(fit_scaling(x, y, se));
  }
  return study;
}

}  // namespace chaos
