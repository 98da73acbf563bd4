#include "chaos/particle_sim.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chaos/parallel.hpp"

namespace chaos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double wrap_unit(double x) {
  x -= std::floor(x);
  return x >= 1.0 ? 0.0 : x;
}

double l1_envelope(const SpectralField& rho0) {
  double s = 0.0;
  rho0.for_each([&](const FreqVec&, Complex v) { s += std::abs(v); });
  return s;
}

// Grid maximum of the density; throws on negative values.
double grid_max(const SpectralField& rho0) {
  const int d = rho0.dim();
  const int per_axis = std::max(2, static_cast<int>(std::lround(std::pow(4096.0, 1.0 / d))));
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> pt(static_cast<std::size_t>(d), 0.0);
  double hi = -1e300;
  while (true) {
    for (int c = 0; c < d; ++c) pt[c] = static_cast<double>(idx[c]) / per_axis;
    const double v = eval_field(rho0, pt).real();
    if (v < -1e-12) {
      std::ostringstream msg;
      msg << "initial density is negative (" << v << ") at grid point (";
      for (int c = 0; c < d; ++c) msg << (c ? ", " : "") << pt[c];
      msg << ")";
      throw std::invalid_argument(msg.str());
    }
    hi = std::max(hi, v);
    int c = 0;
    while (c < d && ++idx[c] == per_axis) idx[c++] = 0;
    if (c == d) break;
  }
  return hi;
}

void check_rho0_shape(const SpectralField& rho0) {
  if (rho0.num_vars() != 1) throw std::invalid_argument("rho0 must be a one-variable field");
}

double resolve_envelope(const SpectralField& rho0, std::optional<double> envelope) {
  const double top = grid_max(rho0);
  const double env = envelope.value_or(l1_envelope(rho0));
  if (!(env > 0.0) || env < top) {
    throw std::invalid_argument("rejection envelope " + std::to_string(env) + " is below the density maximum " +
                                std::to_string(top));
  }
  return env;
}

std::vector<double> sample_with_envelope(const SpectralField& rho0, int N, std::mt19937_64& rng, double env) {
  const int d = rho0.dim();
  boost::random::uniform_01<double> unif;
  std::vector<double> out(static_cast<std::size_t>(N) * d);
  std::vector<double> pt(static_cast<std::size_t>(d));
  for (int i = 0; i < N; ++i) {
    while (true) {
      for (int c = 0; c < d; ++c) pt[c] = unif(rng);
      const double u = unif(rng) * env;
      if (u <= eval_field(rho0, pt).real()) break;
    }
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(i) * d + c] = pt[c];
  }
  return out;
}

}  // namespace

std::vector<std::string> SimConfig::violations() const {
  std::vector<std::string> v;
  if (N < 2) v.push_back("sim.N must be >= 2");
  if (d < 1) v.push_back("sim.d must be >= 1");
  if (!(sigma >= 0.0)) v.push_back("sim.sigma must be >= 0");
  if (!(dt > 0.0)) v.push_back("sim.dt must be > 0");
  if (!(t_end >= 0.0)) v.push_back("sim.t_end must be >= 0");
  for (double t : obs_times) {
    if (!(t >= 0.0 && t <= t_end)) v.push_back("sim.obs_times entry " + std::to_string(t) + " outside [0, t_end]");
  }
  if (replicas < 1) v.push_back("sim.replicas must be >= 1");
  if (!kernel.empty() && kernel.dim() != d) v.push_back("sim.kernel dimension differs from sim.d");
  if (rho0.num_vars() != 1) {
    v.push_back("sim.rho0 must have exactly one variable");
  } else {
    if (rho0.dim() != d) v.push_back("sim.rho0 dimension differs from sim.d");
    if (!rho0.real_tag()) v.push_back("sim.rho0 must be real-tagged");
    if (rho0.conjugate_asymmetry() > 1e-12) v.push_back("sim.rho0 violates conjugate symmetry");
    if (rho0.dim() == d && rho0.coeff(FreqVec(1, d)) != Complex{1.0}) {
      v.push_back("sim.rho0 mode-0 coefficient must equal 1");
    }
  }
  if (envelope && !(*envelope > 0.0)) v.push_back("sim.envelope must be > 0");
  return v;
}

void SimConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid simulation config:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

std::int64_t SimConfig::num_steps() const { return std::llround(t_end / dt); }

std::mt19937_64 replica_rng(std::uint64_t seed, std::uint64_t replica) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(replica + 0x632BE59BD9B4E019ULL)));
}

void check_density(const SpectralField& rho0) {
  check_rho0_shape(rho0);
  grid_max(rho0);
}

std::vector<double> sample_initial(const SpectralField& rho0, int N, std::mt19937_64& rng,
                                   std::optional<double> envelope) {
  check_rho0_shape(rho0);
  if (N < 0) throw std::invalid_argument("sample_initial: negative particle count");
  return sample_with_envelope(rho0, N, rng, resolve_envelope(rho0, envelope));
}

void DriftWorkspace::compute(std::span<const double> positions, int d, const KernelSpec& kernel,
                             std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (kernel.empty()) return;
  const std::size_t n = positions.size() / static_cast<std::size_t>(d);
  const int P = kernel.max_mode_index();
  const std::size_t width = static_cast<std::size_t>(2 * P + 1);
  powers_.resize(positions.size() * width);

  for (std::size_t ic = 0; ic < positions.size(); ++ic) {
    Complex* row = powers_.data() + ic * width + P;
    const double angle = kTwoPi * positions[ic];
    const Complex z{std::cos(angle), std::sin(angle)};
    row[0] = 1.0;
    Complex acc = 1.0;
    for (int p = 1; p <= P; ++p) {
      acc *= z;
      row[p] = acc;
      row[-p] = std::conj(acc);
    }
  }
  const auto& modes = kernel.modes();
  const std::size_t M = modes.size();
  // flat offsets of lambda and eta inside a particle's block of rows
  lambda_off_.resize(M * d);
  eta_off_.resize(M * d);
  for (std::size_t mi = 0; mi < M; ++mi) {
    for (int c = 0; c < d; ++c) {
      lambda_off_[mi * d + c] = static_cast<std::size_t>(c) * width + P + modes[mi].lambda[c];
      eta_off_[mi * d + c] = static_cast<std::size_t>(c) * width + P + modes[mi].eta[c];
    }
  }
  const std::size_t block = static_cast<std::size_t>(d) * width;
  auto mode_value = [&](std::size_t i, const std::size_t* off) {
    const Complex* b = powers_.data() + i * block;
    Complex e = b[off[0]];
    for (int c = 1; c < d; ++c) e *= b[off[c]];
    return e;
  };

  // weights[mi*d + c] = coeff_c * (1/N) sum_j e(eta . x_j)
  weights_.resize(M * d);
  for (std::size_t mi = 0; mi < M; ++mi) {
    Complex s{};
    for (std::size_t j = 0; j < n; ++j) s += mode_value(j, &eta_off_[mi * d]);
    s /= static_cast<double>(n);
    for (int c = 0; c < d; ++c) weights_[mi * d + c] = modes[mi].coeff[c] * s;
  }
  if (d == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const Complex* b = powers_.data() + i * width;
      double acc = 0.0;
      for (std::size_t mi = 0; mi < M; ++mi) {
        const Complex e = b[lambda_off_[mi]];
        acc += weights_[mi].real() * e.real() - weights_[mi].imag() * e.imag();
      }
      out[i] = acc;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t mi = 0; mi < M; ++mi) {
      const Complex e = mode_value(i, &lambda_off_[mi * d]);
      for (int c = 0; c < d; ++c) {
        const Complex w = weights_[mi * d + c];
        out[i * d + c] += w.real() * e.real() - w.imag() * e.imag();
      }
    }
  }
}

std::vector<double> drift(std::span<const double> positions, int d, const KernelSpec& kernel, DriftMode mode) {
  if (d < 1 || positions.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("drift: coordinate count is not a multiple of the dimension");
  }
  if (!kernel.empty() && kernel.dim() != d) throw std::invalid_argument("drift: kernel dimension mismatch");
  std::vector<double> out(positions.size(), 0.0);
  if (mode == DriftMode::spectral) {
    DriftWorkspace ws;
    ws.compute(positions, d, kernel, out);
    return out;
  }
  const std::size_t n = positions.size() / static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& m : kernel.modes()) {
        double phase = 0.0;
        for (int c = 0; c < d; ++c) phase += m.lambda[c] * positions[i * d + c] + m.eta[c] * positions[j * d + c];
        const Complex e = std::polar(1.0, kTwoPi * phase);
        for (int c = 0; c < d; ++c) out[i * d + c] += (m.coeff[c] * e).real();
      }
    }
  }
  for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------------------

Ensemble::Ensemble(const SimConfig& config) : N_(config.N), d_(config.d) {
  config.validate();
  const double env = resolve_envelope(config.rho0, config.envelope);
  states_.reserve(static_cast<std::size_t>(config.replicas));
  for (int r = 0; r < config.replicas; ++r) {
    ReplicaState s{{}, replica_rng(config.seed, static_cast<std::uint64_t>(r))};
    s.x = sample_with_envelope(config.rho0, config.N, s.rng, env);
    states_.push_back(std::move(s));
  }
}

Snapshot Ensemble::snapshot() const {
  Snapshot s{time_, replicas(), N_, d_, {}};
  s.positions.reserve(static_cast<std::size_t>(replicas()) * N_ * d_);
  for (const auto& st : states_) s.positions.insert(s.positions.end(), st.x.begin(), st.x.end());
  return s;
}

void Ensemble::advance_replica(ReplicaState& state, const SimConfig& config, DriftWorkspace& ws,
                               std::vector<double>& drift_buf) {
  drift_buf.resize(state.x.size());
  if (config.drift_mode == DriftMode::spectral) {
    ws.compute(state.x, config.d, config.kernel, drift_buf);
  } else {
    drift_buf = drift(state.x, config.d, config.kernel, DriftMode::direct);
  }
  const double noise = std::sqrt(2.0 * config.sigma * config.dt);
  boost::random::normal_distribution<double> gauss;
  for (std::size_t k = 0; k < state.x.size(); ++k) {
    state.x[k] = wrap_unit(state.x[k] + drift_buf[k] * config.dt + noise * gauss(state.rng));
  }
}

void Ensemble::advance(const SimConfig& config, int threads) {
  if (config.N != N_ || config.d != d_) throw std::invalid_argument("Ensemble::advance: config shape mismatch");
  parallel_for(states_.size(), threads, [&](std::size_t r) {
    DriftWorkspace ws;
    std::vector<double> buf;
    advance_replica(states_[r], config, ws, buf);
  });
  ++steps_;
  time_ = static_cast<double>(steps_) * config.dt;
}

Ensemble step(Ensemble ensemble, const SimConfig& config) {
  ensemble.advance(config);
  return ensemble;
}

std::vector<Snapshot> run(const SimConfig& config, int threads) {
  config.validate();
  const double env = resolve_envelope(config.rho0, config.envelope);
  const std::int64_t n_steps = config.num_steps();

  std::vector<std::int64_t> obs_steps;
  for (double t : config.obs_times) obs_steps.push_back(std::min<std::int64_t>(n_steps, std::llround(t / config.dt)));
  if (obs_steps.empty()) obs_steps.push_back(n_steps);
  std::multimap<std::int64_t, std::size_t> at_step;
  std::vector<Snapshot> snaps(obs_steps.size());
  for (std::size_t k = 0; k < obs_steps.size(); ++k) {
    at_step.emplace(obs_steps[k], k);
    snaps[k] = Snapshot{static_cast<double>(obs_steps[k]) * config.dt, config.replicas, config.N, config.d,
                        std::vector<double>(static_cast<std::size_t>(config.replicas) * config.N * config.d)};
  }
  const std::int64_t last = *std::max_element(obs_steps.begin(), obs_steps.end());
  const std::size_t stride = static_cast<std::size_t>(config.N) * config.d;

  parallel_for(static_cast<std::size_t>(config.replicas), threads, [&](std::size_t r) {
    Ensemble::ReplicaState st{{}, replica_rng(config.seed, r)};
    st.x = sample_with_envelope(config.rho0, config.N, st.rng, env);
    DriftWorkspace ws;
    std::vector<double> buf;
    auto record = [&](std::int64_t s) {
      auto range = at_step.equal_range(s);
      for (auto it = range.first; it != range.second; ++it) {
        std::copy(st.x.begin(), st.x.end(), snaps[it->second].positions.begin() + static_cast<std::ptrdiff_t>(r * stride));
      }
    };
    record(0);
    for (std::int64_t s = 1; s <= last; ++s) {
      Ensemble::advance_replica(st, config, ws, buf);
      record(s);
    }
  });
  return snaps;
}

}  // namespace chaos
