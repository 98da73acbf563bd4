#include "chaos/mckean_vlasov.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace chaos {

namespace {

constexpr double kBlowUp = 1e6;

std::multimap<std::int64_t, std::size_t> observation_steps(const std::vector<double>& obs_times, double dt,
                                                           std::int64_t n_steps) {
  std::multimap<std::int64_t, std::size_t> at;
  for (std::size_t k = 0; k < obs_times.size(); ++k) {
    at.emplace(std::min<std::int64_t>(n_steps, std::llround(obs_times[k] / dt)), k);
  }
  if (at.empty()) at.emplace(n_steps, 0);
  return at;
}

// Slots are filled in obs_times order.
class Recorder {
 public:
  Recorder(const PdeRunConfig& config, bool every_step)
      : every_(every_step), dt_(config.dt), at_(observation_steps(config.obs_times, config.dt, config.num_steps())) {
    if (!every_) {
      traj_.times.resize(at_.size());
      traj_.fields.resize(at_.size());
    }
  }

  void offer(std::int64_t step, const SpectralField& f) {
    if (every_) {
      traj_.times.push_back(static_cast<double>(step) * dt_);
      traj_.fields.push_back(f);
      return;
    }
    auto range = at_.equal_range(step);
    for (auto it = range.first; it != range.second; ++it) {
      traj_.times[it->second] = static_cast<double>(step) * dt_;
      traj_.fields[it->second] = f;
    }
  }

  std::int64_t last_needed(std::int64_t n_steps) const { return every_ ? n_steps : at_.rbegin()->first; }
  FieldTrajectory take() { return std::move(traj_); }

 private:
  bool every_;
  double dt_;
  std::multimap<std::int64_t, std::size_t> at_;
  FieldTrajectory traj_;
};

void guard(const SpectralField& f, std::int64_t step, const char* what) {
  const double linf = norms(f).linf;
  if (!(linf <= kBlowUp)) {
    throw std::runtime_error(std::string(what) + " solver blew up at step " + std::to_string(step) +
                             ": coefficient sup norm " + std::to_string(linf));
  }
}

}  // namespace

std::vector<std::string> PdeRunConfig::violations() const {
  std::vector<std::string> v;
  if (!(sigma >= 0.0)) v.push_back("pde.sigma must be >= 0");
  if (!(dt > 0.0)) v.push_back("pde.dt must be > 0");
  if (!(t_end >= 0.0)) v.push_back("pde.t_end must be >= 0");
  for (double t : obs_times) {
    if (!(t >= 0.0 && t <= t_end)) v.push_back("pde.obs_times entry " + std::to_string(t) + " outside [0, t_end]");
  }
  if (cutoff < 0) v.push_back("pde.cutoff must be >= 0");
  if (cutoff < kernel.max_mode_index()) v.push_back("pde.cutoff is below the kernel's largest mode index");
  if (rho0.num_vars() != 1) {
    v.push_back("pde.rho0 must have exactly one variable");
  } else {
    if (!kernel.empty() && kernel.dim() != rho0.dim()) v.push_back("pde.kernel dimension differs from rho0");
    if (rho0.conjugate_asymmetry() > 1e-12) v.push_back("pde.rho0 violates conjugate symmetry");
    if (rho0.coeff(FreqVec(1, rho0.dim())) != Complex{1.0}) v.push_back("pde.rho0 mode-0 coefficient must equal 1");
  }
  return v;
}

void PdeRunConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid PDE config:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

std::int64_t PdeRunConfig::num_steps() const { return std::llround(t_end / dt); }

SpectralField mv_rhs(const SpectralField& rho, const KernelSpec& kernel) {
  if (rho.num_vars() != 1) throw std::invalid_argument("mv_rhs: rho must have one variable");
  const auto pair = tensor_product(rho.relabeled({0}), rho.relabeled({kStar}));
  auto out = apply_H(kernel, pair, 0);
  out *= Complex{-1.0};
  out.set_real_tag(rho.real_tag());
  return out;
}

FieldTrajectory solve_rho(const PdeRunConfig& config, bool every_step) {
  config.validate();
  const std::int64_t n_steps = config.num_steps();
  const FreqVec zero(1, config.rho0.dim());
  auto rho = config.rho0.relabeled({0}).with_cutoff(config.cutoff);
  rho.set_real_tag(true);
  rho.set_probability_tag(true);

  Recorder rec(config, every_step);
  rec.offer(0, rho);
  const std::int64_t last = rec.last_needed(n_steps);
  for (std::int64_t s = 1; s <= last; ++s) {
    auto next = rho + Complex{config.dt} * mv_rhs(rho, config.kernel);
    rho = heat_propagate(next, config.sigma, config.dt);
    rho.set(zero, 1.0);
    rho.set_real_tag(true);
    rho.set_probability_tag(true);
    guard(rho, s, "density");
    rec.offer(s, rho);
  }
  return rec.take();
}

SpectralField b_rhs(const SpectralField& b, const SpectralField& rho, const KernelSpec& kernel,
                    bool flip_y_transport) {
  if (b.num_vars() != 2 || rho.num_vars() != 1) throw std::invalid_argument("b_rhs: expected a pair field and a density");
  const auto b_xy = b.relabeled({0, 1});
  auto at = [&](int label) { return rho.relabeled({label}); };

  const auto rho_x_b_yz = tensor_product(at(0), b_xy.relabeled({1, kStar}));
  const auto rho_y_b_xz = tensor_product(at(1), b_xy.relabeled({0, kStar}));
  const auto rho_z_b_xy = tensor_product(at(kStar), b_xy);
  const auto rho_xy = tensor_product(at(0), at(1));
  const auto rho_xyz = tensor_product(rho_xy, at(kStar));

  auto out = apply_H(kernel, rho_xyz, 0);
  out += apply_H(kernel, rho_xyz, 1);
  out -= apply_H(kernel, rho_x_b_yz, 0);
  out -= apply_H(kernel, rho_z_b_xy, 0);
  if (flip_y_transport) {
    out += apply_H(kernel, rho_y_b_xz, 1);
  } else {
    out -= apply_H(kernel, rho_y_b_xz, 1);
  }
  out -= apply_H(kernel, rho_z_b_xy, 1);
  out -= apply_S(kernel, rho_xy, 0, 1);
  out -= apply_S(kernel, rho_xy, 1, 0);
  out.set_real_tag(b.real_tag() && rho.real_tag());
  return out;
}

FieldTrajectory solve_b(const FieldTrajectory& rho_steps, const PdeRunConfig& config) {
  config.validate();
  const std::int64_t n_steps = config.num_steps();
  Recorder rec(config, false);
  const std::int64_t last = rec.last_needed(n_steps);
  if (rho_steps.fields.size() != rho_steps.times.size() ||
      static_cast<std::int64_t>(rho_steps.fields.size()) < last + 1) {
    throw std::invalid_argument("solve_b: density trajectory does not cover the time grid");
  }
  for (std::int64_t s = 0; s <= last; ++s) {
    if (std::abs(rho_steps.times[s] - static_cast<double>(s) * config.dt) > 1e-9 * std::max(1.0, config.t_end)) {
      throw std::invalid_argument("solve_b: density trajectory is on a different time grid");
    }
  }

  const int d = config.rho0.dim();
  SpectralField b(2, d, config.cutoff, true);
  rec.offer(0, b);
  for (std::int64_t s = 1; s <= last; ++s) {
    auto next = b + Complex{config.dt} *
                        b_rhs(b, rho_steps.fields[s - 1].with_cutoff(config.cutoff), config.kernel,
                              config.flip_y_transport);
    b = heat_propagate(next, config.sigma, config.dt);
    b.set_real_tag(true);
    guard(b, s, "pair-correction");
    rec.offer(s, b);
  }
  return rec.take();
}

}  // namespace chaos
