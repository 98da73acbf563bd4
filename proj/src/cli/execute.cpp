#include <chrono>
#include <cstdio>
#include <sstream>

#include "chaos/cli.hpp"

namespace chaos::cli {

namespace {

template <class Fn>
auto in_module(const char* module, Fn&& fn) {
  try {
    return fn();
  } catch (const RuntimeFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw RuntimeFailure(std::string(module) + ": " + e.what());
  }
}

constexpr double kZeroPlaneTolerance = 1e-12;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Slots separated by ';', components within a slot by ' '.
std::string freq_text(const FreqVec& xi) {
  std::string s;
  for (int k = 0; k < xi.num_vars(); ++k) {
    if (k) s += ';';
    for (int c = 0; c < xi.dim(); ++c) {
      if (c) s += ' ';
      s += std::to_string(xi(k, c));
    }
  }
  return s;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) { return v; }
  std::ostringstream out_;
};

std::vector<int> sweep(const std::vector<int>& Ns, int fallback) { return Ns.empty() ? std::vector<int>{fallback} : Ns; }

void run_simulate(const ExperimentConfig& cfg, int threads, ExperimentReport& rep) {
  const auto& sim = *cfg.sim;
  const auto snaps = in_module("particle_sim", [&] { return run(sim, threads); });
  Csv csv({"replica", "particle", "t", "coords"});
  Json times = Json::array();
  for (const auto& s : snaps) {
    times.push_back(s.time);
    for (int r = 0; r < s.replicas; ++r) {
      const auto x = s.replica(r);
      for (int i = 0; i < s.N; ++i) {
        std::string coords;
        for (int c = 0; c < s.d; ++c) coords += (c ? " " : "") + num(x[static_cast<std::size_t>(i * s.d + c)]);
        csv.row(r, i, s.time, coords);
      }
    }
  }
  rep.payload = Json{{"times", times},
                     {"replicas", sim.replicas},
                     {"N", sim.N},
                     {"d", sim.d},
                     {"steps", sim.num_steps()},
                     {"rng", Json{{"engine", "mt19937_64"}, {"stream", "splitmix64(seed, replica)"}, {"seed", cfg.seed}}}};
  rep.files["snapshot.csv"] = csv.str();
}

void run_chaos(const ExperimentConfig& cfg, int threads, ExperimentReport& rep) {
  const auto& section = *cfg.chaos;
  const auto Ns = sweep(section.Ns, cfg.sim->N);
  Csv csv({"N", "m", "t", "xi", "re", "im", "se_re", "se_im"});
  Json entries = Json::array();
  // by_order[m][time index] holds (N, linf, se) per sweep point
  std::map<int, std::vector<std::vector<std::array<double, 3>>>> by_order;
  std::vector<double> times;
  double zero_plane_max = 0.0;

  for (int N : Ns) {
    SimConfig sim = *cfg.sim;
    sim.N = N;
    const auto snaps = in_module("particle_sim", [&] { return run(sim, threads); });
    times.clear();
    for (std::size_t ti = 0; ti < snaps.size(); ++ti) {
      const auto& snap = snaps[ti];
      times.push_back(snap.time);
      for (int m : section.orders) {
        const auto entry = in_module("chaos_estimator", [&] {
          return estimate_correlations(snap, m, section.probe(m, sim.d), threads);
        });
        for (const auto& v : entry.values) {
          csv.row(N, m, snap.time, freq_text(v.xi), v.mean.real(), v.mean.imag(), v.se_re, v.se_im);
          if (v.xi.has_zero_slot()) zero_plane_max = std::max(zero_plane_max, std::abs(v.mean));
        }
        entries.push_back(Json{{"N", N},
                               {"m", m},
                               {"t", snap.time},
                               {"replicas", entry.replicas},
                               {"frequencies", entry.values.size()},
                               {"linf", entry.linf},
                               {"linf_se", entry.linf_se},
                               {"l2", entry.l2},
                               {"l2_se", entry.l2_se}});
        auto& slots = by_order[m];
        slots.resize(snaps.size());
        slots[ti].push_back({static_cast<double>(N), entry.linf, entry.linf_se});
      }
    }
  }

  Json fits = Json::array();
  if (Ns.size() >= 2) {
    for (const auto& [m, per_time] : by_order) {
      for (std::size_t ti = 0; ti < per_time.size(); ++ti) {
        std::vector<double> x, y, se;
        for (const auto& p : per_time[ti]) {
          x.push_back(p[0]);
          y.push_back(p[1]);
          se.push_back(p[2]);
        }
        Json f{{"m", m}, {"t", times[ti]}};
        try {
          const auto fit = fit_scaling(x, y, se);
          f["slope"] = fit.slope;
          f["slope_se"] = fit.slope_se;
          f["intercept"] = fit.intercept;
          f["degenerate"] = fit.degenerate;
        } catch (const std::exception& e) {
          f["fit_error"] = e.what();
        }
        fits.push_back(f);
      }
    }
  }
  rep.audit_pass = zero_plane_max <= kZeroPlaneTolerance;
  rep.payload = Json{{"entries", entries}, {"fits", fits}, {"zero_plane_max", zero_plane_max}};
  rep.files["chaos.csv"] = csv.str();
}

void run_mv_solve(const ExperimentConfig& cfg, int, ExperimentReport& rep) {
  const auto& pde = *cfg.pde;
  const auto rho = in_module("mckean_vlasov", [&] { return solve_rho(pde); });
  const auto b = in_module("mckean_vlasov", [&] { return solve_b(solve_rho(pde, true), pde); });
  std::string lines;
  Json rows = Json::array();
  for (std::size_t k = 0; k < rho.times.size(); ++k) {
    const auto nr = norms(rho.fields[k]);
    const auto nb = norms(b.fields[k]);
    rows.push_back(Json{{"t", rho.times[k]},
                        {"rho_linf", nr.linf},
                        {"rho_l2", nr.l2},
                        {"b_linf", nb.linf},
                        {"b_l2", nb.l2}});
    lines += Json{{"t", rho.times[k]}, {"rho", to_json(rho.fields[k])}, {"b", to_json(b.fields[k])}}.dump() + '\n';
  }
  rep.payload = Json{{"records", rows}, {"steps", pde.num_steps()}};
  rep.files["trajectory.jsonl"] = lines;
}

void run_clt(const ExperimentConfig& cfg, int threads, ExperimentReport& rep) {
  const auto& section = *cfg.clt;
  const auto Ns = sweep(section.Ns, cfg.sim->N);
  Csv csv({"N", "t", "kappa_order", "value", "se"});
  Json rows = Json::array();
  bool bounds_ok = true;

  std::map<double, double> limits;
  for (int N : Ns) {
    SimConfig sim = *cfg.sim;
    sim.N = N;
    const auto snaps = in_module("particle_sim", [&] { return run(sim, threads); });
    if (cfg.pde && limits.empty()) {
      PdeRunConfig pde = *cfg.pde;
      pde.obs_times.clear();
      for (const auto& s : snaps) pde.obs_times.push_back(s.time);
      const auto rho = in_module("mckean_vlasov", [&] { return solve_rho(pde); });
      const auto b = in_module("mckean_vlasov", [&] { return solve_b(solve_rho(pde, true), pde); });
      for (std::size_t k = 0; k < snaps.size(); ++k) {
        limits[snaps[k].time] = in_module("cumulants_clt", [&] {
          return variance_limit(section.phi, rho.fields[k], b.fields[k]);
        });
      }
    }
    for (const auto& snap : snaps) {
      const auto samples = in_module("cumulants_clt", [&] { return linear_statistics(snap, section.phi); });
      const auto est = in_module("cumulants_clt", [&] { return empirical_cumulants(samples, section.max_order); });
      for (int k = 0; k < section.max_order; ++k) csv.row(N, snap.time, k + 1, est.values[k], est.ses[k]);
      const auto checks = cumulant_bound_audit(section.phi, est.values, est.ses, N);
      bool pass = true;
      for (const auto& c : checks) pass = pass && c.pass;
      bounds_ok = bounds_ok && pass;
      const auto ks = ks_distance(samples);
      const double n_var = N * est.values[1];
      Json row{{"N", N},
               {"t", snap.time},
               {"mean", est.values[0]},
               {"n_variance", n_var},
               {"n_variance_se", N * est.ses[1]},
               {"ks", ks.distance},
               {"ks_degenerate", ks.degenerate},
               {"bounds_pass", pass}};
      const auto lim = limits.find(snap.time);
      const double reference = lim != limits.end() ? lim->second : n_var;
      if (lim != limits.end()) {
        row["limit"] = lim->second;
        row["gap"] = n_var - lim->second;
      }
      if (reference > 0.0) {
        const auto be = berry_esseen(section.phi, N, reference);
        row["berry_esseen"] = Json{{"gamma", be.gamma}, {"delta", be.delta}, {"rate", be.rate}};
      }
      rows.push_back(row);
    }
  }
  rep.audit_pass = bounds_ok;
  rep.payload = Json{{"rows", rows}, {"bounds_pass", bounds_ok}};
  rep.files["clt.csv"] = csv.str();
}

void run_partition_audit(const ExperimentConfig& cfg, int, ExperimentReport& rep) {
  const auto& section = *cfg.partition_audit;
  const auto rows = in_module("partitions", [&] { return partition_audit(section.max_m, section.Ns); });
  Csv csv({"m", "partitions", "worst_ratio", "max_abs_coeff_sum", "bound_ok", "low_coeffs_zero", "coeff_sum_ok",
           "polynomial_matches", "pass"});
  Json table = Json::array();
  bool all = true;
  for (const auto& r : rows) {
    csv.row(r.m, r.partitions, r.worst_ratio, static_cast<long long>(r.max_abs_coeff_sum), r.bound_ok,
            r.low_coeffs_zero, r.coeff_sum_ok, r.polynomial_matches, r.pass());
    table.push_back(Json{{"m", r.m},
                         {"partitions", r.partitions},
                         {"worst_ratio", r.worst_ratio},
                         {"max_abs_coeff_sum", r.max_abs_coeff_sum},
                         {"pass", r.pass()}});
    all = all && r.pass();
  }
  rep.audit_pass = all;
  rep.payload = Json{{"rows", table}, {"all_pass", all}};
  rep.files["partition_audit.csv"] = csv.str();
}

void run_operator_audit(const ExperimentConfig& cfg, int, ExperimentReport& rep) {
  const auto& section = *cfg.operator_audit;
  const auto res = in_module("torus_fourier", [&] { return operator_norm_audit(section.shape, cfg.seed, section.tolerance); });
  Csv csv({"trials", "min_slack_H_l2", "min_slack_S_l2", "min_slack_H_linf", "min_slack_S_linf", "zero_plane_max",
           "violations", "pass"});
  csv.row(res.trials, res.min_slack_H_l2, res.min_slack_S_l2, res.min_slack_H_linf, res.min_slack_S_linf,
          res.zero_plane_max, res.violations, res.pass());
  rep.audit_pass = res.pass();
  rep.payload = Json{{"trials", res.trials},
                     {"min_slack_H_l2", res.min_slack_H_l2},
                     {"min_slack_S_l2", res.min_slack_S_l2},
                     {"min_slack_H_linf", res.min_slack_H_linf},
                     {"min_slack_S_linf", res.min_slack_S_linf},
                     {"zero_plane_max", res.zero_plane_max},
                     {"violations", res.violations},
                     {"pass", res.pass()}};
  rep.files["operator_audit.csv"] = csv.str();
}

}  // namespace

ExperimentReport execute(const ExperimentConfig& config, int threads) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.command = command_name(config.command);
  rep.config = serialize_config(config);
  rep.config_hash = config_hash(config);
  switch (config.command) {
    case Command::simulate: run_simulate(config, threads, rep); break;
    case Command::chaos: run_chaos(config, threads, rep); break;
    case Command::mv_solve: run_mv_solve(config, threads, rep); break;
    case Command::clt: run_clt(config, threads, rep); break;
    case Command::partition_audit: run_partition_audit(config, threads, rep); break;
    case Command::operator_audit: run_operator_audit(config, threads, rep); break;
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chaos::cli
