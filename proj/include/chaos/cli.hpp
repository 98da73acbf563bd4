#pragma once

// Experiment configs, their execution and the report files they produce.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaos/audits.hpp"
#include "chaos/chaos_estimator.hpp"
#include "chaos/cumulants_clt.hpp"
#include "chaos/mckean_vlasov.hpp"
#include "chaos/particle_sim.hpp"
#include "chaos/serialization.hpp"

namespace chaos::cli {

inline constexpr const char* kToolVersion = "0.3.1";

enum class Command { simulate, chaos, mv_solve, clt, partition_audit, operator_audit };

std::string command_name(Command c);

struct ChaosSection {
  std::vector<int> orders{2};
  /// Particle counts to sweep; empty means sim.N only.
  std::vector<int> Ns;
  /// Per-axis frequency values of a grid probe; when empty, the box of
  /// radius probe_cutoff.
  std::vector<int> probe_values;
  int probe_cutoff = 2;
  bool include_zero_planes = false;

  FreqProbe probe(int m, int d) const;
};

struct CltSection {
  TestFunction phi;
  Json phi_json;
  std::vector<int> Ns;
  int max_order = 4;
};

struct PartitionAuditSection {
  int max_m = 8;
  std::vector<std::int64_t> Ns{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
};

struct OperatorAuditSection {
  OperatorAuditShape shape;
  double tolerance = 1e-12;
};

struct ExperimentConfig {
  Command command = Command::simulate;
  std::uint64_t seed = 0;
  std::optional<std::string> out_dir;
  std::optional<SimConfig> sim;
  std::optional<PdeRunConfig> pde;
  std::optional<ChaosSection> chaos;
  std::optional<CltSection> clt;
  std::optional<PartitionAuditSection> partition_audit;
  std::optional<OperatorAuditSection> operator_audit;
};

/// Every violated invariant of a config document.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Failure inside a module during execute; the message names the module.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const Json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Canonical JSON form with every default filled in; parse_config accepts it.
Json serialize_config(const ExperimentConfig& config);

/// 16 hex digits of 64-bit FNV-1a.
std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(const ExperimentConfig& config);

struct ExperimentReport {
  std::string command;
  std::string config_hash;
  Json config;
  std::string tool_version = kToolVersion;
  double wall_clock_seconds = 0.0;
  /// Command-specific summary; free of timing so that it is reproducible.
  Json payload;
  /// File suffix (e.g. "chaos.csv") to contents.
  std::map<std::string, std::string> files;
  bool audit_pass = true;

  /// Hash over payload and files.
  std::string payload_hash() const;
  Json summary() const;
};

ExperimentReport execute(const ExperimentConfig& config, int threads = 1);

/// Writes <hash>-summary.json and <hash>-<suffix> for each payload file.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace chaos::cli
