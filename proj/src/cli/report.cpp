#include <cerrno>
#include <cstring>
#include <fstream>

#include "chaos/cli.hpp"

namespace chaos::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

std::string ExperimentReport::payload_hash() const {
  std::string bytes = payload.dump();
  for (const auto& [name, contents] : files) {
    bytes += '\0';
    bytes += name;
    bytes += '\0';
    bytes += contents;
  }
  return fnv1a_hex(bytes);
}

Json ExperimentReport::summary() const {
  Json names = Json::array();
  for (const auto& [name, contents] : files) names.push_back(config_hash + "-" + name);
  return Json{{"tool_version", tool_version},
              {"command", command},
              {"config_hash", config_hash},
              {"config", config},
              {"wall_clock_seconds", wall_clock_seconds},
              {"audit_pass", audit_pass},
              {"payload_hash", payload_hash()},
              {"payload", payload},
              {"files", names}};
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto summary_path = dir / (report.config_hash + "-summary.json");
  write_file(summary_path, report.summary().dump(2) + '\n');
  written.push_back(summary_path);
  for (const auto& [name, contents] : report.files) {
    const auto p = dir / (report.config_hash + "-" + name);
    write_file(p, contents);
    written.push_back(p);
  }
  return written;
}

}  // namespace chaos::cli
