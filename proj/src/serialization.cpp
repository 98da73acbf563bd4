#include "chaos/serialization.hpp"

#include <stdexcept>
#include <string>

namespace chaos {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::vector<int> int_list(const Json& j, std::size_t expected, const std::string& what) {
  require(j.is_array() && j.size() == expected, what + ": expected a list of " + std::to_string(expected) + " integers");
  std::vector<int> out;
  for (const auto& v : j) {
    require(v.is_number_integer(), what + ": non-integer component");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

Json to_json(const SpectralField& field) {
  Json coeffs = Json::array();
  field.for_each([&](const FreqVec& xi, Complex v) { coeffs.push_back({xi.components(), v.real(), v.imag()}); });
  return {{"m", field.num_vars()}, {"d", field.dim()}, {"M", field.cutoff()}, {"real_tag", field.real_tag()},
          {"coeffs", coeffs}};
}

SpectralField field_from_json(const Json& j) {
  require(j.is_object(), "spectral field: expected an object");
  for (const char* key : {"m", "d", "M", "coeffs"}) {
    require(j.contains(key), std::string("spectral field: missing key '") + key + "'");
  }
  for (const auto& [key, _] : j.items()) {
    require(key == "m" || key == "d" || key == "M" || key == "real_tag" || key == "coeffs",
            "spectral field: unknown key '" + key + "'");
  }
  const int m = j.at("m").get<int>();
  const int d = j.at("d").get<int>();
  const int M = j.at("M").get<int>();
  SpectralField f(m, d, M, j.value("real_tag", false));
  require(j.at("coeffs").is_array(), "spectral field: 'coeffs' must be a list");
  for (const auto& c : j.at("coeffs")) {
    require(c.is_array() && c.size() == 3, "spectral field: each coefficient is [[xi...], re, im]");
    FreqVec xi(d, int_list(c[0], static_cast<std::size_t>(m * d), "spectral field frequency"));
    require(f.in_box(xi), "spectral field: frequency outside the cutoff box");
    f.add(xi, Complex(c[1].get<double>(), c[2].get<double>()));
  }
  if (f.real_tag()) require(f.conjugate_asymmetry() <= 1e-12, "spectral field: real_tag set but coefficients are not conjugate symmetric");
  return f;
}

Json to_json(const KernelSpec& kernel) {
  Json modes = Json::array();
  for (const auto& m : kernel.modes()) {
    Json coeff = Json::array();
    for (auto c : m.coeff) coeff.push_back({c.real(), c.imag()});
    modes.push_back({m.lambda, m.eta, coeff});
  }
  return {{"d", kernel.dim()}, {"modes", modes}};
}

KernelSpec kernel_from_json(const Json& j) {
  require(j.is_object() && j.contains("modes") && j.at("modes").is_array(), "kernel: expected {\"modes\": [...]}");
  for (const auto& [key, _] : j.items()) require(key == "d" || key == "modes", "kernel: unknown key '" + key + "'");
  const auto& modes = j.at("modes");
  int d = j.value("d", 0);
  if (d == 0) {
    require(!modes.empty(), "kernel: give 'd' when the mode list is empty");
    require(modes[0].is_array() && !modes[0].empty() && modes[0][0].is_array(), "kernel: malformed mode");
    d = static_cast<int>(modes[0][0].size());
  }
  std::vector<KernelMode> out;
  for (const auto& m : modes) {
    require(m.is_array() && m.size() == 3, "kernel: each mode is [lambda, eta, [[re, im], ...]]");
    KernelMode km;
    km.lambda = int_list(m[0], static_cast<std::size_t>(d), "kernel lambda");
    km.eta = int_list(m[1], static_cast<std::size_t>(d), "kernel eta");
    require(m[2].is_array() && m[2].size() == static_cast<std::size_t>(d), "kernel: coefficient needs d complex entries");
    for (const auto& c : m[2]) {
      require(c.is_array() && c.size() == 2, "kernel: complex entries are [re, im]");
      km.coeff.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    out.push_back(std::move(km));
  }
  return KernelSpec(d, std::move(out));
}

Json to_json(const SetPartition& partition) { return partition.blocks(); }

SetPartition partition_from_json(const Json& j) {
  require(j.is_array(), "set partition: expected a list of blocks");
  std::vector<std::vector<int>> blocks;
  int size = 0;
  for (const auto& b : j) {
    require(b.is_array(), "set partition: each block is a list of integers");
    std::vector<int> block;
    for (const auto& e : b) {
      require(e.is_number_integer(), "set partition: non-integer element");
      block.push_back(e.get<int>());
    }
    size += static_cast<int>(block.size());
    blocks.push_back(std::move(block));
  }
  return SetPartition(size, std::move(blocks));
}

}  // namespace chaos
