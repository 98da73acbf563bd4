#pragma once

// JSON forms of the core value types.
//   SpectralField: {"m", "d", "M", "real_tag", "coeffs": [[[xi...], re, im], ...]}
//   KernelSpec:    {"d", "modes": [[lambda, eta, [[re, im], ...d]], ...]}
//   SetPartition:  [[0, 2], [1], ...]

#include <nlohmann/json.hpp>

#include "chaos/partitions.hpp"
#include "chaos/torus_fourier.hpp"

namespace chaos {

using Json = nlohmann::json;

Json to_json(const SpectralField& field);
SpectralField field_from_json(const Json& j);

Json to_json(const KernelSpec& kernel);
KernelSpec kernel_from_json(const Json& j);

Json to_json(const SetPartition& partition);
SetPartition partition_from_json(const Json& j);

}  // namespace chaos
