#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "krsim/experiment.hpp"

namespace krsim {

std::string to_string(MeasurementBackend backend);
MeasurementBackend measurement_backend_from_string(const std::string& name);

std::string to_string(EvolutionBackend backend);
EvolutionBackend evolution_backend_from_string(const std::string& name);

// Flat key-value run-config file: one `key = value` per line, '#' comments.
std::vector<std::pair<std::string, std::string>> parse_flat_config(std::istream& in);
std::vector<std::pair<std::string, std::string>> parse_flat_config_file(const std::string& path);

// Applies documented keys (n_q, k, T, m, backend, M, t_max, seed, schedule,
// checkpoint_every, outdir) onto a config; `outdir`, when present, is
// returned through *outdir. Unknown keys raise ConfigError.
void apply_flat_config(EnsembleConfig& config,
                       const std::vector<std::pair<std::string, std::string>>& kv,
                       std::string* outdir);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace krsim
