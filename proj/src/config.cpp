#include "krsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "krsim/errors.hpp"
#include "krsim/observables.hpp"

namespace krsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    T out{};
    ss >> out;
    if (ss.fail() || !(ss >> std::ws).eof())
        throw ConfigError("config key '" + key + "': cannot parse value '" + value + "'");
    return out;
}

}  // namespace

std::string to_string(MeasurementBackend backend) {
    switch (backend) {
        case MeasurementBackend::Trajectories: return "trajectories";
        case MeasurementBackend::RandomPhase: return "random-phase";
        case MeasurementBackend::DensityMatrix: return "density-matrix";
        case MeasurementBackend::NoMeasurement: return "none";
    }
    throw std::invalid_argument("bad MeasurementBackend");
}

MeasurementBackend measurement_backend_from_string(const std::string& name) {
    if (name == "trajectories") return MeasurementBackend::Trajectories;
    if (name == "random-phase") return MeasurementBackend::RandomPhase;
    if (name == "density-matrix") return MeasurementBackend::DensityMatrix;
    if (name == "none") return MeasurementBackend::NoMeasurement;
    throw ConfigError("unknown measurement backend '" + name +
                      "' (expected trajectories | random-phase | density-matrix | none)");
}

std::string to_string(EvolutionBackend backend) {
    return backend == EvolutionBackend::DirectDFT ? "dft" : "circuit";
}

EvolutionBackend evolution_backend_from_string(const std::string& name) {
    if (name == "dft") return EvolutionBackend::DirectDFT;
    if (name == "circuit") return EvolutionBackend::GateCircuit;
    throw ConfigError("unknown evolution backend '" + name + "' (expected dft | circuit)");
}

std::string ScheduleSpec::to_string() const {
    std::ostringstream ss;
    if (kind == Kind::Geometric) {
        ss << "geom:" << format_double(points_per_decade);
    } else {
        ss << "linear:" << stride;
    }
    return ss.str();
}

ScheduleSpec ScheduleSpec::parse(const std::string& text) {
    ScheduleSpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "geom") {
        spec.kind = Kind::Geometric;
        if (!arg.empty()) spec.points_per_decade = parse_number<double>("schedule", arg);
        if (!(spec.points_per_decade > 0))
            throw ConfigError("schedule: points per decade must be positive");
    } else if (head == "linear") {
        spec.kind = Kind::Linear;
        if (!arg.empty()) spec.stride = parse_number<std::uint64_t>("schedule", arg);
        if (spec.stride == 0) throw ConfigError("schedule: stride must be >= 1");
    } else {
        throw ConfigError("unknown schedule '" + text + "' (expected geom[:ppd] | linear[:stride])");
    }
    return spec;
}

std::vector<std::pair<std::string, std::string>> parse_flat_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        kv.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

std::vector<std::pair<std::string, std::string>> parse_flat_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    return parse_flat_config(f);
}

void apply_flat_config(EnsembleConfig& config,
                       const std::vector<std::pair<std::string, std::string>>& kv,
                       std::string* outdir) {
    for (const auto& [key, value] : kv) {
        if (key == "n_q") {
            config.params.n_q = parse_number<int>(key, value);
        } else if (key == "k") {
            config.params.k = parse_number<double>(key, value);
        } else if (key == "T") {
            config.params.T = parse_number<double>(key, value);
        } else if (key == "m") {
            config.spec.m = parse_number<int>(key, value);
        } else if (key == "backend") {
            config.spec.backend = measurement_backend_from_string(value);
        } else if (key == "evolution") {
            config.evolution = evolution_backend_from_string(value);
        } else if (key == "n0") {
            config.n0 = parse_number<int>(key, value);
        } else if (key == "M") {
            config.M = parse_number<int>(key, value);
        } else if (key == "t_max") {
            config.t_max = parse_number<std::uint64_t>(key, value);
        } else if (key == "seed") {
            config.master_seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "schedule") {
            config.schedule = ScheduleSpec::parse(value);
        } else if (key == "checkpoint_every") {
            config.checkpoint_every = parse_number<std::uint64_t>(key, value);
        } else if (key == "outdir") {
            if (outdir) *outdir = value;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

std::string EnsembleConfig::canonical_text() const {
    std::ostringstream ss;
    ss << "n_q=" << params.n_q << '\n'
       << "k=" << format_double(params.k) << '\n'
       << "T=" << format_double(params.T) << '\n'
       << "m=" << spec.m << '\n'
       << "backend=" << krsim::to_string(spec.backend) << '\n'
       << "evolution=" << krsim::to_string(evolution) << '\n'
       << "M=" << M << '\n'
       << "t_max=" << t_max << '\n'
       << "seed=" << master_seed << '\n'
       << "n0=" << n0 << '\n'
       << "schedule=" << schedule.to_string() << '\n';
    return ss.str();
}

std::uint64_t EnsembleConfig::config_hash() const { return fnv1a64(canonical_text()); }

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();
    return fnv1a64(bytes);
}

}  // namespace krsim
