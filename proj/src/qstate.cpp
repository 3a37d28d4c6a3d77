#include "krsim/qstate.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "krsim/errors.hpp"

namespace krsim {

namespace {

constexpr char kSnapshotMagic[4] = {'K', 'L', 'S', 'T'};
constexpr std::uint32_t kSnapshotVersion = 1;

void check_n_q(int n_q) {
    if (n_q < 1 || n_q > 30)
        throw std::invalid_argument("n_q must be in [1, 30], got " + std::to_string(n_q));
}

}  // namespace

void MapParams::validate() const {
    if (n_q < 2 || n_q > 24)
        throw std::invalid_argument("MapParams: n_q must be in [2, 24], got " + std::to_string(n_q));
    if (!(k >= 0.0))
        throw std::invalid_argument("MapParams: kick strength k must be >= 0");
    if (!std::isfinite(T))
        throw std::invalid_argument("MapParams: rotation parameter T must be finite");
}

std::size_t dim_of(int n_q) {
    check_n_q(n_q);
    return std::size_t{1} << n_q;
}

int index_to_momentum(std::size_t j, int n_q) {
    const std::size_t n = dim_of(n_q);
    if (j >= n)
        throw std::out_of_range("basis index " + std::to_string(j) + " out of range for n_q=" +
                                std::to_string(n_q));
    return static_cast<int>(j) - static_cast<int>(n / 2);
}

std::size_t momentum_to_index(int n, int n_q) {
    const std::size_t dim = dim_of(n_q);
    const int half = static_cast<int>(dim / 2);
    if (n < -half || n > half - 1)
        throw std::out_of_range("momentum " + std::to_string(n) + " out of range for n_q=" +
                                std::to_string(n_q));
    return static_cast<std::size_t>(n + half);
}

int qubit_bit(std::size_t j, int m, int n_q) {
    const std::size_t n = dim_of(n_q);
    if (j >= n)
        throw std::out_of_range("basis index out of range");
    if (m < 1 || m > n_q)
        throw std::out_of_range("qubit index m=" + std::to_string(m) + " out of [1, " +
                                std::to_string(n_q) + "]");
    return static_cast<int>((j >> (n_q - m)) & 1u);
}

QuantumState initial_state(int n_q, int n0) {
    QuantumState s;
    s.n_q = n_q;
    s.rep = Representation::Momentum;
    s.amps.assign(dim_of(n_q), Complex{0.0, 0.0});
    s.amps[momentum_to_index(n0, n_q)] = Complex{1.0, 0.0};
    return s;
}

double norm_squared(const QuantumState& s) {
    double acc = 0.0;
    for (const Complex& a : s.amps) acc += std::norm(a);
    return acc;
}

QuantumState renormalize(ProjectedState ps) {
    if (!(ps.weight > kDegenerateBranchThreshold))
        throw DegenerateBranchError("projected branch weight " + std::to_string(ps.weight) +
                                    " below renormalization threshold");
    const double scale = 1.0 / std::sqrt(ps.weight);
    QuantumState s;
    s.amps = std::move(ps.amps);
    s.rep = ps.rep;
    s.n_q = ps.n_q;
    for (Complex& a : s.amps) a *= scale;
    return s;
}

void save_state(const QuantumState& s, std::ostream& out) {
    out.write(kSnapshotMagic, 4);
    const std::uint32_t version = kSnapshotVersion;
    const std::uint32_t n_q = static_cast<std::uint32_t>(s.n_q);
    const std::uint32_t rep = static_cast<std::uint32_t>(s.rep);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n_q), 4);
    out.write(reinterpret_cast<const char*>(&rep), 4);
    out.write(reinterpret_cast<const char*>(s.amps.data()),
              static_cast<std::streamsize>(s.amps.size() * sizeof(Complex)));
    if (!out) throw std::runtime_error("failed to write state snapshot");
}

QuantumState load_state(std::istream& in) {
    char magic[4] = {};
    std::uint32_t version = 0, n_q = 0, rep = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n_q), 4);
    in.read(reinterpret_cast<char*>(&rep), 4);
    if (!in || std::memcmp(magic, kSnapshotMagic, 4) != 0)
        throw std::runtime_error("not a KLST state snapshot");
    if (version != kSnapshotVersion)
        throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
    if (n_q < 1 || n_q > 30 || rep > 1)
        throw std::runtime_error("corrupted snapshot header");
    QuantumState s;
    s.n_q = static_cast<int>(n_q);
    s.rep = static_cast<Representation>(rep);
    s.amps.resize(std::size_t{1} << n_q);
    in.read(reinterpret_cast<char*>(s.amps.data()),
            static_cast<std::streamsize>(s.amps.size() * sizeof(Complex)));
    if (!in) throw std::runtime_error("truncated state snapshot");
    return s;
}

void save_state(const QuantumState& s, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    save_state(s, f);
}

QuantumState load_state(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return load_state(f);
}

}  // namespace krsim
