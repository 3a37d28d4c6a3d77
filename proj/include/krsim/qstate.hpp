#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace krsim {

using Complex = std::complex<double>;

enum class Representation : std::uint32_t { Momentum = 0, Phase = 1 };

// Branch weights below this squared norm are treated as impossible outcomes.
inline constexpr double kDegenerateBranchThreshold = 1e-30;

// Kicked-rotator map parameters. Momentum space has N = 2^n_q levels,
// n = -N/2 + j for array index j; qubit 1 is the most significant bit of j.
struct MapParams {
    double k = 0.0;  // kick strength
    double T = 0.0;  // rotation parameter
    int n_q = 0;     // number of qubits, 2..24

    std::size_t dim() const { return std::size_t{1} << n_q; }
    double chaos_parameter() const { return k * T; }
    // Localization length estimate l ~ k^2/2 for the unmeasured map.
    double localization_length() const { return 0.5 * k * k; }
    void validate() const;
};

// Wavefunction over the 2^n_q computational basis states. The representation
// tag records whether amplitudes are indexed by momentum or by phase-grid
// point; operations check it so the two cannot be silently mixed.
struct QuantumState {
    std::vector<Complex> amps;
    Representation rep = Representation::Momentum;
    int n_q = 0;

    std::size_t dim() const { return amps.size(); }
};

// Unnormalized result of a projection, carrying its branch weight.
struct ProjectedState {
    std::vector<Complex> amps;
    double weight = 0.0;
    Representation rep = Representation::Momentum;
    int n_q = 0;
};

std::size_t dim_of(int n_q);

// n = -N/2 + j
int index_to_momentum(std::size_t j, int n_q);
std::size_t momentum_to_index(int n, int n_q);

// Bit a_m of j = (a_1, a_2, ..., a_nq), a_1 most significant; m is 1-based.
int qubit_bit(std::size_t j, int m, int n_q);

// Momentum eigenstate |n = n0>.
QuantumState initial_state(int n_q, int n0);

double norm_squared(const QuantumState& s);

// Scales amplitudes by 1/sqrt(weight); throws DegenerateBranchError when the
// weight is below kDegenerateBranchThreshold.
QuantumState renormalize(ProjectedState ps);

// Binary snapshot: 16-byte header {magic "KLST", version u32, n_q u32,
// representation u32} followed by N little-endian (re, im) double pairs.
void save_state(const QuantumState& s, std::ostream& out);
QuantumState load_state(std::istream& in);
void save_state(const QuantumState& s, const std::string& path);
QuantumState load_state(const std::string& path);

}  // namespace krsim
