#pragma once

#include <cstdint>
#include <vector>

#include "krsim/qstate.hpp"
#include "krsim/rng.hpp"
#include "krsim/rotator_map.hpp"

namespace krsim {

enum class MeasurementBackend : std::uint32_t {
    Trajectories = 0,
    RandomPhase = 1,
    DensityMatrix = 2,
    NoMeasurement = 3,
};

// Which qubit is measured after each map iteration, and how the measurement
// is realized. m is 1-based with m=1 the most significant qubit; the a_m=0
// subspace is the union of 2^(m-1) cells of L = 2^(n_q-m) consecutive
// momentum states.
struct MeasurementSpec {
    int m = 0;  // 0 together with NoMeasurement
    MeasurementBackend backend = MeasurementBackend::NoMeasurement;

    bool measures() const { return backend != MeasurementBackend::NoMeasurement; }
    std::size_t cell_length(int n_q) const { return std::size_t{1} << (n_q - m); }
    std::size_t cell_count() const { return std::size_t{1} << (m - 1); }
    void validate(int n_q) const;
};

// P_outcome(m) |psi>, unnormalized, with the branch weight attached.
ProjectedState project(const QuantumState& s, int m, int outcome);

// Samples the outcome with the Born probabilities, collapses and
// renormalizes in place. Returns the outcome bit. Consumes one uniform draw.
int measure_trajectory(QuantumState& s, int m, RngStream& rng);

// Multiplies the a_m=0 and a_m=1 subspaces by independent random phases
// e^{i beta_0}, e^{i beta_1}. |psi_n|^2 of the state is unchanged. Consumes
// two uniform draws.
void apply_random_phase(QuantumState& s, int m, RngStream& rng);

// One map iteration followed by the spec's measurement action in the
// momentum representation (NoMeasurement: the bare unitary step).
void measured_step(QuantumState& s, const MapKernel& kernel, const MeasurementSpec& spec,
                   RngStream& rng, EvolutionBackend backend = EvolutionBackend::DirectDFT,
                   GateCounts* counts = nullptr);
void measured_step(QuantumState& s, const MapParams& params, const MeasurementSpec& spec,
                   RngStream& rng, EvolutionBackend backend = EvolutionBackend::DirectDFT,
                   GateCounts* counts = nullptr);

// Exact density-matrix evolution of the measured map, the small-system
// oracle for the stochastic backends.
inline constexpr int kDensityMatrixMaxQubits = 8;

struct DensityMatrix {
    std::vector<Complex> rho;  // row-major N x N
    int n_q = 0;

    std::size_t dim() const { return std::size_t{1} << n_q; }
    Complex& at(std::size_t r, std::size_t c) { return rho[r * dim() + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return rho[r * dim() + c]; }
};

DensityMatrix density_from_pure(const QuantumState& s);
double trace_real(const DensityMatrix& rho);
std::vector<double> density_diagonal(const DensityMatrix& rho);

// rho <- P0 U rho U+ P0 + P1 U rho U+ P1 with U one map iteration; m = 0
// skips the projection (unitary evolution of rho).
void evolve_density_matrix(DensityMatrix& rho, const MapKernel& kernel, int m);
void evolve_density_matrix(DensityMatrix& rho, const MapParams& params, int m);

}  // namespace krsim
