#pragma once

#include <cstdint>
#include <vector>

#include "krsim/qstate.hpp"

namespace krsim {

enum class EvolutionBackend : std::uint32_t { DirectDFT = 0, GateCircuit = 1 };

struct GateCounts {
    std::int64_t controlled_phase = 0;
    std::int64_t single_qubit = 0;
    std::int64_t swap = 0;
    std::int64_t diagonal_oracle = 0;

    std::int64_t total() const { return controlled_phase + single_qubit + swap + diagonal_oracle; }
    GateCounts& operator+=(const GateCounts& o) {
        controlled_phase += o.controlled_phase;
        single_qubit += o.single_qubit;
        swap += o.swap;
        diagonal_oracle += o.diagonal_oracle;
        return *this;
    }
};

// Free rotation exp(-i T n^2 / 2), diagonal in the momentum basis.
void apply_rotation(QuantumState& s, double T);

// Kick exp(-i k cos theta), diagonal on the phase grid theta_j = 2*pi*j/N.
void apply_kick(QuantumState& s, double k);

// Unitary DFT between the momentum basis (n = -N/2 + j) and the phase grid,
// symmetric 1/sqrt(N) normalization. Flips the representation tag.
void to_phase_representation(QuantumState& s);
void to_momentum_representation(QuantumState& s);

// One map iteration U = U_k . U_T: rotation in momentum, forward transform,
// kick on the phase grid, inverse transform. Input and output in Momentum
// representation. With GateCircuit the transform and rotation are applied as
// the explicit gate sequence and `counts`, when given, receives the tally.
void step(QuantumState& s, const MapParams& params,
          EvolutionBackend backend = EvolutionBackend::DirectDFT, GateCounts* counts = nullptr);

// Gate-level momentum<->phase transform: the QFT network (one Hadamard-type
// gate per qubit, a controlled-phase between every qubit pair, final qubit
// order reversal), pinned to equal to_phase_representation exactly, shift
// convention included. `inverse` applies the adjoint circuit.
GateCounts qft_gate_circuit(QuantumState& s, bool inverse);

// Gate-level rotation: expands n^2 over the bits of j into n_q single-qubit
// phase gates, n_q(n_q-1)/2 controlled-phase gates and a global phase.
GateCounts rotation_gate_circuit(QuantumState& s, double T);

// Precomputed diagonal tables for repeated stepping with fixed MapParams.
// Results are identical to the free functions. Const-callable from multiple
// worker threads at once.
class MapKernel {
public:
    explicit MapKernel(const MapParams& params);

    const MapParams& params() const { return params_; }
    void apply(QuantumState& s, EvolutionBackend backend, GateCounts* counts = nullptr) const;
    void step_direct(QuantumState& s) const;
    void step_circuit(QuantumState& s, GateCounts* counts) const;

private:
    MapParams params_;
    std::vector<Complex> rotation_table_;
    std::vector<Complex> kick_table_;
};

}  // namespace krsim
