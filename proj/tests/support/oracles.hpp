#pragma once

#include <cstdint>

#include "krsim/qstate.hpp"

// Test-side oracles, deliberately independent of the library's transform and
// kick kernels.
namespace krsim::oracles {

// Direct O(N^2) evaluation of psi(theta_j') = (1/sqrt(N)) sum_n psi_n e^{i n theta_j'}
// with theta_j' = 2*pi*j'/N and n = -N/2 + j.
QuantumState brute_force_to_phase(const QuantumState& momentum);
// Direct O(N^2) inverse.
QuantumState brute_force_to_momentum(const QuantumState& phase);

// Integer-order Bessel J_n(x) by the ascending power series.
double bessel_j(int n, double x);

// Normalized state with gaussian random amplitudes (mt19937_64-based; test
// fixture only).
QuantumState random_state(int n_q, std::uint64_t seed,
                          Representation rep = Representation::Momentum);

double max_abs_diff(const QuantumState& a, const QuantumState& b);
double fidelity(const QuantumState& a, const QuantumState& b);

}  // namespace krsim::oracles
