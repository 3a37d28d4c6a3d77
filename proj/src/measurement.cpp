#include "krsim/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "krsim/errors.hpp"

namespace krsim {

namespace {

void require_momentum(const QuantumState& s, const char* op) {
    if (s.rep != Representation::Momentum)
        throw RepresentationError(std::string(op) + ": state must be in the momentum representation");
}

void check_qubit(int m, int n_q) {
    if (m < 1 || m > n_q)
        throw std::out_of_range("measured qubit m=" + std::to_string(m) + " out of [1, " +
                                std::to_string(n_q) + "]");
}

// Subspace weights: a_m alternates in runs of L = 2^(n_q-m) consecutive
// indices, so both sums walk contiguous blocks.
std::pair<double, double> branch_weights(const QuantumState& s, int m) {
    const std::size_t cell = std::size_t{1} << (s.n_q - m);
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t base = 0; base < s.amps.size(); base += 2 * cell) {
        for (std::size_t j = base; j < base + cell; ++j) w0 += std::norm(s.amps[j]);
        for (std::size_t j = base + cell; j < base + 2 * cell; ++j) w1 += std::norm(s.amps[j]);
    }
    return {w0, w1};
}

}  // namespace

void MeasurementSpec::validate(int n_q) const {
    if (backend == MeasurementBackend::NoMeasurement) return;
    check_qubit(m, n_q);
}

ProjectedState project(const QuantumState& s, int m, int outcome) {
    require_momentum(s, "project");
    check_qubit(m, s.n_q);
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("measurement outcome must be 0 or 1");

    ProjectedState ps;
    ps.n_q = s.n_q;
    ps.rep = s.rep;
    ps.amps.assign(s.amps.size(), Complex{0.0, 0.0});
    const std::size_t cell = std::size_t{1} << (s.n_q - m);
    double weight = 0.0;
    for (std::size_t base = outcome ? cell : 0; base < s.amps.size(); base += 2 * cell) {
        for (std::size_t j = base; j < base + cell; ++j) {
            ps.amps[j] = s.amps[j];
            weight += std::norm(s.amps[j]);
        }
    }
    ps.weight = weight;
    return ps;
}

int measure_trajectory(QuantumState& s, int m, RngStream& rng) {
    require_momentum(s, "measure_trajectory");
    check_qubit(m, s.n_q);

    const auto [w0, w1] = branch_weights(s, m);
    int outcome = rng.next_double() < w0 ? 0 : 1;
    double weight = outcome == 0 ? w0 : w1;
    if (weight <= kDegenerateBranchThreshold) {
        // A unit-norm state cannot put both branches below threshold; landing
        // on the empty one means the draw hit a zero-probability.
        outcome ^= 1;
        weight = outcome == 0 ? w0 : w1;
        if (weight <= kDegenerateBranchThreshold)
            throw DegenerateBranchError("both measurement branches have negligible weight; state corrupted");
    }

    const double scale = 1.0 / std::sqrt(weight);
    const std::size_t cell = std::size_t{1} << (s.n_q - m);
    for (std::size_t base = 0; base < s.amps.size(); base += 2 * cell) {
        std::size_t keep = outcome ? base + cell : base;
        std::size_t drop = outcome ? base : base + cell;
        for (std::size_t j = keep; j < keep + cell; ++j) s.amps[j] *= scale;
        for (std::size_t j = drop; j < drop + cell; ++j) s.amps[j] = Complex{0.0, 0.0};
    }
    return outcome;
}

void apply_random_phase(QuantumState& s, int m, RngStream& rng) {
    require_momentum(s, "apply_random_phase");
    check_qubit(m, s.n_q);

    const double beta0 = 2.0 * M_PI * rng.next_double();
    const double beta1 = 2.0 * M_PI * rng.next_double();
    const Complex e0 = std::polar(1.0, beta0);
    const Complex e1 = std::polar(1.0, beta1);
    const std::size_t cell = std::size_t{1} << (s.n_q - m);
    for (std::size_t base = 0; base < s.amps.size(); base += 2 * cell) {
        for (std::size_t j = base; j < base + cell; ++j) s.amps[j] *= e0;
        for (std::size_t j = base + cell; j < base + 2 * cell; ++j) s.amps[j] *= e1;
    }
}

void measured_step(QuantumState& s, const MapKernel& kernel, const MeasurementSpec& spec,
                   RngStream& rng, EvolutionBackend backend, GateCounts* counts) {
    spec.validate(s.n_q);
    kernel.apply(s, backend, counts);
    switch (spec.backend) {
        case MeasurementBackend::Trajectories:
            measure_trajectory(s, spec.m, rng);
            break;
        case MeasurementBackend::RandomPhase:
            apply_random_phase(s, spec.m, rng);
            break;
        case MeasurementBackend::NoMeasurement:
            break;
        case MeasurementBackend::DensityMatrix:
            throw std::invalid_argument(
                "measured_step: the density-matrix backend evolves a DensityMatrix, not trajectories");
    }
}

void measured_step(QuantumState& s, const MapParams& params, const MeasurementSpec& spec,
                   RngStream& rng, EvolutionBackend backend, GateCounts* counts) {
    measured_step(s, MapKernel(params), spec, rng, backend, counts);
}

DensityMatrix density_from_pure(const QuantumState& s) {
    require_momentum(s, "density_from_pure");
    if (s.n_q > kDensityMatrixMaxQubits)
        throw CapacityError("density matrix limited to n_q <= " +
                            std::to_string(kDensityMatrixMaxQubits));
    const std::size_t dim = s.amps.size();
    DensityMatrix rho;
    rho.n_q = s.n_q;
    rho.rho.resize(dim * dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) rho.rho[r * dim + c] = s.amps[r] * std::conj(s.amps[c]);
    return rho;
}

double trace_real(const DensityMatrix& rho) {
    double tr = 0.0;
    for (std::size_t j = 0; j < rho.dim(); ++j) tr += rho.at(j, j).real();
    return tr;
}

std::vector<double> density_diagonal(const DensityMatrix& rho) {
    std::vector<double> diag(rho.dim());
    for (std::size_t j = 0; j < rho.dim(); ++j) diag[j] = rho.at(j, j).real();
    return diag;
}

void evolve_density_matrix(DensityMatrix& rho, const MapKernel& kernel, int m) {
    const int n_q = rho.n_q;
    if (n_q > kDensityMatrixMaxQubits)
        throw CapacityError("density-matrix evolution limited to n_q <= " +
                            std::to_string(kDensityMatrixMaxQubits) + ", got n_q=" +
                            std::to_string(n_q));
    if (kernel.params().n_q != n_q)
        throw std::invalid_argument("evolve_density_matrix: qubit count mismatch");
    const std::size_t dim = rho.dim();
    if (rho.rho.size() != dim * dim)
        throw std::invalid_argument("evolve_density_matrix: matrix shape does not match n_q");
    if (m != 0) check_qubit(m, n_q);

    QuantumState buf;
    buf.n_q = n_q;
    buf.amps.resize(dim);

    // rho <- U rho, one column at a time.
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) buf.amps[r] = rho.at(r, c);
        buf.rep = Representation::Momentum;
        kernel.step_direct(buf);
        for (std::size_t r = 0; r < dim; ++r) rho.at(r, c) = buf.amps[r];
    }
    // rho <- rho U+: conj of each row evolves by U.
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) buf.amps[c] = std::conj(rho.at(r, c));
        buf.rep = Representation::Momentum;
        kernel.step_direct(buf);
        for (std::size_t c = 0; c < dim; ++c) rho.at(r, c) = std::conj(buf.amps[c]);
    }
    // P0 . P0 + P1 . P1 keeps exactly the entries whose row and column lie in
    // the same a_m subspace.
    if (m != 0) {
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                if (qubit_bit(r, m, n_q) != qubit_bit(c, m, n_q)) rho.at(r, c) = Complex{0.0, 0.0};
    }
}

void evolve_density_matrix(DensityMatrix& rho, const MapParams& params, int m) {
    evolve_density_matrix(rho, MapKernel(params), m);
}

}  // namespace krsim
