#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace krsim::oracles {

QuantumState brute_force_to_phase(const QuantumState& momentum) {
    const std::size_t dim = momentum.amps.size();
    QuantumState out;
    out.n_q = momentum.n_q;
    out.rep = Representation::Phase;
    out.amps.assign(dim, Complex{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t jp = 0; jp < dim; ++jp) {
        const double theta = 2.0 * M_PI * static_cast<double>(jp) / static_cast<double>(dim);
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < dim; ++j) {
            const double n = static_cast<double>(j) - static_cast<double>(dim) / 2.0;
            acc += momentum.amps[j] * std::polar(1.0, n * theta);
        }
        out.amps[jp] = scale * acc;
    }
    return out;
}

QuantumState brute_force_to_momentum(const QuantumState& phase) {
    const std::size_t dim = phase.amps.size();
    QuantumState out;
    out.n_q = phase.n_q;
    out.rep = Representation::Momentum;
    out.amps.assign(dim, Complex{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        const double n = static_cast<double>(j) - static_cast<double>(dim) / 2.0;
        Complex acc{0.0, 0.0};
        for (std::size_t jp = 0; jp < dim; ++jp) {
            const double theta = 2.0 * M_PI * static_cast<double>(jp) / static_cast<double>(dim);
            acc += phase.amps[jp] * std::polar(1.0, -n * theta);
        }
        out.amps[j] = scale * acc;
    }
    return out;
}

double bessel_j(int n, double x) {
    if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j(-n, x);
    const double half = 0.5 * x;
    // term_0 = (x/2)^n / n!
    double term = 1.0;
    for (int i = 1; i <= n; ++i) term *= half / static_cast<double>(i);
    double sum = term;
    for (int s = 0; s < 400 && term != 0.0; ++s) {
        term *= -half * half / (static_cast<double>(s + 1) * static_cast<double>(n + s + 1));
        sum += term;
        if (std::abs(term) < 1e-300) break;
    }
    return sum;
}

QuantumState random_state(int n_q, std::uint64_t seed, Representation rep) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    QuantumState s;
    s.n_q = n_q;
    s.rep = rep;
    s.amps.resize(dim_of(n_q));
    double norm = 0.0;
    for (Complex& a : s.amps) {
        a = Complex{normal(gen), normal(gen)};
        norm += std::norm(a);
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (Complex& a : s.amps) a *= scale;
    return s;
}

double max_abs_diff(const QuantumState& a, const QuantumState& b) {
    if (a.amps.size() != b.amps.size()) throw std::invalid_argument("size mismatch");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.amps.size(); ++j)
        worst = std::max(worst, std::abs(a.amps[j] - b.amps[j]));
    return worst;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
    Complex overlap{0.0, 0.0};
    for (std::size_t j = 0; j < a.amps.size(); ++j) overlap += std::conj(a.amps[j]) * b.amps[j];
    return std::abs(overlap);
}

}  // namespace krsim::oracles
