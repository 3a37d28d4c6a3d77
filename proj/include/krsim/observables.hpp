#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "krsim/measurement.hpp"
#include "krsim/qstate.hpp"
#include "krsim/rotator_map.hpp"

namespace krsim {

// Ensemble-averaged probability over momentum states, p[j] ~ <|psi_n|^2>
// with n = -N/2 + j.
struct ProbabilityDistribution {
    std::vector<double> p;
    int n_q = 0;
};

// <n^2> = sum_n n^2 p_n about n = 0.
double second_moment(const ProbabilityDistribution& dist);

// Inverse participation ratio xi = 1 / sum_n p_n^2.
double ipr(const ProbabilityDistribution& dist);

// p_n = (1/M) sum over trajectories of |psi_n|^2, summed in input order.
ProbabilityDistribution accumulate_distribution(std::span<const QuantumState> states);

// Time series of the run diagnostics plus the metadata needed to reproduce
// the run.
struct ObservableSeries {
    std::vector<std::uint64_t> times;
    std::vector<double> n2_mean;
    std::vector<double> n2_stderr;
    std::vector<double> ipr;            // IPR of the ensemble-averaged distribution
    std::vector<double> norm_check;     // mean trajectory norm (drift diagnostic)
    std::vector<double> traj_ipr_mean;  // mean single-trajectory IPR

    MapParams params;
    MeasurementSpec spec;
    EvolutionBackend evolution = EvolutionBackend::DirectDFT;
    int M = 1;
    std::uint64_t master_seed = 0;
    GateCounts gates_per_step;
    double wall_seconds = 0.0;

    std::size_t size() const { return times.size(); }
};

// Arithmetic mean of xi(t) over recorded times in [t_lo, t_hi].
double time_averaged_ipr(const ObservableSeries& series, std::uint64_t t_lo, std::uint64_t t_hi);

struct PowerLawFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    int points = 0;
};

// Unweighted least squares of log y vs log t over recorded times in
// [t_lo, t_hi]; requires >= 10 strictly positive samples in range.
PowerLawFit fit_power_law(std::span<const std::uint64_t> times, std::span<const double> values,
                          std::uint64_t t_lo, std::uint64_t t_hi);

// CSV export: "t,n2_mean,n2_stderr,ipr,norm_check" and "n,p". Fixed
// shortest-round-trip formatting so identical data gives identical bytes.
void write_series_csv(const ObservableSeries& series, const std::string& path);
void write_distribution_csv(const ProbabilityDistribution& dist, const std::string& path);

std::string format_double(double x);

}  // namespace krsim
