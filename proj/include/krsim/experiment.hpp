#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krsim/measurement.hpp"
#include "krsim/observables.hpp"
#include "krsim/qstate.hpp"
#include "krsim/rotator_map.hpp"

namespace krsim {

// Observable sampling schedule over map iterations t = 1..t_max. Geometric:
// ~points_per_decade times per decade (log-log friendly); Linear: every
// `stride` iterations. t_max is always included.
struct ScheduleSpec {
    enum class Kind { Geometric, Linear } kind = Kind::Geometric;
    double points_per_decade = 30.0;
    std::uint64_t stride = 1;

    std::string to_string() const;
    static ScheduleSpec parse(const std::string& text);
};

std::vector<std::uint64_t> make_schedule(const ScheduleSpec& spec, std::uint64_t t_max);

struct EnsembleConfig {
    MapParams params;
    MeasurementSpec spec;
    EvolutionBackend evolution = EvolutionBackend::DirectDFT;
    int M = 50;
    std::uint64_t t_max = 20000;
    std::uint64_t master_seed = 1;
    int n0 = 0;  // initial momentum eigenstate
    ScheduleSpec schedule;

    // Runtime controls, excluded from the config hash: they cannot change
    // any produced numbers.
    std::uint64_t checkpoint_every = 0;  // 0 = no checkpoints
    std::string checkpoint_path;
    std::uint64_t halt_at = 0;  // stop (with a checkpoint) at this boundary; 0 = run to t_max
    int workers = 0;            // 0 = hardware concurrency

    void validate() const;
    // Flat key=value rendering of everything that determines the numbers.
    std::string canonical_text() const;
    std::uint64_t config_hash() const;
};

struct EnsembleResult {
    ObservableSeries series;
    ProbabilityDistribution final_distribution;
    // |psi_n|^2 of trajectory 0 at the end, for single-trajectory diagnostics.
    ProbabilityDistribution single_trajectory_distribution;
    std::uint64_t t_done = 0;  // equals t_max unless halted early
};

// Evolves M trajectories (or the exact density matrix) for t_max iterations,
// sampling on the schedule. Fully deterministic given the config: the
// trajectory reduction is ordered by trajectory index, so results are
// identical for any worker count.
EnsembleResult run_ensemble(const EnsembleConfig& config);

struct CheckpointInfo {
    std::uint32_t version = 0;
    std::uint64_t config_hash = 0;
    std::string config_text;
    std::uint64_t t_done = 0;
};

CheckpointInfo read_checkpoint_info(const std::string& path);

// Continues a checkpointed run to completion. When `expected` is non-null its
// hash must match the one stored in the checkpoint. The finished result is
// identical to the uninterrupted run.
EnsembleResult resume_ensemble(const std::string& checkpoint_path,
                               const EnsembleConfig* expected = nullptr, int workers = 0);

// k scan at fixed qubit offset: for each (k, n_q) a measured run with
// m = n_q - m_offset, plus the no-measurement baseline xi_0(k).
struct SweepConfig {
    EnsembleConfig base;       // params.k / params.n_q / spec.m are overwritten per point
    std::vector<double> k_values;
    std::vector<int> nq_values;
    int m_offset = 8;
    double window_fraction = 0.10;  // tail fraction of t_max averaged for <xi>
    double spread_threshold = 0.30; // relative spread across n_q marking delocalization
};

struct TransitionReport {
    std::vector<double> k_values;
    std::vector<int> nq_values;
    std::vector<std::vector<double>> xi;  // [k][nq], time-averaged tail <xi>
    std::vector<double> spread;           // per k: (max-min)/mean across n_q
    std::vector<double> xi0;              // per k: no-measurement baseline
    int baseline_nq = 0;
    std::size_t cell_length = 0;  // L = 2^m_offset
    double k_c = 0.0;             // NaN when no transition inside the scanned range
    double xi0_at_kc_over_L = 0.0;
};

TransitionReport run_k_scan(const SweepConfig& sweep);

// Trajectories vs random-phase twin with independently derived seeds;
// consistency = pointwise agreement of <n^2>(t) within 3 combined standard
// errors on at least `required_fraction` of sample times.
struct MethodComparison {
    ObservableSeries trajectories;
    ObservableSeries random_phase;
    std::vector<double> n2_ratio;
    double agree_fraction = 0.0;
    bool consistent = false;
    double required_fraction = 0.90;
};

MethodComparison run_method_comparison(const EnsembleConfig& config);

}  // namespace krsim
