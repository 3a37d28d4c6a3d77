#include "krsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "krsim/config.hpp"
#include "krsim/errors.hpp"

namespace krsim {

namespace {

constexpr char kCheckpointMagic[4] = {'K', 'L', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::uint64_t kCheckpointSentinel = 0x4B4C434B454E4421ull;  // "KLCKEND!"

// --- binary i/o helpers ------------------------------------------------------

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw CheckpointError("truncated checkpoint file");
    return v;
}

void put_doubles(std::ostream& out, const std::vector<double>& v, std::size_t count) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
}

void get_doubles(std::istream& in, std::vector<double>& v, std::size_t count) {
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw CheckpointError("truncated checkpoint file");
}

// --- run state ---------------------------------------------------------------

// Ordered per-sample accumulators; everything is summed in trajectory-index
// order so the totals do not depend on scheduling or worker count.
struct Accumulators {
    std::vector<std::uint64_t> times;  // full schedule
    std::size_t samples_done = 0;      // prefix fully accumulated over all M
    std::vector<double> sum_n2, sum_n2sq, sum_norm, sum_traj_ipr;
    std::vector<double> sum_p;  // times.size() x dim, row-major

    void init(std::vector<std::uint64_t> schedule, std::size_t dim) {
        times = std::move(schedule);
        samples_done = 0;
        sum_n2.assign(times.size(), 0.0);
        sum_n2sq.assign(times.size(), 0.0);
        sum_norm.assign(times.size(), 0.0);
        sum_traj_ipr.assign(times.size(), 0.0);
        sum_p.assign(times.size() * dim, 0.0);
    }
};

struct RunState {
    EnsembleConfig config;
    std::vector<QuantumState> states;
    Accumulators acc;
    std::uint64_t t_done = 0;
    GateCounts gates_per_step;
};

// Everything one trajectory contributes to the samples of one segment.
struct TrajSegmentData {
    std::vector<double> n2, norm, traj_ipr;
    std::vector<double> p;  // n_samples x dim
};

void record_sample(const QuantumState& s, TrajSegmentData& out, std::size_t row) {
    const std::size_t dim = s.amps.size();
    const std::int64_t half = static_cast<std::int64_t>(dim / 2);
    double* prow = out.p.data() + row * dim;
    double n2 = 0.0, norm = 0.0, p2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double pj = std::norm(s.amps[j]);
        const double n = static_cast<double>(static_cast<std::int64_t>(j) - half);
        prow[j] = pj;
        norm += pj;
        n2 += n * n * pj;
        p2 += pj * pj;
    }
    out.n2[row] = n2;
    out.norm[row] = norm;
    out.traj_ipr[row] = 1.0 / p2;
}

// Evolve trajectory `i` across (t_a, t_b], recording schedule samples with
// global indices [i0, i1).
TrajSegmentData evolve_segment(QuantumState& state, std::uint64_t i, const MapKernel& kernel,
                               const EnsembleConfig& cfg, std::uint64_t t_a, std::uint64_t t_b,
                               const std::vector<std::uint64_t>& times, std::size_t i0,
                               std::size_t i1) {
    const std::size_t n_samples = i1 - i0;
    TrajSegmentData data;
    data.n2.resize(n_samples);
    data.norm.resize(n_samples);
    data.traj_ipr.resize(n_samples);
    data.p.resize(n_samples * state.amps.size());

    RngStream rng(cfg.master_seed, i);
    std::size_t si = i0;
    for (std::uint64_t t = t_a + 1; t <= t_b; ++t) {
        rng.begin_step(t);
        kernel.apply(state, cfg.evolution, nullptr);
        switch (cfg.spec.backend) {
            case MeasurementBackend::Trajectories:
                measure_trajectory(state, cfg.spec.m, rng);
                break;
            case MeasurementBackend::RandomPhase:
                apply_random_phase(state, cfg.spec.m, rng);
                break;
            default:
                break;
        }
        if (si < i1 && times[si] == t) {
            record_sample(state, data, si - i0);
            ++si;
        }
    }
    return data;
}

void accumulate_segment(Accumulators& acc, const TrajSegmentData& data, std::size_t i0,
                        std::size_t i1, std::size_t dim) {
    for (std::size_t s = i0; s < i1; ++s) {
        const std::size_t r = s - i0;
        acc.sum_n2[s] += data.n2[r];
        acc.sum_n2sq[s] += data.n2[r] * data.n2[r];
        acc.sum_norm[s] += data.norm[r];
        acc.sum_traj_ipr[s] += data.traj_ipr[r];
        const double* src = data.p.data() + r * dim;
        double* dst = acc.sum_p.data() + s * dim;
        for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
}

// Runs one segment of all M trajectories over a bounded worker pool.
// Accumulation happens strictly in trajectory-index order (ticket hand-off).
void run_segment(RunState& rs, const MapKernel& kernel, std::uint64_t t_a, std::uint64_t t_b,
                 std::size_t i0, std::size_t i1) {
    const int M = rs.config.M;
    const std::size_t dim = rs.states.front().amps.size();
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const int workers = std::min(rs.config.workers > 0 ? rs.config.workers : hw, M);

    std::mutex mu;
    std::condition_variable cv;
    int ticket = 0;
    bool aborted = false;
    std::exception_ptr error;
    std::atomic<int> next{0};

    auto body = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= M) return;
            TrajSegmentData data;
            try {
                data = evolve_segment(rs.states[i], static_cast<std::uint64_t>(i), kernel, rs.config,
                                      t_a, t_b, rs.acc.times, i0, i1);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!error) error = std::current_exception();
                aborted = true;
                cv.notify_all();
                return;
            }
            std::unique_lock<std::mutex> lk(mu);
            cv.wait(lk, [&] { return ticket == i || aborted; });
            if (aborted) return;
            accumulate_segment(rs.acc, data, i0, i1, dim);
            ++ticket;
            cv.notify_all();
        }
    };

    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    rs.acc.samples_done = i1;
    rs.t_done = t_b;
}

// --- checkpointing -----------------------------------------------------------

void write_checkpoint(const RunState& rs) {
    const std::string& path = rs.config.checkpoint_path;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw CheckpointError("cannot open " + tmp + " for writing");
        const std::string text = rs.config.canonical_text();
        const std::size_t dim = rs.states.front().amps.size();
        f.write(kCheckpointMagic, 4);
        put(f, kCheckpointVersion);
        put(f, rs.config.config_hash());
        put(f, rs.config.checkpoint_every);
        put(f, rs.t_done);
        put(f, static_cast<std::uint32_t>(rs.config.M));
        put(f, static_cast<std::uint32_t>(rs.config.params.n_q));
        put(f, static_cast<std::uint64_t>(text.size()));
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        put(f, static_cast<std::uint64_t>(rs.acc.times.size()));
        for (std::uint64_t t : rs.acc.times) put(f, t);
        put(f, static_cast<std::uint64_t>(rs.acc.samples_done));
        put_doubles(f, rs.acc.sum_n2, rs.acc.samples_done);
        put_doubles(f, rs.acc.sum_n2sq, rs.acc.samples_done);
        put_doubles(f, rs.acc.sum_norm, rs.acc.samples_done);
        put_doubles(f, rs.acc.sum_traj_ipr, rs.acc.samples_done);
        put_doubles(f, rs.acc.sum_p, rs.acc.samples_done * dim);
        for (const QuantumState& s : rs.states)
            f.write(reinterpret_cast<const char*>(s.amps.data()),
                    static_cast<std::streamsize>(s.amps.size() * sizeof(Complex)));
        put(f, kCheckpointSentinel);
        if (!f) throw CheckpointError("failed to write checkpoint " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

EnsembleConfig parse_embedded_config(const std::string& text) {
    EnsembleConfig config;
    std::istringstream in(text);
    apply_flat_config(config, parse_flat_config(in), nullptr);
    return config;
}

RunState read_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CheckpointError("cannot open checkpoint " + path);

    char magic[4] = {};
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw CheckpointError(path + " is not a KLCK checkpoint");
    const auto version = get<std::uint32_t>(f);
    if (version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    const auto stored_hash = get<std::uint64_t>(f);
    const auto checkpoint_every = get<std::uint64_t>(f);
    const auto t_done = get<std::uint64_t>(f);
    const auto M = get<std::uint32_t>(f);
    const auto n_q = get<std::uint32_t>(f);
    const auto text_len = get<std::uint64_t>(f);
    if (M == 0 || M > (1u << 27) || n_q < 2 || n_q > 24 || text_len > (1u << 20))
        throw CheckpointError("corrupted checkpoint header");
    std::string text(text_len, '\0');
    f.read(text.data(), static_cast<std::streamsize>(text_len));
    if (!f) throw CheckpointError("truncated checkpoint file");

    RunState rs;
    rs.config = parse_embedded_config(text);
    rs.config.checkpoint_every = checkpoint_every;
    rs.config.checkpoint_path = path;
    if (rs.config.config_hash() != stored_hash)
        throw CheckpointError("checkpoint config hash does not match its embedded config");
    if (rs.config.params.n_q != static_cast<int>(n_q) || rs.config.M != static_cast<int>(M))
        throw CheckpointError("checkpoint header disagrees with embedded config");

    const std::size_t dim = rs.config.params.dim();
    const auto n_times = get<std::uint64_t>(f);
    const auto expected_times = make_schedule(rs.config.schedule, rs.config.t_max);
    if (n_times != expected_times.size()) throw CheckpointError("checkpoint schedule mismatch");
    rs.acc.init(expected_times, dim);
    for (std::size_t i = 0; i < n_times; ++i) {
        if (get<std::uint64_t>(f) != expected_times[i])
            throw CheckpointError("checkpoint schedule mismatch");
    }
    const auto samples_done = get<std::uint64_t>(f);
    if (samples_done > n_times) throw CheckpointError("corrupted checkpoint sample count");
    rs.acc.samples_done = samples_done;
    get_doubles(f, rs.acc.sum_n2, samples_done);
    get_doubles(f, rs.acc.sum_n2sq, samples_done);
    get_doubles(f, rs.acc.sum_norm, samples_done);
    get_doubles(f, rs.acc.sum_traj_ipr, samples_done);
    get_doubles(f, rs.acc.sum_p, samples_done * dim);
    rs.states.resize(M);
    for (auto& s : rs.states) {
        s.n_q = rs.config.params.n_q;
        s.rep = Representation::Momentum;
        s.amps.resize(dim);
        f.read(reinterpret_cast<char*>(s.amps.data()),
               static_cast<std::streamsize>(dim * sizeof(Complex)));
        if (!f) throw CheckpointError("truncated checkpoint file");
    }
    if (get<std::uint64_t>(f) != kCheckpointSentinel)
        throw CheckpointError("checkpoint sentinel mismatch (file corrupted?)");
    rs.t_done = t_done;
    return rs;
}

// --- result assembly ---------------------------------------------------------

EnsembleResult build_result(const RunState& rs, double wall_seconds) {
    const EnsembleConfig& cfg = rs.config;
    const std::size_t dim = cfg.params.dim();
    const double m = static_cast<double>(cfg.M);

    EnsembleResult result;
    ObservableSeries& series = result.series;
    series.params = cfg.params;
    series.spec = cfg.spec;
    series.evolution = cfg.evolution;
    series.M = cfg.M;
    series.master_seed = cfg.master_seed;
    series.gates_per_step = rs.gates_per_step;
    series.wall_seconds = wall_seconds;

    const std::size_t n = rs.acc.samples_done;
    series.times.assign(rs.acc.times.begin(), rs.acc.times.begin() + n);
    series.n2_mean.resize(n);
    series.n2_stderr.resize(n);
    series.ipr.resize(n);
    series.norm_check.resize(n);
    series.traj_ipr_mean.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double mean = rs.acc.sum_n2[s] / m;
        series.n2_mean[s] = mean;
        if (cfg.M > 1) {
            const double var =
                std::max(0.0, (rs.acc.sum_n2sq[s] - m * mean * mean) / (m - 1.0));
            series.n2_stderr[s] = std::sqrt(var / m);
        } else {
            series.n2_stderr[s] = 0.0;
        }
        double p2 = 0.0;
        const double* row = rs.acc.sum_p.data() + s * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            const double pj = row[j] / m;
            p2 += pj * pj;
        }
        series.ipr[s] = 1.0 / p2;
        series.norm_check[s] = rs.acc.sum_norm[s] / m;
        series.traj_ipr_mean[s] = rs.acc.sum_traj_ipr[s] / m;
    }

    result.final_distribution = accumulate_distribution(rs.states);
    result.single_trajectory_distribution =
        accumulate_distribution(std::span<const QuantumState>(rs.states.data(), 1));
    result.t_done = rs.t_done;
    return result;
}

EnsembleResult run_trajectories(RunState& rs) {
    const auto t_start = std::chrono::steady_clock::now();
    const EnsembleConfig& cfg = rs.config;
    const MapKernel kernel(cfg.params);

    if (cfg.evolution == EvolutionBackend::GateCircuit && rs.gates_per_step.total() == 0) {
        QuantumState probe = initial_state(cfg.params.n_q, cfg.n0);
        kernel.apply(probe, EvolutionBackend::GateCircuit, &rs.gates_per_step);
    }

    const std::uint64_t stop =
        (cfg.halt_at > 0 && cfg.halt_at < cfg.t_max) ? cfg.halt_at : cfg.t_max;
    while (rs.t_done < stop) {
        std::uint64_t t_next = stop;
        if (cfg.checkpoint_every > 0)
            t_next = std::min<std::uint64_t>(
                stop, (rs.t_done / cfg.checkpoint_every + 1) * cfg.checkpoint_every);
        const auto lo = std::upper_bound(rs.acc.times.begin(), rs.acc.times.end(), rs.t_done);
        const auto hi = std::upper_bound(rs.acc.times.begin(), rs.acc.times.end(), t_next);
        run_segment(rs, kernel, rs.t_done, t_next,
                    static_cast<std::size_t>(lo - rs.acc.times.begin()),
                    static_cast<std::size_t>(hi - rs.acc.times.begin()));
        const bool halted_here = rs.t_done == stop && stop < cfg.t_max;
        const bool periodic = cfg.checkpoint_every > 0 && rs.t_done % cfg.checkpoint_every == 0 &&
                              rs.t_done < cfg.t_max;
        if (!cfg.checkpoint_path.empty() && (periodic || halted_here)) write_checkpoint(rs);
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return build_result(rs, wall);
}

EnsembleResult run_density(const EnsembleConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const MapKernel kernel(cfg.params);
    const std::size_t dim = cfg.params.dim();
    const auto times = make_schedule(cfg.schedule, cfg.t_max);

    DensityMatrix rho = density_from_pure(initial_state(cfg.params.n_q, cfg.n0));

    EnsembleResult result;
    ObservableSeries& series = result.series;
    series.params = cfg.params;
    series.spec = cfg.spec;
    series.evolution = cfg.evolution;
    series.M = cfg.M;
    series.master_seed = cfg.master_seed;

    ProbabilityDistribution dist;
    dist.n_q = cfg.params.n_q;
    std::size_t si = 0;
    for (std::uint64_t t = 1; t <= cfg.t_max; ++t) {
        evolve_density_matrix(rho, kernel, cfg.spec.m);
        if (si < times.size() && times[si] == t) {
            dist.p = density_diagonal(rho);
            const std::int64_t half = static_cast<std::int64_t>(dim / 2);
            double n2 = 0.0, trace = 0.0, p2 = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double n = static_cast<double>(static_cast<std::int64_t>(j) - half);
                n2 += n * n * dist.p[j];
                trace += dist.p[j];
                p2 += dist.p[j] * dist.p[j];
            }
            series.times.push_back(t);
            series.n2_mean.push_back(n2);
            series.n2_stderr.push_back(0.0);
            series.ipr.push_back(1.0 / p2);
            series.norm_check.push_back(trace);
            series.traj_ipr_mean.push_back(1.0 / p2);
            ++si;
        }
    }
    dist.p = density_diagonal(rho);
    result.final_distribution = dist;
    result.single_trajectory_distribution = dist;
    result.t_done = cfg.t_max;
    series.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace

// --- public API ---------------------------------------------------------------

std::vector<std::uint64_t> make_schedule(const ScheduleSpec& spec, std::uint64_t t_max) {
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    std::vector<std::uint64_t> times;
    if (spec.kind == ScheduleSpec::Kind::Linear) {
        for (std::uint64_t t = spec.stride; t <= t_max; t += spec.stride) times.push_back(t);
    } else {
        const double ppd = spec.points_per_decade;
        for (int i = 0;; ++i) {
            const double x = std::pow(10.0, static_cast<double>(i) / ppd);
            if (x > static_cast<double>(t_max) + 0.5) break;
            const auto t = static_cast<std::uint64_t>(std::llround(x));
            if (t >= 1 && (times.empty() || t > times.back())) times.push_back(t);
        }
    }
    if (times.empty() || times.back() != t_max) times.push_back(t_max);
    return times;
}

void EnsembleConfig::validate() const {
    params.validate();
    spec.validate(params.n_q);
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    if (M < 1) throw ConfigError("trajectory count M must be >= 1");
    const bool deterministic = spec.backend == MeasurementBackend::NoMeasurement ||
                               spec.backend == MeasurementBackend::DensityMatrix;
    if (deterministic && M != 1)
        throw ConfigError("M must be 1 for the " + krsim::to_string(spec.backend) +
                          " backend (the run is deterministic)");
    if (spec.backend == MeasurementBackend::DensityMatrix) {
        if (params.n_q > kDensityMatrixMaxQubits)
            throw CapacityError("density-matrix backend limited to n_q <= " +
                                std::to_string(kDensityMatrixMaxQubits));
        if (checkpoint_every > 0 || halt_at > 0)
            throw ConfigError("checkpointing is not supported for the density-matrix backend");
    }
    if (checkpoint_every > 0 && checkpoint_path.empty())
        throw ConfigError("checkpoint_every requires a checkpoint path");
    if (halt_at > 0 && checkpoint_path.empty())
        throw ConfigError("halting early requires a checkpoint path to resume from");
    momentum_to_index(n0, params.n_q);  // range check
}

EnsembleResult run_ensemble(const EnsembleConfig& config) {
    config.validate();
    if (config.spec.backend == MeasurementBackend::DensityMatrix) return run_density(config);

    RunState rs;
    rs.config = config;
    rs.acc.init(make_schedule(config.schedule, config.t_max), config.params.dim());
    rs.states.assign(config.M, initial_state(config.params.n_q, config.n0));
    return run_trajectories(rs);
}

CheckpointInfo read_checkpoint_info(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CheckpointError("cannot open checkpoint " + path);
    char magic[4] = {};
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw CheckpointError(path + " is not a KLCK checkpoint");
    CheckpointInfo info;
    info.version = get<std::uint32_t>(f);
    if (info.version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(info.version));
    info.config_hash = get<std::uint64_t>(f);
    get<std::uint64_t>(f);  // checkpoint_every
    info.t_done = get<std::uint64_t>(f);
    get<std::uint32_t>(f);
    get<std::uint32_t>(f);
    const auto text_len = get<std::uint64_t>(f);
    if (text_len > (1u << 20)) throw CheckpointError("corrupted checkpoint header");
    info.config_text.resize(text_len);
    f.read(info.config_text.data(), static_cast<std::streamsize>(text_len));
    if (!f) throw CheckpointError("truncated checkpoint file");
    return info;
}

EnsembleResult resume_ensemble(const std::string& checkpoint_path, const EnsembleConfig* expected,
                               int workers) {
    RunState rs = read_checkpoint(checkpoint_path);
    if (expected && expected->config_hash() != rs.config.config_hash())
        throw CheckpointError("checkpoint was produced by a different configuration (hash mismatch)");
    if (workers > 0) rs.config.workers = workers;
    rs.config.halt_at = 0;
    rs.config.validate();
    return run_trajectories(rs);
}

TransitionReport run_k_scan(const SweepConfig& sweep) {
    if (sweep.k_values.empty() || sweep.nq_values.empty())
        throw ConfigError("k scan needs at least one k and one n_q");
    TransitionReport report;
    report.k_values = sweep.k_values;
    report.nq_values = sweep.nq_values;
    report.baseline_nq = *std::max_element(sweep.nq_values.begin(), sweep.nq_values.end());
    report.cell_length = std::size_t{1} << sweep.m_offset;
    report.xi.assign(sweep.k_values.size(), std::vector<double>(sweep.nq_values.size(), 0.0));
    report.spread.assign(sweep.k_values.size(), 0.0);
    report.xi0.assign(sweep.k_values.size(), 0.0);

    const std::uint64_t t_hi = sweep.base.t_max;
    const std::uint64_t t_lo = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(t_hi) * (1.0 - sweep.window_fraction)));

    for (std::size_t ki = 0; ki < sweep.k_values.size(); ++ki) {
        EnsembleConfig base = sweep.base;
        base.params.k = sweep.k_values[ki];

        EnsembleConfig baseline = base;
        baseline.params.n_q = report.baseline_nq;
        baseline.spec = MeasurementSpec{};  // no measurement
        baseline.M = 1;
        report.xi0[ki] = time_averaged_ipr(run_ensemble(baseline).series, t_lo, t_hi);

        for (std::size_t qi = 0; qi < sweep.nq_values.size(); ++qi) {
            EnsembleConfig point = base;
            point.params.n_q = sweep.nq_values[qi];
            point.spec.m = sweep.nq_values[qi] - sweep.m_offset;
            point.master_seed =
                mix_seed(sweep.base.master_seed, ki * sweep.nq_values.size() + qi);
            point.spec.validate(point.params.n_q);
            report.xi[ki][qi] = time_averaged_ipr(run_ensemble(point).series, t_lo, t_hi);
        }
        double lo = report.xi[ki][0], hi = report.xi[ki][0], mean = 0.0;
        for (double v : report.xi[ki]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v;
        }
        mean /= static_cast<double>(report.xi[ki].size());
        report.spread[ki] = (hi - lo) / mean;
    }

    report.k_c = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t ki = 0; ki < sweep.k_values.size(); ++ki) {
        if (report.spread[ki] > sweep.spread_threshold) {
            report.k_c = sweep.k_values[ki];
            report.xi0_at_kc_over_L = report.xi0[ki] / static_cast<double>(report.cell_length);
            break;
        }
    }
    return report;
}

MethodComparison run_method_comparison(const EnsembleConfig& config) {
    if (config.spec.backend != MeasurementBackend::Trajectories)
        throw ConfigError("method comparison starts from a trajectories-backend config");

    EnsembleConfig twin = config;
    twin.spec.backend = MeasurementBackend::RandomPhase;
    twin.master_seed = mix_seed(config.master_seed, 0x52505348ull);  // independent seed
    if (!twin.checkpoint_path.empty()) twin.checkpoint_path += ".rp";

    MethodComparison cmp;
    cmp.trajectories = run_ensemble(config).series;
    cmp.random_phase = run_ensemble(twin).series;

    const std::size_t n = cmp.trajectories.size();
    cmp.n2_ratio.resize(n);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = cmp.trajectories.n2_mean[i];
        const double b = cmp.random_phase.n2_mean[i];
        cmp.n2_ratio[i] = b != 0.0 ? a / b : std::numeric_limits<double>::quiet_NaN();
        const double sigma = std::hypot(cmp.trajectories.n2_stderr[i], cmp.random_phase.n2_stderr[i]);
        if (std::abs(a - b) <= 3.0 * sigma + 1e-12 * (std::abs(a) + std::abs(b) + 1.0)) ++agree;
    }
    cmp.agree_fraction = n > 0 ? static_cast<double>(agree) / static_cast<double>(n) : 0.0;
    cmp.consistent = cmp.agree_fraction >= cmp.required_fraction;
    return cmp;
}

}  // namespace krsim
