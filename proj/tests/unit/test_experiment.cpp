#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "krsim/config.hpp"
#include "krsim/errors.hpp"
#include "krsim/experiment.hpp"
#include "oracles.hpp"

using namespace krsim;

namespace {

EnsembleConfig small_config() {
    EnsembleConfig c;
    c.params = MapParams{2.0, 2.0, 6};
    c.spec = MeasurementSpec{6, MeasurementBackend::Trajectories};
    c.M = 8;
    c.t_max = 400;
    c.master_seed = 99;
    return c;
}

std::string series_bytes(const ObservableSeries& series) {
    const std::string path = "tmp_series_cmp.csv";
    write_series_csv(series, path);
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::remove(path.c_str());
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("geometric schedule") {
    const auto times = make_schedule(ScheduleSpec{}, 20000);
    CHECK(times.front() == 1);
    CHECK(times.back() == 20000);
    for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] > times[i - 1]);
    // ~30 points per decade over 4.3 decades.
    CHECK(times.size() > 90);
    CHECK(times.size() < 140);
    // 10^4 lands exactly on the grid.
    CHECK(std::find(times.begin(), times.end(), 10000) != times.end());
}

TEST_CASE("linear schedule") {
    const auto times = make_schedule(ScheduleSpec{ScheduleSpec::Kind::Linear, 30.0, 50}, 120);
    CHECK(times == std::vector<std::uint64_t>{50, 100, 120});
}

TEST_CASE("config validation rejects inconsistent ensembles") {
    EnsembleConfig c = small_config();
    c.spec = MeasurementSpec{0, MeasurementBackend::NoMeasurement};
    c.M = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = small_config();
    c.spec.m = 0;
    CHECK_THROWS_AS(c.validate(), std::out_of_range);

    c = small_config();
    c.checkpoint_every = 100;  // no path
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = small_config();
    c.spec = MeasurementSpec{4, MeasurementBackend::DensityMatrix};
    c.M = 1;
    c.params.n_q = 10;
    CHECK_THROWS_AS(c.validate(), CapacityError);
}

TEST_CASE("runs are deterministic and independent of worker count") {
    EnsembleConfig c = small_config();
    c.workers = 1;
    const EnsembleResult one = run_ensemble(c);
    c.workers = 4;
    const EnsembleResult four = run_ensemble(c);
    CHECK(series_bytes(one.series) == series_bytes(four.series));
    CHECK(one.final_distribution.p == four.final_distribution.p);

    const EnsembleResult again = run_ensemble(c);
    CHECK(series_bytes(four.series) == series_bytes(again.series));
}

TEST_CASE("interrupt and resume reproduces the uninterrupted run exactly") {
    TempDir tmp("krsim_ckpt_test");
    EnsembleConfig c = small_config();

    const EnsembleResult full = run_ensemble(c);

    EnsembleConfig halted = c;
    halted.checkpoint_path = (tmp.path / "run.klck").string();
    halted.halt_at = 150;
    const EnsembleResult partial = run_ensemble(halted);
    CHECK(partial.t_done == 150);
    CHECK(partial.series.times.back() <= 150);

    const EnsembleResult resumed = resume_ensemble(halted.checkpoint_path);
    CHECK(resumed.t_done == c.t_max);
    CHECK(series_bytes(resumed.series) == series_bytes(full.series));
    CHECK(resumed.final_distribution.p == full.final_distribution.p);
}

TEST_CASE("periodic checkpoints leave a resumable file behind") {
    TempDir tmp("krsim_ckpt_periodic");
    EnsembleConfig c = small_config();
    c.checkpoint_every = 100;
    c.checkpoint_path = (tmp.path / "run.klck").string();
    const EnsembleResult full = run_ensemble(c);

    // The last periodic checkpoint sits at t=300; resuming finishes the run.
    const CheckpointInfo info = read_checkpoint_info(c.checkpoint_path);
    CHECK(info.t_done == 300);
    CHECK(info.config_hash == c.config_hash());
    const EnsembleResult resumed = resume_ensemble(c.checkpoint_path);
    CHECK(series_bytes(resumed.series) == series_bytes(full.series));
}

TEST_CASE("resume rejects a mismatched config") {
    TempDir tmp("krsim_ckpt_mismatch");
    EnsembleConfig c = small_config();
    c.checkpoint_path = (tmp.path / "run.klck").string();
    c.halt_at = 200;
    run_ensemble(c);

    EnsembleConfig altered = c;
    altered.params.k = 3.0;
    CHECK_THROWS_AS(resume_ensemble(c.checkpoint_path, &altered), CheckpointError);

    // The original config resumes fine.
    EnsembleConfig same = c;
    same.halt_at = 0;
    same.checkpoint_path.clear();
    CHECK_NOTHROW(resume_ensemble(c.checkpoint_path, &same));
}

TEST_CASE("corrupted checkpoints are refused") {
    TempDir tmp("krsim_ckpt_corrupt");
    const std::string path = (tmp.path / "bad.klck").string();
    {
        std::ofstream f(path, std::ios::binary);
        f << "JUNKnotACheckpoint";
    }
    CHECK_THROWS_AS(read_checkpoint_info(path), CheckpointError);
    CHECK_THROWS_AS(resume_ensemble(path), CheckpointError);

    //

    EnsembleConfig c = small_config();
    c.checkpoint_path = (tmp.path / "run.klck").string();
    c.halt_at = 200;
    run_ensemble(c);
    std::filesystem::resize_file(c.checkpoint_path,
                                 std::filesystem::file_size(c.checkpoint_path) / 2);
    CHECK_THROWS_AS(resume_ensemble(c.checkpoint_path), CheckpointError);
}

TEST_CASE("density-matrix backend matches the direct oracle evolution") {
    EnsembleConfig c;
    c.params = MapParams{2.0, 2.0, 4};
    c.spec = MeasurementSpec{2, MeasurementBackend::DensityMatrix};
    c.M = 1;
    c.t_max = 20;
    c.schedule = ScheduleSpec{ScheduleSpec::Kind::Linear, 30.0, 20};
    const EnsembleResult viaRunner = run_ensemble(c);

    DensityMatrix rho = density_from_pure(initial_state(4, 0));
    const MapKernel kernel(c.params);
    for (int t = 0; t < 20; ++t) evolve_density_matrix(rho, kernel, 2);
    const auto exact = density_diagonal(rho);
    for (std::size_t j = 0; j < exact.size(); ++j)
        CHECK(viaRunner.final_distribution.p[j] == doctest::Approx(exact[j]).epsilon(1e-12));
    CHECK(viaRunner.series.norm_check.back() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("method comparison runs both backends and reports a verdict") {
    EnsembleConfig c = small_config();
    c.t_max = 300;
    const MethodComparison cmp = run_method_comparison(c);
    CHECK(cmp.trajectories.size() == cmp.random_phase.size());
    CHECK(cmp.n2_ratio.size() == cmp.trajectories.size());
    CHECK(cmp.agree_fraction >= 0.0);
    CHECK(cmp.agree_fraction <= 1.0);
    CHECK(cmp.trajectories.spec.backend == MeasurementBackend::Trajectories);
    CHECK(cmp.random_phase.spec.backend == MeasurementBackend::RandomPhase);
    CHECK(cmp.random_phase.master_seed != cmp.trajectories.master_seed);
}

TEST_CASE("k scan produces a coherent report on a toy sweep") {
    SweepConfig sweep;
    sweep.base = small_config();
    sweep.base.t_max = 300;
    sweep.base.M = 4;
    sweep.k_values = {1.0, 2.0};
    sweep.nq_values = {6, 7};
    sweep.m_offset = 4;
    const TransitionReport report = run_k_scan(sweep);
    CHECK(report.cell_length == 16);
    CHECK(report.baseline_nq == 7);
    CHECK(report.xi.size() == 2);
    CHECK(report.xi[0].size() == 2);
    for (const auto& row : report.xi)
        for (double v : row) CHECK(v >= 1.0);
    CHECK(report.xi0.size() == 2);
}
