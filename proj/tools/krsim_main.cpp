#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "krsim/config.hpp"
#include "krsim/errors.hpp"
#include "krsim/experiment.hpp"
#include "krsim/measurement.hpp"
#include "krsim/observables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace krsim;

#ifndef KRSIM_VERSION
#define KRSIM_VERSION "0.0.0"
#endif

// Collects every file a command writes so the manifest can list them with
// content hashes.
class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::string file(const std::string& rel) {
        fs::create_directories((dir_ / rel).parent_path());
        names_.push_back(rel);
        return (dir_ / rel).string();
    }

    const fs::path& dir() const { return dir_; }

    void write_manifest() const {
        json files = json::array();
        for (const std::string& rel : names_) {
            const std::string full = (dir_ / rel).string();
            char hash[32];
            std::snprintf(hash, sizeof(hash), "%016llx",
                          static_cast<unsigned long long>(fnv1a64_file(full)));
            files.push_back({{"path", rel},
                             {"bytes", static_cast<std::uint64_t>(fs::file_size(full))},
                             {"fnv1a64", hash}});
        }
        std::ofstream f(dir_ / "manifest.json");
        f << json{{"files", files}}.dump(2) << '\n';
    }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

void write_json_file(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

json config_json(const EnsembleConfig& c, const std::string& outdir) {
    return json{{"n_q", c.params.n_q},
                {"k", c.params.k},
                {"T", c.params.T},
                {"m", c.spec.m},
                {"backend", to_string(c.spec.backend)},
                {"evolution", to_string(c.evolution)},
                {"M", c.M},
                {"t_max", c.t_max},
                {"seed", c.master_seed},
                {"n0", c.n0},
                {"schedule", c.schedule.to_string()},
                {"checkpoint_every", c.checkpoint_every},
                {"workers", c.workers},
                {"outdir", outdir}};
}

json gates_json(const GateCounts& g) {
    return json{{"controlled_phase", g.controlled_phase},
                {"single_qubit", g.single_qubit},
                {"swap", g.swap},
                {"diagonal_oracle", g.diagonal_oracle},
                {"total", g.total()}};
}

json metadata_json(const std::string& command, const EnsembleConfig& c, const std::string& outdir,
                   const ObservableSeries& series, std::uint64_t t_done) {
    return json{{"code_version", KRSIM_VERSION},
                {"command", command},
                {"config", config_json(c, outdir)},
                {"gates_per_step", gates_json(series.gates_per_step)},
                {"wall_seconds", series.wall_seconds},
                {"t_done", t_done}};
}

int workers_from_env() {
    if (const char* env = std::getenv("KRSIM_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;
}

// Option bundle for `run`-like subcommands. Flags beat config-file values;
// both beat defaults.
struct RunOptions {
    std::string config_path;
    std::string outdir = "out";
    std::optional<int> n_q, m, M, workers;
    std::optional<double> k, T;
    std::optional<std::string> backend, evolution, schedule;
    std::optional<std::uint64_t> t_max, seed, checkpoint_every, halt_at;

    void add_flags(CLI::App* sub, bool with_backend = true) {
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--nq", n_q, "number of qubits (N = 2^n_q)");
        sub->add_option("--k", k, "kick strength");
        sub->add_option("--T", T, "rotation parameter");
        sub->add_option("--m", m, "measured qubit, 1-based (1 = most significant)");
        if (with_backend)
            sub->add_option("--backend", backend,
                            "measurement backend: trajectories | random-phase | density-matrix | none");
        sub->add_option("--evolution", evolution, "map evolution backend: dft | circuit");
        sub->add_option("--M", M, "number of quantum trajectories");
        sub->add_option("--tmax", t_max, "number of map iterations");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--schedule", schedule, "sampling schedule: geom[:ppd] | linear[:stride]");
        sub->add_option("--checkpoint-every", checkpoint_every, "checkpoint interval in iterations");
        sub->add_option("--halt-at", halt_at,
                        "stop (with a checkpoint) at this iteration; resume later");
        sub->add_option("--out", outdir, "output directory");
        sub->add_option("--workers", workers, "worker threads (default: all cores, or $KRSIM_WORKERS)");
    }

    EnsembleConfig build(std::string* outdir_out) const {
        EnsembleConfig c;
        c.params = MapParams{2.0, 2.0, 10};
        c.spec = MeasurementSpec{0, MeasurementBackend::NoMeasurement};
        std::string dir = outdir;
        if (!config_path.empty()) apply_flat_config(c, parse_flat_config_file(config_path), &dir);
        if (n_q) c.params.n_q = *n_q;
        if (k) c.params.k = *k;
        if (T) c.params.T = *T;
        if (m) c.spec.m = *m;
        if (backend) c.spec.backend = measurement_backend_from_string(*backend);
        if (evolution) c.evolution = evolution_backend_from_string(*evolution);
        if (M) c.M = *M;
        if (t_max) c.t_max = *t_max;
        if (seed) c.master_seed = *seed;
        if (schedule) c.schedule = ScheduleSpec::parse(*schedule);
        if (checkpoint_every) c.checkpoint_every = *checkpoint_every;
        if (halt_at) c.halt_at = *halt_at;
        c.workers = workers ? *workers : workers_from_env();
        // A measuring backend defaults M appropriately for deterministic modes.
        if (c.spec.backend == MeasurementBackend::NoMeasurement ||
            c.spec.backend == MeasurementBackend::DensityMatrix)
            if (!M) c.M = 1;
        if ((c.checkpoint_every > 0 || c.halt_at > 0) && c.checkpoint_path.empty())
            c.checkpoint_path = (fs::path(dir) / "checkpoint.klck").string();
        if (outdir_out) *outdir_out = dir;
        return c;
    }
};

void write_run_outputs(OutputDir& out, const std::string& command, const EnsembleConfig& config,
                       const EnsembleResult& result) {
    write_series_csv(result.series, out.file("series.csv"));
    write_distribution_csv(result.final_distribution, out.file("distribution.csv"));
    write_distribution_csv(result.single_trajectory_distribution,
                           out.file("trajectory0_distribution.csv"));
    write_json_file(metadata_json(command, config, out.dir().string(), result.series, result.t_done),
                    out.file("metadata.json"));
    out.write_manifest();
}

int cmd_run(const RunOptions& opts) {
    std::string outdir;
    const EnsembleConfig config = opts.build(&outdir);
    OutputDir out(outdir);
    const EnsembleResult result = run_ensemble(config);
    write_run_outputs(out, "run", config, result);
    if (result.t_done < config.t_max)
        std::cout << "halted at t=" << result.t_done << ", checkpoint: " << config.checkpoint_path
                  << '\n';
    std::cout << "wrote " << (out.dir() / "series.csv").string() << " (" << result.series.size()
              << " samples)\n";
    return 0;
}

int cmd_resume(const std::string& ckpt, const RunOptions& opts, bool have_expected) {
    std::string outdir;
    const EnsembleConfig expected = opts.build(&outdir);
    OutputDir out(outdir);
    const int workers = opts.workers ? *opts.workers : workers_from_env();
    const EnsembleResult result =
        resume_ensemble(ckpt, have_expected ? &expected : nullptr, workers);
    // Echo the run's own config (from the checkpoint), not the CLI defaults.
    EnsembleConfig actual;
    {
        const CheckpointInfo info = read_checkpoint_info(ckpt);
        std::istringstream text(info.config_text);
        apply_flat_config(actual, parse_flat_config(text), nullptr);
        actual.workers = workers;
    }
    write_run_outputs(out, "resume", actual, result);
    std::cout << "resumed to t=" << result.t_done << ", wrote "
              << (out.dir() / "series.csv").string() << '\n';
    return 0;
}

json transition_report_json(const TransitionReport& report) {
    json per_k = json::array();
    for (std::size_t ki = 0; ki < report.k_values.size(); ++ki) {
        json xi = json::object();
        for (std::size_t qi = 0; qi < report.nq_values.size(); ++qi)
            xi["nq" + std::to_string(report.nq_values[qi])] = report.xi[ki][qi];
        per_k.push_back({{"k", report.k_values[ki]},
                         {"xi", xi},
                         {"spread", report.spread[ki]},
                         {"xi0", report.xi0[ki]}});
    }
    json j{{"points", per_k},
           {"baseline_nq", report.baseline_nq},
           {"cell_length", report.cell_length},
           {"xi0_at_kc_over_L", report.xi0_at_kc_over_L}};
    if (std::isnan(report.k_c))
        j["k_c"] = nullptr;
    else
        j["k_c"] = report.k_c;
    return j;
}

int cmd_scan_k(RunOptions& opts, const std::vector<double>& ks, const std::vector<int>& nqs,
               int m_offset, double window_fraction, double spread_threshold) {
    std::string outdir;
    SweepConfig sweep;
    sweep.base = opts.build(&outdir);
    if (sweep.base.spec.backend == MeasurementBackend::NoMeasurement)
        sweep.base.spec.backend = MeasurementBackend::Trajectories;
    sweep.k_values = ks;
    sweep.nq_values = nqs;
    sweep.m_offset = m_offset;
    sweep.window_fraction = window_fraction;
    sweep.spread_threshold = spread_threshold;

    OutputDir out(outdir);
    const TransitionReport report = run_k_scan(sweep);

    {
        std::ofstream f(out.file("scan.csv"));
        f << "k";
        for (int nq : report.nq_values) f << ",xi_nq" << nq;
        f << ",spread,xi0\n";
        for (std::size_t ki = 0; ki < report.k_values.size(); ++ki) {
            f << format_double(report.k_values[ki]);
            for (std::size_t qi = 0; qi < report.nq_values.size(); ++qi)
                f << ',' << format_double(report.xi[ki][qi]);
            f << ',' << format_double(report.spread[ki]) << ',' << format_double(report.xi0[ki])
              << '\n';
        }
    }
    write_json_file(transition_report_json(report), out.file("report.json"));
    write_json_file(json{{"code_version", KRSIM_VERSION},
                         {"command", "scan-k"},
                         {"config", config_json(sweep.base, outdir)},
                         {"m_offset", m_offset},
                         {"window_fraction", window_fraction},
                         {"spread_threshold", spread_threshold}},
                    out.file("metadata.json"));
    out.write_manifest();
    if (std::isnan(report.k_c))
        std::cout << "no delocalization inside the scanned k range\n";
    else
        std::cout << "estimated k_c = " << report.k_c << " (xi0/L = " << report.xi0_at_kc_over_L
                  << ")\n";
    return 0;
}

void write_comparison_outputs(OutputDir& out, const std::string& prefix,
                              const MethodComparison& cmp) {
    write_series_csv(cmp.trajectories, out.file(prefix + "trajectories.csv"));
    write_series_csv(cmp.random_phase, out.file(prefix + "random_phase.csv"));
    std::ofstream f(out.file(prefix + "comparison.csv"));
    f << "t,n2_trajectories,n2_random_phase,ratio\n";
    for (std::size_t i = 0; i < cmp.trajectories.size(); ++i)
        f << cmp.trajectories.times[i] << ',' << format_double(cmp.trajectories.n2_mean[i]) << ','
          << format_double(cmp.random_phase.n2_mean[i]) << ',' << format_double(cmp.n2_ratio[i])
          << '\n';
}

int cmd_compare_methods(const RunOptions& opts) {
    std::string outdir;
    EnsembleConfig config = opts.build(&outdir);
    if (config.spec.backend == MeasurementBackend::NoMeasurement)
        config.spec.backend = MeasurementBackend::Trajectories;
    OutputDir out(outdir);
    const MethodComparison cmp = run_method_comparison(config);
    write_comparison_outputs(out, "", cmp);
    write_json_file(json{{"code_version", KRSIM_VERSION},
                         {"command", "compare-methods"},
                         {"config", config_json(config, outdir)},
                         {"agree_fraction", cmp.agree_fraction},
                         {"required_fraction", cmp.required_fraction},
                         {"consistent", cmp.consistent}},
                    out.file("report.json"));
    out.write_manifest();
    std::cout << "methods agree on " << 100.0 * cmp.agree_fraction << "% of sample times -> "
              << (cmp.consistent ? "consistent" : "inconsistent") << '\n';
    return 0;
}

int cmd_verify_oracle(int n_q, double k, double T, int m, std::uint64_t t_verify, int M,
                      std::uint64_t seed, const std::string& outdir, int workers) {
    if (n_q > kDensityMatrixMaxQubits)
        throw CapacityError("verify-oracle needs n_q <= " + std::to_string(kDensityMatrixMaxQubits));

    const MapParams params{k, T, n_q};
    const MapKernel kernel(params);
    DensityMatrix rho = density_from_pure(initial_state(n_q, 0));
    for (std::uint64_t t = 0; t < t_verify; ++t) evolve_density_matrix(rho, kernel, m);
    const std::vector<double> exact = density_diagonal(rho);

    EnsembleConfig traj;
    traj.params = params;
    traj.spec = MeasurementSpec{m, MeasurementBackend::Trajectories};
    traj.M = M;
    traj.t_max = t_verify;
    traj.master_seed = seed;
    traj.schedule = ScheduleSpec{ScheduleSpec::Kind::Linear, 30.0, t_verify};
    traj.workers = workers;
    const ProbabilityDistribution sampled = run_ensemble(traj).final_distribution;

    OutputDir out(outdir);
    double max_diff = 0.0, max_pull = 0.0;
    bool ok = true;
    {
        std::ofstream f(out.file("oracle.csv"));
        f << "n,rho_nn,p_n,diff,sigma\n";
        const std::int64_t half = static_cast<std::int64_t>(exact.size() / 2);
        for (std::size_t j = 0; j < exact.size(); ++j) {
            const double p = exact[j];
            const double diff = std::abs(sampled.p[j] - p);
            const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(M));
            max_diff = std::max(max_diff, diff);
            if (sigma > 0.0) max_pull = std::max(max_pull, diff / sigma);
            if (diff > 3.0 * sigma + 1e-12) ok = false;
            f << (static_cast<std::int64_t>(j) - half) << ',' << format_double(p) << ','
              << format_double(sampled.p[j]) << ',' << format_double(diff) << ','
              << format_double(sigma) << '\n';
        }
    }
    write_json_file(json{{"code_version", KRSIM_VERSION},
                         {"command", "verify-oracle"},
                         {"config", config_json(traj, outdir)},
                         {"max_abs_diff", max_diff},
                         {"max_pull_sigma", max_pull},
                         {"within_3sigma", ok}},
                    out.file("report.json"));
    out.write_manifest();
    std::cout << "max |rho_nn - p_n| = " << max_diff << " (worst pull " << max_pull
              << " sigma) -> " << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? 0 : 1;
}

// ---- figure presets ----------------------------------------------------------

EnsembleConfig figure_base(std::uint64_t seed, int workers) {
    EnsembleConfig c;
    c.params = MapParams{2.0, 2.0, 10};
    c.M = 50;
    c.t_max = 20000;
    c.master_seed = seed;
    c.workers = workers;
    return c;
}

int cmd_reproduce_figure(const std::string& name, bool paper_scale, std::uint64_t seed,
                         const std::string& outdir_root, int workers) {
    OutputDir out((fs::path(outdir_root) / name).string());
    json summary{{"code_version", KRSIM_VERSION},
                 {"command", "reproduce-figure"},
                 {"figure", name},
                 {"paper_scale", paper_scale},
                 {"seed", seed}};

    if (name == "fig1") {
        // <n^2>(t) and xi(t): measuring m=n_q destroys localization, one of the
        // most significant qubits (m = n_q-8) or no measurement keeps it.
        const std::vector<int> nqs = paper_scale ? std::vector<int>{9, 10, 11, 12}
                                                 : std::vector<int>{9, 10, 11};
        const std::uint64_t t_max = paper_scale ? 500000 : 20000;
        json fits = json::object();
        int run_index = 0;
        for (int nq : nqs) {
            for (const bool least_significant : {true, false}) {
                EnsembleConfig c = figure_base(mix_seed(seed, run_index++), workers);
                c.params.n_q = nq;
                c.t_max = t_max;
                c.spec = MeasurementSpec{least_significant ? nq : nq - 8,
                                         MeasurementBackend::Trajectories};
                const std::string label =
                    std::string(least_significant ? "m-eq-nq" : "m-offset-8") + "_nq" +
                    std::to_string(nq);
                const EnsembleResult r = run_ensemble(c);
                write_series_csv(r.series, out.file("fig1_" + label + ".csv"));
                if (least_significant) {
                    fits[label] = {
                        {"n2_exponent",
                         fit_power_law(r.series.times, r.series.n2_mean, 1000, t_max).exponent},
                        {"ipr_exponent",
                         fit_power_law(r.series.times, r.series.ipr, 1000, t_max).exponent}};
                }
            }
        }
        EnsembleConfig baseline = figure_base(seed, workers);
        baseline.t_max = t_max;
        baseline.M = 1;
        write_series_csv(run_ensemble(baseline).series, out.file("fig1_no-measurement.csv"));
        summary["fits"] = fits;
    } else if (name == "fig2") {
        // Final probability distributions, n_q=10: extended for m=n_q,
        // localized for m=n_q-8 and without measurements; single-trajectory
        // insets.
        const std::uint64_t t_max = paper_scale ? 500000 : 20000;
        const struct {
            const char* label;
            int m;
            MeasurementBackend backend;
        } curves[] = {{"m-offset-8", 2, MeasurementBackend::Trajectories},
                      {"m-eq-nq", 10, MeasurementBackend::Trajectories},
                      {"no-measurement", 0, MeasurementBackend::NoMeasurement}};
        for (const auto& curve : curves) {
            EnsembleConfig c = figure_base(seed, workers);
            c.t_max = t_max;
            c.spec = MeasurementSpec{curve.m, curve.backend};
            if (curve.backend == MeasurementBackend::NoMeasurement) c.M = 1;
            const EnsembleResult r = run_ensemble(c);
            write_distribution_csv(r.final_distribution,
                                   out.file(std::string("fig2_") + curve.label + ".csv"));
            write_distribution_csv(
                r.single_trajectory_distribution,
                out.file(std::string("fig2_") + curve.label + "_single.csv"));
        }
    } else if (name == "fig3") {
        // <xi>(k) for m = n_q-8 across n_q, plus the no-measurement inset.
        SweepConfig sweep;
        sweep.base = figure_base(seed, workers);
        sweep.base.spec.backend = MeasurementBackend::Trajectories;
        sweep.base.t_max = paper_scale ? 500000 : 50000;
        sweep.k_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
        sweep.nq_values = paper_scale ? std::vector<int>{9, 10, 11, 12} : std::vector<int>{9, 10, 11};
        sweep.m_offset = 8;
        sweep.window_fraction =
            paper_scale ? 1000.0 / static_cast<double>(sweep.base.t_max) : 0.10;
        const TransitionReport report = run_k_scan(sweep);
        std::ofstream f(out.file("fig3_scan.csv"));
        f << "k";
        for (int nq : report.nq_values) f << ",xi_nq" << nq;
        f << ",xi0\n";
        for (std::size_t ki = 0; ki < report.k_values.size(); ++ki) {
            f << format_double(report.k_values[ki]);
            for (std::size_t qi = 0; qi < report.nq_values.size(); ++qi)
                f << ',' << format_double(report.xi[ki][qi]);
            f << ',' << format_double(report.xi0[ki]) << '\n';
        }
        summary["report"] = transition_report_json(report);
    } else if (name == "fig4") {
        // Trajectories vs random phases: diffusive (m=n_q) and localized /
        // near-critical (m=2) regimes for k=2, 6.
        json verdicts = json::object();
        int run_index = 0;
        for (const bool panel_b : {false, true}) {
            for (const double k : {2.0, 6.0}) {
                EnsembleConfig c = figure_base(mix_seed(seed, 100 + run_index++), workers);
                c.params.k = k;
                c.t_max = paper_scale ? (panel_b ? 10000000 : 1000000) : 20000;
                c.spec = MeasurementSpec{panel_b ? 2 : c.params.n_q,
                                         MeasurementBackend::Trajectories};
                const std::string label = std::string(panel_b ? "fig4b" : "fig4a") + "_k" +
                                          std::to_string(static_cast<int>(k)) + "_";
                const MethodComparison cmp = run_method_comparison(c);
                write_comparison_outputs(out, label, cmp);
                verdicts[label + "agree_fraction"] = cmp.agree_fraction;
                if (panel_b && k == 6.0) {
                    const auto fit = fit_power_law(cmp.trajectories.times,
                                                   cmp.trajectories.n2_mean, 1000, c.t_max);
                    verdicts["fig4b_k6_n2_exponent"] = fit.exponent;
                }
            }
        }
        summary["verdicts"] = verdicts;
    } else {
        throw ConfigError("unknown figure '" + name + "' (expected fig1 | fig2 | fig3 | fig4)");
    }

    write_json_file(summary, out.file("metadata.json"));
    out.write_manifest();
    std::cout << "wrote " << out.dir().string() << '\n';
    return 0;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "out of range: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum kicked rotator with repeated single-qubit projective measurements"};
    app.require_subcommand(1);

    RunOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "evolve one ensemble and write observable series");
    run_opts.add_flags(run);

    RunOptions resume_opts;
    std::string resume_ckpt;
    CLI::App* resume = app.add_subcommand("resume", "continue a checkpointed run to completion");
    resume->add_option("--ckpt", resume_ckpt, "checkpoint file")->required();
    resume_opts.add_flags(resume);

    RunOptions scan_opts;
    std::vector<double> scan_ks{2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> scan_nqs{9, 10, 11};
    int scan_m_offset = 8;
    double scan_window = 0.10, scan_spread = 0.30;
    CLI::App* scan = app.add_subcommand("scan-k", "k scan of the time-averaged IPR at fixed n_q - m");
    scan_opts.add_flags(scan);
    scan->add_option("--ks", scan_ks, "kick strengths to scan");
    scan->add_option("--nqs", scan_nqs, "qubit counts to scan");
    scan->add_option("--m-offset", scan_m_offset, "measure qubit m = n_q - offset");
    scan->add_option("--window-fraction", scan_window, "tail fraction averaged for <xi>");
    scan->add_option("--spread-threshold", scan_spread, "relative spread across n_q marking k_c");

    RunOptions cmp_opts;
    CLI::App* cmp = app.add_subcommand("compare-methods",
                                       "trajectories vs random-phase consistency check");
    cmp_opts.add_flags(cmp, /*with_backend=*/false);

    int vo_nq = 4, vo_m = 4, vo_M = 100000, vo_workers = 0;
    double vo_k = 2.0, vo_T = 2.0;
    std::uint64_t vo_t = 50, vo_seed = 1;
    std::string vo_out = "out";
    CLI::App* verify = app.add_subcommand(
        "verify-oracle", "exact density-matrix evolution vs trajectory ensemble");
    verify->add_option("--nq", vo_nq, "number of qubits (<= 8)");
    verify->add_option("--k", vo_k, "kick strength");
    verify->add_option("--T", vo_T, "rotation parameter");
    verify->add_option("--m", vo_m, "measured qubit");
    verify->add_option("--t", vo_t, "iterations to verify");
    verify->add_option("--M", vo_M, "trajectory count");
    verify->add_option("--seed", vo_seed, "master seed");
    verify->add_option("--out", vo_out, "output directory");
    verify->add_option("--workers", vo_workers, "worker threads");

    std::string fig_name;
    bool fig_paper = false;
    std::uint64_t fig_seed = 1;
    std::string fig_out = "out";
    int fig_workers = 0;
    CLI::App* fig = app.add_subcommand("reproduce-figure", "run a figure preset");
    fig->add_option("name", fig_name, "fig1 | fig2 | fig3 | fig4")->required();
    fig->add_flag("--paper-scale", fig_paper, "paper-scale times and sizes (hours of runtime)");
    fig->add_option("--seed", fig_seed, "master seed");
    fig->add_option("--out", fig_out, "output directory");
    fig->add_option("--workers", fig_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return guarded([&] { return cmd_run(run_opts); });
    if (resume->parsed()) {
        const bool have_expected =
            !resume_opts.config_path.empty() || resume_opts.n_q || resume_opts.k || resume_opts.T ||
            resume_opts.m || resume_opts.backend || resume_opts.evolution || resume_opts.M ||
            resume_opts.t_max || resume_opts.seed || resume_opts.schedule;
        return guarded([&] { return cmd_resume(resume_ckpt, resume_opts, have_expected); });
    }
    if (scan->parsed())
        return guarded([&] {
            return cmd_scan_k(scan_opts, scan_ks, scan_nqs, scan_m_offset, scan_window, scan_spread);
        });
    if (cmp->parsed()) {
        if (!cmp_opts.backend) cmp_opts.backend = "trajectories";
        return guarded([&] { return cmd_compare_methods(cmp_opts); });
    }
    if (verify->parsed())
        return guarded([&] {
            if (vo_workers == 0) vo_workers = workers_from_env();
            return cmd_verify_oracle(vo_nq, vo_k, vo_T, vo_m, vo_t, vo_M, vo_seed, vo_out,
                                     vo_workers);
        });
    if (fig->parsed())
        return guarded([&] {
            if (fig_workers == 0) fig_workers = workers_from_env();
            return cmd_reproduce_figure(fig_name, fig_paper, fig_seed, fig_out, fig_workers);
        });
    return 2;
}
