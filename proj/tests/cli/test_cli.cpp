#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "krsim/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_bin() {
    const char* bin = std::getenv("KRSIM_CLI_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "KRSIM_CLI_BIN must point at the krsim binary");
    return bin;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_bin() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE_MESSAGE(f.good(), ("missing file " + p.string()).c_str());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const std::string kTinyRun = "--nq 6 --k 2 --T 2 --m 6 --backend trajectories --M 4 --tmax 200";

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("run --help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run --no-such-flag 1") == 2);
}

TEST_CASE("qubit indices are 1-based on the CLI") {
    TempDir tmp("krsim_cli_m0");
    CHECK(run_cli("run --nq 6 --k 2 --T 2 --m 0 --backend trajectories --M 2 --tmax 10 --out " +
                  (tmp.path / "o").string()) == 2);
    CHECK(run_cli("run --nq 6 --k 2 --T 2 --m 7 --backend trajectories --M 2 --tmax 10 --out " +
                  (tmp.path / "o").string()) == 2);
}

TEST_CASE("run writes series, distributions, metadata and a manifest") {
    TempDir tmp("krsim_cli_run");
    const std::string out = (tmp.path / "o").string();
    REQUIRE(run_cli("run " + kTinyRun + " --seed 7 --out " + out) == 0);

    for (const char* name :
         {"series.csv", "distribution.csv", "trajectory0_distribution.csv", "metadata.json",
          "manifest.json"})
        CHECK(fs::exists(fs::path(out) / name));

    const json meta = json::parse(slurp(fs::path(out) / "metadata.json"));
    CHECK(meta["config"]["n_q"] == 6);
    CHECK(meta["config"]["seed"] == 7);
    CHECK(meta["config"]["backend"] == "trajectories");

    // Manifest hashes match the files on disk.
    const json manifest = json::parse(slurp(fs::path(out) / "manifest.json"));
    for (const auto& entry : manifest["files"]) {
        const fs::path p = fs::path(out) / entry["path"].get<std::string>();
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(krsim::fnv1a64_file(p.string())));
        CHECK(entry["fnv1a64"].get<std::string>() == hash);
    }
}

TEST_CASE("rerunning from echoed metadata reproduces the CSV byte for byte") {
    TempDir tmp("krsim_cli_repro");
    const std::string out1 = (tmp.path / "a").string();
    const std::string out2 = (tmp.path / "b").string();
    REQUIRE(run_cli("run " + kTinyRun + " --seed 11 --out " + out1) == 0);

    const json meta = json::parse(slurp(fs::path(out1) / "metadata.json"));
    const auto& c = meta["config"];
    std::ostringstream flags;
    flags << "run --nq " << c["n_q"] << " --k " << c["k"].get<double>() << " --T "
          << c["T"].get<double>() << " --m " << c["m"] << " --backend "
          << c["backend"].get<std::string>() << " --evolution " << c["evolution"].get<std::string>()
          << " --M " << c["M"] << " --tmax " << c["t_max"] << " --seed " << c["seed"]
          << " --schedule " << c["schedule"].get<std::string>() << " --out " << out2;
    REQUIRE(run_cli(flags.str()) == 0);

    CHECK(slurp(fs::path(out1) / "series.csv") == slurp(fs::path(out2) / "series.csv"));
    CHECK(slurp(fs::path(out1) / "distribution.csv") == slurp(fs::path(out2) / "distribution.csv"));
}

TEST_CASE("config file values are overridden by flags") {
    TempDir tmp("krsim_cli_config");
    const fs::path cfg = tmp.path / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "n_q = 6\nk = 2\nT = 2\nm = 6\nbackend = trajectories\nM = 4\nt_max = 200\n"
          << "seed = 3\noutdir = " << (tmp.path / "from_config").string() << "\n";
    }
    REQUIRE(run_cli("run --config " + cfg.string()) == 0);
    CHECK(fs::exists(tmp.path / "from_config" / "series.csv"));

    const std::string out2 = (tmp.path / "flag_wins").string();
    REQUIRE(run_cli("run --config " + cfg.string() + " --seed 4 --out " + out2) == 0);
    const json meta = json::parse(slurp(fs::path(out2) / "metadata.json"));
    CHECK(meta["config"]["seed"] == 4);
    CHECK(meta["config"]["n_q"] == 6);

    CHECK(run_cli("run --config " + (tmp.path / "absent.cfg").string()) == 2);
}

TEST_CASE("halt and resume through the CLI") {
    TempDir tmp("krsim_cli_resume");
    const std::string full_out = (tmp.path / "full").string();
    const std::string part_out = (tmp.path / "part").string();
    const std::string res_out = (tmp.path / "resumed").string();

    REQUIRE(run_cli("run " + kTinyRun + " --seed 5 --out " + full_out) == 0);
    REQUIRE(run_cli("run " + kTinyRun + " --seed 5 --halt-at 100 --out " + part_out) == 0);
    const std::string ckpt = (fs::path(part_out) / "checkpoint.klck").string();
    REQUIRE(fs::exists(ckpt));

    REQUIRE(run_cli("resume --ckpt " + ckpt + " --out " + res_out) == 0);
    CHECK(slurp(fs::path(res_out) / "series.csv") == slurp(fs::path(full_out) / "series.csv"));

    // Resuming against an altered physics config is refused.
    CHECK(run_cli("resume --ckpt " + ckpt + " " + kTinyRun + " --seed 5 --k 3 --out " +
                  (tmp.path / "x").string()) == 2);
}

TEST_CASE("verify-oracle exit codes") {
    TempDir tmp("krsim_cli_oracle");
    // k=0 keeps everything exactly diagonal: trivial agreement.
    CHECK(run_cli("verify-oracle --nq 3 --k 0 --T 1 --m 3 --t 5 --M 500 --seed 2 --out " +
                  (tmp.path / "a").string()) == 0);
    // Capacity refusal above the oracle scale.
    CHECK(run_cli("verify-oracle --nq 12 --k 2 --T 2 --m 4 --out " + (tmp.path / "b").string()) ==
          2);
}

TEST_CASE("unknown figure name is a usage error") {
    TempDir tmp("krsim_cli_fig");
    CHECK(run_cli("reproduce-figure fig9 --out " + (tmp.path / "f").string()) == 2);
}

TEST_CASE("density-matrix backend through the CLI") {
    TempDir tmp("krsim_cli_density");
    const std::string out = (tmp.path / "o").string();
    REQUIRE(run_cli("run --nq 4 --k 2 --T 2 --m 2 --backend density-matrix --tmax 10 --out " +
                    out) == 0);
    const json meta = json::parse(slurp(fs::path(out) / "metadata.json"));
    CHECK(meta["config"]["M"] == 1);
}
