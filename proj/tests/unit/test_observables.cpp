#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "krsim/experiment.hpp"
#include "krsim/observables.hpp"
#include "oracles.hpp"

using namespace krsim;

namespace {

ProbabilityDistribution dist_from(std::vector<double> p, int n_q) {
    ProbabilityDistribution d;
    d.p = std::move(p);
    d.n_q = n_q;
    return d;
}

}  // namespace

TEST_CASE("second_moment") {
    std::vector<double> delta(16, 0.0);
    delta[8] = 1.0;  // n = 0
    CHECK(second_moment(dist_from(delta, 4)) == 0.0);

    std::vector<double> peaks(16, 0.0);
    peaks[momentum_to_index(5, 4)] = 0.5;
    peaks[momentum_to_index(-5, 4)] = 0.5;
    CHECK(second_moment(dist_from(peaks, 4)) == doctest::Approx(25.0));

    std::vector<double> uniform(16, 1.0 / 16.0);
    CHECK(second_moment(dist_from(uniform, 4)) == doctest::Approx(344.0 / 16.0));
}

TEST_CASE("ipr") {
    std::vector<double> delta(16, 0.0);
    delta[3] = 1.0;
    CHECK(ipr(dist_from(delta, 4)) == doctest::Approx(1.0));

    std::vector<double> uniform(64, 1.0 / 64.0);
    CHECK(ipr(dist_from(uniform, 6)) == doctest::Approx(64.0));

    std::vector<double> two(16, 0.0);
    two[2] = 0.5;
    two[9] = 0.5;
    CHECK(ipr(dist_from(two, 4)) == doctest::Approx(2.0));
}

TEST_CASE("accumulate_distribution") {
    const QuantumState a = oracles::random_state(5, 1);
    const QuantumState b = oracles::random_state(5, 2);

    const std::vector<QuantumState> one{a};
    const ProbabilityDistribution single = accumulate_distribution(one);
    for (std::size_t j = 0; j < single.p.size(); ++j)
        CHECK(single.p[j] == doctest::Approx(std::norm(a.amps[j])).epsilon(1e-14));

    const std::vector<QuantumState> same{a, a, a};
    const ProbabilityDistribution rep = accumulate_distribution(same);
    for (std::size_t j = 0; j < rep.p.size(); ++j)
        CHECK(rep.p[j] == doctest::Approx(single.p[j]).epsilon(1e-14));

    const std::vector<QuantumState> mixed{a, b};
    double total = 0.0;
    for (double p : accumulate_distribution(mixed).p) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("time_averaged_ipr") {
    ObservableSeries series;
    series.times = {1, 2, 5, 10, 20};
    series.ipr = {4.0, 4.0, 4.0, 4.0, 4.0};
    CHECK(time_averaged_ipr(series, 1, 20) == doctest::Approx(4.0));
    CHECK(time_averaged_ipr(series, 10, 10) == doctest::Approx(4.0));
    CHECK_THROWS_AS(time_averaged_ipr(series, 11, 19), std::domain_error);
}

TEST_CASE("fit_power_law") {
    std::vector<std::uint64_t> t;
    std::vector<double> linear, constant;
    for (int i = 1; i <= 40; ++i) {
        t.push_back(static_cast<std::uint64_t>(i * i));
        linear.push_back(3.0 * i * i);
        constant.push_back(7.5);
    }
    const PowerLawFit f1 = fit_power_law(t, linear, 1, 1600);
    CHECK(f1.exponent == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f1.exponent_stderr < 0.01);

    const PowerLawFit f0 = fit_power_law(t, constant, 1, 1600);
    CHECK(f0.exponent == doctest::Approx(0.0));

    std::vector<double> bad = linear;
    bad[5] = 0.0;
    CHECK_THROWS_AS(fit_power_law(t, bad, 1, 1600), std::domain_error);
    CHECK_THROWS_AS(fit_power_law(t, linear, 1, 9), std::domain_error);  // too few points
}

TEST_CASE("observables stable against the trajectory count M") {
    // <n^2> at a fixed time for M=20 vs M=200 agrees within 4 combined
    // standard errors, per the M-independence of the ensemble averages.
    auto run_with_m = [](int M) {
        EnsembleConfig c;
        c.params = MapParams{2.0, 2.0, 9};
        c.spec = MeasurementSpec{9, MeasurementBackend::Trajectories};
        c.M = M;
        c.t_max = 1000;
        c.master_seed = 1234 + M;
        c.schedule = ScheduleSpec{ScheduleSpec::Kind::Linear, 30.0, 1000};
        return run_ensemble(c).series;
    };
    const ObservableSeries small = run_with_m(20);
    const ObservableSeries large = run_with_m(200);
    const double diff = std::abs(small.n2_mean.back() - large.n2_mean.back());
    const double sigma = std::hypot(small.n2_stderr.back(), large.n2_stderr.back());
    CHECK(diff <= 4.0 * sigma);
}

TEST_CASE("ensemble IPR exceeds the typical single-trajectory IPR when diffusive") {
    EnsembleConfig c;
    c.params = MapParams{2.0, 2.0, 9};
    c.spec = MeasurementSpec{9, MeasurementBackend::Trajectories};
    c.M = 50;
    c.t_max = 10000;
    c.master_seed = 5;
    const ObservableSeries series = run_ensemble(c).series;
    CHECK(series.ipr.back() >= series.traj_ipr_mean.back());
}

TEST_CASE("series CSV formatting is stable") {
    ObservableSeries series;
    series.times = {1, 10};
    series.n2_mean = {1.5, 2.5};
    series.n2_stderr = {0.1, 0.2};
    series.ipr = {1.0, 2.0};
    series.norm_check = {1.0, 1.0};
    series.traj_ipr_mean = {1.0, 2.0};
    const std::string path = "test_series_tmp.csv";
    write_series_csv(series, path);
    write_series_csv(series, path + "2");
    std::ifstream f1(path), f2(path + "2");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().substr(0, 36) == "t,n2_mean,n2_stderr,ipr,norm_check\n1");
    std::remove(path.c_str());
    std::remove((path + "2").c_str());
}
