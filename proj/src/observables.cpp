#include "krsim/observables.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "krsim/errors.hpp"

namespace krsim {

double second_moment(const ProbabilityDistribution& dist) {
    const std::int64_t half = static_cast<std::int64_t>(dist.p.size() / 2);
    double acc = 0.0;
    for (std::size_t j = 0; j < dist.p.size(); ++j) {
        const double n = static_cast<double>(static_cast<std::int64_t>(j) - half);
        acc += n * n * dist.p[j];
    }
    return acc;
}

double ipr(const ProbabilityDistribution& dist) {
    double acc = 0.0;
    for (double p : dist.p) acc += p * p;
    return 1.0 / acc;
}

ProbabilityDistribution accumulate_distribution(std::span<const QuantumState> states) {
    if (states.empty()) throw std::invalid_argument("accumulate_distribution: empty ensemble");
    const int n_q = states.front().n_q;
    ProbabilityDistribution dist;
    dist.n_q = n_q;
    dist.p.assign(states.front().amps.size(), 0.0);
    for (const QuantumState& s : states) {
        if (s.rep != Representation::Momentum)
            throw RepresentationError("accumulate_distribution: states must be in the momentum basis");
        if (s.n_q != n_q) throw std::invalid_argument("accumulate_distribution: mixed qubit counts");
        for (std::size_t j = 0; j < dist.p.size(); ++j) dist.p[j] += std::norm(s.amps[j]);
    }
    const double inv_m = 1.0 / static_cast<double>(states.size());
    for (double& p : dist.p) p *= inv_m;
    return dist;
}

double time_averaged_ipr(const ObservableSeries& series, std::uint64_t t_lo, std::uint64_t t_hi) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] >= t_lo && series.times[i] <= t_hi) {
            acc += series.ipr[i];
            ++count;
        }
    }
    if (count == 0)
        throw std::domain_error("time_averaged_ipr: no recorded samples in [" + std::to_string(t_lo) +
                                ", " + std::to_string(t_hi) + "]");
    return acc / static_cast<double>(count);
}

PowerLawFit fit_power_law(std::span<const std::uint64_t> times, std::span<const double> values,
                          std::uint64_t t_lo, std::uint64_t t_hi) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_power_law: times/values length mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0))
            throw std::domain_error("fit_power_law: nonpositive value at t=" +
                                    std::to_string(times[i]));
        x.push_back(std::log(static_cast<double>(times[i])));
        y.push_back(std::log(values[i]));
    }
    const std::size_t n = x.size();
    if (n < 10)
        throw std::domain_error("fit_power_law: need at least 10 samples in range, have " +
                                std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("fit_power_law: degenerate time range");

    PowerLawFit fit;
    fit.points = static_cast<int>(n);
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + fit.exponent * x[i]);
        ss_res += r * r;
    }
    fit.exponent_stderr = n > 2 ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
    return fit;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_series_csv(const ObservableSeries& series, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "t,n2_mean,n2_stderr,ipr,norm_check\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        f << series.times[i] << ',' << format_double(series.n2_mean[i]) << ','
          << format_double(series.n2_stderr[i]) << ',' << format_double(series.ipr[i]) << ','
          << format_double(series.norm_check[i]) << '\n';
    }
    if (!f) throw std::runtime_error("failed to write " + path);
}

void write_distribution_csv(const ProbabilityDistribution& dist, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "n,p\n";
    const std::int64_t half = static_cast<std::int64_t>(dist.p.size() / 2);
    for (std::size_t j = 0; j < dist.p.size(); ++j)
        f << (static_cast<std::int64_t>(j) - half) << ',' << format_double(dist.p[j]) << '\n';
    if (!f) throw std::runtime_error("failed to write " + path);
}

}  // namespace krsim
