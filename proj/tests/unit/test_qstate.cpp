#include <doctest.h>

#include <cmath>
#include <sstream>

#include "krsim/errors.hpp"
#include "krsim/observables.hpp"
#include "krsim/qstate.hpp"
#include "oracles.hpp"

using namespace krsim;

TEST_CASE("index <-> momentum mapping") {
    CHECK(index_to_momentum(0, 4) == -8);
    CHECK(index_to_momentum(8, 4) == 0);
    CHECK(index_to_momentum(15, 4) == 7);
    CHECK_THROWS_AS(index_to_momentum(16, 4), std::out_of_range);
    CHECK_THROWS_AS(momentum_to_index(8, 4), std::out_of_range);
    CHECK_THROWS_AS(momentum_to_index(-9, 4), std::out_of_range);

    for (int n_q : {2, 4, 6, 10}) {
        for (std::size_t j = 0; j < dim_of(n_q); ++j)
            CHECK(momentum_to_index(index_to_momentum(j, n_q), n_q) == j);
    }
}

TEST_CASE("qubit_bit uses a_1 = most significant") {
    CHECK(qubit_bit(5, 4, 4) == 1);  // 0101, least significant
    CHECK(qubit_bit(5, 1, 4) == 0);  // most significant
    CHECK(qubit_bit(8, 1, 4) == 1);  // 1000
    CHECK_THROWS_AS(qubit_bit(5, 0, 4), std::out_of_range);
    CHECK_THROWS_AS(qubit_bit(5, 5, 4), std::out_of_range);

    // Bits reassemble the index.
    for (int n_q : {3, 5, 8}) {
        for (std::size_t j = 0; j < dim_of(n_q); ++j) {
            std::size_t rebuilt = 0;
            for (int m = 1; m <= n_q; ++m)
                rebuilt += static_cast<std::size_t>(qubit_bit(j, m, n_q)) << (n_q - m);
            CHECK(rebuilt == j);
        }
    }
}

TEST_CASE("initial_state places the momentum eigenstate") {
    const QuantumState s = initial_state(4, 0);
    CHECK(s.amps[8] == Complex{1.0, 0.0});
    CHECK(norm_squared(s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.rep == Representation::Momentum);

    const QuantumState edge = initial_state(4, -8);
    CHECK(edge.amps[0] == Complex{1.0, 0.0});
    CHECK_THROWS_AS(initial_state(4, 8), std::out_of_range);
    CHECK_THROWS_AS(initial_state(4, -9), std::out_of_range);

    // Delta distribution: <n^2> = n0^2, xi = 1.
    const QuantumState at5 = initial_state(4, 5);
    ProbabilityDistribution dist;
    dist.n_q = 4;
    dist.p.resize(at5.amps.size());
    for (std::size_t j = 0; j < at5.amps.size(); ++j) dist.p[j] = std::norm(at5.amps[j]);
    CHECK(second_moment(dist) == doctest::Approx(25.0));
    CHECK(ipr(dist) == doctest::Approx(1.0));
}

TEST_CASE("renormalize") {
    QuantumState s = oracles::random_state(5, 11);
    ProjectedState unit{s.amps, 1.0, s.rep, s.n_q};
    const QuantumState same = renormalize(unit);
    CHECK(oracles::max_abs_diff(same, s) == 0.0);

    ProjectedState scaled;
    scaled.n_q = s.n_q;
    scaled.rep = s.rep;
    scaled.amps = s.amps;
    for (Complex& a : scaled.amps) a *= 0.5;
    scaled.weight = 0.25;
    const QuantumState restored = renormalize(std::move(scaled));
    CHECK(oracles::max_abs_diff(restored, s) < 1e-15);
    CHECK(norm_squared(restored) == doctest::Approx(1.0).epsilon(1e-12));

    ProjectedState empty;
    empty.n_q = s.n_q;
    empty.amps.assign(s.amps.size(), Complex{0.0, 0.0});
    empty.weight = 0.0;
    CHECK_THROWS_AS(renormalize(std::move(empty)), DegenerateBranchError);
}

TEST_CASE("state snapshot round trip") {
    const QuantumState s = oracles::random_state(6, 42);
    std::stringstream buf;
    save_state(s, buf);
    const QuantumState loaded = load_state(buf);
    CHECK(loaded.n_q == s.n_q);
    CHECK(loaded.rep == s.rep);
    CHECK(oracles::max_abs_diff(loaded, s) == 0.0);

    std::stringstream corrupt;
    corrupt << "XXXXgarbage-that-is-not-a-snapshot";
    CHECK_THROWS_WITH_AS(load_state(corrupt), "not a KLST state snapshot", std::runtime_error);

    std::stringstream truncated(buf.str().substr(0, 24));
    CHECK_THROWS_AS(load_state(truncated), std::runtime_error);
}

TEST_CASE("MapParams validation and derived quantities") {
    MapParams p{2.0, 2.0, 10};
    p.validate();
    CHECK(p.dim() == 1024);
    CHECK(p.chaos_parameter() == doctest::Approx(4.0));
    CHECK(p.localization_length() == doctest::Approx(2.0));

    CHECK_THROWS_AS((MapParams{2.0, 2.0, 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((MapParams{2.0, 2.0, 25}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((MapParams{-1.0, 2.0, 8}.validate()), std::invalid_argument);
}
