#include "core/dynamics.hpp"

#include "core/chain.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

using namespace spinsense;

TEST_CASE("diagonalize reproduces the two-level and singlet-triplet spectra") {
    const auto d1 = diagonalize(build_hamiltonian({1, 1.0, 0.5}));
    CHECK(d1.eigenvalues()(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(d1.eigenvalues()(1) == doctest::Approx(0.5).epsilon(1e-12));

    const auto d2 = diagonalize(build_hamiltonian({2, 1.0, 0.0}));
    CHECK(d2.eigenvalues()(0) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(d2.eigenvalues()(3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decomposition reconstructs random Hermitian matrices") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Operator a(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                a(i, j) = Complex(normal(gen), normal(gen));
        const Operator h = 0.5 * (a + a.adjoint());
        const auto d = diagonalize(h);

        const Operator rebuilt = d.eigenvectors() *
                                 d.eigenvalues().asDiagonal().toDenseMatrix().cast<Complex>() *
                                 d.eigenvectors().adjoint();
        CHECK((rebuilt - h).norm() < 1e-9);
        const Operator gram = d.eigenvectors().adjoint() * d.eigenvectors();
        CHECK((gram - Operator::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
        for (int k = 1; k < 8; ++k)
            CHECK(d.eigenvalues()(k) >= d.eigenvalues()(k - 1));
    }
}

TEST_CASE("evolve at t = 0 is the identity") {
    const auto d = diagonalize(build_hamiltonian({3, 1.0, 0.1}));
    StateVector psi = ferromagnetic_state(3);
    const StateVector out = d.evolve(psi, 0.0);
    CHECK((out - psi).norm() < 1e-12);
}

TEST_CASE("ferromagnetic state is stationary at zero field") {
    const auto d = diagonalize(build_hamiltonian({4, 1.0, 0.0}));
    const StateVector psi0 = ferromagnetic_state(4);
    for (double t : {1.0, 10.0, 100.0}) {
        const StateVector psi_t = d.evolve(psi0, t);
        CHECK(std::abs(std::abs(psi0.dot(psi_t)) - 1.0) < 1e-10);
    }
}

TEST_CASE("two-level Rabi flop: p_up(t) = sin^2(B t)") {
    const double b = 0.3;
    const auto d = diagonalize(build_hamiltonian({1, 1.0, b}));
    const StateVector down = ferromagnetic_state(1);
    for (int k = 0; k < 20; ++k) {
        const double t = 0.7 * k;
        const StateVector psi = d.evolve(down, t);
        const double p_up = std::norm(psi(1));
        CHECK(std::abs(p_up - std::sin(b * t) * std::sin(b * t)) < 1e-10);
    }
}

TEST_CASE("evolution preserves norm, composes, and conserves energy") {
    const Operator h = build_hamiltonian({4, 1.0, 0.12});
    const auto d = diagonalize(h);
    StateVector psi = ferromagnetic_state(4);
    const double e0 = (psi.adjoint() * h * psi)(0).real();
    for (double t : {0.5, 3.0, 17.0, 100.0}) {
        const StateVector psi_t = d.evolve(psi, t);
        CHECK(std::abs(psi_t.norm() - 1.0) < 1e-10);
        CHECK(std::abs((psi_t.adjoint() * h * psi_t)(0).real() - e0) < 1e-9);
    }
    const StateVector two_step = d.evolve(d.evolve(psi, 2.5), 4.0);
    const StateVector one_step = d.evolve(psi, 6.5);
    CHECK((two_step - one_step).norm() < 1e-9);
}

TEST_CASE("magnetization response of the last site lags the driven site") {
    // Free dynamics at N=10, B/J=0.1: the readout site departs from -1
    // only after the perturbation has crossed the chain.
    const int sites = 10;
    const auto d = diagonalize(build_hamiltonian({sites, 1.0, 0.1}));
    const StateVector psi0 = ferromagnetic_state(sites);
    double first_depart_m1 = -1.0;
    double first_depart_mn = -1.0;
    for (double t = 0.0; t <= 40.0; t += 0.25) {
        const StateVector psi = d.evolve(psi0, t);
        if (first_depart_m1 < 0.0 && magnetization(psi, 1) > -0.95)
            first_depart_m1 = t;
        if (first_depart_mn < 0.0 && magnetization(psi, sites) > -0.95)
            first_depart_mn = t;
        if (first_depart_m1 >= 0.0 && first_depart_mn >= 0.0)
            break;
    }
    REQUIRE(first_depart_m1 >= 0.0);
    REQUIRE(first_depart_mn >= 0.0);
    CHECK(first_depart_mn > first_depart_m1);
}

TEST_CASE("evolve rejects dimension mismatch and negative times") {
    const auto d = diagonalize(build_hamiltonian({2, 1.0, 0.1}));
    CHECK_THROWS_AS(d.evolve(ferromagnetic_state(3), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(d.evolve(ferromagnetic_state(2), -1.0), std::invalid_argument);
}

TEST_CASE("ChainModel caches one decomposition per field value") {
    const ChainModel model(3, 1.0);
    const auto a = model.decomposition(0.1);
    const auto b = model.decomposition(0.1);
    const auto c = model.decomposition(0.2);
    CHECK(a.get() == b.get());
    CHECK(a.get() != c.get());
    CHECK(model.cached_decompositions() == 2);
}
