#include "core/chain.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace spinsense;

namespace {

// Independent operator construction by explicit Kronecker products, used as
// the oracle for the bit-level Hamiltonian assembly.
Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Operator single_site(PauliAxis axis) {
    Operator m(2, 2);
    // index order (|down>, |up>)
    switch (axis) {
    case PauliAxis::X:
        m << 0, 1, 1, 0;
        break;
    case PauliAxis::Y:
        m << 0, Complex(0, 1), Complex(0, -1), 0;
        break;
    case PauliAxis::Z:
        m << -1, 0, 0, 1;
        break;
    }
    return m;
}

Operator kron_pauli_at(int site, PauliAxis axis, int sites) {
    Operator out = Operator::Identity(1, 1);
    for (int j = 1; j <= sites; ++j)
        out = kron(out, j == site ? single_site(axis) : Operator::Identity(2, 2));
    return out;
}

Operator kron_hamiltonian(const ChainSpec& spec) {
    const Eigen::Index dim = spec.dimension();
    Operator h = Operator::Zero(dim, dim);
    for (int j = 1; j < spec.sites; ++j)
        for (PauliAxis axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z})
            h += spec.coupling * kron_pauli_at(j, axis, spec.sites) *
                 kron_pauli_at(j + 1, axis, spec.sites);
    h += spec.field * kron_pauli_at(1, PauliAxis::X, spec.sites);
    return h;
}

} // namespace

TEST_CASE("pauli_at single-site z is diag(-1 on down, +1 on up)") {
    const Operator z = pauli_at(1, PauliAxis::Z, 1);
    CHECK(z(0, 0).real() == doctest::Approx(-1.0));  // |down> = index 0
    CHECK(z(1, 1).real() == doctest::Approx(1.0));
    CHECK(std::abs(z(0, 1)) == 0.0);
}

TEST_CASE("pauli_at x on site 1 flips |down,down> to |up,down>") {
    const Operator x1 = pauli_at(1, PauliAxis::X, 2);
    StateVector dd = ferromagnetic_state(2);
    StateVector flipped = x1 * dd;
    // site 1 is the most significant bit: |up,down> = index 2
    CHECK(std::abs(flipped(2) - Complex(1, 0)) < 1e-15);
    CHECK(flipped.norm() == doctest::Approx(1.0));
}

TEST_CASE("pauli operators square to identity and are Hermitian") {
    for (int sites : {1, 2, 3}) {
        for (int site = 1; site <= sites; ++site) {
            for (PauliAxis axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
                const Operator p = pauli_at(site, axis, sites);
                const Eigen::Index dim = Eigen::Index(1) << sites;
                CHECK((p * p - Operator::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-14);
                CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
            }
        }
    }
}

TEST_CASE("pauli_at rejects out-of-range sites") {
    CHECK_THROWS_AS(pauli_at(0, PauliAxis::X, 2), std::invalid_argument);
    CHECK_THROWS_AS(pauli_at(3, PauliAxis::X, 2), std::invalid_argument);
}

TEST_CASE("single-site Hamiltonian is B sigma_x") {
    const Operator h = build_hamiltonian({1, 1.0, 0.5});
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-site Heisenberg spectrum is the singlet-triplet split {-3, 1, 1, 1}") {
    const Operator h = build_hamiltonian({2, 1.0, 0.0});
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-3.0).epsilon(1e-12));
    for (int k = 1; k < 4; ++k)
        CHECK(es.eigenvalues()(k) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Hamiltonian matches the Kronecker-product oracle") {
    for (const ChainSpec spec : {ChainSpec{3, 1.0, 0.1}, ChainSpec{4, 0.7, -0.15}}) {
        const Operator fast = build_hamiltonian(spec);
        const Operator oracle = kron_hamiltonian(spec);
        CHECK((fast - oracle).cwiseAbs().maxCoeff() < 1e-12);

        Eigen::SelfAdjointEigenSolver<Operator> a(fast);
        Eigen::SelfAdjointEigenSolver<Operator> b(oracle);
        CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Hamiltonian is Hermitian and traceless") {
    for (int sites : {1, 2, 3, 5}) {
        const Operator h = build_hamiltonian({sites, 1.0, 0.13});
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(h.trace()) < 1e-12);
    }
}

TEST_CASE("Hamiltonian commutes with the global spin flip") {
    for (int sites : {2, 3, 4, 5}) {
        const ChainSpec spec{sites, 1.0, 0.2};
        const Operator h = build_hamiltonian(spec);
        Operator flip = Operator::Identity(spec.dimension(), spec.dimension());
        for (int j = 1; j <= sites; ++j)
            flip = Operator(flip * pauli_at(j, PauliAxis::X, sites));
        CHECK((h * flip - flip * h).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("magnetization of product and superposition states") {
    SUBCASE("ferromagnetic state is -1 everywhere") {
        const StateVector fm = ferromagnetic_state(3);
        for (int site = 1; site <= 3; ++site)
            CHECK(magnetization(fm, site) == doctest::Approx(-1.0).epsilon(1e-14));
    }
    SUBCASE("|up,down>: site 1 is +1") {
        StateVector psi = StateVector::Zero(4);
        psi(2) = 1.0;  // |up,down>
        CHECK(magnetization(psi, 1) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(magnetization(psi, 2) == doctest::Approx(-1.0).epsilon(1e-14));
    }
    SUBCASE("(|dd> + |ud>)/sqrt(2): site 1 is 0") {
        StateVector psi = StateVector::Zero(4);
        psi(0) = 1.0 / std::sqrt(2.0);
        psi(2) = 1.0 / std::sqrt(2.0);
        CHECK(magnetization(psi, 1) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("projector expectations sum to 1") {
        StateVector psi = StateVector::Random(8);
        psi.normalize();
        for (int site = 1; site <= 3; ++site) {
            const double p_up = up_probability(psi, site);
            const double m = magnetization(psi, site);
            const double p_down = p_up - m;  // m = p_up - p_down
            CHECK(p_up + p_down == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m == doctest::Approx(2.0 * p_up - 1.0).epsilon(1e-12));
        }
    }
    SUBCASE("site out of range") {
        CHECK_THROWS_AS(magnetization(ferromagnetic_state(2), 3), std::invalid_argument);
    }
}

TEST_CASE("ChainSpec validation") {
    CHECK_THROWS_AS((ChainSpec{0, 1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainSpec{13, 1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainSpec{3, 0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainSpec{3, -1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ChainSpec{12, 1.0, 0.2}.validate()));
}
