#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "spinflux/diagnostics.hpp"
#include "spinflux/observables.hpp"
#include "support.hpp"

using namespace spinflux;

TEST_CASE("trace distance of a two-level Gibbs state to the maximally mixed state") {
    const Operator h = pauli(Pauli::z) * 0.5;
    const Operator gibbs = gibbs_state(h, 1.0);
    CHECK(trace_distance(gibbs, Operator::identity(2) * 0.5) ==
          doctest::Approx(0.231058578630004879).epsilon(1e-14));
    CHECK(trace_distance(gibbs, gibbs) == 0.0);
}

TEST_CASE("gibbs state of the local Hamiltonian") {
    const ChainSpec spec{3, 1.0, 0.0};
    const double beta = 0.7;
    const Operator rho = gibbs_state(build_hamiltonian(spec), beta);
    CHECK(std::abs(rho.trace() - 1.0) <= 1e-15);
    for (double e : local_energies(rho, spec)) CHECK(e == doctest::Approx(-0.5 * std::tanh(0.5 * beta)).epsilon(1e-13));
    CHECK(diagonality_defect(rho, eig_hermitian(build_hamiltonian(spec))) <= 1e-15);
}

TEST_CASE("no current flows in a Gibbs state") {
    testing::Gen gen(81);
    for (int trial = 0; trial < 8; ++trial) {
        const ChainSpec spec = gen.chain(2, 5);
        const Operator rho = gibbs_state(build_hamiltonian(spec), gen.uniform(0.1, 3.0));
        for (double j : bond_currents(rho, spec)) CHECK(std::abs(j) <= 1e-15);
    }
}

TEST_CASE("reported current flips the literal sign") {
    const ChainSpec spec{3, 1.0, 0.01};
    CHECK(max_abs_diff(reported_current_operator(spec, 2), build_current_operator(spec, 2) * kReportedCurrentSign) == 0.0);
    CHECK(bond_currents(Operator::identity(8) * 0.125, spec).size() == 2);
    CHECK(local_energies(Operator::identity(8) * 0.125, spec).size() == 3);
}

TEST_CASE("imaginary expectation residues are reported") {
    std::vector<std::string> messages;
    auto previous = set_diagnostic_sink([&](std::string_view m) { messages.emplace_back(m); });
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
    rho(0, 0) = 1.0;
    CHECK(real_expectation(Operator(rho), pauli(Pauli::z)) == 1.0);
    CHECK(messages.empty());
    const Operator skew = pauli(Pauli::z) * cplx(0.0, 1.0);
    CHECK(real_expectation(Operator(rho), skew) == 0.0);
    CHECK(messages.size() == 1);
    set_diagnostic_sink(previous);
}

TEST_CASE("diagonality defect counts off-diagonal weight") {
    const EigenSystem es = eig_hermitian(pauli(Pauli::z));
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    rho(0, 1) = rho(1, 0) = 0.25;
    CHECK(diagonality_defect(Operator(rho), es) == doctest::Approx(0.5));
}

TEST_CASE("bond spread") {
    CHECK(bond_spread({0.0, 0.0}) == 0.0);
    CHECK(bond_spread({1.0, 1.0, 1.0}) == 0.0);
    CHECK(bond_spread({1.0, 0.9}) == doctest::Approx(0.1));
    CHECK(bond_spread({-2.0, -1.0}) == doctest::Approx(0.5));
}

TEST_CASE("minimum eigenvalue and transport report") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = 1.1;
    m(1, 1) = -0.1;
    CHECK(min_eigenvalue(Operator(m)) == doctest::Approx(-0.1));
    const ChainSpec spec{3, 1.0, 0.01};
    const TransportReport r = make_transport_report(Operator::identity(8) * 0.125, spec, Variant::secular);
    CHECK(r.variant == Variant::secular);
    CHECK(r.positivity_floor == doctest::Approx(0.125));
    CHECK(r.diagonality_defect <= 1e-15);
}
