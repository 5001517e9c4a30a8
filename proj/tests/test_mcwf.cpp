#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "spinflux/diagnostics.hpp"
#include "spinflux/liouville.hpp"
#include "spinflux/mcwf.hpp"
#include "spinflux/observables.hpp"
#include "support.hpp"

using namespace spinflux;

namespace {

// One spin, (Omega/2) sigma_z, with emission and absorption channels.
LindbladTerms two_level(double down, double up) {
    LindbladTerms t{pauli(Pauli::z) * 0.5, {}};
    if (down > 0.0) t.terms.push_back({down, pauli(Pauli::minus), "down"});
    if (up > 0.0) t.terms.push_back({up, pauli(Pauli::plus), "up"});
    return t;
}

Eigen::VectorXcd excited() {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2);
    psi(0) = 1.0;
    return psi;
}

} // namespace

TEST_CASE("split seeds are deterministic and distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 10000; ++r) seen.insert(split_seed(42, r));
    CHECK(seen.size() == 10000);
    CHECK(split_seed(42, 7) == split_seed(42, 7));
    CHECK(split_seed(42, 7) != split_seed(43, 7));
}

TEST_CASE("uniform_open stays inside the open interval") {
    TrajectoryEngine::Rng rng(1);
    for (int k = 0; k < 100000; ++k) {
        const double u = uniform_open(rng);
        CHECK_FALSE((u <= 0.0 || u >= 1.0));
    }
}

TEST_CASE("effective Hamiltonian carries the decay") {
    const LindbladTerms t = two_level(0.3, 0.1);
    const Operator heff = effective_hamiltonian(t.hamiltonian, t);
    const Eigen::MatrixXcd anti = (heff.matrix() - heff.matrix().adjoint()) * cplx(0.0, 0.5);
    // (H - H^dag) i/2 = (1/2) sum rate L^dag L
    CHECK(anti(0, 0).real() == doctest::Approx(0.15));
    CHECK(anti(1, 1).real() == doctest::Approx(0.05));
    CHECK_FALSE(heff.hermitian());
}

TEST_CASE("first jump times of a decaying level are exponential") {
    const double g = 0.2;
    const LindbladTerms t = two_level(g, 0.0);
    const Operator heff = effective_hamiltonian(t.hamiltonian, t);
    const std::vector<double> grid{0.0, 60.0 / g};
    constexpr int count = 10000;
    std::vector<double> scaled;
    for (int r = 0; r < count; ++r) {
        const Trajectory tr = evolve_trajectory(heff, t, excited(), grid, split_seed(5, r));
        REQUIRE(tr.jumps.size() == 1);
        CHECK(tr.jumps[0].channel == 0);
        scaled.push_back(g * tr.jumps[0].time);
    }
    std::sort(scaled.begin(), scaled.end());
    double d = 0.0;
    for (int k = 0; k < count; ++k) {
        const double cdf = 1.0 - std::exp(-scaled[k]);
        d = std::max({d, std::abs(cdf - double(k) / count), std::abs(cdf - double(k + 1) / count)});
    }
    // Kolmogorov-Smirnov at the 1% level
    CHECK(d <= 1.63 / std::sqrt(double(count)));
}

TEST_CASE("ensemble sigma_z relaxes as the closed form") {
    const double down = 0.3, up = 0.1;
    const LindbladTerms t = two_level(down, up);
    const auto grid = uniform_grid(15.0, 30);
    const std::vector<NamedObservable> obs{{"z", pauli(Pauli::z)}};
    const auto res = run_ensemble(t, excited(), grid, obs, {4000, 17, 2});
    const double zinf = (up - down) / (up + down);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double exact = zinf + (1.0 - zinf) * std::exp(-(up + down) * grid[k]);
        CHECK(std::abs(res.means[0][k] - exact) <= 3.0 * res.std_errors[0][k] + 1e-12);
    }
    CHECK(res.means[0][0] == 1.0);
    CHECK(res.std_errors[0][0] == 0.0);
}

TEST_CASE("ensemble output is seed-deterministic and thread-count independent") {
    const Generator g(testing::reference_generator(Variant::weak_coupling));
    const auto grid = uniform_grid(200.0, 20);
    const std::vector<NamedObservable> obs{{"J", reported_current_operator(g.spec().chain, 1)},
                                           {"E1", build_local_hamiltonian_site(g.spec().chain, 1)}};
    const Operator rho0 = Operator::identity(8) * 0.125;
    const auto a = run_ensemble(g.lindblad_terms(), rho0, grid, obs, {300, 99, 1});
    const auto b = run_ensemble(g.lindblad_terms(), rho0, grid, obs, {300, 99, 4});
    const auto c = run_ensemble(g.lindblad_terms(), rho0, grid, obs, {300, 99, 3});
    const auto other = run_ensemble(g.lindblad_terms(), rho0, grid, obs, {300, 100, 1});
    CHECK(a.means == b.means);
    CHECK(a.std_errors == b.std_errors);
    CHECK(a.means == c.means);
    CHECK(a.means != other.means);
    CHECK(a.names == std::vector<std::string>{"J", "E1"});
}

TEST_CASE("single realization") {
    const LindbladTerms t = two_level(0.3, 0.1);
    const std::vector<NamedObservable> obs{{"z", pauli(Pauli::z)}};
    const auto grid = uniform_grid(5.0, 5);
    const auto res = run_ensemble(t, excited(), grid, obs, {1, 3, 1});
    CHECK(res.realizations == 1);
    for (double se : res.std_errors[0]) CHECK(se == 0.0);
    for (double m : res.means[0]) CHECK(std::abs(std::abs(m) - 1.0) <= 1e-12); // pure up or down
}

TEST_CASE("standard error scales as one over root R") {
    const LindbladTerms t = two_level(0.3, 0.1);
    const std::vector<NamedObservable> obs{{"z", pauli(Pauli::z)}};
    const std::vector<double> grid{0.0, 2.0};
    const auto small = run_ensemble(t, excited(), grid, obs, {1000, 8, 2});
    const auto large = run_ensemble(t, excited(), grid, obs, {16000, 8, 2});
    CHECK(small.std_errors[0][1] / large.std_errors[0][1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("ensemble reproduces exact propagation of the chain") {
    const Generator g(testing::reference_generator(Variant::local_diag));
    const auto grid = uniform_grid(300.0, 12);
    const Operator j = reported_current_operator(g.spec().chain, 2);
    const Operator rho0 = gibbs_state(g.hamiltonian(), 2.0);
    const auto exact = expectation_series(propagate(assemble(g), rho0, grid), j);
    const std::vector<NamedObservable> obs{{"J23", j}};
    const auto res = run_ensemble(g.lindblad_terms(), rho0, grid, obs, {3000, 21, 0});
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(res.means[0][k] - exact[k]) <= 4.0 * res.std_errors[0][k] + 1e-12);
}

TEST_CASE("trajectory input checks") {
    const LindbladTerms t = two_level(0.3, 0.1);
    const Operator heff = effective_hamiltonian(t.hamiltonian, t);
    const std::vector<double> grid{0.0, 1.0};
    CHECK_THROWS_AS(evolve_trajectory(heff, t, excited() * 2.0, grid, 1), std::invalid_argument);
    const std::vector<NamedObservable> obs{{"bad", Operator::identity(4)}};
    CHECK_THROWS_AS(run_ensemble(t, excited(), grid, obs, {10, 1, 1}), DimensionError);
    const std::vector<NamedObservable> ok{{"z", pauli(Pauli::z)}};
    CHECK_THROWS(run_ensemble(t, excited(), grid, ok, {0, 1, 1}));
    LindbladTerms negative = t;
    negative.terms[0].rate = -1.0;
    CHECK_THROWS(run_ensemble(negative, excited(), grid, ok, {10, 1, 1}));
}

TEST_CASE("trajectory states are normalized at every grid time") {
    const Generator g(testing::reference_generator(Variant::weak_coupling));
    const auto& t = g.lindblad_terms();
    const Operator heff = effective_hamiltonian(t.hamiltonian, t);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(8);
    psi0(0) = 1.0;
    const auto grid = uniform_grid(500.0, 25);
    const Trajectory tr = evolve_trajectory(heff, t, psi0, grid, 123);
    REQUIRE(tr.states.size() == grid.size());
    for (const auto& psi : tr.states) CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);
    for (std::size_t k = 1; k < tr.jumps.size(); ++k) CHECK(tr.jumps[k - 1].time < tr.jumps[k].time);
    CHECK_FALSE(tr.jumps.empty());
}
