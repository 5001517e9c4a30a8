// liouville.hpp: Generators as d^2 x d^2 matrices on column-stacked density
// matrices, steady-state null-space solves and exact time propagation

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinflux/diagnostics.hpp"
#include "spinflux/dissipators.hpp"
#include "spinflux/operator.hpp"

namespace spinflux {

// Largest chain assembled densely in Liouville space (4^n x 4^n entries).
inline constexpr int kMaxLiouvilleSites = 7;

// Relative singular-value threshold defining the numerical null space.
inline constexpr double kNullSpaceTolerance = 1e-10;

// vec(rho)[i + d*j] = rho(i, j), so vec(A rho B) = (B^T ⊗ A) vec(rho).
Eigen::VectorXcd vec(const Operator& rho);
Operator unvec(const Eigen::VectorXcd& v);

struct Superoperator {
    Index dim = 0; // Hilbert-space dimension d
    Eigen::MatrixXcd matrix;
    std::optional<GeneratorSpec> provenance;

    Operator apply(const Operator& rho) const { return unvec(matrix * vec(rho)); }
};

// Throws std::length_error (pointing at MCWF) past kMaxLiouvilleSites.
Superoperator assemble(const Generator& gen);

// Eigenvalues of the superoperator matrix.
Eigen::VectorXcd spectrum(const Superoperator& s);

// Null space of dimension != 1.
class DegenerateSteadyState : public SolverError {
public:
    DegenerateSteadyState(int null_dimension);
    int null_dimension() const { return null_dimension_; }

private:
    int null_dimension_;
};

struct SteadyStateReport {
    Operator rho;
    double residual = 0.0;            // max |S vec(rho)|
    int null_dimension = 0;
    double min_eigenvalue = 0.0;
    double hermitian_asymmetry = 0.0; // max |rho - rho^dag| before symmetrization
    // Filled when the superoperator carries a generator provenance.
    std::vector<double> currents;
    std::vector<double> local_energies;
};

// Solves S vec(rho) = 0 with the (0,0) row replaced by tr(rho) = 1, after
// confirming a one-dimensional numerical null space.
SteadyStateReport steady_state(const Superoperator& s, double null_tol = kNullSpaceTolerance);

// rho(t) = exp(S t) rho0. Uses the eigendecomposition of S when its eigenvector
// matrix has condition number below condition_limit, otherwise a scaling-and-
// squaring matrix exponential per time increment.
class Propagator {
public:
    explicit Propagator(const Superoperator& s, double condition_limit = 1e8);

    bool uses_eigenbasis() const { return eigenbasis_; }
    double condition_number() const { return condition_; }
    // Rightmost nonzero real part (slowest decay), 0 if none.
    double slowest_decay_rate() const;

    // times must be non-decreasing and start at or after 0. rho0 must be
    // Hermitian with unit trace (1e-12). Throws SolverError when trace drifts past 1e-10.
    std::vector<Operator> propagate(const Operator& rho0, std::span<const double> times) const;

private:
    Superoperator s_;
    bool eigenbasis_ = false;
    double condition_ = 0.0;
    Eigen::VectorXcd lambda_;
    Eigen::MatrixXcd v_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> v_lu_;
};

std::vector<Operator> propagate(const Superoperator& s, const Operator& rho0,
                                std::span<const double> times);

// tr(rho_k O) for each state.
std::vector<double> expectation_series(std::span<const Operator> states, const Operator& obs);

// Uniform grid t_k = k t_max / steps, k = 0..steps.
std::vector<double> uniform_grid(double t_max, int steps);

} // namespace spinflux
