// mcwf.hpp: Quantum-jump (Monte Carlo wave function) unraveling of Lindblad
// generators with reproducible, thread-count independent ensembles

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinflux/dissipators.hpp"
#include "spinflux/operator.hpp"

namespace spinflux {

// H - (i/2) sum_k rate_k L_k^dag L_k
Operator effective_hamiltonian(const Operator& h, const LindbladTerms& terms);

// Seed of trajectory `index`: splitmix64 finalizer applied to
// master + (index + 1) * 0x9E3779B97F4A7C15.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

struct JumpEvent {
    double time;
    int channel;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<JumpEvent> jumps;
    std::vector<Eigen::VectorXcd> states; // unit norm, one per grid time
};

// Waiting-time jump algorithm. After each jump a threshold r ~ U(0,1) is drawn;
// the unnormalized state evolves under H_eff until |psi|^2 = r, located by root
// finding on the exact non-unitary propagator (the norm is monotone in time).
// The channel is then drawn with probability proportional to rate_k |L_k psi|^2.
class TrajectoryEngine {
public:
    using Rng = std::mt19937_64;
    // Called at each grid index with the normalized state.
    using Sink = std::function<void(std::size_t, const Eigen::VectorXcd&)>;

    TrajectoryEngine(const Operator& h_eff, const LindbladTerms& terms);

    Index dim() const { return dim_; }
    bool uses_eigenbasis() const { return eigenbasis_; }

    // grid must be non-decreasing; the state at grid[0] is psi0. Returns the jump record.
    std::vector<JumpEvent> run(const Eigen::VectorXcd& psi0, std::span<const double> grid, Rng& rng,
                               const Sink& sink) const;

private:
    struct Segment;
    Eigen::VectorXcd evolve(const Segment& seg, double s) const;

    Index dim_ = 0;
    Eigen::MatrixXcd h_eff_;
    std::vector<double> rates_;
    std::vector<Eigen::MatrixXcd> jumps_;
    bool eigenbasis_ = false;
    Eigen::VectorXcd lambda_;
    Eigen::MatrixXcd v_;
    Eigen::MatrixXcd v_inv_;
};

// Uniform double in (0, 1) from one 64-bit draw.
double uniform_open(TrajectoryEngine::Rng& rng);

// Throws std::invalid_argument if the norm of psi0 differs from 1 by more than 1e-10.
Trajectory evolve_trajectory(const Operator& h_eff, const LindbladTerms& terms,
                             const Eigen::VectorXcd& psi0, std::span<const double> grid,
                             std::uint64_t seed);

struct NamedObservable {
    std::string name;
    Operator op;
};

struct EnsembleOptions {
    std::size_t realizations = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 1; // 0 picks std::thread::hardware_concurrency()
};

struct TrajectoryEnsembleResult {
    std::size_t realizations = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> means;      // [observable][time]
    std::vector<std::vector<double>> std_errors; // sample std / sqrt(R)
    std::string provenance;
};

// Mixed rho0 is unraveled by drawing an eigenvector of rho0 with probability
// equal to its eigenvalue (first draw of each trajectory's stream). Trajectories
// run in fixed chunks reduced in index order, so results do not depend on the
// thread count.
TrajectoryEnsembleResult run_ensemble(const LindbladTerms& terms, const Operator& rho0,
                                      std::span<const double> grid,
                                      std::span<const NamedObservable> observables,
                                      const EnsembleOptions& options);

TrajectoryEnsembleResult run_ensemble(const LindbladTerms& terms, const Eigen::VectorXcd& psi0,
                                      std::span<const double> grid,
                                      std::span<const NamedObservable> observables,
                                      const EnsembleOptions& options);

} // namespace spinflux
