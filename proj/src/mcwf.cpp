#include "spinflux/mcwf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "spinflux/diagnostics.hpp"

namespace spinflux {

namespace {

constexpr double kNormFloor = 1e-14;
constexpr double kEigenbasisConditionLimit = 1e8;
constexpr std::size_t kChunkSize = 64;

// Running mean / M2 (Welford); merged with Chan's formula in a fixed order.
struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.count == 0.0) return;
        const double n = count + o.count;
        const double delta = o.mean - mean;
        mean += delta * o.count / n;
        m2 += o.m2 + delta * delta * count * o.count / n;
        count = n;
    }
};

struct InitialEnsemble {
    std::vector<double> cumulative;
    std::vector<Eigen::VectorXcd> states;

    const Eigen::VectorXcd& draw(TrajectoryEngine::Rng& rng) const {
        if (states.size() == 1) return states.front();
        const double u = uniform_open(rng) * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto k = std::min<std::size_t>(it - cumulative.begin(), states.size() - 1);
        return states[k];
    }
};

InitialEnsemble unravel(const Operator& rho0) {
    if (std::abs(rho0.trace() - 1.0) > 1e-10)
        throw std::invalid_argument("initial density matrix must have unit trace");
    const EigenSystem es = eig_hermitian(Operator::hermitian_part(rho0.matrix()));
    InitialEnsemble ens;
    double acc = 0.0;
    for (Index k = 0; k < es.eigenvalues.size(); ++k) {
        const double p = es.eigenvalues(k);
        if (p <= 1e-14) continue;
        acc += p;
        ens.cumulative.push_back(acc);
        ens.states.push_back(es.eigenvectors.col(k));
    }
    if (ens.states.empty()) throw std::invalid_argument("initial density matrix has no positive weight");
    return ens;
}

TrajectoryEnsembleResult ensemble_impl(const LindbladTerms& terms, const InitialEnsemble& initial,
                                       std::span<const double> grid,
                                       std::span<const NamedObservable> observables,
                                       const EnsembleOptions& options, std::string provenance) {
    if (options.realizations < 1) throw std::invalid_argument("ensemble needs at least one realization");
    const Index d = terms.hamiltonian.dim();
    for (const auto& o : observables)
        if (o.op.dim() != d) throw DimensionError("observable '" + o.name + "' has the wrong dimension");

    const TrajectoryEngine engine(effective_hamiltonian(terms.hamiltonian, terms), terms);
    const std::size_t n_obs = observables.size();
    const std::size_t n_t = grid.size();
    const std::size_t n_chunks = (options.realizations + kChunkSize - 1) / kChunkSize;
    std::vector<std::vector<Moments>> chunk_stats(n_chunks);

    auto run_chunk = [&](std::size_t c) {
        std::vector<Moments> stats(n_obs * n_t);
        const std::size_t first = c * kChunkSize;
        const std::size_t last = std::min(options.realizations, first + kChunkSize);
        for (std::size_t r = first; r < last; ++r) {
            TrajectoryEngine::Rng rng(split_seed(options.master_seed, r));
            const Eigen::VectorXcd psi0 = initial.draw(rng);
            engine.run(psi0, grid, rng, [&](std::size_t k, const Eigen::VectorXcd& psi) {
                for (std::size_t o = 0; o < n_obs; ++o)
                    stats[o * n_t + k].push(psi.dot(observables[o].op.matrix() * psi).real());
            });
        }
        chunk_stats[c] = std::move(stats);
    };

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < n_chunks; c = next++) {
            try {
                run_chunk(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n_chunks;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    TrajectoryEnsembleResult res;
    res.realizations = options.realizations;
    res.master_seed = options.master_seed;
    res.times.assign(grid.begin(), grid.end());
    res.provenance = std::move(provenance);
    const double r_count = static_cast<double>(options.realizations);
    for (std::size_t o = 0; o < n_obs; ++o) {
        res.names.push_back(observables[o].name);
        std::vector<double> mean(n_t), se(n_t);
        for (std::size_t k = 0; k < n_t; ++k) {
            Moments total;
            for (std::size_t c = 0; c < n_chunks; ++c) total.merge(chunk_stats[c][o * n_t + k]);
            mean[k] = total.mean;
            const double var = r_count > 1.0 ? std::max(0.0, total.m2 / (r_count - 1.0)) : 0.0;
            se[k] = std::sqrt(var / r_count);
        }
        res.means.push_back(std::move(mean));
        res.std_errors.push_back(std::move(se));
    }
    return res;
}

} // namespace

Operator effective_hamiltonian(const Operator& h, const LindbladTerms& terms) {
    Eigen::MatrixXcd out = h.matrix();
    for (const auto& t : terms.terms) {
        if (t.jump.dim() != h.dim()) throw DimensionError("effective_hamiltonian: dimension mismatch");
        out -= cplx(0.0, 0.5 * t.rate) * (t.jump.matrix().adjoint() * t.jump.matrix());
    }
    return Operator(std::move(out), terms.terms.empty() && h.hermitian());
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform_open(TrajectoryEngine::Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct TrajectoryEngine::Segment {
    double start;            // absolute time of the last jump (or grid[0])
    Eigen::VectorXcd psi;    // normalized state at `start`
    Eigen::VectorXcd coeffs; // psi in the H_eff eigenbasis
};

TrajectoryEngine::TrajectoryEngine(const Operator& h_eff, const LindbladTerms& terms)
    : dim_(h_eff.dim()), h_eff_(h_eff.matrix()) {
    for (const auto& t : terms.terms) {
        if (t.jump.dim() != dim_) throw DimensionError("TrajectoryEngine: dimension mismatch");
        if (t.rate < 0.0) throw std::invalid_argument("TrajectoryEngine: negative Lindblad rate");
        rates_.push_back(t.rate);
        jumps_.push_back(t.jump.matrix());
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h_eff_, true);
    if (solver.info() == Eigen::Success) {
        lambda_ = solver.eigenvalues();
        v_ = solver.eigenvectors();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v_);
        const Eigen::VectorXd sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        eigenbasis_ = smin > 0.0 && sv(0) / smin < kEigenbasisConditionLimit;
        if (eigenbasis_) v_inv_ = v_.inverse();
    }
}

Eigen::VectorXcd TrajectoryEngine::evolve(const Segment& seg, double s) const {
    if (s == 0.0) return seg.psi;
    if (eigenbasis_)
        return v_ * (seg.coeffs.array() * (lambda_.array() * cplx(0.0, -s)).exp()).matrix();
    return (h_eff_ * cplx(0.0, -s)).exp() * seg.psi;
}

std::vector<JumpEvent> TrajectoryEngine::run(const Eigen::VectorXcd& psi0,
                                             std::span<const double> grid, Rng& rng,
                                             const Sink& sink) const {
    if (psi0.size() != dim_) throw DimensionError("trajectory: initial state has the wrong dimension");
    if (grid.empty()) return {};

    auto start_segment = [&](double t, Eigen::VectorXcd psi) {
        Segment seg{t, std::move(psi), {}};
        if (eigenbasis_) seg.coeffs = v_inv_ * seg.psi;
        return seg;
    };

    std::vector<JumpEvent> jumps;
    Segment seg = start_segment(grid[0], psi0.normalized());
    double threshold = uniform_open(rng);
    double t_now = grid[0];
    sink(0, seg.psi);

    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double target = grid[k];
        if (target < t_now) throw std::invalid_argument("trajectory grid must be non-decreasing");
        for (;;) {
            Eigen::VectorXcd phi = evolve(seg, target - seg.start);
            const double n2 = phi.squaredNorm();
            if (n2 > threshold) {
                if (n2 < kNormFloor) throw SolverError("trajectory norm collapsed below 1e-14");
                sink(k, phi / std::sqrt(n2));
                t_now = target;
                break;
            }

            // Illinois false position on f(s) = |phi(s)|^2 - r, f(lo) > 0 >= f(hi).
            double lo = t_now - seg.start;
            double hi = target - seg.start;
            double f_lo = evolve(seg, lo).squaredNorm() - threshold;
            double f_hi = n2 - threshold;
            int side = 0;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                const double s = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
                const double f = evolve(seg, s).squaredNorm() - threshold;
                if (f > 0.0) {
                    lo = s;
                    f_lo = f;
                    if (side == +1) f_hi *= 0.5;
                    side = +1;
                } else {
                    hi = s;
                    f_hi = f;
                    if (f == 0.0) break;
                    if (side == -1) f_lo *= 0.5;
                    side = -1;
                }
            }
            const double s_jump = hi;
            phi = evolve(seg, s_jump);

            std::vector<double> weights(jumps_.size());
            std::vector<Eigen::VectorXcd> candidates(jumps_.size());
            double total = 0.0;
            for (std::size_t j = 0; j < jumps_.size(); ++j) {
                candidates[j] = jumps_[j] * phi;
                weights[j] = rates_[j] * candidates[j].squaredNorm();
                total += weights[j];
            }
            if (!(total > 0.0)) throw SolverError("trajectory: norm decayed with no active jump channel");
            const double u = uniform_open(rng) * total;
            std::size_t chosen = 0;
            for (double acc = weights[0]; acc < u && chosen + 1 < weights.size();)
                acc += weights[++chosen];

            const double t_jump = seg.start + s_jump;
            if (!jumps.empty() && !(t_jump > jumps.back().time))
                throw SolverError("trajectory: non-increasing jump times");
            jumps.push_back({t_jump, static_cast<int>(chosen)});
            const double cn = candidates[chosen].norm();
            if (cn < kNormFloor) throw SolverError("trajectory: jump produced a null state");
            seg = start_segment(t_jump, candidates[chosen] / cn);
            threshold = uniform_open(rng);
            t_now = t_jump;
        }
    }
    return jumps;
}

Trajectory evolve_trajectory(const Operator& h_eff, const LindbladTerms& terms,
                             const Eigen::VectorXcd& psi0, std::span<const double> grid,
                             std::uint64_t seed) {
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("psi0 must have unit norm");
    const TrajectoryEngine engine(h_eff, terms);
    TrajectoryEngine::Rng rng(seed);
    Trajectory traj;
    traj.seed = seed;
    traj.states.resize(grid.size());
    traj.jumps = engine.run(psi0, grid, rng, [&](std::size_t k, const Eigen::VectorXcd& psi) {
        traj.states[k] = psi;
    });
    return traj;
}

TrajectoryEnsembleResult run_ensemble(const LindbladTerms& terms, const Operator& rho0,
                                      std::span<const double> grid,
                                      std::span<const NamedObservable> observables,
                                      const EnsembleOptions& options) {
    return ensemble_impl(terms, unravel(rho0), grid, observables, options,
                         "initial state: eigen-ensemble of rho0; per-trajectory seed = "
                         "split_seed(master_seed, index)");
}

TrajectoryEnsembleResult run_ensemble(const LindbladTerms& terms, const Eigen::VectorXcd& psi0,
                                      std::span<const double> grid,
                                      std::span<const NamedObservable> observables,
                                      const EnsembleOptions& options) {
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("psi0 must have unit norm");
    InitialEnsemble ens{{1.0}, {psi0}};
    return ensemble_impl(terms, ens, grid, observables, options,
                         "initial state: pure; per-trajectory seed = split_seed(master_seed, index)");
}

} // namespace spinflux
