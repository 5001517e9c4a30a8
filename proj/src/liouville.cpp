#include "spinflux/liouville.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinflux/diagnostics.hpp"
#include "spinflux/observables.hpp"

namespace spinflux {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

double trace_residual(const Eigen::VectorXcd& v, Index d) {
    cplx tr = 0.0;
    for (Index i = 0; i < d; ++i) tr += v(i + d * i);
    return std::abs(tr - 1.0);
}

} // namespace

Eigen::VectorXcd vec(const Operator& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.matrix().data(), rho.dim() * rho.dim());
}

Operator unvec(const Eigen::VectorXcd& v) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw DimensionError("unvec: length is not a perfect square");
    return Operator(Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d));
}

Superoperator assemble(const Generator& gen) {
    const int n = gen.spec().chain.sites;
    if (n > kMaxLiouvilleSites)
        throw std::length_error("Liouville-space assembly is capped at " +
                                std::to_string(kMaxLiouvilleSites) + " sites (got " +
                                std::to_string(n) + "); use the mcwf mode instead");
    const Index d = gen.hamiltonian().dim();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd& h = gen.hamiltonian().matrix();

    Superoperator s;
    s.dim = d;
    s.provenance = gen.spec();
    s.matrix = cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));

    if (is_lindblad(gen.variant())) {
        for (const auto& t : gen.lindblad_terms().terms) {
            const Eigen::MatrixXcd& l = t.jump.matrix();
            const Eigen::MatrixXcd ldl = l.adjoint() * l;
            s.matrix += t.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
                                  0.5 * kron(ldl.transpose(), id));
        }
    } else {
        // K rho X - X K rho + X rho K^dag - rho K^dag X
        for (const auto& c : gen.redfield().channels) {
            const Eigen::MatrixXcd& k = c.weighted().matrix();
            const Eigen::MatrixXcd& x = c.coupling().matrix();
            s.matrix += kron(x.transpose(), k) - kron(id, x * k) + kron(k.conjugate(), x) -
                        kron((k.adjoint() * x).transpose(), id);
        }
    }
    return s;
}

Eigen::VectorXcd spectrum(const Superoperator& s) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(s.matrix, false);
    if (solver.info() != Eigen::Success) throw SolverError("superoperator eigensolve failed");
    return solver.eigenvalues();
}

DegenerateSteadyState::DegenerateSteadyState(int null_dimension)
    : SolverError("steady state is not unique: numerical null space has dimension " +
                  std::to_string(null_dimension)),
      null_dimension_(null_dimension) {}

SteadyStateReport steady_state(const Superoperator& s, double null_tol) {
    const Index d = s.dim;
    const Index d2 = d * d;
    if (s.matrix.rows() != d2 || s.matrix.cols() != d2)
        throw DimensionError("steady_state: malformed superoperator");

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(s.matrix);
    const Eigen::VectorXd sv = svd.singularValues();
    const double cutoff = null_tol * sv.maxCoeff();
    int null_dim = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) ++null_dim;
    if (null_dim != 1) throw DegenerateSteadyState(null_dim);

    // The (0,0) row is a combination of the other diagonal rows (trace annihilation).
    Eigen::MatrixXcd a = s.matrix;
    a.row(0).setZero();
    for (Index i = 0; i < d; ++i) a(0, i + d * i) = 1.0;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d2);
    b(0) = 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd x = lu.solve(b);
    for (int refine = 0; refine < 2; ++refine) x += lu.solve((b - a * x).eval());

    const Eigen::Map<const Eigen::MatrixXcd> raw(x.data(), d, d);
    SteadyStateReport r;
    r.null_dimension = null_dim;
    r.hermitian_asymmetry = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
    if (r.hermitian_asymmetry > 1e-10) {
        std::ostringstream msg;
        msg << "steady state asymmetry before Hermitization: " << r.hermitian_asymmetry;
        emit_diagnostic(msg.str());
    }
    Eigen::MatrixXcd herm = 0.5 * (raw + raw.adjoint());
    herm /= herm.trace().real();
    r.rho = Operator::hermitian_part(herm);
    r.residual = (s.matrix * vec(r.rho)).cwiseAbs().maxCoeff();
    r.min_eigenvalue = min_eigenvalue(r.rho);
    if (s.provenance) {
        r.currents = bond_currents(r.rho, s.provenance->chain);
        r.local_energies = local_energies(r.rho, s.provenance->chain);
    }
    return r;
}

Propagator::Propagator(const Superoperator& s, double condition_limit) : s_(s) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(s.matrix, true);
    if (solver.info() == Eigen::Success) {
        lambda_ = solver.eigenvalues();
        v_ = solver.eigenvectors();
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(v_);
        const Eigen::VectorXd sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        condition_ = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
        eigenbasis_ = condition_ < condition_limit;
    }
    if (eigenbasis_) {
        v_lu_.compute(v_);
    } else {
        std::ostringstream msg;
        msg << "superoperator eigenbasis condition number " << condition_
            << " too large; propagating with the matrix exponential";
        emit_diagnostic(msg.str());
    }
}

double Propagator::slowest_decay_rate() const {
    const Eigen::VectorXcd ev = eigenbasis_ ? lambda_ : spectrum(s_);
    const double scale = s_.matrix.cwiseAbs().maxCoeff();
    double slowest = 0.0;
    for (Index i = 0; i < ev.size(); ++i) {
        const double re = ev(i).real();
        if (re < -1e-10 * scale && (slowest == 0.0 || -re < slowest)) slowest = -re;
    }
    return slowest;
}

std::vector<Operator> Propagator::propagate(const Operator& rho0,
                                            std::span<const double> times) const {
    const Index d = s_.dim;
    if (rho0.dim() != d) throw DimensionError("propagate: dimension mismatch");
    if (std::abs(rho0.trace() - 1.0) > 1e-12)
        throw std::invalid_argument("propagate: initial state must have unit trace");
    if ((rho0.matrix() - rho0.matrix().adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("propagate: initial state must be Hermitian");

    const Eigen::VectorXcd v0 = vec(rho0);
    std::vector<Operator> out;
    out.reserve(times.size());
    double prev_t = 0.0;
    Eigen::VectorXcd current = v0;
    Eigen::VectorXcd coeffs;
    if (eigenbasis_) coeffs = v_lu_.solve(v0);
    std::map<double, Eigen::MatrixXcd> step_cache;

    for (double t : times) {
        if (t < prev_t) throw std::invalid_argument("propagate: times must be non-decreasing and >= 0");
        Eigen::VectorXcd v;
        if (t == 0.0) {
            v = v0;
        } else if (eigenbasis_) {
            v = v_ * (coeffs.array() * (lambda_.array() * t).exp()).matrix();
        } else {
            const double dt = t - prev_t;
            if (dt > 0.0) {
                auto it = step_cache.find(dt);
                if (it == step_cache.end())
                    it = step_cache.emplace(dt, (s_.matrix * cplx(dt)).exp().eval()).first;
                current = it->second * current;
            }
            v = current;
        }
        if (trace_residual(v, d) > 1e-10) {
            std::ostringstream msg;
            msg << "propagate: trace drifted by " << trace_residual(v, d) << " at t = " << t;
            throw SolverError(msg.str());
        }
        out.push_back(unvec(v));
        prev_t = t;
    }
    return out;
}

std::vector<Operator> propagate(const Superoperator& s, const Operator& rho0,
                                std::span<const double> times) {
    return Propagator(s).propagate(rho0, times);
}

std::vector<double> expectation_series(std::span<const Operator> states, const Operator& obs) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& rho : states) out.push_back(real_expectation(rho, obs));
    return out;
}

std::vector<double> uniform_grid(double t_max, int steps) {
    if (!(t_max > 0.0) || steps < 1) throw std::invalid_argument("time grid needs t_max > 0 and steps >= 1");
    std::vector<double> t(steps + 1);
    for (int k = 0; k <= steps; ++k) t[k] = t_max * k / steps;
    return t;
}

} // namespace spinflux
