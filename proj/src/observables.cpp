#include "spinflux/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinflux/diagnostics.hpp"

namespace spinflux {

Operator reported_current_operator(const ChainSpec& spec, int bond) {
    return build_current_operator(spec, bond) * kReportedCurrentSign;
}

double real_expectation(const Operator& rho, const Operator& obs) {
    if (rho.dim() != obs.dim()) throw DimensionError("expectation: dimension mismatch");
    // tr(rho O) = sum_ij rho_ij O_ji
    const cplx value = rho.matrix().cwiseProduct(obs.matrix().transpose()).sum();
    const double scale = std::max(1.0, obs.max_abs());
    if (std::abs(value.imag()) > 1e-10 * scale) {
        std::ostringstream msg;
        msg << "dropping imaginary expectation residue " << value.imag();
        emit_diagnostic(msg.str());
    }
    return value.real();
}

std::vector<double> bond_currents(const Operator& rho, const ChainSpec& spec) {
    std::vector<double> out;
    for (int mu = 1; mu < spec.sites; ++mu)
        out.push_back(real_expectation(rho, reported_current_operator(spec, mu)));
    return out;
}

std::vector<double> local_energies(const Operator& rho, const ChainSpec& spec) {
    std::vector<double> out;
    for (int mu = 1; mu <= spec.sites; ++mu)
        out.push_back(real_expectation(rho, build_local_hamiltonian_site(spec, mu)));
    return out;
}

double diagonality_defect(const Operator& rho, const EigenSystem& basis) {
    const Eigen::MatrixXcd& u = basis.eigenvectors;
    if (u.rows() != rho.dim()) throw DimensionError("diagonality_defect: dimension mismatch");
    const Eigen::MatrixXcd r = u.adjoint() * rho.matrix() * u;
    double off = 0.0;
    for (Index j = 0; j < r.cols(); ++j)
        for (Index i = 0; i < r.rows(); ++i)
            if (i != j) off += std::abs(r(i, j));
    return off;
}

double trace_distance(const Operator& rho, const Operator& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("trace_distance: dimension mismatch");
    const Eigen::MatrixXcd diff = rho.matrix() - sigma.matrix();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
    return 0.5 * svd.singularValues().sum();
}

Operator gibbs_state(const Operator& h, double beta) {
    const EigenSystem es = eig_hermitian(h);
    const double e0 = es.eigenvalues.minCoeff();
    Eigen::VectorXd w = (-beta * (es.eigenvalues.array() - e0)).exp();
    w /= w.sum();
    const Eigen::MatrixXcd& u = es.eigenvectors;
    return Operator::hermitian_part(u * w.cast<cplx>().asDiagonal() * u.adjoint());
}

double min_eigenvalue(const Operator& rho) {
    const Operator h = rho.hermitian() ? rho : Operator::hermitian_part(rho.matrix());
    return eig_hermitian(h).eigenvalues(0);
}

TransportReport make_transport_report(const Operator& rho, const ChainSpec& spec, Variant variant) {
    TransportReport r;
    r.variant = variant;
    r.currents = bond_currents(rho, spec);
    r.local_energies = local_energies(rho, spec);
    r.diagonality_defect = diagonality_defect(rho, eig_hermitian(build_hamiltonian(spec)));
    r.positivity_floor = min_eigenvalue(rho);
    return r;
}

double bond_spread(const std::vector<double>& currents) {
    if (currents.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(currents.begin(), currents.end());
    double scale = 0.0;
    for (double c : currents) scale = std::max(scale, std::abs(c));
    return scale == 0.0 ? 0.0 : (*hi - *lo) / scale;
}

} // namespace spinflux
