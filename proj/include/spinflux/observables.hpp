// observables.hpp: Bond currents, local energies, diagonality and trace distance

#pragma once

#include <string>
#include <vector>

#include "spinflux/chain.hpp"
#include "spinflux/dissipators.hpp"
#include "spinflux/operator.hpp"

namespace spinflux {

// Multiplies tr(rho J^(mu,mu+1)) for reporting. With the literal commutator
// definition a hotter left bath yields negative values; flipping once here makes
// a positive reported current mean energy flowing from site mu to mu+1.
inline constexpr double kReportedCurrentSign = -1.0;

// kReportedCurrentSign * J^(mu,mu+1): the observable whose expectation is reported.
Operator reported_current_operator(const ChainSpec& spec, int bond);

// tr(rho O) with the imaginary residue dropped; residues above 1e-10 (relative to
// max|O|) are reported through emit_diagnostic.
double real_expectation(const Operator& rho, const Operator& obs);

// Reported current on each bond, size n-1.
std::vector<double> bond_currents(const Operator& rho, const ChainSpec& spec);
// <H_loc^(mu)> per site, size n.
std::vector<double> local_energies(const Operator& rho, const ChainSpec& spec);

// sum_{m != n} |<m|rho|n>| in the given eigenbasis.
double diagonality_defect(const Operator& rho, const EigenSystem& basis);

// (1/2) sum of singular values of rho - sigma.
double trace_distance(const Operator& rho, const Operator& sigma);

// exp(-beta H) / tr exp(-beta H).
Operator gibbs_state(const Operator& h, double beta);

// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const Operator& rho);

struct TransportReport {
    Variant variant = Variant::weak_coupling;
    std::vector<double> currents;       // per bond, reported sign
    std::vector<double> local_energies; // per site
    double diagonality_defect = 0.0;    // in the H_S eigenbasis
    double positivity_floor = 0.0;      // min eigenvalue of rho
};

TransportReport make_transport_report(const Operator& rho, const ChainSpec& spec, Variant variant);

// (max - min) / max|J| over bonds; 0 when every current is exactly 0.
double bond_spread(const std::vector<double>& currents);

} // namespace spinflux
