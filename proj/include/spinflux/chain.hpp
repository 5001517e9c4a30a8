// chain.hpp: Heisenberg spin-1/2 chain in a uniform field: Hamiltonian pieces,
// bath coupling operators and bond energy-current operators

#pragma once

#include "spinflux/operator.hpp"

namespace spinflux {

enum class Side { left, right };

// Units: hbar = k_B = 1.
struct ChainSpec {
    int sites = 3;        // n >= 2
    double field = 1.0;   // Omega > 0
    double coupling = 0.01; // lambda >= 0

    // Throws std::invalid_argument on n < 2, Omega <= 0, lambda < 0, non-finite
    // values, or n beyond kMaxOperatorSites.
    void validate() const;
    Index dim() const { return Index{1} << sites; }
};

// lambda/Omega above which the weak-internal-coupling generator is outside
// its regime of validity.
inline constexpr double kWeakCouplingRatio = 0.1;

// Emits a diagnostic (no error) when lambda/Omega > kWeakCouplingRatio.
// Returns true when inside the regime.
bool check_weak_coupling_regime(const ChainSpec& spec);

// (Omega/2) sigma_z at a single 1-based site.
Operator build_local_hamiltonian_site(const ChainSpec& spec, int site);
// sum over sites of the single-site terms.
Operator build_local_hamiltonian(const ChainSpec& spec);

// lambda sigma^(mu) . sigma^(mu+1) for 1-based bond mu in [1, n-1].
Operator build_bond(const ChainSpec& spec, int bond);
Operator build_interaction(const ChainSpec& spec);

Operator build_hamiltonian(const ChainSpec& spec);

// J^(mu,mu+1) = i [V^(mu,mu+1), H_loc^(mu)], taken literally. Under this sign
// the Heisenberg derivative of H_loc^(1) equals +J^(1,2), so a hot left end gives
// a negative expectation value; observables.hpp applies the reporting sign.
Operator build_current_operator(const ChainSpec& spec, int bond);

// sigma_x on site 1 (left) or site n (right).
Operator build_coupling_operator(const ChainSpec& spec, Side side);

// Site occupied by the bath on the given side.
inline int attachment_site(const ChainSpec& spec, Side side) {
    return side == Side::left ? 1 : spec.sites;
}

} // namespace spinflux
