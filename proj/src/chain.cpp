#include "spinflux/chain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "spinflux/diagnostics.hpp"

namespace spinflux {

void ChainSpec::validate() const {
    if (sites < 2) throw std::invalid_argument("chain needs at least 2 sites");
    if (sites > kMaxOperatorSites)
        throw std::invalid_argument("chain of " + std::to_string(sites) +
                                    " sites exceeds the dense operator cap of " +
                                    std::to_string(kMaxOperatorSites));
    if (!std::isfinite(field) || field <= 0.0)
        throw std::invalid_argument("field strength Omega must be finite and > 0");
    if (!std::isfinite(coupling) || coupling < 0.0)
        throw std::invalid_argument("internal coupling lambda must be finite and >= 0");
}

bool check_weak_coupling_regime(const ChainSpec& spec) {
    const double ratio = spec.coupling / spec.field;
    if (ratio <= kWeakCouplingRatio) return true;
    std::ostringstream msg;
    msg << "lambda/Omega = " << ratio << " exceeds " << kWeakCouplingRatio
        << "; the weak-internal-coupling generator assumes lambda << Omega";
    emit_diagnostic(msg.str());
    return false;
}

Operator build_local_hamiltonian_site(const ChainSpec& spec, int site) {
    spec.validate();
    if (site < 1 || site > spec.sites)
        throw DimensionError("site " + std::to_string(site) + " out of range");
    return embed(pauli(Pauli::z), site, spec.sites) * (0.5 * spec.field);
}

Operator build_local_hamiltonian(const ChainSpec& spec) {
    Operator h = Operator::zero(spec.dim());
    for (int mu = 1; mu <= spec.sites; ++mu) h = h + build_local_hamiltonian_site(spec, mu);
    return h;
}

Operator build_bond(const ChainSpec& spec, int bond) {
    spec.validate();
    if (bond < 1 || bond > spec.sites - 1)
        throw DimensionError("bond " + std::to_string(bond) + " out of range");
    const Operator dot = tensor(pauli(Pauli::x), pauli(Pauli::x)) +
                         tensor(pauli(Pauli::y), pauli(Pauli::y)) +
                         tensor(pauli(Pauli::z), pauli(Pauli::z));
    return embed(dot, bond, spec.sites) * spec.coupling;
}

Operator build_interaction(const ChainSpec& spec) {
    spec.validate();
    Operator v = Operator::zero(spec.dim());
    for (int mu = 1; mu < spec.sites; ++mu) v = v + build_bond(spec, mu);
    return v;
}

Operator build_hamiltonian(const ChainSpec& spec) {
    return build_local_hamiltonian(spec) + build_interaction(spec);
}

Operator build_current_operator(const ChainSpec& spec, int bond) {
    const Operator v = build_bond(spec, bond);
    const Operator h = build_local_hamiltonian_site(spec, bond);
    return Operator::hermitian_part((commutator(v, h) * cplx(0.0, 1.0)).matrix());
}

Operator build_coupling_operator(const ChainSpec& spec, Side side) {
    spec.validate();
    return embed(pauli(Pauli::x), attachment_site(spec, side), spec.sites);
}

} // namespace spinflux
