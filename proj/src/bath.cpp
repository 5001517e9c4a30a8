#include "spinflux/bath.hpp"

#include <cmath>
#include <stdexcept>

namespace spinflux {

void BathSpec::validate() const {
    if (!std::isfinite(beta) || beta <= 0.0)
        throw std::invalid_argument("bath inverse temperature must be finite and > 0");
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("bath coupling kappa must be finite and >= 0");
}

double planck(double omega, double beta) {
    const double x = beta * omega;
    if (x == 0.0) throw std::domain_error("planck: pole at beta*omega = 0");
    return 1.0 / std::expm1(x);
}

double spectral_density(double omega, SpectralKind kind) {
    switch (kind) {
    case SpectralKind::ohmic:
        return omega > 0.0 ? omega : 0.0;
    }
    throw std::invalid_argument("unknown spectral density");
}

double rate(double omega, const BathSpec& bath) {
    bath.validate();
    if (omega == 0.0) return 0.5 * bath.kappa / bath.beta;
    const double odd = spectral_density(omega, bath.kind) - spectral_density(-omega, bath.kind);
    return 0.5 * bath.kappa * odd * planck(omega, bath.beta);
}

} // namespace spinflux
