// bath.hpp: Thermal oscillator baths: Planck factor, Ohmic spectral density and
// the frequency-domain rate Gamma(omega, beta)

#pragma once

#include "spinflux/chain.hpp"

namespace spinflux {

enum class SpectralKind { ohmic };

struct BathSpec {
    double beta = 1.0;  // inverse temperature, > 0
    double kappa = 0.01; // coupling scale, >= 0
    Side side = Side::left;
    SpectralKind kind = SpectralKind::ohmic;

    void validate() const;
};

// 1/(exp(beta*omega) - 1). Negative for omega < 0. Throws std::domain_error when
// beta*omega == 0.
double planck(double omega, double beta);

// Theta(omega) * omega with Theta(0) = 0.
double spectral_density(double omega, SpectralKind kind = SpectralKind::ohmic);

// Gamma(omega, beta) = (kappa/2) [J(omega) - J(-omega)] N(omega, beta), with the
// omega -> 0 limit kappa/(2 beta). Positive rate of the bath absorbing energy
// -omega from the system; detailed balance Gamma(w) = exp(-beta w) Gamma(-w).
double rate(double omega, const BathSpec& bath);

} // namespace spinflux
