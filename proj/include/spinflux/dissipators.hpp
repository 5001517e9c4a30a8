// dissipators.hpp: Two-bath master-equation generators for the spin chain:
// Redfield (non-secular), secular Lindblad, weak-internal-coupling Lindblad and
// the diagonal local Lindblad comparison variant

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spinflux/bath.hpp"
#include "spinflux/chain.hpp"
#include "spinflux/operator.hpp"

namespace spinflux {

enum class Variant { redfield, secular, weak_coupling, local_diag };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
// Every variant except redfield produces rates >= 0 with explicit jump operators.
constexpr bool is_lindblad(Variant v) { return v != Variant::redfield; }

// Default Bohr-frequency clustering tolerance, in units of Omega.
inline constexpr double kDefaultClusterTolerance = 1e-9;

// X = sum_w X(w), with X(w) = sum_{e' - e = w} Pi(e) X Pi(e'). X(w) lowers the
// system energy by w, so exp(iHt) X(w) exp(-iHt) = exp(-iwt) X(w).
struct EigenOperatorSet {
    struct Entry {
        double frequency;
        Operator op;
    };
    std::vector<Entry> entries; // ascending frequency
    std::string source;

    Operator sum() const;
    // Entry whose frequency is within tol of w, or nullptr.
    const Entry* find(double w, double tol) const;
};

// cluster_tol is absolute (energy units). Eigenvalues are grouped so that each
// group spans at most cluster_tol; Bohr frequencies are grouped the same way.
// Components with max-entry <= 1e-14 * max|X| are dropped.
EigenOperatorSet bohr_decompose(const Operator& h, const Operator& x, double cluster_tol,
                                std::string source = {});

// Local Kossakowski matrix of one bath in the basis F1 = sigma_+, F2 = sigma_-
// at the attachment site.
struct GammaMatrix {
    Eigen::Matrix2d gamma;
    double frequency = 0.0;
    Side side = Side::left;

    double determinant() const { return gamma.determinant(); }
};

GammaMatrix gamma_matrix(const BathSpec& bath, double omega);

// gamma = positive_part + remainder. positive_part keeps the diagonal and takes
// the off-diagonal sqrt(g11 g22), so it is rank one and positive semidefinite;
// the remainder has zero diagonal.
struct GammaSplit {
    Eigen::Matrix2d positive_part;
    Eigen::Matrix2d remainder;
};

GammaSplit split_gamma(const GammaMatrix& g);

// N + 1/2 - sqrt(N^2 + N): the remainder's off-diagonal in units of pi*kappa*J(Omega).
// Evaluated in the cancellation-free form 1 / (4 (N + 1/2 + sqrt(N^2 + N))).
double remainder_coefficient(double planck_n);

struct LindbladTerm {
    double rate;
    Operator jump;
    std::string label;
};

struct LindbladTerms {
    Operator hamiltonian;
    std::vector<LindbladTerm> terms;
};

// sum_k rate_k (L rho L^dag - 1/2 {L^dag L, rho}); the coherent part is not included.
Operator lindblad_apply(const LindbladTerms& terms, const Operator& rho);

// sum_kl c_kl (F_k rho F_l^dag - 1/2 {F_l^dag F_k, rho}).
Operator kossakowski_apply(const Eigen::MatrixXcd& coefficients, std::span<const Operator> basis,
                           const Operator& rho);

// Redfield dissipator of a single bath coupled through a Hermitian operator X,
// principal-value part dropped:
//   D(rho) = pi sum_{w,w'} Gamma(-w) [X(w) rho, X(w')^dag] + H.c.
class RedfieldChannel {
public:
    RedfieldChannel(const Operator& h, const Operator& x, const BathSpec& bath, double cluster_tol);

    const EigenOperatorSet& decomposition() const { return decomposition_; }
    const Operator& coupling() const { return coupling_; }
    // pi sum_w Gamma(-w) X(w)
    const Operator& weighted() const { return weighted_; }
    const BathSpec& bath() const { return bath_; }
    // Rate attached to X(w): Gamma(-w), the bath absorbing the energy w.
    double rate_for(double frequency) const;

    // K rho X - X K rho + H.c. with K = weighted().
    Operator apply(const Operator& rho) const;
    // Explicit double frequency sum; restricted to w = w' when secular_only.
    Operator apply_pairwise(const Operator& rho, bool secular_only) const;

private:
    Operator coupling_;
    BathSpec bath_;
    EigenOperatorSet decomposition_;
    Operator weighted_;
};

struct RedfieldDissipator {
    std::vector<RedfieldChannel> channels;

    Operator apply(const Operator& rho) const;
};

struct GeneratorSpec {
    Variant variant = Variant::weak_coupling;
    ChainSpec chain;
    BathSpec left{0.41, 0.01, Side::left};
    BathSpec right{1.39, 0.01, Side::right};
    double cluster_tolerance = kDefaultClusterTolerance; // units of Omega

    void validate() const;
};

// Lindblad terms 2 pi Gamma(-w) on X(w) of one bath, for H with coupling X.
// Rates below 1e-16 of the largest are pruned.
LindbladTerms secular_terms(const Operator& h, const Operator& x, const BathSpec& bath,
                            double cluster_tol, std::string_view label);

RedfieldDissipator redfield_dissipator(const GeneratorSpec& gen);
LindbladTerms secular_dissipator(const GeneratorSpec& gen);
LindbladTerms weak_coupling_dissipator(const GeneratorSpec& gen);
LindbladTerms local_diag_dissipator(const GeneratorSpec& gen);

// F1 = sigma_+ and F2 = sigma_- at the bath's attachment site.
std::array<Operator, 2> local_basis(const ChainSpec& chain, Side side);

// Fully built generator with its building blocks cached. Immutable.
class Generator {
public:
    explicit Generator(GeneratorSpec spec);

    const GeneratorSpec& spec() const { return spec_; }
    Variant variant() const { return spec_.variant; }
    const Operator& hamiltonian() const { return hamiltonian_; }

    // Throws std::logic_error for the redfield variant, which has no Lindblad form.
    const LindbladTerms& lindblad_terms() const;
    // Throws std::logic_error for the Lindblad variants.
    const RedfieldDissipator& redfield() const;

    Operator dissipate(const Operator& rho) const;
    // -i[H, rho] + D_L(rho) + D_R(rho)
    Operator apply(const Operator& rho) const;

private:
    GeneratorSpec spec_;
    Operator hamiltonian_;
    std::optional<LindbladTerms> lindblad_;
    std::optional<RedfieldDissipator> redfield_;
};

} // namespace spinflux
