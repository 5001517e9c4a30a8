// operator.hpp: Dense complex operators on tensor-product spin-1/2 spaces

#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace spinflux {

using cplx = std::complex<double>;
using Index = Eigen::Index;

// Largest chain (in sites) whose operators may be built densely.
inline constexpr int kMaxOperatorSites = 12;
inline constexpr Index kMaxOperatorDim = Index{1} << kMaxOperatorSites;

// Relative tolerance used to verify operators flagged as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

// Immutable dense square matrix. The Hermitian flag is verified on construction,
// never trusted.
class Operator {
public:
    Operator() = default;
    explicit Operator(Eigen::MatrixXcd matrix, bool hermitian = false);

    static Operator identity(Index dim);
    static Operator zero(Index dim);
    // Symmetrizes (M + M†)/2 and flags the result Hermitian.
    static Operator hermitian_part(const Eigen::MatrixXcd& matrix);

    Index dim() const { return m_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    bool hermitian() const { return hermitian_; }
    cplx operator()(Index row, Index col) const { return m_(row, col); }

    cplx trace() const { return m_.trace(); }
    // Largest entry modulus.
    double max_abs() const;

    Operator operator+(const Operator& other) const;
    Operator operator-(const Operator& other) const;
    Operator operator-() const;
    Operator operator*(const Operator& other) const;
    Operator operator*(cplx scalar) const;
    Operator operator*(double scalar) const;

private:
    Eigen::MatrixXcd m_;
    bool hermitian_ = false;
};

inline Operator operator*(double s, const Operator& op) { return op * s; }
inline Operator operator*(cplx s, const Operator& op) { return op * s; }

// max |A - B|, requires equal dims.
double max_abs_diff(const Operator& a, const Operator& b);

enum class Pauli { x, y, z, plus, minus, identity };

// 2x2 Pauli matrices in the {|up>, |down>} basis; sigma_± = (sigma_x ± i sigma_y)/2.
Operator pauli(Pauli kind);

// Kronecker product a ⊗ b. Throws std::length_error past kMaxOperatorDim.
Operator tensor(const Operator& a, const Operator& b);

// 1 ⊗ ... ⊗ op ⊗ ... ⊗ 1 on an n-site chain with op (dim 2 or 4) starting at
// 1-based site. A dim-4 op occupies sites (site, site+1).
Operator embed(const Operator& op, int site, int n);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);
Operator adjoint(const Operator& a);

struct EigenSystem {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXcd eigenvectors; // orthonormal columns
};

// Hermitian eigendecomposition. Each eigenvector is phased so its first
// component of non-negligible modulus is real and positive.
EigenSystem eig_hermitian(const Operator& a);

} // namespace spinflux
