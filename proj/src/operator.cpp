#include "spinflux/operator.hpp"

#include <stdexcept>
#include <string>

#include "spinflux/diagnostics.hpp"

namespace spinflux {

namespace {

void require_square(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionError("operator must be a non-empty square matrix");
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimensionError(std::string(what) + ": dimension mismatch (" +
                             std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

double hermitian_defect(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace

Operator::Operator(Eigen::MatrixXcd matrix, bool hermitian)
    : m_(std::move(matrix)), hermitian_(hermitian) {
    require_square(m_);
    if (hermitian_) {
        const double scale = m_.cwiseAbs().maxCoeff();
        if (hermitian_defect(m_) > kHermitianTolerance * scale)
            throw std::invalid_argument("operator flagged Hermitian is not Hermitian");
    }
}

Operator Operator::identity(Index dim) {
    return Operator(Eigen::MatrixXcd::Identity(dim, dim), true);
}

Operator Operator::zero(Index dim) {
    return Operator(Eigen::MatrixXcd::Zero(dim, dim), true);
}

Operator Operator::hermitian_part(const Eigen::MatrixXcd& matrix) {
    require_square(matrix);
    Eigen::MatrixXcd h = 0.5 * (matrix + matrix.adjoint());
    return Operator(std::move(h), true);
}

double Operator::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

Operator Operator::operator+(const Operator& other) const {
    require_same_dim(*this, other, "operator+");
    return Operator(m_ + other.m_, hermitian_ && other.hermitian_);
}

Operator Operator::operator-(const Operator& other) const {
    require_same_dim(*this, other, "operator-");
    return Operator(m_ - other.m_, hermitian_ && other.hermitian_);
}

Operator Operator::operator-() const { return Operator(-m_, hermitian_); }

Operator Operator::operator*(const Operator& other) const {
    require_same_dim(*this, other, "operator*");
    return Operator(m_ * other.m_);
}

Operator Operator::operator*(cplx scalar) const {
    return Operator(m_ * scalar, hermitian_ && scalar.imag() == 0.0);
}

Operator Operator::operator*(double scalar) const { return Operator(m_ * scalar, hermitian_); }

double max_abs_diff(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "max_abs_diff");
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

Operator pauli(Pauli kind) {
    using namespace std::complex_literals;
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (kind) {
    case Pauli::x:
        m << 0.0, 1.0, 1.0, 0.0;
        return Operator(m, true);
    case Pauli::y:
        m << 0.0, -1i, 1i, 0.0;
        return Operator(m, true);
    case Pauli::z:
        m << 1.0, 0.0, 0.0, -1.0;
        return Operator(m, true);
    case Pauli::plus:
        m(0, 1) = 1.0;
        return Operator(m);
    case Pauli::minus:
        m(1, 0) = 1.0;
        return Operator(m);
    case Pauli::identity:
        return Operator::identity(2);
    }
    throw std::invalid_argument("unknown Pauli kind");
}

Operator tensor(const Operator& a, const Operator& b) {
    const Index da = a.dim();
    const Index db = b.dim();
    if (da > kMaxOperatorDim / db)
        throw std::length_error("tensor product dimension " + std::to_string(da) + "x" +
                                std::to_string(db) + " exceeds the dense operator cap");
    Eigen::MatrixXcd out(da * db, da * db);
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    return Operator(std::move(out), a.hermitian() && b.hermitian());
}

Operator embed(const Operator& op, int site, int n) {
    if (n < 1 || n > kMaxOperatorSites)
        throw std::length_error("chain length " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxOperatorSites) + "]");
    int width = 0;
    if (op.dim() == 2)
        width = 1;
    else if (op.dim() == 4)
        width = 2;
    else
        throw DimensionError("embed: operator must act on one or two sites");
    if (site < 1 || site + width - 1 > n)
        throw DimensionError("embed: site " + std::to_string(site) + " out of range for n=" +
                             std::to_string(n));

    const Index left = Index{1} << (site - 1);
    const Index right = Index{1} << (n - site - width + 1);
    return tensor(tensor(Operator::identity(left), op), Operator::identity(right));
}

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "commutator");
    return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

Operator anticommutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "anticommutator");
    return Operator(a.matrix() * b.matrix() + b.matrix() * a.matrix());
}

Operator adjoint(const Operator& a) { return Operator(a.matrix().adjoint(), a.hermitian()); }

EigenSystem eig_hermitian(const Operator& a) {
    if (!a.hermitian()) {
        const double scale = a.max_abs();
        if (hermitian_defect(a.matrix()) > kHermitianTolerance * scale)
            throw std::invalid_argument("eig_hermitian: operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix());
    if (solver.info() != Eigen::Success) throw SolverError("eig_hermitian: eigensolver failed");

    EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
    const Index d = a.dim();
    for (Index k = 0; k < d; ++k) {
        auto v = es.eigenvectors.col(k);
        const double cutoff = 1e-10 * v.cwiseAbs().maxCoeff();
        for (Index i = 0; i < d; ++i) {
            if (std::abs(v(i)) > cutoff) {
                v *= std::conj(v(i)) / std::abs(v(i));
                v(i) = std::abs(v(i));
                break;
            }
        }
    }
    return es;
}

} // namespace spinflux
