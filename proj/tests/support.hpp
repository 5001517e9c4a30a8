// support.hpp: Seeded random generators for property tests

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "spinflux/dissipators.hpp"
#include "spinflux/operator.hpp"

namespace spinflux::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Eigen::MatrixXcd matrix(Index d) {
        std::normal_distribution<double> g;
        Eigen::MatrixXcd m(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) m(i, j) = cplx(g(rng_), g(rng_));
        return m;
    }

    Operator hermitian(Index d) { return Operator::hermitian_part(matrix(d)); }

    // Full-rank density matrix A A^dag / tr.
    Operator density(Index d) {
        const Eigen::MatrixXcd a = matrix(d);
        Eigen::MatrixXcd rho = a * a.adjoint();
        rho /= rho.trace();
        return Operator::hermitian_part(rho);
    }

    ChainSpec chain(int n_lo, int n_hi) {
        ChainSpec c;
        c.sites = integer(n_lo, n_hi);
        c.field = uniform(0.5, 2.0);
        c.coupling = uniform(0.001, 0.05) * c.field;
        return c;
    }

    GeneratorSpec generator(Variant v, int n_lo, int n_hi) {
        GeneratorSpec g;
        g.variant = v;
        g.chain = chain(n_lo, n_hi);
        g.left = {uniform(0.2, 1.0), uniform(0.002, 0.02), Side::left};
        g.right = {uniform(1.0, 3.0), uniform(0.002, 0.02), Side::right};
        return g;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline GeneratorSpec reference_generator(Variant v) {
    GeneratorSpec g;
    g.variant = v;
    g.chain = {3, 1.0, 0.01};
    g.left = {0.41, 0.01, Side::left};
    g.right = {1.39, 0.01, Side::right};
    return g;
}

inline constexpr Variant kAllVariants[] = {Variant::redfield, Variant::secular, Variant::weak_coupling,
                                           Variant::local_diag};
inline constexpr Variant kLindbladVariants[] = {Variant::secular, Variant::weak_coupling,
                                                Variant::local_diag};

} // namespace spinflux::testing
