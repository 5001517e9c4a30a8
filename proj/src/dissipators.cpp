#include "spinflux/dissipators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinflux/diagnostics.hpp"

namespace spinflux {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kRatePruneFraction = 1e-16;

// Start a new group when a sorted value is more than tol above the group's first value.
std::vector<int> group_sorted(const std::vector<double>& sorted, double tol) {
    std::vector<int> label(sorted.size(), 0);
    int g = 0;
    double start = sorted.empty() ? 0.0 : sorted.front();
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] - start > tol) {
            ++g;
            start = sorted[i];
        }
        label[i] = g;
    }
    return label;
}

void require_variant(const GeneratorSpec& gen, Variant expected) {
    if (gen.variant != expected)
        throw std::invalid_argument("generator variant is " + std::string(to_string(gen.variant)) +
                                    ", expected " + std::string(to_string(expected)));
}

void prune(LindbladTerms& out) {
    double max_rate = 0.0;
    for (const auto& t : out.terms) max_rate = std::max(max_rate, t.rate);
    std::erase_if(out.terms, [&](const LindbladTerm& t) {
        return t.rate <= kRatePruneFraction * max_rate;
    });
}

const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

} // namespace

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::redfield: return "redfield";
    case Variant::secular: return "secular";
    case Variant::weak_coupling: return "weak_coupling";
    case Variant::local_diag: return "local_diag";
    }
    return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
    for (Variant v : {Variant::redfield, Variant::secular, Variant::weak_coupling,
                      Variant::local_diag})
        if (to_string(v) == name) return v;
    return std::nullopt;
}

Operator EigenOperatorSet::sum() const {
    if (entries.empty()) throw std::logic_error("empty eigenoperator set");
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(entries.front().op.dim(), entries.front().op.dim());
    for (const auto& e : entries) s += e.op.matrix();
    return Operator(std::move(s));
}

const EigenOperatorSet::Entry* EigenOperatorSet::find(double w, double tol) const {
    for (const auto& e : entries)
        if (std::abs(e.frequency - w) <= tol) return &e;
    return nullptr;
}

EigenOperatorSet bohr_decompose(const Operator& h, const Operator& x, double cluster_tol,
                                std::string source) {
    if (h.dim() != x.dim()) throw DimensionError("bohr_decompose: dimension mismatch");
    if (!(cluster_tol >= 0.0)) throw std::invalid_argument("cluster tolerance must be >= 0");
    const EigenSystem es = eig_hermitian(h);
    const Index d = h.dim();

    // Energy groups (eigenvalues already ascending).
    std::vector<double> eps(es.eigenvalues.data(), es.eigenvalues.data() + d);
    const std::vector<int> group = group_sorted(eps, cluster_tol);
    const int n_groups = group.back() + 1;
    std::vector<double> level(n_groups, 0.0);
    std::vector<int> count(n_groups, 0);
    for (Index i = 0; i < d; ++i) {
        level[group[i]] += eps[i];
        ++count[group[i]];
    }
    for (int g = 0; g < n_groups; ++g) level[g] /= count[g];

    // Non-negative Bohr frequencies between groups, clustered; negative ones mirror them.
    struct Pair {
        int lower, upper;
        double w;
    };
    std::vector<Pair> pairs;
    for (int a = 0; a < n_groups; ++a)
        for (int b = a; b < n_groups; ++b) pairs.push_back({a, b, level[b] - level[a]});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) { return p.w < q.w; });
    std::vector<double> diffs;
    for (const auto& p : pairs) diffs.push_back(p.w);
    const std::vector<int> dlabel = group_sorted(diffs, cluster_tol);
    std::vector<double> freq(dlabel.back() + 1, 0.0);
    std::vector<int> fcount(freq.size(), 0);
    std::vector<int> pair_cluster(n_groups * n_groups, -1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        freq[dlabel[i]] += diffs[i];
        ++fcount[dlabel[i]];
        pair_cluster[pairs[i].lower * n_groups + pairs[i].upper] = dlabel[i];
    }
    for (std::size_t c = 0; c < freq.size(); ++c) freq[c] /= fcount[c];
    if (freq.front() <= cluster_tol) freq.front() = 0.0;

    const Eigen::MatrixXcd& u = es.eigenvectors;
    const Eigen::MatrixXcd xt = u.adjoint() * x.matrix() * u;
    const double drop = 1e-14 * x.max_abs();

    EigenOperatorSet out;
    out.source = std::move(source);
    std::vector<EigenOperatorSet::Entry> positive;
    for (std::size_t c = 0; c < freq.size(); ++c) {
        // Entries (i, j) whose group pair falls in cluster c. For w > 0 only the
        // upper block triangle (group j above group i) lowers the energy; for
        // w = 0 both triangles contribute.
        const bool zero = freq[c] == 0.0;
        Eigen::MatrixXcd masked = Eigen::MatrixXcd::Zero(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                const int gi = group[i];
                const int gj = group[j];
                if (gj < gi && !zero) continue;
                const int key = std::min(gi, gj) * n_groups + std::max(gi, gj);
                if (pair_cluster[key] == static_cast<int>(c)) masked(i, j) = xt(i, j);
            }
        Eigen::MatrixXcd xw = u * masked * u.adjoint();
        if (xw.cwiseAbs().maxCoeff() <= drop) continue;
        if (zero)
            out.entries.push_back({0.0, Operator::hermitian_part(xw)});
        else
            positive.push_back({freq[c], Operator(std::move(xw))});
    }
    for (const auto& e : positive) out.entries.push_back({-e.frequency, adjoint(e.op)});
    for (auto& e : positive) out.entries.push_back(std::move(e));
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& a, const auto& b) { return a.frequency < b.frequency; });
    return out;
}

GammaMatrix gamma_matrix(const BathSpec& bath, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("gamma_matrix: Omega must be > 0");
    const double up = rate(omega, bath);    // sigma_+ : system absorbs Omega
    const double down = rate(-omega, bath); // sigma_- : system emits Omega
    GammaMatrix g;
    g.gamma << 2.0 * pi * up, pi * (up + down), pi * (up + down), 2.0 * pi * down;
    g.frequency = omega;
    g.side = bath.side;
    return g;
}

GammaSplit split_gamma(const GammaMatrix& g) {
    const double g11 = g.gamma(0, 0);
    const double g22 = g.gamma(1, 1);
    const double m = std::sqrt(g11 * g22);
    GammaSplit s;
    s.positive_part << g11, m, m, g22;
    s.remainder = g.gamma - s.positive_part;
    s.remainder(0, 0) = 0.0;
    s.remainder(1, 1) = 0.0;
    return s;
}

double remainder_coefficient(double planck_n) {
    if (!(planck_n >= 0.0)) throw std::domain_error("remainder_coefficient: N must be >= 0");
    return 0.25 / (planck_n + 0.5 + std::sqrt(planck_n * planck_n + planck_n));
}

Operator lindblad_apply(const LindbladTerms& terms, const Operator& rho) {
    const Index d = rho.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    const Eigen::MatrixXcd& r = rho.matrix();
    for (const auto& t : terms.terms) {
        if (t.jump.dim() != d) throw DimensionError("lindblad_apply: dimension mismatch");
        const Eigen::MatrixXcd& l = t.jump.matrix();
        const Eigen::MatrixXcd ldl = l.adjoint() * l;
        out += t.rate * (l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl));
    }
    return Operator(std::move(out));
}

Operator kossakowski_apply(const Eigen::MatrixXcd& coefficients, std::span<const Operator> basis,
                           const Operator& rho) {
    const Index k = static_cast<Index>(basis.size());
    if (coefficients.rows() != k || coefficients.cols() != k)
        throw DimensionError("kossakowski_apply: coefficient matrix does not match basis size");
    const Index d = rho.dim();
    const Eigen::MatrixXcd& r = rho.matrix();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (Index a = 0; a < k; ++a) {
        if (basis[a].dim() != d) throw DimensionError("kossakowski_apply: dimension mismatch");
        for (Index b = 0; b < k; ++b) {
            const cplx c = coefficients(a, b);
            if (c == cplx(0.0)) continue;
            const Eigen::MatrixXcd& fa = basis[a].matrix();
            const Eigen::MatrixXcd& fb = basis[b].matrix();
            const Eigen::MatrixXcd fbfa = fb.adjoint() * fa;
            out += c * (fa * r * fb.adjoint() - 0.5 * (fbfa * r + r * fbfa));
        }
    }
    return Operator(std::move(out));
}

RedfieldChannel::RedfieldChannel(const Operator& h, const Operator& x, const BathSpec& bath,
                                 double cluster_tol)
    : coupling_(x), bath_(bath),
      decomposition_(bohr_decompose(h, x, cluster_tol, side_name(bath.side))) {
    bath_.validate();
    if (!x.hermitian()) throw std::invalid_argument("Redfield coupling operator must be Hermitian");
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(x.dim(), x.dim());
    for (const auto& e : decomposition_.entries) k += (pi * rate_for(e.frequency)) * e.op.matrix();
    weighted_ = Operator(std::move(k));
}

double RedfieldChannel::rate_for(double frequency) const { return rate(-frequency, bath_); }

Operator RedfieldChannel::apply(const Operator& rho) const {
    if (rho.dim() != coupling_.dim()) throw DimensionError("Redfield apply: dimension mismatch");
    const Eigen::MatrixXcd& k = weighted_.matrix();
    const Eigen::MatrixXcd& x = coupling_.matrix();
    const Eigen::MatrixXcd krho = k * rho.matrix();
    const Eigen::MatrixXcd term = krho * x - x * krho;
    // (K rho X - X K rho)^dag = X rho^dag K^dag - rho^dag K^dag X; rho need not be Hermitian.
    const Eigen::MatrixXcd rk = rho.matrix() * k.adjoint();
    return Operator(term + x * rk - rk * x);
}

Operator RedfieldChannel::apply_pairwise(const Operator& rho, bool secular_only) const {
    if (rho.dim() != coupling_.dim()) throw DimensionError("Redfield apply: dimension mismatch");
    const Index d = rho.dim();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& a : decomposition_.entries) {
        const Eigen::MatrixXcd arho = (pi * rate_for(a.frequency)) * (a.op.matrix() * rho.matrix());
        for (const auto& b : decomposition_.entries) {
            if (secular_only && a.frequency != b.frequency) continue;
            const Eigen::MatrixXcd bd = b.op.matrix().adjoint();
            acc += arho * bd - bd * arho;
        }
    }
    return Operator(acc + acc.adjoint());
}

Operator RedfieldDissipator::apply(const Operator& rho) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
    for (const auto& c : channels) out += c.apply(rho).matrix();
    return Operator(std::move(out));
}

void GeneratorSpec::validate() const {
    chain.validate();
    left.validate();
    right.validate();
    if (left.side != Side::left || right.side != Side::right)
        throw std::invalid_argument("bath sides must be (left, right)");
    if (!(cluster_tolerance >= 0.0) || !std::isfinite(cluster_tolerance))
        throw std::invalid_argument("cluster tolerance must be finite and >= 0");
}

LindbladTerms secular_terms(const Operator& h, const Operator& x, const BathSpec& bath,
                            double cluster_tol, std::string_view label) {
    const EigenOperatorSet set = bohr_decompose(h, x, cluster_tol, std::string(label));
    LindbladTerms out{h, {}};
    for (const auto& e : set.entries) {
        const double r = 2.0 * pi * rate(-e.frequency, bath);
        out.terms.push_back({r, e.op, std::string(label) + ":w=" + std::to_string(e.frequency)});
    }
    prune(out);
    return out;
}

RedfieldDissipator redfield_dissipator(const GeneratorSpec& gen) {
    require_variant(gen, Variant::redfield);
    gen.validate();
    const Operator h = build_hamiltonian(gen.chain);
    const double tol = gen.cluster_tolerance * gen.chain.field;
    RedfieldDissipator out;
    for (const BathSpec* b : {&gen.left, &gen.right})
        out.channels.emplace_back(h, build_coupling_operator(gen.chain, b->side), *b, tol);
    return out;
}

LindbladTerms secular_dissipator(const GeneratorSpec& gen) {
    require_variant(gen, Variant::secular);
    gen.validate();
    const Operator h = build_hamiltonian(gen.chain);
    const double tol = gen.cluster_tolerance * gen.chain.field;
    LindbladTerms out{h, {}};
    for (const BathSpec* b : {&gen.left, &gen.right}) {
        LindbladTerms part = secular_terms(h, build_coupling_operator(gen.chain, b->side), *b, tol,
                                           side_name(b->side));
        for (auto& t : part.terms) out.terms.push_back(std::move(t));
    }
    prune(out);
    return out;
}

std::array<Operator, 2> local_basis(const ChainSpec& chain, Side side) {
    const int site = attachment_site(chain, side);
    return {embed(pauli(Pauli::plus), site, chain.sites),
            embed(pauli(Pauli::minus), site, chain.sites)};
}

LindbladTerms weak_coupling_dissipator(const GeneratorSpec& gen) {
    require_variant(gen, Variant::weak_coupling);
    gen.validate();
    check_weak_coupling_regime(gen.chain);
    LindbladTerms out{build_hamiltonian(gen.chain), {}};
    for (const BathSpec* b : {&gen.left, &gen.right}) {
        const GammaSplit split = split_gamma(gamma_matrix(*b, gen.chain.field));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(split.positive_part);
        // Rank one: the larger eigenpair carries everything.
        const double alpha = solver.eigenvalues()(1);
        Eigen::Vector2d u = solver.eigenvectors().col(1);
        if (u.sum() < 0.0) u = -u;
        const auto f = local_basis(gen.chain, b->side);
        out.terms.push_back({alpha, f[0] * u(0) + f[1] * u(1),
                             std::string(side_name(b->side)) + ":weak"});
    }
    prune(out);
    return out;
}

LindbladTerms local_diag_dissipator(const GeneratorSpec& gen) {
    require_variant(gen, Variant::local_diag);
    gen.validate();
    LindbladTerms out{build_hamiltonian(gen.chain), {}};
    for (const BathSpec* b : {&gen.left, &gen.right}) {
        const GammaMatrix g = gamma_matrix(*b, gen.chain.field);
        const auto f = local_basis(gen.chain, b->side);
        out.terms.push_back({g.gamma(0, 0), f[0], std::string(side_name(b->side)) + ":plus"});
        out.terms.push_back({g.gamma(1, 1), f[1], std::string(side_name(b->side)) + ":minus"});
    }
    prune(out);
    return out;
}

Generator::Generator(GeneratorSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    switch (spec_.variant) {
    case Variant::redfield:
        redfield_ = redfield_dissipator(spec_);
        hamiltonian_ = build_hamiltonian(spec_.chain);
        break;
    case Variant::secular:
        lindblad_ = secular_dissipator(spec_);
        break;
    case Variant::weak_coupling:
        lindblad_ = weak_coupling_dissipator(spec_);
        break;
    case Variant::local_diag:
        lindblad_ = local_diag_dissipator(spec_);
        break;
    }
    if (lindblad_) hamiltonian_ = lindblad_->hamiltonian;
}

const LindbladTerms& Generator::lindblad_terms() const {
    if (!lindblad_)
        throw std::logic_error("the redfield generator is not of Lindblad form");
    return *lindblad_;
}

const RedfieldDissipator& Generator::redfield() const {
    if (!redfield_) throw std::logic_error("generator is not the redfield variant");
    return *redfield_;
}

Operator Generator::dissipate(const Operator& rho) const {
    return lindblad_ ? lindblad_apply(*lindblad_, rho) : redfield_->apply(rho);
}

Operator Generator::apply(const Operator& rho) const {
    const Operator coherent = commutator(hamiltonian_, rho) * cplx(0.0, -1.0);
    return coherent + dissipate(rho);
}

} // namespace spinflux
