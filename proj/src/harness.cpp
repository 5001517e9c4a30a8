#include "spinflux/harness.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "spinflux/diagnostics.hpp"
#include "spinflux/liouville.hpp"
#include "spinflux/mcwf.hpp"
#include "spinflux/observables.hpp"

namespace spinflux {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string bond_name(int bond) { return "J_" + std::to_string(bond) + "_" + std::to_string(bond + 1); }
std::string site_name(int site) { return "E_" + std::to_string(site); }

std::vector<NamedObservable> transport_observables(const ChainSpec& chain) {
    std::vector<NamedObservable> out;
    for (int b = 1; b < chain.sites; ++b) out.push_back({bond_name(b), reported_current_operator(chain, b)});
    for (int s = 1; s <= chain.sites; ++s) out.push_back({site_name(s), build_local_hamiltonian_site(chain, s)});
    return out;
}

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg,
                                                            std::string_view variants) {
    return {
        {"artifact", "spinflux"},
        {"version", std::string(kVersion)},
        {"config_hash", config_hash(cfg)},
        {"mode", std::string(to_string(cfg.mode))},
        {"variant", std::string(variants)},
        {"master_seed", std::to_string(cfg.seed)},
        {"initial_state", to_string(cfg.initial)},
        {"tolerance.cluster", format_double(cfg.cluster_tolerance)},
        {"tolerance.null_space", format_double(cfg.null_space_tolerance)},
        {"current_sign", "positive = energy flowing from site mu to mu+1"},
    };
}

ordered_json provenance_json(const RunConfig& cfg, std::string_view variants) {
    ordered_json p = ordered_json::object();
    for (const auto& [k, v] : provenance(cfg, variants)) p[k] = v;
    p["config"] = serialize_config(cfg, false);
    return p;
}

fs::path prepare_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

struct Column {
    std::string name;
    std::vector<double> values;
};

std::string render_csv(const RunConfig& cfg, std::string_view variants,
                       const std::vector<double>& times, const std::vector<Column>& columns) {
    std::ostringstream out;
    for (const auto& [k, v] : provenance(cfg, variants)) out << "# " << k << ": " << v << '\n';
    std::istringstream config(serialize_config(cfg, false));
    for (std::string line; std::getline(config, line);) out << "# config: " << line << '\n';
    out << "time";
    for (const auto& c : columns) out << ',' << c.name;
    out << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_double(times[k]);
        for (const auto& c : columns) out << ',' << format_double(c.values[k]);
        out << '\n';
    }
    return out.str();
}

ordered_json steady_json(const SteadyStateReport& ss, const GeneratorSpec& spec) {
    const TransportReport tr = make_transport_report(ss.rho, spec.chain, spec.variant);
    ordered_json j;
    j["currents"] = tr.currents;
    j["local_energies"] = tr.local_energies;
    j["bond_spread"] = bond_spread(tr.currents);
    j["diagonality_defect"] = tr.diagonality_defect;
    j["positivity_floor"] = tr.positivity_floor;
    j["residual"] = ss.residual;
    j["null_dimension"] = ss.null_dimension;
    j["hermitian_asymmetry"] = ss.hermitian_asymmetry;
    j["trace"] = ss.rho.trace().real();
    return j;
}

SteadyStateReport solve_steady(const RunConfig& cfg, Variant v) {
    const Generator gen(cfg.generator(v));
    return steady_state(assemble(gen), cfg.null_space_tolerance);
}

std::vector<Operator> exact_series(const RunConfig& cfg, Variant v, const std::vector<double>& grid) {
    const Generator gen(cfg.generator(v));
    const Operator rho0 = initial_density(cfg.initial, gen.hamiltonian());
    return propagate(assemble(gen), rho0, grid);
}

TrajectoryEnsembleResult mcwf_series(const RunConfig& cfg, Variant v, const std::vector<double>& grid,
                                     std::span<const NamedObservable> obs, unsigned threads) {
    const Generator gen(cfg.generator(v));
    const Operator rho0 = initial_density(cfg.initial, gen.hamiltonian());
    return run_ensemble(gen.lindblad_terms(), rho0, grid, obs, {cfg.realizations, cfg.seed, threads});
}

std::vector<fs::path> run_steady(const RunConfig& cfg, const fs::path& dir) {
    const GeneratorSpec spec = cfg.generator();
    check_weak_coupling_regime(spec.chain);
    const SteadyStateReport ss = solve_steady(cfg, cfg.variant);
    ordered_json j;
    j["provenance"] = provenance_json(cfg, to_string(cfg.variant));
    j["variant"] = to_string(cfg.variant);
    j["steady_state"] = steady_json(ss, spec);
    const fs::path path = dir / "steady.json";
    write_text(path, j.dump(2) + "\n");
    return {path};
}

std::vector<fs::path> run_evolve(const RunConfig& cfg, const fs::path& dir) {
    const auto grid = uniform_grid(cfg.t_max, cfg.steps);
    const auto states = exact_series(cfg, cfg.variant, grid);
    std::vector<Column> cols;
    for (const auto& o : transport_observables(cfg.chain))
        cols.push_back({o.name, expectation_series(states, o.op)});
    Column floor{"positivity_floor", {}};
    for (const auto& rho : states) floor.values.push_back(min_eigenvalue(rho));
    cols.push_back(std::move(floor));
    const fs::path path = dir / "evolve.csv";
    write_text(path, render_csv(cfg, to_string(cfg.variant), grid, cols));
    return {path};
}

std::vector<fs::path> run_mcwf(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
    const auto grid = uniform_grid(cfg.t_max, cfg.steps);
    const auto obs = transport_observables(cfg.chain);
    const auto res = mcwf_series(cfg, cfg.variant, grid, obs, threads);
    std::vector<Column> cols;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        cols.push_back({res.names[i], res.means[i]});
        cols.push_back({res.names[i] + "_se", res.std_errors[i]});
    }
    const fs::path path = dir / "mcwf.csv";
    write_text(path, render_csv(cfg, to_string(cfg.variant), grid, cols));
    return {path};
}

std::vector<fs::path> run_compare(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
    const auto grid = uniform_grid(cfg.t_max, cfg.steps);
    const Operator j12 = reported_current_operator(cfg.chain, 1);
    const std::vector<NamedObservable> obs{{bond_name(1), j12}};

    const auto redfield = expectation_series(exact_series(cfg, Variant::redfield, grid), j12);
    const auto weak = expectation_series(exact_series(cfg, Variant::weak_coupling, grid), j12);
    const auto mc = mcwf_series(cfg, Variant::weak_coupling, grid, obs, threads);

    const std::string variants = "redfield,weak_coupling";
    std::vector<Column> cols{{"redfield_exact", redfield},
                             {"weak_coupling_exact", weak},
                             {"weak_coupling_mcwf", mc.means[0]},
                             {"weak_coupling_mcwf_se", mc.std_errors[0]}};
    const fs::path csv = dir / "compare.csv";
    write_text(csv, render_csv(cfg, variants, grid, cols));

    ordered_json j;
    j["provenance"] = provenance_json(cfg, variants);
    j["observable"] = bond_name(1);
    j["realizations"] = cfg.realizations;
    ordered_json steady = ordered_json::object();
    for (Variant v : {Variant::redfield, Variant::secular, Variant::weak_coupling, Variant::local_diag}) {
        try {
            steady[std::string(to_string(v))] = steady_json(solve_steady(cfg, v), cfg.generator(v));
        } catch (const SolverError& e) {
            steady[std::string(to_string(v))] = {{"error", e.what()}};
        }
    }
    j["steady_state"] = std::move(steady);
    const fs::path json = dir / "compare.json";
    write_text(json, j.dump(2) + "\n");
    return {csv, json};
}

RunOutcome fail(const RunConfig& cfg, int code, std::string record) {
    if (!cfg.output_dir.empty()) {
        std::error_code ec;
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir, ec);
        std::ofstream out(dir / "error.json", std::ios::binary | std::ios::trunc);
        if (out) out << record << '\n';
    }
    return {code, {}, std::move(record)};
}

} // namespace

std::string error_record(std::string_view kind, std::string_view message, std::string_view key, int line) {
    ordered_json e;
    e["kind"] = kind;
    e["message"] = message;
    if (!key.empty()) e["key"] = key;
    if (line > 0) e["line"] = line;
    e["exit_code"] = kind == "config" ? kExitConfigError : kExitSolverError;
    ordered_json j;
    j["error"] = std::move(e);
    return j.dump();
}

Operator initial_density(const InitialState& initial, const Operator& h) {
    const Index d = h.dim();
    switch (initial.kind) {
    case InitialState::Kind::maximally_mixed:
        return Operator::identity(d) * (1.0 / static_cast<double>(d));
    case InitialState::Kind::gibbs:
        return gibbs_state(h, initial.beta);
    case InitialState::Kind::ground: {
        // Uniform mixture over the ground manifold when it is degenerate.
        const EigenSystem es = eig_hermitian(h);
        const double e0 = es.eigenvalues(0);
        const double tol = 1e-10 * std::max(1.0, es.eigenvalues.cwiseAbs().maxCoeff());
        Index k = 0;
        while (k < d && es.eigenvalues(k) - e0 <= tol) ++k;
        const Eigen::MatrixXcd v = es.eigenvectors.leftCols(k);
        return Operator::hermitian_part(v * v.adjoint() / static_cast<double>(k));
    }
    }
    throw std::invalid_argument("unknown initial state");
}

RunOutcome run(const RunConfig& cfg, const RunOptions& options) {
    try {
        cfg.validate();
        const fs::path dir = prepare_dir(cfg);
        std::vector<fs::path> files;
        switch (cfg.mode) {
        case Mode::steady: files = run_steady(cfg, dir); break;
        case Mode::evolve: files = run_evolve(cfg, dir); break;
        case Mode::mcwf: files = run_mcwf(cfg, dir, options.threads); break;
        case Mode::compare: files = run_compare(cfg, dir, options.threads); break;
        }
        return {kExitOk, std::move(files), {}};
    } catch (const ConfigError& e) {
        return fail(cfg, kExitConfigError, error_record("config", e.what(), e.key(), e.line()));
    } catch (const std::length_error& e) {
        return fail(cfg, kExitConfigError, error_record("config", e.what(), "chain.n"));
    } catch (const SolverError& e) {
        return fail(cfg, kExitSolverError, error_record("solver", e.what()));
    } catch (const IoError& e) {
        return fail(cfg, kExitSolverError, error_record("io", e.what()));
    } catch (const std::exception& e) {
        return fail(cfg, kExitSolverError, error_record("internal", e.what()));
    }
}

} // namespace spinflux
