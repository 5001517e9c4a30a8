#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spinflux/harness.hpp"
#include "spinflux/observables.hpp"

using namespace spinflux;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "spinflux_harness_test" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig base(Mode mode, const fs::path& dir) {
    RunConfig c = parse_config("chain.n = 3\n");
    c.mode = mode;
    c.output_dir = dir.string();
    c.t_max = 200.0;
    c.steps = 10;
    c.realizations = 200;
    c.seed = 5;
    return c;
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);)
        if (!line.starts_with("#")) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("steady mode at equal temperatures reports no current") {
    for (Variant v : {Variant::weak_coupling, Variant::local_diag, Variant::redfield}) {
        RunConfig c = base(Mode::steady, scratch("steady"));
        c.variant = v;
        c.right.beta = c.left.beta;
        const RunOutcome out = run(c);
        REQUIRE(out.exit_code == kExitOk);
        const auto j = nlohmann::json::parse(slurp(out.files.at(0)));
        for (double cur : j["steady_state"]["currents"])
            CHECK(std::abs(cur) <= 1e-10 * c.chain.coupling * c.chain.field);
        CHECK(j["provenance"]["config_hash"] == config_hash(c));
        CHECK(j["provenance"]["version"] == std::string(kVersion));
    }
}

TEST_CASE("compare mode emits the three current columns on one grid") {
    const RunConfig c = base(Mode::compare, scratch("compare"));
    const RunOutcome out = run(c);
    REQUIRE(out.exit_code == kExitOk);
    REQUIRE(out.files.size() == 2);
    const auto lines = data_lines(slurp(out.files[0]));
    CHECK(lines.at(0) == "time,redfield_exact,weak_coupling_exact,weak_coupling_mcwf,weak_coupling_mcwf_se");
    CHECK(lines.size() == 12);
    const auto j = nlohmann::json::parse(slurp(out.files[1]));
    for (const char* v : {"redfield", "secular", "weak_coupling", "local_diag"})
        CHECK(j["steady_state"][v]["currents"].size() == 2);
    CHECK(j["steady_state"]["redfield"]["currents"][0].get<double>() > 0.0);
}

TEST_CASE("evolve and mcwf schemas") {
    RunConfig c = base(Mode::evolve, scratch("evolve"));
    RunOutcome out = run(c);
    REQUIRE(out.exit_code == kExitOk);
    CHECK(data_lines(slurp(out.files[0])).at(0) == "time,J_1_2,J_2_3,E_1,E_2,E_3,positivity_floor");

    c = base(Mode::mcwf, scratch("mcwf"));
    out = run(c);
    REQUIRE(out.exit_code == kExitOk);
    CHECK(data_lines(slurp(out.files[0])).at(0) ==
          "time,J_1_2,J_1_2_se,J_2_3,J_2_3_se,E_1,E_1_se,E_2,E_2_se,E_3,E_3_se");
    CHECK(slurp(out.files[0]).find("# config_hash: " + config_hash(c)) != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical CSV") {
    RunConfig a = base(Mode::mcwf, scratch("det_a"));
    RunConfig b = base(Mode::mcwf, scratch("det_b"));
    const RunOutcome ra = run(a, {1});
    const RunOutcome rb = run(b, {4});
    REQUIRE(ra.exit_code == kExitOk);
    REQUIRE(rb.exit_code == kExitOk);
    CHECK(slurp(ra.files[0]) == slurp(rb.files[0]));
}

TEST_CASE("failures produce exit codes and error records") {
    RunConfig c = base(Mode::steady, scratch("degenerate"));
    c.chain.coupling = 0.0;
    RunOutcome out = run(c);
    CHECK(out.exit_code == kExitSolverError);
    CHECK(fs::exists(fs::path(c.output_dir) / "error.json"));
    auto err = nlohmann::json::parse(out.error);
    CHECK(err["error"]["kind"] == "solver");

    c = base(Mode::mcwf, scratch("bad_variant"));
    c.variant = Variant::redfield;
    out = run(c);
    CHECK(out.exit_code == kExitConfigError);
    err = nlohmann::json::parse(out.error);
    CHECK(err["error"]["key"] == "variant");
}

TEST_CASE("initial states") {
    const ChainSpec spec{3, 1.0, 0.01};
    const Operator h = build_hamiltonian(spec);
    const Operator mixed = initial_density({InitialState::Kind::maximally_mixed, 1.0}, h);
    CHECK(max_abs_diff(mixed, Operator::identity(8) * 0.125) == 0.0);
    const Operator ground = initial_density({InitialState::Kind::ground, 1.0}, h);
    CHECK(std::abs(ground.trace() - 1.0) <= 1e-14);
    CHECK(real_expectation(ground, h) == doctest::Approx(eig_hermitian(h).eigenvalues(0)).epsilon(1e-12));
    const Operator gibbs = initial_density({InitialState::Kind::gibbs, 0.7}, h);
    CHECK(max_abs_diff(gibbs, gibbs_state(h, 0.7)) == 0.0);
}

TEST_CASE("error records are single-line JSON") {
    const std::string r = error_record("config", "bad \"value\"", "chain.n", 4);
    CHECK(r.find('\n') == std::string::npos);
    const auto j = nlohmann::json::parse(r);
    CHECK(j["error"]["line"] == 4);
    CHECK(j["error"]["exit_code"] == kExitConfigError);
}
