// spinflux: command-line front end: `spinflux run <config-file> [overrides]`

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spinflux/config.hpp"
#include "spinflux/harness.hpp"

using namespace spinflux;

namespace {

unsigned threads_from_env() {
    const char* raw = std::getenv("SPINFLUX_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    unsigned n = 0;
    const std::string_view s(raw);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        std::cerr << "spinflux: ignoring malformed SPINFLUX_THREADS='" << s << "'\n";
        return 0;
    }
    return n;
}

int config_failure(const std::string& record, const std::string& out_dir) {
    std::cerr << record << '\n';
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        std::ofstream f(std::filesystem::path(out_dir) / "error.json");
        if (f) f << record << '\n';
    }
    return kExitConfigError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinflux: heat transport through a driven spin-1/2 chain"};
    app.require_subcommand(1);

    std::string config_path, mode, variant, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;

    auto* run_cmd = app.add_subcommand("run", "Run a configuration file");
    run_cmd->add_option("config", config_path, "Configuration file (key = value lines)")->required();
    run_cmd->add_option("--mode", mode, "steady | evolve | mcwf | compare");
    run_cmd->add_option("--variant", variant, "redfield | secular | weak_coupling | local_diag");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--seed", seed, "MCWF master seed");
    run_cmd->add_option("--realizations", realizations, "MCWF trajectory count");
    run_cmd->footer("Worker threads for MCWF: SPINFLUX_THREADS (default: all cores).");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) return config_failure(error_record("config", "cannot read config file '" + config_path + "'"), out_dir);
    std::ostringstream text;
    text << in.rdbuf();

    RunConfig cfg;
    try {
        cfg = parse_config(text.str());
        if (!mode.empty()) {
            auto m = parse_mode(mode);
            if (!m) throw ConfigError("unknown mode '" + mode + "'", "--mode");
            cfg.mode = *m;
        }
        if (!variant.empty()) {
            auto v = parse_variant(variant);
            if (!v) throw ConfigError("unknown variant '" + variant + "'", "--variant");
            cfg.variant = *v;
        }
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed) cfg.seed = *seed;
        if (realizations) cfg.realizations = *realizations;
        cfg.validate();
    } catch (const ConfigError& e) {
        return config_failure(error_record("config", e.what(), e.key(), e.line()), out_dir);
    }

    const RunOutcome outcome = run(cfg, {threads_from_env()});
    if (outcome.exit_code != kExitOk) {
        std::cerr << outcome.error << '\n';
        return outcome.exit_code;
    }
    for (const auto& f : outcome.files) std::cout << f.string() << '\n';
    return kExitOk;
}
