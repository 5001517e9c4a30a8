// config.hpp: Run configuration: flat `key = value` text format, validation
// and canonical serialization

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spinflux/dissipators.hpp"

namespace spinflux {

enum class Mode { steady, evolve, mcwf, compare };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

struct InitialState {
    enum class Kind { maximally_mixed, gibbs, ground };
    Kind kind = Kind::maximally_mixed;
    double beta = 1.0; // used by gibbs only

    bool operator==(const InitialState&) const = default;
};

std::string to_string(const InitialState& s);

struct RunConfig {
    ChainSpec chain;
    BathSpec left{0.41, 0.01, Side::left};
    BathSpec right{1.39, 0.01, Side::right};
    Variant variant = Variant::weak_coupling;
    Mode mode = Mode::steady;
    double t_max = 400.0;
    int steps = 80;
    std::size_t realizations = 100000;
    std::uint64_t seed = 0;
    InitialState initial;
    std::string output_dir = "out";
    double cluster_tolerance = kDefaultClusterTolerance;
    double null_space_tolerance = 1e-10;

    // Throws ConfigError naming the offending key.
    void validate() const;
    GeneratorSpec generator(Variant v) const;
    GeneratorSpec generator() const { return generator(variant); }
};

bool operator==(const RunConfig& a, const RunConfig& b);

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {}, int line = 0);

    const std::string& key() const { return key_; }
    int line() const { return line_; } // 1-based, 0 when not tied to a line

private:
    std::string key_;
    int line_;
};

// Grammar, one entry per line:
//   key = value      dotted keys, e.g. bath.left.beta = 0.41
//   # comment        anywhere on a line
// chain.n is required; every other key has a default. Unknown and repeated
// keys are errors.
RunConfig parse_config(std::string_view text);

// Canonical text accepted by parse_config; doubles use the shortest
// representation that round-trips. output.dir is omitted when include_output is false.
std::string serialize_config(const RunConfig& config, bool include_output = true);

// FNV-1a 64 over serialize_config(config, false), as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

} // namespace spinflux
