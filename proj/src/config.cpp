#include "spinflux/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spinflux/liouville.hpp"

namespace spinflux {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view value, const std::string& key, int line) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("expected a number, got '" + std::string(value) + "'", key, line);
    if (!std::isfinite(out)) throw ConfigError("value must be finite", key, line);
    return out;
}

template <class Int>
Int parse_integer(std::string_view value, const std::string& key, int line) {
    Int out{};
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("expected an integer, got '" + std::string(value) + "'", key, line);
    return out;
}

InitialState parse_initial(std::string_view value, const std::string& key, int line) {
    if (value == "maximally_mixed") return {InitialState::Kind::maximally_mixed, 1.0};
    if (value == "ground") return {InitialState::Kind::ground, 1.0};
    constexpr std::string_view prefix = "gibbs:";
    if (value.starts_with(prefix)) {
        const double beta = parse_double(trim(value.substr(prefix.size())), key, line);
        if (beta <= 0.0) throw ConfigError("Gibbs inverse temperature must be > 0", key, line);
        return {InitialState::Kind::gibbs, beta};
    }
    throw ConfigError("expected maximally_mixed, ground or gibbs:<beta>, got '" +
                          std::string(value) + "'",
                      key, line);
}

using Setter = std::function<void(RunConfig&, std::string_view, const std::string&, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"chain.n", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.chain.sites = parse_integer<int>(v, k, l);
         }},
        {"chain.omega", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.chain.field = parse_double(v, k, l);
         }},
        {"chain.lambda", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.chain.coupling = parse_double(v, k, l);
         }},
        {"bath.left.beta", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.left.beta = parse_double(v, k, l);
         }},
        {"bath.left.kappa", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.left.kappa = parse_double(v, k, l);
         }},
        {"bath.right.beta", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.right.beta = parse_double(v, k, l);
         }},
        {"bath.right.kappa", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.right.kappa = parse_double(v, k, l);
         }},
        {"variant", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             auto parsed = parse_variant(v);
             if (!parsed) throw ConfigError("unknown variant '" + std::string(v) + "'", k, l);
             c.variant = *parsed;
         }},
        {"mode", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             auto parsed = parse_mode(v);
             if (!parsed) throw ConfigError("unknown mode '" + std::string(v) + "'", k, l);
             c.mode = *parsed;
         }},
        {"time.t_max", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.t_max = parse_double(v, k, l);
         }},
        {"time.steps", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.steps = parse_integer<int>(v, k, l);
         }},
        {"mcwf.realizations", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.realizations = parse_integer<std::size_t>(v, k, l);
         }},
        {"mcwf.seed", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.seed = parse_integer<std::uint64_t>(v, k, l);
         }},
        {"initial", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.initial = parse_initial(v, k, l);
         }},
        {"output.dir", [](RunConfig& c, std::string_view v, const std::string&, int) {
             c.output_dir = std::string(v);
         }},
        {"tolerance.cluster", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.cluster_tolerance = parse_double(v, k, l);
         }},
        {"tolerance.null_space", [](RunConfig& c, std::string_view v, const std::string& k, int l) {
             c.null_space_tolerance = parse_double(v, k, l);
         }},
    };
    return table;
}

} // namespace

std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::steady: return "steady";
    case Mode::evolve: return "evolve";
    case Mode::mcwf: return "mcwf";
    case Mode::compare: return "compare";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
    for (Mode m : {Mode::steady, Mode::evolve, Mode::mcwf, Mode::compare})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

std::string to_string(const InitialState& s) {
    switch (s.kind) {
    case InitialState::Kind::maximally_mixed: return "maximally_mixed";
    case InitialState::Kind::ground: return "ground";
    case InitialState::Kind::gibbs: return "gibbs:" + format_double(s.beta);
    }
    return "unknown";
}

ConfigError::ConfigError(const std::string& message, std::string key, int line)
    : std::runtime_error(message), key_(std::move(key)), line_(line) {}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void RunConfig::validate() const {
    auto check = [](auto&& fn, const char* key) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), key);
        }
    };
    check([&] { chain.validate(); }, "chain");
    check([&] { left.validate(); }, "bath.left");
    check([&] { right.validate(); }, "bath.right");
    if (!(cluster_tolerance > 0.0) || !std::isfinite(cluster_tolerance))
        throw ConfigError("cluster tolerance must be finite and > 0", "tolerance.cluster");
    if (!(null_space_tolerance > 0.0 && null_space_tolerance < 1.0))
        throw ConfigError("null-space tolerance must lie in (0, 1)", "tolerance.null_space");
    if (initial.kind == InitialState::Kind::gibbs &&
        (!std::isfinite(initial.beta) || initial.beta <= 0.0))
        throw ConfigError("Gibbs inverse temperature must be finite and > 0", "initial");
    if (output_dir.empty() || output_dir.find_first_of("#\n") != std::string::npos ||
        trim(output_dir) != output_dir)
        throw ConfigError("output directory must be non-empty, without '#', newlines or "
                          "surrounding blanks",
                          "output.dir");

    const bool timed = mode != Mode::steady;
    if (timed) {
        if (!std::isfinite(t_max) || t_max <= 0.0)
            throw ConfigError("t_max must be finite and > 0", "time.t_max");
        if (steps < 1) throw ConfigError("time.steps must be >= 1", "time.steps");
    }
    if ((mode == Mode::mcwf || mode == Mode::compare) && realizations < 1)
        throw ConfigError("mcwf.realizations must be >= 1", "mcwf.realizations");
    if (mode == Mode::mcwf && !is_lindblad(variant))
        throw ConfigError("mode=mcwf needs a Lindblad-form generator; the redfield variant has "
                          "no Lindblad form (its rate matrix is not positive semidefinite), so "
                          "it cannot be unraveled into quantum-jump trajectories",
                          "variant");
    if (mode != Mode::mcwf && chain.sites > kMaxLiouvilleSites)
        throw ConfigError("mode=" + std::string(to_string(mode)) + " builds the generator densely in "
                              "Liouville space, limited to chain.n <= " +
                              std::to_string(kMaxLiouvilleSites) + "; use mode=mcwf for longer chains",
                          "chain.n");
}

GeneratorSpec RunConfig::generator(Variant v) const {
    GeneratorSpec g;
    g.variant = v;
    g.chain = chain;
    g.left = left;
    g.right = right;
    g.cluster_tolerance = cluster_tolerance;
    return g;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", {}, line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", {}, line_no);
        if (value.empty()) throw ConfigError("missing value", key, line_no);

        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown key", key, line_no);
        if (!seen.insert(key).second) throw ConfigError("duplicate key", key, line_no);
        it->second(cfg, value, key, line_no);
    }
    if (!seen.contains("chain.n")) throw ConfigError("missing required key", "chain.n");
    cfg.validate();
    return cfg;
}

std::string serialize_config(const RunConfig& c, bool include_output) {
    std::ostringstream out;
    out << "chain.n = " << c.chain.sites << '\n'
        << "chain.omega = " << format_double(c.chain.field) << '\n'
        << "chain.lambda = " << format_double(c.chain.coupling) << '\n'
        << "bath.left.beta = " << format_double(c.left.beta) << '\n'
        << "bath.left.kappa = " << format_double(c.left.kappa) << '\n'
        << "bath.right.beta = " << format_double(c.right.beta) << '\n'
        << "bath.right.kappa = " << format_double(c.right.kappa) << '\n'
        << "variant = " << to_string(c.variant) << '\n'
        << "mode = " << to_string(c.mode) << '\n'
        << "time.t_max = " << format_double(c.t_max) << '\n'
        << "time.steps = " << c.steps << '\n'
        << "mcwf.realizations = " << c.realizations << '\n'
        << "mcwf.seed = " << c.seed << '\n'
        << "initial = " << to_string(c.initial) << '\n'
        << "tolerance.cluster = " << format_double(c.cluster_tolerance) << '\n'
        << "tolerance.null_space = " << format_double(c.null_space_tolerance) << '\n';
    if (include_output) out << "output.dir = " << c.output_dir << '\n';
    return out.str();
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(config, false)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace spinflux
