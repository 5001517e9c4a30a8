#include <doctest.h>

#include <string>

#include "spinflux/config.hpp"

using namespace spinflux;

namespace {

const char* const kReference = R"(# reference regime
chain.n = 3
chain.omega = 1
chain.lambda = 0.01
bath.left.beta = 0.41   # hot
bath.left.kappa = 0.01
bath.right.beta = 1.39
bath.right.kappa = 0.01
)";

ConfigError parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("unreachable");
}

} // namespace

TEST_CASE("reference configuration parses with defaults") {
    const RunConfig c = parse_config(kReference);
    CHECK(c.chain.sites == 3);
    CHECK(c.chain.coupling == 0.01);
    CHECK(c.left.beta == 0.41);
    CHECK(c.right.beta == 1.39);
    CHECK(c.variant == Variant::weak_coupling);
    CHECK(c.mode == Mode::steady);
    CHECK(c.realizations == 100000);
    CHECK(c.initial.kind == InitialState::Kind::maximally_mixed);
}

TEST_CASE("serialize then parse is the identity") {
    RunConfig c = parse_config(kReference);
    CHECK(parse_config(serialize_config(c)) == c);
    c.initial = {InitialState::Kind::gibbs, 0.1 + 0.2};
    c.t_max = 1.0 / 3.0;
    c.seed = 18446744073709551615ULL;
    c.mode = Mode::compare;
    c.variant = Variant::local_diag;
    c.output_dir = "runs/x y";
    const RunConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(back.t_max == c.t_max);
    CHECK(back.initial.beta == c.initial.beta);
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("missing chain.n is named") {
    const ConfigError e = parse_error("chain.omega = 1\n");
    CHECK(e.key() == "chain.n");
}

TEST_CASE("unknown and duplicate keys carry line numbers") {
    ConfigError e = parse_error("chain.n = 3\n\nchain.spin = 1\n");
    CHECK(e.key() == "chain.spin");
    CHECK(e.line() == 3);
    e = parse_error("chain.n = 3\nchain.n = 4\n");
    CHECK(e.key() == "chain.n");
    CHECK(e.line() == 2);
    e = parse_error("chain.n = 3\njust words\n");
    CHECK(e.line() == 2);
    e = parse_error("chain.n = 3\nchain.omega =\n");
    CHECK(e.key() == "chain.omega");
}

TEST_CASE("malformed values") {
    CHECK(parse_error("chain.n = three\n").key() == "chain.n");
    CHECK(parse_error("chain.n = 3.5\n").key() == "chain.n");
    CHECK(parse_error("chain.n = 3\nchain.omega = 1x\n").line() == 2);
    CHECK(parse_error("chain.n = 3\nchain.omega = inf\n").key() == "chain.omega");
    CHECK(parse_error("chain.n = 3\nvariant = lindblad\n").key() == "variant");
    CHECK(parse_error("chain.n = 3\ninitial = gibbs:-1\n").key() == "initial");
    CHECK(parse_error("chain.n = 3\ninitial = thermal\n").key() == "initial");
}

TEST_CASE("constraint violations name the key") {
    CHECK(parse_error("chain.n = 1\n").key() == "chain");
    CHECK(parse_error("chain.n = 3\nbath.left.beta = 0\n").key() == "bath.left");
    CHECK(parse_error("chain.n = 3\nmode = evolve\ntime.t_max = 0\n").key() == "time.t_max");
    CHECK(parse_error("chain.n = 3\nmode = evolve\ntime.steps = 0\n").key() == "time.steps");
    CHECK(parse_error("chain.n = 3\nmode = mcwf\nmcwf.realizations = 0\n").key() == "mcwf.realizations");
    CHECK(parse_error("chain.n = 3\ntolerance.null_space = 2\n").key() == "tolerance.null_space");
    CHECK(parse_error("chain.n = 8\n").key() == "chain.n");
    CHECK_NOTHROW(parse_config("chain.n = 8\nmode = mcwf\n"));
}

TEST_CASE("mcwf refuses the redfield variant") {
    const ConfigError e = parse_error("chain.n = 3\nmode = mcwf\nvariant = redfield\n");
    CHECK(e.key() == "variant");
    CHECK(std::string(e.what()).find("Lindblad") != std::string::npos);
    CHECK_NOTHROW(parse_config("chain.n = 3\nmode = evolve\nvariant = redfield\n"));
}

TEST_CASE("initial state forms") {
    CHECK(parse_config("chain.n = 3\ninitial = ground\n").initial.kind == InitialState::Kind::ground);
    const RunConfig g = parse_config("chain.n = 3\ninitial = gibbs:0.5\n");
    CHECK(g.initial.kind == InitialState::Kind::gibbs);
    CHECK(g.initial.beta == 0.5);
    CHECK(to_string(g.initial) == "gibbs:0.5");
}

TEST_CASE("config hash ignores the output directory only") {
    RunConfig a = parse_config(kReference);
    RunConfig b = a;
    b.output_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("mode names round-trip") {
    for (Mode m : {Mode::steady, Mode::evolve, Mode::mcwf, Mode::compare}) CHECK(parse_mode(to_string(m)) == m);
    CHECK_FALSE(parse_mode("sweep").has_value());
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-10) == "1e-10");
}
