// diagnostics.hpp: Error types and the non-fatal diagnostic channel

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spinflux {

// Operand shapes do not match (dims, site indices, bond indices).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical solve could not produce a trustworthy answer.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using DiagnosticSink = std::function<void(std::string_view)>;

// Replaces the sink and returns the previous one. The default writes to std::clog.
DiagnosticSink set_diagnostic_sink(DiagnosticSink sink);

void emit_diagnostic(std::string_view message);

} // namespace spinflux
