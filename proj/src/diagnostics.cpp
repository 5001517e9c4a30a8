#include "spinflux/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace spinflux {

namespace {

std::mutex sink_mutex;

DiagnosticSink& sink_ref() {
    static DiagnosticSink sink = [](std::string_view msg) {
        std::clog << "spinflux: " << msg << '\n';
    };
    return sink;
}

} // namespace

DiagnosticSink set_diagnostic_sink(DiagnosticSink sink) {
    std::lock_guard lock(sink_mutex);
    return std::exchange(sink_ref(), std::move(sink));
}

void emit_diagnostic(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    if (sink_ref()) sink_ref()(message);
}

} // namespace spinflux
