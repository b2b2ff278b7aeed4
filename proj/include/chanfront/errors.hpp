#pragma once

#include <stdexcept>
#include <string>

namespace chanfront {

// Parameter-domain violations (bad GeneratorParams, x outside an edge, ...).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical consistency check failed (two routes disagree beyond tolerance).
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Backward recursion did not converge within the allowed truncation depth.
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Series solution terms grew instead of converging; caller should fall back
// to the ODE method.
struct method_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Explicit time stepping left [0, 1]; time step too large.
struct stability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monte Carlo censoring rate exceeded the configured maximum.
struct censoring_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Legendre maximizer fell off the sampled grid.
struct grid_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root bracket could not be established.
struct bracket_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// PDE front reached the truncated domain boundary.
struct domain_exhausted_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace chanfront
