/*
 * errors.hpp — exception vocabulary shared by every workbench module.
 *
 * Each error names the contract it enforces:
 *
 *   NonFinite            : a field carries NaN/Inf where finiteness is required
 *   AllMasked            : every grid point fell below the node threshold
 *   NodeContamination    : too much probability mass sits inside masked nodes
 *   StabilityViolation   : dt exceeds the scheme's stability/meaningfulness bound
 *   NoConvergence        : an iterative solve exhausted its iteration cap
 *   InsufficientSnapshots: a time-differencing diagnostic got too few snapshots
 *   Overflow             : exp(R±S) would overflow (|exponent| > 300)
 *   DriftUnsupported     : dual-diffusion drift a ≠ 0 requested (unsupported)
 *   MomentOverflow       : density tails touch the box edge above tolerance
 *   NodeTrap             : a trajectory spent too many steps inside a node
 *   DegenerateInterval   : a random-Cantor interval collapsed below machine width
 *   ConfigError          : a scenario file violates the schema (field path given)
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qwb {

// Common base so callers can catch any workbench error in one clause.
struct Error : std::runtime_error {
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

struct NonFinite : Error {
    explicit NonFinite(const std::string &what) : Error("NonFinite: " + what) {}
};

struct AllMasked : Error {
    explicit AllMasked(const std::string &what) : Error("AllMasked: " + what) {}
};

struct NodeContamination : Error {
    explicit NodeContamination(const std::string &what)
        : Error("NodeContamination: " + what) {}
};

struct StabilityViolation : Error {
    explicit StabilityViolation(const std::string &what)
        : Error("StabilityViolation: " + what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string &what)
        : Error("NoConvergence: " + what) {}
};

struct InsufficientSnapshots : Error {
    explicit InsufficientSnapshots(const std::string &what)
        : Error("InsufficientSnapshots: " + what) {}
};

struct Overflow : Error {
    explicit Overflow(const std::string &what) : Error("Overflow: " + what) {}
};

struct DriftUnsupported : Error {
    explicit DriftUnsupported(const std::string &what)
        : Error("DriftUnsupported: " + what) {}
};

struct MomentOverflow : Error {
    explicit MomentOverflow(const std::string &what)
        : Error("MomentOverflow: " + what) {}
};

struct NodeTrap : Error {
    explicit NodeTrap(const std::string &what) : Error("NodeTrap: " + what) {}
};

struct DegenerateInterval : Error {
    explicit DegenerateInterval(const std::string &what)
        : Error("DegenerateInterval: " + what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string &what) : Error("ConfigError: " + what) {}
};

} // namespace qwb
