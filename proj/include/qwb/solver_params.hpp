/*
 * solver_params.hpp — time-stepping parameters and per-scheme stability
 * bounds.
 *
 * Bounds (θ = dt × fastest kinetic phase rate on the grid):
 *   split_step_strang : θ = dt·(ℏ·k_max²/2m) ≤ π.  The scheme is
 *                       unconditionally stable (unitary factors); beyond π
 *                       the top mode advances more than half a cycle per
 *                       step and the discretization stops meaning anything.
 *   crank_nicolson    : same θ ≤ π bound (A-stable; same meaningfulness
 *                       argument).  The iterative solve additionally needs
 *                       dt·V_max/2ℏ < 1 and reports NoConvergence otherwise.
 *   rk4_semi_spectral : θ = dt·(α·k_max²/2m) ≤ 2.5.  Classical rk4 is
 *                       stable on the imaginary axis only for |λ·dt| ≤ 2√2
 *                       ≈ 2.83; the bound sits inside it with margin
 *                       because the non-Hermitian (β) term perturbs the
 *                       spectrum off the axis.
 */
#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "grid.hpp"

namespace qwb {

enum class Scheme { split_step_strang, crank_nicolson, rk4_semi_spectral };

inline const char *scheme_name(Scheme s) {
    switch (s) {
        case Scheme::split_step_strang: return "split_step_strang";
        case Scheme::crank_nicolson: return "crank_nicolson";
        case Scheme::rk4_semi_spectral: return "rk4_semi_spectral";
    }
    return "?";
}

struct SolverParams {
    double dt = 1e-3;                        // time step (> 0)
    Scheme scheme = Scheme::split_step_strang;
    double b = 0.0;                          // log-NLSE strength (energy, ≥ 0)
    double alpha = 1.0;                      // Re ℏ_c (action, > 0)
    double beta = 0.0;                       // Im ℏ_c (action)
    double log_floor = 1e-30;                // relative ρ floor inside log

    SolverParams() = default;
    SolverParams(double dt_, Scheme scheme_, double b_ = 0.0, double alpha_ = 1.0,
                 double beta_ = 0.0, double log_floor_ = 1e-30)
        : dt(dt_), scheme(scheme_), b(b_), alpha(alpha_), beta(beta_),
          log_floor(log_floor_) {
        validate();
    }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SolverParams: dt must be > 0");
        if (b < 0.0) throw std::invalid_argument("SolverParams: b must be >= 0");
        if (!(alpha > 0.0))
            throw std::invalid_argument("SolverParams: alpha must be > 0");
        if (!(log_floor > 0.0))
            throw std::invalid_argument("SolverParams: log_floor must be > 0");
    }
};

// Fastest kinetic phase rate (1/time) seen by the scheme on this grid.
inline double kinetic_rate(const Grid &g, const SolverParams &p) {
    const double k2 = g.k_max() * g.k_max();
    const double action =
        (p.scheme == Scheme::rk4_semi_spectral) ? p.alpha : g.hbar;
    return action * k2 / (2.0 * g.mass);
}

// Largest admissible dt for the scheme on this grid.
inline double stability_bound(const Grid &g, const SolverParams &p) {
    const double limit = (p.scheme == Scheme::rk4_semi_spectral) ? 2.5 : M_PI;
    return limit / kinetic_rate(g, p);
}

// Pre-flight check used by the steppers and by scenario validation.
inline void check_stability(const Grid &g, const SolverParams &p) {
    p.validate();
    const double bound = stability_bound(g, p);
    if (p.dt > bound)
        throw StabilityViolation(std::string(scheme_name(p.scheme)) + ": dt = " +
                                 std::to_string(p.dt) + " exceeds bound " +
                                 std::to_string(bound));
}

} // namespace qwb
