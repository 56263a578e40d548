/*
 * field.hpp — complex/real field containers over a periodic grid, plus the
 * node mask used to exclude near-zeros of ρ = |ψ|² from density-dividing
 * diagnostics.
 *
 *   WaveField : complex values at a time stamp (ψ, or the dual fields φ, φ̂)
 *   RealField : real values at a time stamp (R, S, ρ, v, u, Q, ξ = log ρ, …)
 *   NodeMask  : flags[j] = true ⟺ ρ_j below epsilon_rho (node neighbourhood)
 *
 * Field values are immutable by convention after construction: every
 * operation in the workbench is a pure function returning fresh fields, so
 * instances may be shared freely across threads.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace qwb {

using cplx = std::complex<double>;

// ── RealField ─────────────────────────────────────────────────────────────────
struct RealField {
    Grid grid;
    std::vector<double> values; // length grid.n
    double time = 0.0;

    RealField() = default;
    RealField(const Grid &g, double fill = 0.0, double t = 0.0)
        : grid(g), values(g.n, fill), time(t) {}
    RealField(const Grid &g, std::vector<double> v, double t = 0.0)
        : grid(g), values(std::move(v)), time(t) {
        if (values.size() != grid.n)
            throw std::invalid_argument("RealField: values length != grid.n");
    }

    std::size_t size() const { return values.size(); }
    double &operator[](std::size_t j) { return values[j]; }
    double operator[](std::size_t j) const { return values[j]; }

    bool finite() const {
        return std::all_of(values.begin(), values.end(),
                           [](double v) { return std::isfinite(v); });
    }

    void require_finite(const char *who) const {
        if (!finite()) throw NonFinite(std::string(who) + ": real field has NaN/Inf");
    }
};

// ── WaveField ─────────────────────────────────────────────────────────────────
struct WaveField {
    Grid grid;
    std::vector<cplx> values; // length grid.n
    double time = 0.0;

    WaveField() = default;
    WaveField(const Grid &g, cplx fill = {0.0, 0.0}, double t = 0.0)
        : grid(g), values(g.n, fill), time(t) {}
    WaveField(const Grid &g, std::vector<cplx> v, double t = 0.0)
        : grid(g), values(std::move(v)), time(t) {
        if (values.size() != grid.n)
            throw std::invalid_argument("WaveField: values length != grid.n");
    }

    std::size_t size() const { return values.size(); }
    cplx &operator[](std::size_t j) { return values[j]; }
    const cplx &operator[](std::size_t j) const { return values[j]; }

    bool finite() const {
        return std::all_of(values.begin(), values.end(), [](const cplx &v) {
            return std::isfinite(v.real()) && std::isfinite(v.imag());
        });
    }

    void require_finite(const char *who) const {
        if (!finite()) throw NonFinite(std::string(who) + ": wave field has NaN/Inf");
    }

    // Probability density ρ = |ψ|² as a RealField at the same time stamp.
    RealField density() const {
        RealField rho(grid, 0.0, time);
        for (std::size_t j = 0; j < values.size(); ++j) rho[j] = std::norm(values[j]);
        return rho;
    }
};

// ── NodeMask ──────────────────────────────────────────────────────────────────
// flags[j] = true means ρ_j < epsilon_rho: the point sits in a node
// neighbourhood and is excluded from every ρ-dividing diagnostic.
struct NodeMask {
    Grid grid;
    std::vector<bool> flags; // length grid.n, true = masked
    double epsilon_rho = 0.0;

    NodeMask() = default;
    NodeMask(const Grid &g, std::vector<bool> f, double eps)
        : grid(g), flags(std::move(f)), epsilon_rho(eps) {
        if (flags.size() != grid.n)
            throw std::invalid_argument("NodeMask: flags length != grid.n");
        if (!(epsilon_rho > 0.0))
            throw std::invalid_argument("NodeMask: epsilon_rho must be > 0");
    }

    bool masked(std::size_t j) const { return flags[j]; }

    std::size_t masked_count() const {
        return static_cast<std::size_t>(
            std::count(flags.begin(), flags.end(), true));
    }

    bool all_masked() const { return masked_count() == flags.size(); }

    // Fraction of probability mass sitting inside masked bins.
    double masked_mass(const RealField &rho) const {
        double in = 0.0, total = 0.0;
        for (std::size_t j = 0; j < flags.size(); ++j) {
            total += rho[j];
            if (flags[j]) in += rho[j];
        }
        return total > 0.0 ? in / total : 0.0;
    }
};

// Build the node mask of a density with threshold eps_rel·max(ρ)
// (default eps_rel = 1e−12, the workbench-wide node policy).
inline NodeMask node_mask(const RealField &rho, double eps_rel = 1e-12) {
    rho.require_finite("node_mask");
    double rho_max = 0.0;
    for (double v : rho.values) rho_max = std::max(rho_max, v);
    const double eps = eps_rel * (rho_max > 0.0 ? rho_max : 1.0);
    std::vector<bool> flags(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) flags[j] = rho[j] < eps;
    return NodeMask(rho.grid, std::move(flags), eps);
}

inline NodeMask node_mask(const WaveField &psi, double eps_rel = 1e-12) {
    return node_mask(psi.density(), eps_rel);
}

} // namespace qwb
