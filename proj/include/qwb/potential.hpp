/*
 * potential.hpp — external potential V(x) sampled on the solver grid.
 *
 * Three kinds:
 *   free      : V ≡ 0
 *   harmonic  : V = ½·m·ω²·x²   (ω stored for closed-form checks)
 *   custom    : arbitrary finite sample table on the grid
 */
#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "spectral.hpp"

namespace qwb {

struct PotentialSpec {
    enum class Kind { free, harmonic, custom };

    Kind kind = Kind::free;
    double omega = 0.0; // harmonic angular frequency (only Kind::harmonic)
    RealField values;   // V sampled on the grid (energy units)
    RealField grad_table;        // analytic ∂V/∂x when supplied with custom()
    bool has_grad_table = false;

    static PotentialSpec free_potential(const Grid &g) {
        PotentialSpec v;
        v.kind = Kind::free;
        v.values = RealField(g, 0.0);
        return v;
    }

    static PotentialSpec harmonic(const Grid &g, double omega) {
        if (!(omega > 0.0))
            throw std::invalid_argument("PotentialSpec::harmonic: omega must be > 0");
        PotentialSpec v;
        v.kind = Kind::harmonic;
        v.omega = omega;
        v.values = RealField(g);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double x = g.x(j);
            v.values[j] = 0.5 * g.mass * omega * omega * x * x;
        }
        return v;
    }

    static PotentialSpec custom(const RealField &table) {
        table.require_finite("PotentialSpec::custom");
        PotentialSpec v;
        v.kind = Kind::custom;
        v.values = table;
        return v;
    }

    // Custom table with a caller-supplied analytic gradient, for confining
    // wells (x⁴ terms and the like) that are not periodic on the box and
    // would ring under the spectral derivative.
    static PotentialSpec custom(const RealField &table, const RealField &grad) {
        PotentialSpec v = custom(table);
        grad.require_finite("PotentialSpec::custom (gradient)");
        if (grad.size() != table.size())
            throw std::invalid_argument(
                "PotentialSpec::custom: gradient table length != values length");
        v.grad_table = grad;
        v.has_grad_table = true;
        return v;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values.values) m = std::max(m, std::abs(v));
        return m;
    }

    // ∂V/∂x on the grid.  Analytic where the kind allows it (the harmonic
    // well is not periodic, so spectral differentiation would ring);
    // custom tables are assumed periodic and smooth and use the spectral
    // derivative.
    RealField gradient() const {
        const Grid &g = values.grid;
        switch (kind) {
        case Kind::free:
            return RealField(g, 0.0, values.time);
        case Kind::harmonic: {
            RealField dv(g, 0.0, values.time);
            for (std::size_t j = 0; j < g.n; ++j)
                dv[j] = g.mass * omega * omega * g.x(j);
            return dv;
        }
        case Kind::custom:
            if (has_grad_table) return grad_table;
            return spectral_derivative(values, 1);
        }
        throw std::logic_error("PotentialSpec::gradient: bad kind");
    }

    const char *kind_name() const {
        switch (kind) {
            case Kind::free: return "free";
            case Kind::harmonic: return "harmonic";
            case Kind::custom: return "custom";
        }
        return "?";
    }
};

} // namespace qwb
