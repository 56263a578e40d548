/*
 * spectral.hpp — spectral derivatives, quadrature, and the small analysis
 * helpers (norms, overlaps, moments) every diagnostic builds on.
 *
 *   spectral_derivative(f, order) : ∂f or ∂²f computed in Fourier space;
 *                                   exact for band-limited periodic fields
 *   finite_difference_derivative  : 2nd-order central-difference oracle,
 *                                   an independent check, never the
 *                                   production path
 *   quadrature(f)                 : periodic trapezoid rule dx·Σ f_j
 *
 * Convention: for order 1 the Nyquist mode is zeroed (its derivative is
 * pure imaginary and unrepresentable on the real lattice); for order 2 it
 * is kept with eigenvalue −k².
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace qwb {

namespace detail {

inline void check_order(int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("spectral_derivative: order must be 1 or 2");
}

// Multiply spectrum by (ik)^order in place (Nyquist zeroed for order 1).
inline void apply_derivative(std::vector<cplx> &spec, const Grid &g, int order) {
    const std::size_t n = g.n;
    for (std::size_t j = 0; j < n; ++j) {
        const double k = g.wavenumber(j);
        if (order == 1) {
            if (j == n / 2)
                spec[j] = 0.0; // unpaired Nyquist mode
            else
                spec[j] *= cplx(0.0, k);
        } else {
            spec[j] *= -k * k;
        }
    }
}

} // namespace detail

// ── Derivatives ───────────────────────────────────────────────────────────────

inline WaveField spectral_derivative(const WaveField &f, int order) {
    detail::check_order(order);
    f.require_finite("spectral_derivative");
    auto spec = fft(f.values);
    detail::apply_derivative(spec, f.grid, order);
    return WaveField(f.grid, ifft(std::move(spec)), f.time);
}

inline RealField spectral_derivative(const RealField &f, int order) {
    detail::check_order(order);
    f.require_finite("spectral_derivative");
    std::vector<cplx> a(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) a[j] = f[j];
    auto spec = fft(std::move(a));
    detail::apply_derivative(spec, f.grid, order);
    auto back = ifft(std::move(spec));
    RealField out(f.grid, 0.0, f.time);
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = back[j].real();
    return out;
}

// 2nd-order central-difference oracle on the periodic lattice.
inline RealField finite_difference_derivative(const RealField &f, int order) {
    detail::check_order(order);
    f.require_finite("finite_difference_derivative");
    const std::size_t n = f.size();
    const double dx = f.grid.dx();
    RealField out(f.grid, 0.0, f.time);
    for (std::size_t j = 0; j < n; ++j) {
        const double fm = f[(j + n - 1) % n];
        const double fp = f[(j + 1) % n];
        out[j] = (order == 1) ? (fp - fm) / (2.0 * dx)
                              : (fp - 2.0 * f[j] + fm) / (dx * dx);
    }
    return out;
}

// ── Quadrature and norms ─────────────────────────────────────────────────────

// Periodic trapezoid (= rectangle) rule: ∫f dx ≈ dx·Σ f_j.
inline double quadrature(const RealField &f) {
    f.require_finite("quadrature");
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.dx();
}

// ∫|ψ|² dx
inline double norm_squared(const WaveField &psi) {
    psi.require_finite("norm_squared");
    double s = 0.0;
    for (const cplx &v : psi.values) s += std::norm(v);
    return s * psi.grid.dx();
}

// ⟨a|b⟩ = ∫ ā·b dx
inline cplx overlap(const WaveField &a, const WaveField &b) {
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
    return s * a.grid.dx();
}

// L² norm ‖f‖ = (∫f² dx)^{1/2}
inline double l2_norm(const RealField &f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.dx());
}

// Moments of a density: ⟨x⟩, ⟨x²⟩, Var(x)
inline double mean_position(const RealField &rho) {
    double s = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) s += rho.grid.x(j) * rho[j];
    return s * rho.grid.dx();
}

inline double second_moment(const RealField &rho) {
    double s = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        const double x = rho.grid.x(j);
        s += x * x * rho[j];
    }
    return s * rho.grid.dx();
}

inline double variance(const RealField &rho) {
    const double m1 = mean_position(rho);
    return second_moment(rho) - m1 * m1;
}

// Spectral energy ∑ (per-mode power); Parseval partner of quadrature(|f|²):
//   dx·Σ_j |f_j|² = (L/n²)·Σ_k |f̂_k|²
inline double spectral_power(const WaveField &f) {
    auto spec = fft(f.values);
    double s = 0.0;
    for (const cplx &v : spec) s += std::norm(v);
    const double n = static_cast<double>(f.grid.n);
    return s * f.grid.length / (n * n);
}

} // namespace qwb
