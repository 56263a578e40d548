/*
 * test_helpers.hpp — deterministic field generators shared by the suites.
 *
 * Band-limited fields are sums of the first few Fourier modes with
 * mt19937-seeded coefficients: smooth, periodic, and exactly representable
 * by the spectral operators, so derivative/identity checks compare against
 * closed forms without aliasing noise.
 */
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qwb/field.hpp"
#include "qwb/grid.hpp"
#include "qwb/spectral.hpp"

namespace qwb::testing {

// Real band-limited field: Σ_{m=1..modes} a_m cos(2πmx/L + φ_m), |a_m| ≤ amp.
inline RealField random_bandlimited(const Grid &g, int modes, unsigned seed,
                                    double amp = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-amp, amp);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    RealField f(g);
    for (int m = 1; m <= modes; ++m) {
        const double a = coef(rng);
        const double ph = phase(rng);
        const double k = 2.0 * M_PI * m / g.length;
        for (std::size_t j = 0; j < g.n; ++j)
            f[j] += a * std::cos(k * (g.x(j) - g.x0) + ph);
    }
    return f;
}

// Strictly positive normalized density: ρ ∝ exp(band-limited), ∫ρ = 1.
inline RealField random_density(const Grid &g, int modes, unsigned seed,
                                double amp = 0.8) {
    RealField f = random_bandlimited(g, modes, seed, amp);
    RealField rho(g);
    for (std::size_t j = 0; j < g.n; ++j) rho[j] = std::exp(f[j]);
    const double z = quadrature(rho);
    for (auto &v : rho.values) v /= z;
    return rho;
}

// Smooth normalized complex field with genuinely varying phase.  Built as
// exp(a + ib) with band-limited a, b, so it is node-free with zero winding
// and both log|ψ| and arg ψ are themselves band-limited (their spectral
// derivatives are exact, not just well-resolved).
inline WaveField random_wave(const Grid &g, int modes, unsigned seed,
                             double amp = 0.5) {
    RealField a = random_bandlimited(g, modes, seed, amp);
    RealField b = random_bandlimited(g, modes, seed + 1000003u, amp);
    WaveField psi(g);
    for (std::size_t j = 0; j < g.n; ++j)
        psi[j] = std::polar(std::exp(a[j]), b[j]);
    const double nrm = std::sqrt(norm_squared(psi));
    for (auto &v : psi.values) v /= nrm;
    return psi;
}

// Normalized Gaussian packet exp(−(x−c)²/4σ²)·exp(ikx) (position spread σ).
inline WaveField gaussian_packet(const Grid &g, double center, double sigma,
                                 double k = 0.0) {
    WaveField psi(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        const double envelope = std::exp(-(x - center) * (x - center) /
                                         (4.0 * sigma * sigma));
        psi[j] = std::polar(envelope, k * x);
    }
    const double nrm = std::sqrt(norm_squared(psi));
    for (auto &v : psi.values) v /= nrm;
    return psi;
}

} // namespace qwb::testing
