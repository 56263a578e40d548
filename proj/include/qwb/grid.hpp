/*
 * grid.hpp — uniform periodic 1-D lattice carrying the physical constants.
 *
 * Points are x_j = x0 + j·dx, j = 0..n−1, dx = L/n, with periodic wrap
 * x_n ≡ x_0.  The grid owns ℏ and m so that both the ℏ-explicit and the
 * natural-unit (ℏ = m = 1) presentations run from one code path; the osmotic
 * diffusion coefficient D = ℏ/2m is derived here.
 *
 * Invariants (checked at construction):
 *   - n is a power of two and n ≥ 16   (spectral-transform friendly)
 *   - length > 0, hbar > 0, mass > 0
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwb {

struct Grid {
    std::size_t n = 0;   // point count, power of two, ≥ 16
    double x0 = 0.0;     // left endpoint (length units)
    double length = 0.0; // domain extent L (length units)
    double hbar = 1.0;   // ℏ > 0 (action units)
    double mass = 1.0;   // m > 0 (mass units)

    Grid() = default;

    Grid(std::size_t n_, double x0_, double length_, double hbar_ = 1.0,
         double mass_ = 1.0)
        : n(n_), x0(x0_), length(length_), hbar(hbar_), mass(mass_) {
        if (n < 16 || (n & (n - 1)) != 0)
            throw std::invalid_argument(
                "Grid: n must be a power of two and >= 16, got " + std::to_string(n));
        if (!(length > 0.0))
            throw std::invalid_argument("Grid: length must be > 0");
        if (!(hbar > 0.0))
            throw std::invalid_argument("Grid: hbar must be > 0");
        if (!(mass > 0.0))
            throw std::invalid_argument("Grid: mass must be > 0");
    }

    double dx() const { return length / static_cast<double>(n); }

    // j-th lattice point x_j = x0 + j·dx
    double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx(); }

    std::vector<double> points() const {
        std::vector<double> xs(n);
        for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
        return xs;
    }

    // Angular wavenumber of Fourier mode j in FFT layout:
    //   k_j = 2π·j/L for j < n/2,  k_j = 2π·(j−n)/L for j ≥ n/2.
    double wavenumber(std::size_t j) const {
        const double two_pi_over_L = 2.0 * M_PI / length;
        const auto half = n / 2;
        const double idx = (j < half) ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n);
        return two_pi_over_L * idx;
    }

    // Largest resolved |k| (the Nyquist mode k = π·n/L = π/dx).
    double k_max() const { return M_PI / dx(); }

    // Osmotic diffusion coefficient D = ℏ/2m.
    double diffusion() const { return hbar / (2.0 * mass); }

    // Wrap a coordinate into the periodic box [x0, x0 + L).
    double wrap(double x_val) const {
        const double rel = std::fmod(x_val - x0, length);
        return x0 + (rel < 0.0 ? rel + length : rel);
    }

    bool operator==(const Grid &o) const {
        return n == o.n && x0 == o.x0 && length == o.length && hbar == o.hbar &&
               mass == o.mass;
    }
};

} // namespace qwb
