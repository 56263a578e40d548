/*
 * fft.hpp — radix-2 iterative Cooley–Tukey transform for power-of-two grids.
 *
 * Conventions (matching the continuum Fourier pair on a periodic box):
 *   forward : X_k = Σ_j x_j · exp(−2πi·jk/n)
 *   inverse : x_j = (1/n) Σ_k X_k · exp(+2πi·jk/n)
 *
 * The grid contract guarantees n is a power of two ≥ 16, so no general-n
 * machinery is needed.  Twiddle factors are computed from std::polar per
 * size and cached thread-locally: results are bit-identical run to run,
 * which the reproducibility contract relies on.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace qwb {

namespace detail {

// Half-size twiddle table w_k = exp(−2πi·k/n), k = 0..n/2−1, cached per n.
inline const std::vector<std::complex<double>> &twiddles(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::vector<std::complex<double>>>
        cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        w[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) /
                                   static_cast<double>(n));
    return cache.emplace(n, std::move(w)).first->second;
}

// In-place bit-reversal permutation.
inline void bit_reverse(std::vector<std::complex<double>> &a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

// Core in-place transform; invert selects the exponent sign (+ for inverse).
inline void fft_inplace(std::vector<std::complex<double>> &a, bool invert) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");
    bit_reverse(a);
    const auto &w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len; // twiddle step for this stage
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> tw = w[k * stride];
                if (invert) tw = std::conj(tw);
                const std::complex<double> u = a[i + k];
                const std::complex<double> t = a[i + k + len / 2] * tw;
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
            }
        }
    }
    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto &v : a) v *= inv_n;
    }
}

} // namespace detail

// Forward discrete Fourier transform (no normalization).
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a) {
    detail::fft_inplace(a, false);
    return a;
}

// Inverse discrete Fourier transform (1/n normalization).
inline std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> a) {
    detail::fft_inplace(a, true);
    return a;
}

} // namespace qwb
