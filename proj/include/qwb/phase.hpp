/*
 * phase.hpp — continuous phase extraction S = ℏ·arg ψ on the periodic grid.
 *
 * The phase of ψ = R·exp(iS/ℏ) is defined up to 2πℏ·ℤ and may wind around
 * the periodic domain (plane waves).  unwrap_phase returns a continuous
 * branch built by accumulating principal-value increments arg(ψ_{j+1}/ψ_j)
 * along unmasked points, anchored so S at the first unmasked point lies in
 * (−πℏ, πℏ].  Masked points (nodes) get S by linear interpolation across
 * the gap and are flagged.  The net winding number w — S(x₀+L) − S(x₀) =
 * 2πℏ·w — is recorded; when w ≠ 0 the stored branch has its seam at the
 * periodic wrap before the anchor point.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace qwb {

struct UnwrappedPhase {
    RealField S;                    // continuous branch of ℏ·arg ψ
    long winding = 0;               // net phase turns around the domain
    std::vector<bool> interpolated; // true where S was filled across a node
};

// Continuous branch of ℏ·arg ψ along the grid.  Throws AllMasked when no
// point is above the node threshold.
inline UnwrappedPhase unwrap_phase(const WaveField &psi, const NodeMask &mask) {
    psi.require_finite("unwrap_phase");
    const std::size_t n = psi.size();
    if (mask.all_masked()) throw AllMasked("unwrap_phase: no point above threshold");

    // First unmasked point = anchor.
    std::size_t j0 = 0;
    while (mask.masked(j0)) ++j0;

    // Walk forward one full turn, accumulating principal-value increments
    // between consecutive unmasked points (masked gaps contribute the
    // principal increment between their bounding unmasked neighbours).
    std::vector<double> theta(n, 0.0);
    std::vector<bool> interp(n, false);
    const double anchor = std::arg(psi[j0]); // ∈ (−π, π]
    theta[j0] = anchor;

    double acc = anchor;
    std::size_t prev = j0;                 // last unmasked index seen
    std::vector<std::size_t> gap;          // masked indices since prev
    double total_turn = 0.0;               // θ(j0 + n) − θ(j0)

    for (std::size_t step = 1; step <= n; ++step) {
        const std::size_t j = (j0 + step) % n;
        if (step < n && mask.masked(j)) {
            gap.push_back(j);
            continue;
        }
        // j is unmasked (or the anchor again at step == n)
        const double dtheta = std::arg(psi[j] / psi[prev]); // principal value
        if (step == n) {
            total_turn = (acc + dtheta) - anchor;
            // distribute any trailing gap between prev and the anchor seam
            if (!gap.empty()) {
                const double span = static_cast<double>(gap.size() + 1);
                for (std::size_t g = 0; g < gap.size(); ++g) {
                    theta[gap[g]] =
                        acc + dtheta * static_cast<double>(g + 1) / span;
                    interp[gap[g]] = true;
                }
            }
            break;
        }
        if (!gap.empty()) {
            // linear interpolation of θ across the masked gap
            const double span = static_cast<double>(gap.size() + 1);
            for (std::size_t g = 0; g < gap.size(); ++g) {
                theta[gap[g]] = acc + dtheta * static_cast<double>(g + 1) / span;
                interp[gap[g]] = true;
            }
            gap.clear();
        }
        acc += dtheta;
        theta[j] = acc;
        prev = j;
    }

    const long winding = std::lround(total_turn / (2.0 * M_PI));

    RealField S(psi.grid, 0.0, psi.time);
    for (std::size_t j = 0; j < n; ++j) S[j] = psi.grid.hbar * theta[j];
    return UnwrappedPhase{std::move(S), winding, std::move(interp)};
}

// ── Temporal branch alignment ─────────────────────────────────────────────────
// unwrap_phase anchors each snapshot independently, so a time series of S
// fields may hop 2πℏ branches between snapshots.  Align the series so S is
// continuous in time at a reference point (first index unmasked in all
// snapshots given, else index 0), which makes ∂_t S well defined.
inline void align_phase_series(std::vector<RealField> &series,
                               std::size_t ref = 0) {
    if (series.size() < 2) return;
    const double hbar = series.front().grid.hbar;
    const double two_pi_hbar = 2.0 * M_PI * hbar;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double jump = series[i][ref] - series[i - 1][ref];
        const double shift = two_pi_hbar * std::round(jump / two_pi_hbar);
        if (shift != 0.0)
            for (double &v : series[i].values) v -= shift;
    }
}

} // namespace qwb
