/*
 * info_geometry.hpp — Fisher information, Shannon entropy and its
 * production/balance laws, the exact-uncertainty decomposition of momentum,
 * the fluctuation-strength ansatz, Ehrenfest residuals, and the field-theory
 * vs operator energy functionals.
 *
 * Core quantities for a normalized density ρ on the periodic box:
 *   F  = ∫ ρ·((log ρ)′)² dx = ∫ (ρ′)²/ρ dx     Fisher information (length⁻²)
 *   S  = −∫ ρ·log ρ dx                          Shannon entropy
 *   δX = F^{−1/2}                               Fisher length
 *   u  = D·(log ρ)′,  D = ℏ/2m                  osmotic velocity
 *
 * Identity chain (diffusion-scaled quantum potential q = 2D²(√ρ)″/√ρ, i.e.
 * q = −Q/m in the energy convention the polar decomposition uses):
 *   −∫ q·ρ dx = ½∫ u²·ρ dx = ½D²·F
 *
 * Exact-uncertainty decomposition: with the classical momentum density
 * p_cl = ℏ·Im(ψ′/ψ) (= m·v) and ⟨p²⟩ from the spectral derivative,
 *   Δp_nc² = ⟨p²⟩ − ⟨p_cl²⟩ = (ℏ²/4)·F   ⇒   δX·Δp_nc = ℏ/2
 * with the inequality chain ΔX·Δp ≥ δX·Δp ≥ δX·Δp_nc = ℏ/2, and the
 * Cramér–Rao bound Var(X) ≥ 1/F (equality exactly for Gaussians).
 *
 * Entropy production: dS/dt by central differences across snapshots.
 * For a wave trajectory the balance D·dS/dt = −⟨v·u⟩ holds pointwise in
 * time, bounded by Schwarz as D·|dS/dt| ≤ ⟨v²⟩^{1/2}⟨u²⟩^{1/2}; for pure
 * diffusion (v = −u) it reduces to dS/dt = D·F ≥ 0 with F nonincreasing.
 *
 * Fluctuation ansatz: adding momentum fluctuations of strength
 * (ΔN)² = c·∫ρ|(log ρ)′|² to the classical ensemble Lagrangian reproduces
 * the wave equation exactly when c = ℏ²/4 — so (ΔN)² = (ℏ²/4)·F.
 *
 * Energy functionals: for the logarithmic nonlinearity the field-theory
 * density −(ℏ²/2m)ψ̄ψ″ + Vρ − b·ρ·log ρ + b·ρ integrates to E_FT with
 * E_FT − E_QM = b·∫ρ, while for the complex-ℏ equation (ℏ_c = α+iβ) the
 * functional and operator routes coincide; both are complex-valued there
 * (plane waves give E = ℏ_c²k²/2m), so the report carries complex energies.
 *
 * Numerical policy: (log ρ)′ is always formed as ρ′/ρ with ρ′ spectral —
 * the log ρ table itself develops seam kinks on a periodic box long before
 * ρ does.  Entropy integrands are 0 on masked points (the ρ·log ρ → 0
 * limit); every division by ρ happens on unmasked points only.  Position
 * moments are refused (MomentOverflow) when the density carries visible
 * mass at the box seam, where ⟨x⟩/⟨x²⟩ would wrap.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "madelung.hpp"
#include "potential.hpp"
#include "solver_params.hpp"
#include "spectral.hpp"
#include "trajectory.hpp"

namespace qwb {

// ── report types ──────────────────────────────────────────────────────────────

struct UncertaintyReport {
    double var_x = 0.0;         // Var(X) = ⟨x²⟩ − ⟨x⟩²
    double delta_x = 0.0;       // ΔX = Var(X)^{1/2}
    double fisher = 0.0;        // F
    double fisher_length = 0.0; // δX = F^{−1/2}
    RealField p_cl;             // classical momentum density ℏ·Im(ψ′/ψ)
    double mean_p = 0.0;        // ⟨p⟩ = ∫ρ·p_cl
    double delta_p = 0.0;       // Δp = (⟨p²⟩ − ⟨p⟩²)^{1/2}
    double delta_p_nc = 0.0;    // Δp_nc = (⟨p²⟩ − ⟨p_cl²⟩)^{1/2}
    double product = 0.0;       // δX·Δp_nc (ℏ/2 in exact arithmetic)
};

struct EnergyReport {
    cplx e_qm{0.0, 0.0};     // operator route ⟨ψ|Ĥψ⟩
    cplx e_ft{0.0, 0.0};     // field-theory functional ∫H(ψ, ψ̄)
    double difference = 0.0; // |e_ft − e_qm|
};

// One interior snapshot of an entropy series (endpoints carry no central
// difference and are dropped).
struct EntropyPoint {
    double time = 0.0;
    double entropy = 0.0; // S = −∫ρ log ρ
    double ds_dt = 0.0;   // central difference of the S series
    double fisher = 0.0;  // F(ρ(t))
};

struct EntropyBalancePoint {
    double time = 0.0;
    double entropy = 0.0;
    double ds_dt = 0.0;
    double fisher = 0.0;
    double lhs = 0.0;     // D·dS/dt
    double rhs = 0.0;     // −⟨v·u⟩
    double schwarz = 0.0; // ⟨v²⟩^{1/2}·⟨u²⟩^{1/2}, bounds |lhs|
};

struct EntropyBalanceSeries {
    double d_used = 0.0; // D = ℏ/2m of the trajectory grid
    std::vector<EntropyBalancePoint> rows;
};

struct EhrenfestPoint {
    double time = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double r1 = 0.0; // d⟨x⟩/dt − ⟨p⟩/m
    double r2 = 0.0; // m·d²⟨x⟩/dt² + ⟨V′⟩
};

// The three routes of the quantum-potential/Fisher chain; all equal.
struct FisherIdentityReport {
    double minus_mean_q = 0.0;   // −∫ q·ρ dx, diffusion-scaled q
    double half_mean_u2 = 0.0;   // ½∫ u²·ρ dx
    double half_d2_fisher = 0.0; // ½D²·F
};

// ── helpers ───────────────────────────────────────────────────────────────────

namespace detail {

// Refuse position moments when the density carries mass at the seam cells:
// on the periodic box ⟨x⟩ and ⟨x²⟩ silently wrap there.
inline void require_edge_decay(const RealField &rho, const char *who) {
    const std::size_t n = rho.size();
    const double edge = (rho[0] + rho[n - 1]) * rho.grid.dx();
    if (edge > 1e-10)
        throw MomentOverflow(std::string(who) +
                             ": density mass at the box seam exceeds 1e-10; "
                             "position moments would wrap");
}

} // namespace detail

// ── Fisher information and Shannon entropy ────────────────────────────────────

// F = ∫ρ((log ρ)′)² dx over unmasked points, (log ρ)′ formed as ρ′/ρ.
// The unmasked support must be a single arc (interior node regions split
// it), and masked points may hide at most 1% of the probability mass.
inline double fisher_information(const RealField &rho, const NodeMask &mask) {
    rho.require_finite("fisher_information");
    if (detail::masked_arc_count(mask) >= 2)
        throw NodeContamination(
            "fisher_information: unmasked support is disconnected");
    if (mask.masked_mass(rho) > 0.01)
        throw NodeContamination(
            "fisher_information: masked points hide > 1% probability mass");
    const RealField d1 = spectral_derivative(rho, 1);
    double f = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        if (mask.masked(j)) continue;
        if (!(rho[j] > 0.0))
            throw NodeContamination(
                "fisher_information: nonpositive density on an unmasked point");
        f += d1[j] * d1[j] / rho[j];
    }
    return f * rho.grid.dx();
}

// S = −∫ρ log ρ dx; masked points contribute 0 (the ρ log ρ → 0 limit).
inline double shannon_entropy(const RealField &rho, const NodeMask &mask) {
    rho.require_finite("shannon_entropy");
    double s = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        if (mask.masked(j) || !(rho[j] > 0.0)) continue;
        s -= rho[j] * std::log(rho[j]);
    }
    return s * rho.grid.dx();
}

// ── quantum-potential/Fisher chain ────────────────────────────────────────────

// Diffusion-scaled quantum potential q = 2D²(√ρ)″/√ρ = −Q/m (velocity²
// units).  The chain −∫qρ = ½∫u²ρ = ½D²F is stated in these units; the
// polar decomposition's Q uses the energy convention, hence the −1/m.
inline RealField scaled_quantum_potential(const MadelungFields &mf) {
    const Grid &g = mf.rho.grid;
    RealField q(g, 0.0, mf.rho.time);
    for (std::size_t j = 0; j < g.n; ++j)
        if (!mf.mask.masked(j)) q[j] = -mf.Q[j] / g.mass;
    return q;
}

inline FisherIdentityReport fisher_identity(const MadelungFields &mf) {
    const Grid &g = mf.rho.grid;
    const double dx = g.dx();
    const RealField q = scaled_quantum_potential(mf);
    FisherIdentityReport r;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (mf.mask.masked(j)) continue;
        r.minus_mean_q -= q[j] * mf.rho[j] * dx;
        r.half_mean_u2 += 0.5 * mf.u[j] * mf.u[j] * mf.rho[j] * dx;
    }
    const double D = g.diffusion();
    r.half_d2_fisher = 0.5 * D * D * fisher_information(mf.rho, mf.mask);
    return r;
}

// ── exact uncertainty ─────────────────────────────────────────────────────────

// Decompose the momentum spread of a normalized ψ into the classical part
// p_cl = ℏ·Im(ψ′/ψ) and the nonclassical remainder; the latter is priced
// entirely by the Fisher length: δX·Δp_nc = ℏ/2.
inline UncertaintyReport exact_uncertainty(const WaveField &psi) {
    psi.require_finite("exact_uncertainty");
    const Grid &g = psi.grid;
    const double dx = g.dx();
    const RealField rho = psi.density();
    detail::require_edge_decay(rho, "exact_uncertainty");
    const NodeMask mask = node_mask(rho);

    UncertaintyReport r;
    r.var_x = variance(rho);
    r.delta_x = std::sqrt(std::max(r.var_x, 0.0));
    r.fisher = fisher_information(rho, mask);
    r.fisher_length = r.fisher > 0.0
                          ? 1.0 / std::sqrt(r.fisher)
                          : std::numeric_limits<double>::infinity();

    const WaveField dpsi = spectral_derivative(psi, 1);
    r.p_cl = RealField(g, 0.0, psi.time);
    double mean_p = 0.0, p_cl_sq = 0.0, p_sq = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        p_sq += std::norm(dpsi[j]);
        if (mask.masked(j)) continue;
        const cplx ratio = dpsi[j] / psi[j];
        r.p_cl[j] = g.hbar * ratio.imag();
        mean_p += rho[j] * r.p_cl[j];
        p_cl_sq += rho[j] * r.p_cl[j] * r.p_cl[j];
    }
    mean_p *= dx;
    p_cl_sq *= dx;
    p_sq *= g.hbar * g.hbar * dx; // spectral ⟨p²⟩ = ℏ²∫|ψ′|²

    r.mean_p = mean_p;
    r.delta_p = std::sqrt(std::max(p_sq - mean_p * mean_p, 0.0));
    r.delta_p_nc = std::sqrt(std::max(p_sq - p_cl_sq, 0.0));
    r.product = r.fisher_length * r.delta_p_nc;
    return r;
}

// ── fluctuation-strength ansatz ───────────────────────────────────────────────

// (ΔN)² = c·∫ρ|(log ρ)′|² with the universal constant pinned at c = ℏ²/4 —
// the unique value for which the fluctuation-augmented ensemble Lagrangian
// reproduces the wave equation (equivalently ℏ = 2√c).
inline double mean_from_fluctuation_ansatz(const RealField &rho,
                                           const NodeMask &mask) {
    const double h = rho.grid.hbar;
    return 0.25 * h * h * fisher_information(rho, mask);
}

inline double mean_from_fluctuation_ansatz(const RealField &rho) {
    return mean_from_fluctuation_ansatz(rho, node_mask(rho));
}

// ── entropy production ────────────────────────────────────────────────────────

// Production series for a sequence of densities a fixed dt apart (e.g.
// snapshots of a diffusion): S and F per snapshot, dS/dt by central
// differences, endpoints dropped.  Pure diffusion obeys dS/dt = D_diff·F
// with the caller's diffusion constant.
inline std::vector<EntropyPoint>
entropy_production(const std::vector<RealField> &rho_series, double dt) {
    if (rho_series.size() < 3)
        throw InsufficientSnapshots(
            "entropy_production: need at least 3 densities for a central "
            "difference");
    if (!(dt > 0.0))
        throw ConfigError("entropy_production: dt must be positive");
    const std::size_t m = rho_series.size();
    std::vector<double> entropy(m), fisher(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (rho_series[i].size() != rho_series[0].size())
            throw ConfigError("entropy_production: densities on mixed grids");
        const NodeMask mask = node_mask(rho_series[i]);
        entropy[i] = shannon_entropy(rho_series[i], mask);
        fisher[i] = fisher_information(rho_series[i], mask);
    }
    std::vector<EntropyPoint> rows;
    rows.reserve(m - 2);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        EntropyPoint p;
        p.time = rho_series[i].time;
        p.entropy = entropy[i];
        p.ds_dt = (entropy[i + 1] - entropy[i - 1]) / (2.0 * dt);
        p.fisher = fisher[i];
        rows.push_back(p);
    }
    return rows;
}

// Balance series along a wave trajectory: D·dS/dt = −⟨v·u⟩ row by row,
// with the Schwarz bound ⟨v²⟩^{1/2}⟨u²⟩^{1/2} recorded alongside.
inline EntropyBalanceSeries entropy_production(const Trajectory &traj) {
    if (traj.size() < 3)
        throw InsufficientSnapshots(
            "entropy_production: need at least 3 snapshots for a central "
            "difference");
    const std::size_t m = traj.size();
    const Grid &g = traj.initial().grid;
    const double dx = g.dx();
    const double D = g.diffusion();

    std::vector<double> entropy(m), fisher(m), vu(m), v2(m), u2(m);
    for (std::size_t i = 0; i < m; ++i) {
        const MadelungFields mf = decompose(traj.snapshots[i]);
        entropy[i] = shannon_entropy(mf.rho, mf.mask);
        fisher[i] = fisher_information(mf.rho, mf.mask);
        double svu = 0.0, sv2 = 0.0, su2 = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            if (mf.mask.masked(j)) continue;
            svu += mf.rho[j] * mf.v[j] * mf.u[j];
            sv2 += mf.rho[j] * mf.v[j] * mf.v[j];
            su2 += mf.rho[j] * mf.u[j] * mf.u[j];
        }
        vu[i] = svu * dx;
        v2[i] = sv2 * dx;
        u2[i] = su2 * dx;
    }

    EntropyBalanceSeries series;
    series.d_used = D;
    series.rows.reserve(m - 2);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        EntropyBalancePoint p;
        p.time = traj.snapshots[i].time;
        p.entropy = entropy[i];
        p.ds_dt = (entropy[i + 1] - entropy[i - 1]) / (2.0 * traj.snapshot_dt);
        p.fisher = fisher[i];
        p.lhs = D * p.ds_dt;
        p.rhs = -vu[i];
        p.schwarz = std::sqrt(std::max(v2[i], 0.0) * std::max(u2[i], 0.0));
        series.rows.push_back(p);
    }
    return series;
}

// ── Ehrenfest residuals ───────────────────────────────────────────────────────

// r1 = d⟨x⟩/dt − ⟨p⟩/m and r2 = m·d²⟨x⟩/dt² + ⟨V′⟩ at interior snapshots
// (central differences, endpoints dropped).  Both vanish to O(Δt²) for the
// linear equation; the residuals are not defined for the nonlinear ones.
inline std::vector<EhrenfestPoint>
ehrenfest_residuals(const Trajectory &traj, const PotentialSpec &V) {
    if (traj.equation != Equation::linear)
        throw ConfigError(
            "ehrenfest_residuals: classical-moment laws hold for the linear "
            "equation only");
    if (traj.size() < 5)
        throw InsufficientSnapshots(
            "ehrenfest_residuals: need at least 5 snapshots");
    const std::size_t m = traj.size();
    const Grid &g = traj.initial().grid;
    const double dt = traj.snapshot_dt;
    const RealField dV = V.gradient();

    std::vector<double> mean_x(m), mean_p(m), mean_dv(m);
    for (std::size_t i = 0; i < m; ++i) {
        const RealField rho = traj.snapshots[i].density();
        detail::require_edge_decay(rho, "ehrenfest_residuals");
        mean_x[i] = mean_position(rho);
        const WaveField dpsi = spectral_derivative(traj.snapshots[i], 1);
        mean_p[i] = g.hbar * overlap(traj.snapshots[i], dpsi).imag();
        double s = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) s += rho[j] * dV[j];
        mean_dv[i] = s * g.dx();
    }

    std::vector<EhrenfestPoint> rows;
    rows.reserve(m - 2);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        EhrenfestPoint p;
        p.time = traj.snapshots[i].time;
        p.mean_x = mean_x[i];
        p.mean_p = mean_p[i];
        p.r1 = (mean_x[i + 1] - mean_x[i - 1]) / (2.0 * dt) - mean_p[i] / g.mass;
        p.r2 = g.mass * (mean_x[i + 1] - 2.0 * mean_x[i] + mean_x[i - 1]) /
                   (dt * dt) +
               mean_dv[i];
        rows.push_back(p);
    }
    return rows;
}

// ── energy functionals ────────────────────────────────────────────────────────

// Field-theory functional vs operator expectation.  Dispatch follows the
// couplings in params: β ≠ 0 selects the complex-ℏ equation (ℏ_c = α+iβ),
// b ≠ 0 the logarithmic one, neither the linear one; setting both is
// contradictory.  For the logarithmic branch the two routes differ by
// exactly b·∫ρ (the homogeneity-breaking +b·ρ term lives only in the
// functional); for the complex-ℏ branch they coincide, and the kinetic
// term of the operator route is summed in k-space so the agreement is a
// genuine two-route check rather than the same quadrature twice.
inline EnergyReport energy_functionals(const WaveField &psi,
                                       const PotentialSpec &V,
                                       const SolverParams &p) {
    psi.require_finite("energy_functionals");
    V.values.require_finite("energy_functionals");
    if (p.b != 0.0 && p.beta != 0.0)
        throw ConfigError(
            "energy_functionals: set either the logarithmic coupling b or the "
            "complex part beta, not both");
    const Grid &g = psi.grid;
    const double dx = g.dx();
    const RealField rho = psi.density();
    const WaveField dpsi = spectral_derivative(psi, 1);
    const WaveField d2psi = spectral_derivative(psi, 2);

    EnergyReport r;
    if (p.beta != 0.0) {
        // ℏ_c = α+iβ: density −(ℏ_c α/2m)ψ̄ψ″ + Uρ − i(ℏ_c β/2m)ρ(ψ′/ψ)².
        const NodeMask mask = node_mask(rho);
        if (static_cast<double>(mask.masked_count()) >
            0.01 * static_cast<double>(g.n))
            throw NodeContamination(
                "energy_functionals: > 1% of points below node threshold");
        const cplx hbar_c{p.alpha, p.beta};
        const cplx kin_c = -hbar_c * p.alpha / (2.0 * g.mass);
        const cplx w_c = cplx{0.0, -1.0} * hbar_c * p.beta / (2.0 * g.mass);

        cplx ft{0.0, 0.0}, w_term{0.0, 0.0};
        for (std::size_t j = 0; j < g.n; ++j) {
            ft += kin_c * std::conj(psi[j]) * d2psi[j] + V.values[j] * rho[j];
            if (mask.masked(j)) continue;
            const cplx ratio = dpsi[j] / psi[j];
            w_term += w_c * rho[j] * ratio * ratio;
        }
        r.e_ft = (ft + w_term) * dx;

        // operator route: kinetic summed in k-space (Parseval partner)
        double k2_power = 0.0;
        {
            auto spec = fft(psi.values);
            for (std::size_t j = 0; j < g.n; ++j) {
                const double k = g.wavenumber(j);
                k2_power += k * k * std::norm(spec[j]);
            }
            const double n = static_cast<double>(g.n);
            k2_power *= g.length / (n * n); // = −∫ψ̄ψ″ dx
        }
        double pot = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) pot += V.values[j] * rho[j];
        r.e_qm = kin_c * (-k2_power) + pot * dx + w_term * dx;
    } else {
        // logarithmic/linear: the b-term logarithm uses the same relative
        // floor as the time stepper, so the functional matches the dynamics
        double rho_max = 0.0;
        for (double v : rho.values) rho_max = std::max(rho_max, v);
        const double floor = p.log_floor * (rho_max > 0.0 ? rho_max : 1.0);
        if (p.b != 0.0 &&
            detail::masked_arc_count(node_mask(rho)) >= 2)
            throw NodeContamination(
                "energy_functionals: interior node regions under a "
                "logarithmic coupling");

        double kin_qm = 0.0, pot = 0.0, blog = 0.0, mass_term = 0.0;
        cplx kin_ft{0.0, 0.0};
        for (std::size_t j = 0; j < g.n; ++j) {
            kin_qm += std::norm(dpsi[j]);
            kin_ft += std::conj(psi[j]) * d2psi[j];
            pot += V.values[j] * rho[j];
            blog += rho[j] * std::log(std::max(rho[j], floor));
            mass_term += rho[j];
        }
        const double h2_2m = g.hbar * g.hbar / (2.0 * g.mass);
        r.e_qm = cplx{h2_2m * kin_qm * dx + pot * dx - p.b * blog * dx, 0.0};
        r.e_ft = -h2_2m * kin_ft * dx + pot * dx - p.b * blog * dx +
                 p.b * mass_term * dx;
    }
    r.difference = std::abs(r.e_ft - r.e_qm);
    return r;
}

} // namespace qwb
