/*
 * steppers.hpp — one-step time evolution for the three wave equations plus
 * an implicit oracle.
 *
 *   step_linear        : iℏψ_t = −(ℏ²/2m)ψ″ + Vψ
 *                        Strang split exp(−iVdt/2ℏ)·F⁻¹exp(−iℏk²dt/2m)F·
 *                        exp(−iVdt/2ℏ); local error O(dt³); unitary.
 *   step_log_nlse      : iℏψ_t = −(ℏ²/2m)ψ″ + Vψ − b·log(|ψ|²)ψ
 *                        same splitting with effective potential
 *                        V − b·log(max(|ψ|², floor)); the nonlinearity is a
 *                        real potential, so the step stays norm-conserving.
 *   step_fractal_nlse  : iℏ_c ψ_t = −(ℏ_c α/2m)ψ″ + Uψ + iWψ,
 *                        W = −(ℏ_c β/2m)(ψ′/ψ)², ℏ_c = α+iβ.
 *                        Explicit rk4 on the full right-hand side
 *                          ψ_t = i(α/2m)ψ″ − (β/2m)(ψ′/ψ)²ψ − (i/ℏ_c)Uψ
 *                        (split-step assumes unitarity; this equation is
 *                        non-Hermitian).  The nonlinear term uses ψ′/ψ
 *                        directly — no log branch cuts — and is evaluated
 *                        on unmasked points only.
 *   crank_nicolson_step: (1 + iHdt/2ℏ)ψ⁺ = (1 − iHdt/2ℏ)ψ with spectral H,
 *                        solved by fixed-point iteration with the kinetic
 *                        part inverted exactly in k-space; independent
 *                        implicit oracle for the linear equation.
 *
 * Each stepper validates the scheme stability bound on construction and
 * checks the output for NaN/Inf (NonFinite).
 */
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "potential.hpp"
#include "solver_params.hpp"
#include "spectral.hpp"

namespace qwb {

// ── Linear Strang splitting ───────────────────────────────────────────────────
struct LinearStrangStepper {
    Grid grid;
    SolverParams params;
    std::vector<cplx> half_v; // exp(−i·V·dt/2ℏ)
    std::vector<cplx> kin;    // exp(−i·ℏk²·dt/2m)

    LinearStrangStepper(const Grid &g, const PotentialSpec &V,
                        const SolverParams &p)
        : grid(g), params(p) {
        SolverParams q = p;
        q.scheme = Scheme::split_step_strang; // bound keyed to ℏ
        check_stability(g, q);
        V.values.require_finite("LinearStrangStepper");
        half_v.resize(g.n);
        kin.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            half_v[j] = std::polar(1.0, -V.values[j] * p.dt / (2.0 * g.hbar));
            const double k = g.wavenumber(j);
            kin[j] = std::polar(1.0, -g.hbar * k * k * p.dt / (2.0 * g.mass));
        }
    }

    WaveField step(const WaveField &psi) const {
        psi.require_finite("step_linear (input)");
        std::vector<cplx> v(psi.values);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] *= half_v[j];
        v = fft(std::move(v));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] *= kin[j];
        v = ifft(std::move(v));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] *= half_v[j];
        WaveField out(grid, std::move(v), psi.time + params.dt);
        out.require_finite("step_linear (output)");
        return out;
    }
};

// ── Logarithmic NLSE splitting ────────────────────────────────────────────────
struct LogStrangStepper {
    Grid grid;
    SolverParams params;
    RealField V_table;
    std::vector<cplx> kin;

    LogStrangStepper(const Grid &g, const PotentialSpec &V, const SolverParams &p)
        : grid(g), params(p), V_table(V.values) {
        SolverParams q = p;
        q.scheme = Scheme::split_step_strang;
        check_stability(g, q);
        V_table.require_finite("LogStrangStepper");
        kin.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double k = g.wavenumber(j);
            kin[j] = std::polar(1.0, -g.hbar * k * k * p.dt / (2.0 * g.mass));
        }
    }

    // Half kick with effective potential V − b·log(max(ρ, floor·max ρ)).
    void half_kick(std::vector<cplx> &v) const {
        double rho_max = 0.0;
        for (const cplx &z : v) rho_max = std::max(rho_max, std::norm(z));
        const double floor = params.log_floor * (rho_max > 0.0 ? rho_max : 1.0);
        for (std::size_t j = 0; j < v.size(); ++j) {
            const double rho = std::max(std::norm(v[j]), floor);
            const double veff = V_table[j] - params.b * std::log(rho);
            v[j] *= std::polar(1.0, -veff * params.dt / (2.0 * grid.hbar));
        }
    }

    WaveField step(const WaveField &psi) const {
        psi.require_finite("step_log_nlse (input)");
        std::vector<cplx> v(psi.values);
        half_kick(v);
        v = fft(std::move(v));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] *= kin[j];
        v = ifft(std::move(v));
        half_kick(v);
        WaveField out(grid, std::move(v), psi.time + params.dt);
        out.require_finite("step_log_nlse (output)");
        return out;
    }
};

// ── Fractal NLSE, explicit rk4 on the semi-spectral right-hand side ──────────
struct FractalRk4Stepper {
    Grid grid;
    SolverParams params;
    RealField U_table;
    std::vector<cplx> ik;     // spectral ∂ multiplier (Nyquist zeroed)
    std::vector<double> mk2;  // spectral ∂² multiplier −k²

    FractalRk4Stepper(const Grid &g, const PotentialSpec &U, const SolverParams &p)
        : grid(g), params(p), U_table(U.values) {
        SolverParams q = p;
        q.scheme = Scheme::rk4_semi_spectral; // bound keyed to α
        check_stability(g, q);
        U_table.require_finite("FractalRk4Stepper");
        ik.resize(g.n);
        mk2.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double k = g.wavenumber(j);
            ik[j] = (j == g.n / 2) ? cplx{0.0, 0.0} : cplx{0.0, k};
            mk2[j] = -k * k;
        }
    }

    // Right-hand side ψ_t = i(α/2m)ψ″ − (β/2m)(ψ′/ψ)²ψ − (i/ℏ_c)Uψ.
    std::vector<cplx> rhs(const std::vector<cplx> &v,
                          const std::vector<bool> &masked) const {
        const std::size_t n = v.size();
        auto spec = fft(v);
        std::vector<cplx> d1(n), d2(n);
        for (std::size_t j = 0; j < n; ++j) {
            d1[j] = spec[j] * ik[j];
            d2[j] = spec[j] * mk2[j];
        }
        d1 = ifft(std::move(d1));
        d2 = ifft(std::move(d2));
        const cplx hbar_c{params.alpha, params.beta};
        const cplx i_alpha{0.0, params.alpha / (2.0 * grid.mass)};
        const double beta_2m = params.beta / (2.0 * grid.mass);
        const cplx minus_i_over_h = cplx{0.0, -1.0} / hbar_c;
        std::vector<cplx> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = i_alpha * d2[j] + minus_i_over_h * U_table[j] * v[j];
            if (!masked[j]) {
                const cplx ratio = d1[j] / v[j];
                acc -= beta_2m * ratio * ratio * v[j];
            }
            out[j] = acc;
        }
        return out;
    }

    WaveField step(const WaveField &psi) const {
        psi.require_finite("step_fractal_nlse (input)");
        const std::size_t n = psi.size();

        // node mask from the step's input state; > 1% masked points means
        // the nonlinearity has no trustworthy support
        NodeMask mask = node_mask(psi);
        if (static_cast<double>(mask.masked_count()) >
            0.01 * static_cast<double>(n))
            throw NodeContamination(
                "step_fractal_nlse: > 1% of points below node threshold");
        std::vector<bool> masked(mask.flags.begin(), mask.flags.end());

        const double dt = params.dt;
        const auto &v0 = psi.values;
        auto k1 = rhs(v0, masked);
        std::vector<cplx> tmp(n);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = v0[j] + 0.5 * dt * k1[j];
        auto k2 = rhs(tmp, masked);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = v0[j] + 0.5 * dt * k2[j];
        auto k3 = rhs(tmp, masked);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = v0[j] + dt * k3[j];
        auto k4 = rhs(tmp, masked);

        std::vector<cplx> out(n);
        for (std::size_t j = 0; j < n; ++j)
            out[j] = v0[j] +
                     dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        WaveField result(grid, std::move(out), psi.time + dt);
        result.require_finite("step_fractal_nlse (output)");
        return result;
    }
};

// ── Crank–Nicolson implicit oracle (linear equation only) ────────────────────
struct CrankNicolsonStepper {
    Grid grid;
    SolverParams params;
    RealField V_table;
    std::vector<cplx> numer; // 1 − i·dt·ℏk²/4m
    std::vector<cplx> denom; // 1 + i·dt·ℏk²/4m
    int max_iterations = 200;

    CrankNicolsonStepper(const Grid &g, const PotentialSpec &V,
                         const SolverParams &p)
        : grid(g), params(p), V_table(V.values) {
        SolverParams q = p;
        q.scheme = Scheme::crank_nicolson;
        check_stability(g, q);
        V_table.require_finite("CrankNicolsonStepper");
        numer.resize(g.n);
        denom.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double k = g.wavenumber(j);
            const double theta_half = p.dt * g.hbar * k * k / (4.0 * g.mass);
            numer[j] = cplx{1.0, -theta_half};
            denom[j] = cplx{1.0, theta_half};
        }
    }

    WaveField step(const WaveField &psi) const {
        psi.require_finite("crank_nicolson_step (input)");
        const std::size_t n = psi.size();
        const cplx i_dt_2h{0.0, params.dt / (2.0 * grid.hbar)};

        // rhs = (1 − i·dt/2ℏ·K)ψ − i·dt/2ℏ·Vψ
        auto spec = fft(psi.values);
        for (std::size_t j = 0; j < n; ++j) spec[j] *= numer[j];
        auto rhs = ifft(std::move(spec));
        for (std::size_t j = 0; j < n; ++j)
            rhs[j] -= i_dt_2h * V_table[j] * psi.values[j];

        const double psi_norm = std::sqrt(norm_squared(psi));
        const double tol = 1e-12 * (psi_norm > 0.0 ? psi_norm : 1.0);

        // fixed point: x ← (1 + i·dt/2ℏ·K)⁻¹ (rhs − i·dt/2ℏ·V·x)
        std::vector<cplx> x(psi.values);
        for (int it = 0; it < max_iterations; ++it) {
            std::vector<cplx> b(n);
            for (std::size_t j = 0; j < n; ++j)
                b[j] = rhs[j] - i_dt_2h * V_table[j] * x[j];
            auto bs = fft(std::move(b));
            for (std::size_t j = 0; j < n; ++j) bs[j] /= denom[j];
            auto x_next = ifft(std::move(bs));

            double delta2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) delta2 += std::norm(x_next[j] - x[j]);
            const double delta = std::sqrt(delta2 * grid.dx());
            x = std::move(x_next);
            if (delta < tol) {
                // confirm the linear-system residual, not just the update
                auto xs = fft(x);
                for (std::size_t j = 0; j < n; ++j) xs[j] *= denom[j];
                auto lhs = ifft(std::move(xs));
                double r2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx r = lhs[j] + i_dt_2h * V_table[j] * x[j] - rhs[j];
                    r2 += std::norm(r);
                }
                if (std::sqrt(r2 * grid.dx()) <= 10.0 * tol) {
                    WaveField out(grid, std::move(x), psi.time + params.dt);
                    out.require_finite("crank_nicolson_step (output)");
                    return out;
                }
            }
        }
        throw NoConvergence("crank_nicolson_step: fixed-point iteration cap hit "
                            "(dt·V_max/2hbar must be < 1)");
    }
};

// ── One-step operations (pure-function façade over the steppers) ─────────────

inline WaveField step_linear(const WaveField &psi, const PotentialSpec &V,
                             const SolverParams &p) {
    return LinearStrangStepper(psi.grid, V, p).step(psi);
}

inline WaveField step_log_nlse(const WaveField &psi, const PotentialSpec &V,
                               const SolverParams &p) {
    return LogStrangStepper(psi.grid, V, p).step(psi);
}

inline WaveField step_fractal_nlse(const WaveField &psi, const PotentialSpec &U,
                                   const SolverParams &p) {
    return FractalRk4Stepper(psi.grid, U, p).step(psi);
}

inline WaveField crank_nicolson_step(const WaveField &psi, const PotentialSpec &V,
                                     const SolverParams &p) {
    return CrankNicolsonStepper(psi.grid, V, p).step(psi);
}

} // namespace qwb
