/*
 * trajectory.hpp — many-step evolution with snapshot recording.
 *
 * evolve() advances an initial state to t_final with a fixed dt, keeping
 * every stride-th state (plus the initial one).  The recorded snapshot
 * spacing snapshot_dt = stride·dt is what the finite-difference residual
 * checks downstream differentiate against, so it is stored explicitly.
 * Norm drift max_t |‖ψ(t)‖² − ‖ψ(0)‖²| is tracked over every step — for
 * the unitary equations it stays at rounding level, for the non-Hermitian
 * fractal equation it is a physical diagnostic.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field_io.hpp"
#include "potential.hpp"
#include "solver_params.hpp"
#include "spectral.hpp"
#include "steppers.hpp"

namespace qwb {

enum class Equation { linear, log_nlse, fractal };

inline const char *equation_name(Equation e) {
    switch (e) {
    case Equation::linear:   return "linear";
    case Equation::log_nlse: return "log_nlse";
    case Equation::fractal:  return "fractal";
    }
    return "?";
}

inline Equation equation_from_name(const std::string &s) {
    if (s == "linear")   return Equation::linear;
    if (s == "log_nlse") return Equation::log_nlse;
    if (s == "fractal")  return Equation::fractal;
    throw ConfigError("unknown equation '" + s + "'");
}

struct Trajectory {
    std::vector<WaveField> snapshots;
    SolverParams params;
    PotentialSpec potential;
    Equation equation = Equation::linear;
    double snapshot_dt = 0.0; // spacing between recorded snapshots
    double norm_drift = 0.0;  // max |‖ψ‖²(t) − ‖ψ‖²(0)| over all steps

    const WaveField &initial() const { return snapshots.front(); }
    const WaveField &final() const { return snapshots.back(); }
    std::size_t size() const { return snapshots.size(); }
};

// Advance psi0 by n_steps·dt, recording every stride-th state.
// n_steps must be a multiple of stride so the last state is recorded.
inline Trajectory evolve(const WaveField &psi0, const PotentialSpec &V,
                         const SolverParams &p, Equation eq,
                         std::size_t n_steps, std::size_t stride = 1) {
    if (stride == 0) throw ConfigError("evolve: stride must be positive");
    if (n_steps % stride != 0)
        throw ConfigError("evolve: n_steps must be a multiple of stride");

    Trajectory traj;
    traj.params = p;
    traj.potential = V;
    traj.equation = eq;
    traj.snapshot_dt = p.dt * static_cast<double>(stride);
    traj.snapshots.reserve(n_steps / stride + 1);
    traj.snapshots.push_back(psi0);

    const double norm0 = norm_squared(psi0);
    WaveField psi = psi0;
    switch (eq) {
    case Equation::linear: {
        // scheme selects the integrator here: Strang by default, the
        // implicit oracle when crank_nicolson is requested explicitly
        if (p.scheme == Scheme::crank_nicolson) {
            CrankNicolsonStepper stepper(psi0.grid, V, p);
            for (std::size_t s = 1; s <= n_steps; ++s) {
                psi = stepper.step(psi);
                traj.norm_drift = std::max(traj.norm_drift,
                                           std::abs(norm_squared(psi) - norm0));
                if (s % stride == 0) traj.snapshots.push_back(psi);
            }
            break;
        }
        LinearStrangStepper stepper(psi0.grid, V, p);
        for (std::size_t s = 1; s <= n_steps; ++s) {
            psi = stepper.step(psi);
            traj.norm_drift =
                std::max(traj.norm_drift, std::abs(norm_squared(psi) - norm0));
            if (s % stride == 0) traj.snapshots.push_back(psi);
        }
        break;
    }
    case Equation::log_nlse: {
        LogStrangStepper stepper(psi0.grid, V, p);
        for (std::size_t s = 1; s <= n_steps; ++s) {
            psi = stepper.step(psi);
            traj.norm_drift =
                std::max(traj.norm_drift, std::abs(norm_squared(psi) - norm0));
            if (s % stride == 0) traj.snapshots.push_back(psi);
        }
        break;
    }
    case Equation::fractal: {
        FractalRk4Stepper stepper(psi0.grid, V, p);
        for (std::size_t s = 1; s <= n_steps; ++s) {
            psi = stepper.step(psi);
            traj.norm_drift =
                std::max(traj.norm_drift, std::abs(norm_squared(psi) - norm0));
            if (s % stride == 0) traj.snapshots.push_back(psi);
        }
        break;
    }
    }
    return traj;
}

// Write snapshots as snapshot_0000.csv … plus a small JSON manifest with the
// run parameters.  Returns the number of files written (snapshots + 1).
inline std::size_t save_trajectory(const Trajectory &traj,
                                   const std::filesystem::path &dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", i);
        names.emplace_back(buf);
        write_csv(traj.snapshots[i], dir / names.back());
    }
    json manifest;
    manifest["equation"] = equation_name(traj.equation);
    manifest["dt"] = traj.params.dt;
    manifest["scheme"] = scheme_name(traj.params.scheme);
    manifest["snapshot_dt"] = traj.snapshot_dt;
    manifest["norm_drift"] = traj.norm_drift;
    manifest["n_snapshots"] = traj.snapshots.size();
    manifest["grid"] = to_json(traj.initial().grid);
    manifest["potential"] = traj.potential.kind_name();
    manifest["snapshots"] = names;
    std::ofstream out(dir / "trajectory.json");
    if (!out) throw ConfigError("save_trajectory: cannot open manifest");
    out << manifest.dump(2) << "\n";
    return traj.snapshots.size() + 1;
}

} // namespace qwb
