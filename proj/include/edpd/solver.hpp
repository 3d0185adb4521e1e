#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "edpd/constitutive.hpp"
#include "edpd/grid.hpp"
#include "edpd/material.hpp"
#include "edpd/neighbors.hpp"

namespace edpd {

struct SolverParams {
    int n_min = 5;
    double gamma0 = 0.1;
    double f_gamma = 0.99;
    double f_dec = 0.5;
    double f_inc = 1.1;

    double dt = 0.0;          // 0: use stable_timestep()
    double dt_max = 0.0;      // 0: dt_max_factor * stable step
    double dt_max_factor = 1.0; // runaway observed beyond ~1.5x the CFL estimate
    double safety = 0.9;

    double tol_rel = 1e-6;    // relative to residual_scale
    double tol_abs = 0.0;     // absolute floor (N/m^3)
    double residual_scale = 0.0; // 0: initial residual of the run
    long max_iterations = 500000;

    std::ostream* log = nullptr; // CSV progress stream
    int log_every = 50;
};

struct SolverState {
    std::vector<Vec3> u, v, a, force;
    StateField states;
    double dt = 0.0;
    double gamma = 0.0;
    long iterations = 0;
    double residual = 0.0;
    double residual0 = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

using BoundaryField = std::function<Vec3(const Vec3&)>;

/// CFL-style stable step: min over nodes of safety*sqrt(2 rho / sum C V_eff)
/// with C the linearized bond stiffness of the material.
double stable_timestep(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                       double safety = 0.9);

/// Writes the prescribed displacement onto every fictitious node and zeroes
/// its velocity and acceleration. Interior nodes are untouched.
void apply_boundary(const NodeSet& nodes, SolverState& state, const BoundaryField& bc);

/// Damped-dynamics static solve: velocity Verlet with FIRE adaptive damping.
/// Terminates when the max-norm of the interior force density drops below
/// max(tol_rel * residual_scale, tol_abs), or faults in max_iterations.
SolverState relax(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                  const SolverParams& params, const BoundaryField& bc,
                  std::span<const Vec3> u_init = {});

} // namespace edpd
