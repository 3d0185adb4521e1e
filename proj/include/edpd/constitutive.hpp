#pragma once

#include <span>
#include <vector>

#include "edpd/dislocation.hpp"
#include "edpd/grid.hpp"
#include "edpd/material.hpp"
#include "edpd/neighbors.hpp"
#include "edpd/vec.hpp"

namespace edpd {

/// Deformed bond vector with the Burgers jump removed for crossing bonds.
inline Vec3 embedded_deformed_bond(const Vec3& xi, const Vec3& u_a, const Vec3& u_b,
                                   const Vec3& correction) {
    return xi + u_b - u_a - correction;
}

/// e' = |Y'| - |xi|. Faults on a bond collapsed to zero length.
double embedded_extension(const Vec3& y_prime, double xi_norm);

/// Per-node state of one force evaluation. dev_coupling is the 2D coupling
/// scalar (omega e'^d) . x; it vanishes identically in 3D and is kept zero.
struct StateField {
    std::vector<double> dilatation;
    std::vector<double> dev_coupling;

    void resize(std::size_t n) {
        dilatation.assign(n, 0.0);
        dev_coupling.assign(n, 0.0);
    }
};

/// Pass 1: dilatation (and the 2D deviatoric coupling sum) for every node.
void compute_states(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                    std::span<const Vec3> u, StateField& states);

/// Scalar force state for one bond given the endpoint's node state.
double scalar_force_state(const MaterialModel& mat, double weighted_volume, double theta,
                          double dev_coupling, double omega, double xi_norm, double extension);

/// Pass 2: assembles the force density F = sum f V_eff (+ body force) on every
/// interior node; fictitious entries are zeroed. Requires compute_states().
void compute_force_density(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                           std::span<const Vec3> u, const StateField& states,
                           std::span<Vec3> force);

/// Strain energy density W' at one node.
double strain_energy_density(const NodeSet& nodes, const NeighborList& nl,
                             const MaterialModel& mat, std::span<const Vec3> u,
                             const StateField& states, std::size_t id);

/// Total strain energy over interior nodes (energy per unit thickness in 2D).
double total_strain_energy(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                           std::span<const Vec3> u, const StateField& states);

/// Symmetrized virial stress per node (interior nodes only; fictitious entries
/// are zero).
std::vector<Sym3> virial_stress(const NodeSet& nodes, const NeighborList& nl,
                                const MaterialModel& mat, std::span<const Vec3> u,
                                const StateField& states);

/// Convenience for tests: dilatation of a single node.
double node_dilatation(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                       std::span<const Vec3> u, std::size_t id);

} // namespace edpd
