#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "edpd/dislocation.hpp"
#include "edpd/material.hpp"
#include "edpd/vec.hpp"

namespace edpd {

/// Classical-elasticity reference field. Evaluations on the singular set (the
/// dislocation core/line) fault with std::domain_error.
struct ElasticField {
    std::function<Vec3(const Vec3&)> displacement;
    std::function<Sym3(const Vec3&)> stress;
};

/// Plane-strain edge dislocation in the canonical frame: core on the z axis,
/// Burgers (b,0,0), cut along the negative x axis, jump u(y=0+) - u(y=0-) = b
/// for x < 0.
ElasticField edge_fields(double b, double nu, double mu);

/// Screw dislocation along the z axis with Burgers (0,0,b) and cut along the
/// negative x axis.
ElasticField screw_fields(double b, double mu);

struct LoopQuadrature {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
};

/// Circular glide loop of radius R in the z=0 plane, centered at the origin,
/// normal +z, Burgers (b,0,0). Displacement from the solid-angle plus
/// line-integral form, stress from the analytically differentiated kernel;
/// both integrals are evaluated adaptively to the requested tolerance.
/// Faults within 1e-3 R of the loop line.
ElasticField loop_fields(double b, double radius, double nu, double mu,
                         LoopQuadrature quad = {});

/// Signed solid angle of the disc (radius R, z=0 plane, normal +z) at p,
/// positive below the disc: jumps by -4pi crossing upward through it.
double disc_solid_angle(const Vec3& p, double radius, double rel_tol = 1e-12);

/// Oracle field of one dislocation in its configured position/orientation.
/// Half-plane cuts map to the edge solution, rectangles to the screw solution
/// (Burgers must be parallel to the line), discs to the loop solution.
ElasticField oracle_for(const DislocationSpec& disl, const MaterialModel& mat,
                        LoopQuadrature quad = {});

/// Superposition of the single-dislocation oracles.
ElasticField superposed_oracle(std::span<const DislocationSpec> dislocations,
                               const MaterialModel& mat, LoopQuadrature quad = {});

/// Peach-Koehler force per unit line: (sigma . b) x xi.
Vec3 pk_force(const Sym3& sigma, const Vec3& burgers, const Vec3& line_dir);

/// Second-order central-difference driving force -dE/dx on uniformly spaced
/// energy samples; returns (position, force) at the interior sample points.
std::vector<std::pair<double, double>> driving_force_eg(std::span<const double> positions,
                                                        std::span<const double> energies);

/// Volume-weighted relative L2 difference between two fields.
double relative_l2_diff(std::span<const Vec3> u_num, std::span<const Vec3> u_ref,
                        std::span<const double> volumes);

} // namespace edpd
