#pragma once

#include <span>
#include <variant>
#include <vector>

#include "edpd/neighbors.hpp"
#include "edpd/vec.hpp"

namespace edpd {

/// Cut ray in the plane: starts at the core point, extends along dir.
struct HalfPlaneCut {
    Vec3 core;
    Vec3 dir; // unit
};

/// Cut rectangle {corner + a*e1 + c*e2, a,c in [0,1]}. The dislocation line is
/// the far edge at corner + e1; e1 points from the outer rim toward the core.
struct RectCut {
    Vec3 corner;
    Vec3 e1;
    Vec3 e2;
};

/// Cut disc; the rim is the dislocation line.
struct DiscCut {
    Vec3 center;
    double radius = 0.0;
};

/// One Volterra dislocation: cut surface, Burgers vector, plane normal and the
/// positive-side sign convention. The displacement jump enforced by the
/// constitutive correction is u(+side) - u(-side) = sign * burgers.
struct DislocationSpec {
    std::variant<HalfPlaneCut, RectCut, DiscCut> cut;
    Vec3 burgers;
    Vec3 normal; // unit
    int sign = 1;

    void validate() const;

    /// A point on the cut surface well away from the core, used by the
    /// harness to compare jump conventions against an oracle field.
    Vec3 reference_point(double max_extent) const;

    static DislocationSpec edge2d(const Vec3& core, const Vec3& cut_dir, const Vec3& burgers);
    static DislocationSpec rect3d(const Vec3& corner, const Vec3& e1, const Vec3& e2,
                                  const Vec3& burgers);
    static DislocationSpec disc3d(const Vec3& center, double radius, const Vec3& normal,
                                  const Vec3& burgers);
};

/// Signed cut-crossing indicator for the segment a -> b: +1 when crossing from
/// the negative to the positive side of the plane (as oriented by normal and
/// the sign flag), -1 the other way, 0 otherwise. A point within plane_tol of
/// the plane counts as positive side; intersections at the core are not
/// crossings. Throws on a degenerate segment.
int crossing_code(const Vec3& a, const Vec3& b, const DislocationSpec& disl,
                  double plane_tol = 0.0);

/// Sum of burgers * crossing_code over all dislocations; the constitutive
/// model subtracts this from the deformed bond vector.
Vec3 bond_correction(const Vec3& a, const Vec3& b, std::span<const DislocationSpec> dislocations,
                     double plane_tol = 0.0);

/// Classifies every bond once and stores the nonzero corrections in the
/// neighbor list's sparse table. Corrections that sum to exactly zero are
/// dropped, so a zero Burgers vector leaves the table empty.
void precompute_crossings(NeighborList& nl, const NodeSet& nodes,
                          std::span<const DislocationSpec> dislocations);

} // namespace edpd
