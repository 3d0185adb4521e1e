#include "edpd/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edpd {

double influence_function(double r, double horizon) {
    if (r < 0.0 || horizon <= 0.0) throw std::invalid_argument("influence_function: bad arguments");
    if (r > horizon) return 0.0;
    const double q = r / horizon;
    const double q2 = q * q;
    const double q4 = q2 * q2;
    return 1.0 - 35.0 * q4 + 84.0 * q4 * q - 70.0 * q4 * q2 + 20.0 * q4 * q2 * q;
}

double partial_volume_fraction(double r, double horizon, double dx) {
    if (r <= horizon - 0.5 * dx) return 1.0;
    if (r >= horizon + 0.5 * dx) return 0.0;
    return (horizon + 0.5 * dx - r) / dx;
}

NeighborList build_neighbors(const NodeSet& nodes, double horizon) {
    if (!(horizon > nodes.dx)) throw std::invalid_argument("build_neighbors: horizon must exceed dx");

    NeighborList nl;
    nl.horizon = horizon;
    nl.dx = nodes.dx;
    nl.dim = nodes.dim;

    // Stencil: all lattice offsets strictly inside the ramp's outer knot.
    const double cutoff = horizon + 0.5 * nodes.dx;
    const int reach = static_cast<int>(std::floor(cutoff / nodes.dx));
    const int kreach = nodes.dim == 3 ? reach : 0;
    const double cell_vol = nodes.nominal_volume();
    for (int dk = -kreach; dk <= kreach; ++dk)
        for (int dj = -reach; dj <= reach; ++dj)
            for (int di = -reach; di <= reach; ++di) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                const Vec3 xi{di * nodes.dx, dj * nodes.dx, dk * nodes.dx};
                const double r = norm(xi);
                if (r >= cutoff) continue;
                const double frac = partial_volume_fraction(r, horizon, nodes.dx);
                if (frac <= 0.0) continue;
                StencilEntry e;
                e.di = di;
                e.dj = dj;
                e.dk = dk;
                e.id_offset = (static_cast<std::int64_t>(dk) * nodes.pad_n[1] + dj) * nodes.pad_n[0] + di;
                e.xi = xi;
                e.xi_norm = r;
                e.omega = influence_function(r, horizon);
                e.v_eff = frac * cell_vol;
                nl.stencil.push_back(e);
            }
    std::sort(nl.stencil.begin(), nl.stencil.end(),
              [](const StencilEntry& a, const StencilEntry& b) { return a.id_offset < b.id_offset; });
    nl.reach = reach;

    nl.cross_offset.assign(nodes.size() + 1, 0);

    nl.weighted_volume.assign(nodes.size(), 0.0);
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        double m = 0.0;
        nl.for_each_bond(nodes, id, [&](std::size_t, const StencilEntry& e, const Vec3&) {
            m += e.omega * e.xi_norm * e.xi_norm * e.v_eff;
        });
        nl.weighted_volume[id] = m;
    }
    return nl;
}

} // namespace edpd
