#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edpd/grid.hpp"
#include "edpd/vec.hpp"

namespace edpd {

/// Seleson degree-7 polynomial influence weight; 1 at r=0, 0 at r>=horizon.
double influence_function(double r, double horizon);

/// Linear partial-volume ramp: fraction of a cell volume assigned to a bond of
/// length r. 1 for r <= horizon - dx/2, 0 for r >= horizon + dx/2.
double partial_volume_fraction(double r, double horizon, double dx);

/// One lattice offset of the interaction stencil. Every bond of a uniform grid
/// is an instance of one of these, so geometry, weight and effective volume are
/// stored once per offset instead of once per bond.
struct StencilEntry {
    int di, dj, dk;
    std::int64_t id_offset; // linear index delta on the padded lattice
    Vec3 xi;                // reference bond vector
    double xi_norm;
    double omega;
    double v_eff;           // partial-volume corrected cell volume
};

/// Bond table for the whole node set: shared stencil, per-node weighted
/// volume, and a sparse table of dislocation-crossing corrections filled in by
/// precompute_crossings(). Immutable after construction.
struct NeighborList {
    double horizon = 0.0;
    double dx = 0.0;
    int dim = 3;
    int reach = 0; // max |di|,|dj|,|dk| over the stencil

    std::vector<StencilEntry> stencil;
    std::vector<double> weighted_volume; // m per node

    // Sparse crossing corrections, CSR over nodes. Entries are sorted by
    // stencil index within each node. corr indexes into corrections.
    std::vector<std::uint32_t> cross_offset;
    std::vector<std::uint16_t> cross_stencil;
    std::vector<std::uint16_t> cross_corr;
    std::vector<Vec3> corrections;

    bool node_is_clipped(const NodeSet& nodes, std::size_t id) const {
        const auto c = nodes.coords(id);
        for (int a = 0; a < nodes.dim; ++a)
            if (c[a] < reach || c[a] >= nodes.pad_n[a] - reach) return true;
        return false;
    }

    /// Visits every bond of node id as f(neighbor_id, entry, correction).
    /// Correction is the summed Burgers jump for the directed bond id->nbr
    /// (zero for non-crossing bonds).
    template <class F>
    void for_each_bond(const NodeSet& nodes, std::size_t id, F&& f) const {
        const std::uint32_t cb = cross_offset[id];
        const std::uint32_t ce = cross_offset[id + 1];
        std::uint32_t c = cb;
        if (!node_is_clipped(nodes, id)) {
            for (std::size_t s = 0; s < stencil.size(); ++s) {
                Vec3 corr{};
                if (c < ce && cross_stencil[c] == s) corr = corrections[cross_corr[c++]];
                f(static_cast<std::size_t>(static_cast<std::int64_t>(id) + stencil[s].id_offset),
                  stencil[s], corr);
            }
        } else {
            const auto cc = nodes.coords(id);
            for (std::size_t s = 0; s < stencil.size(); ++s) {
                const auto& e = stencil[s];
                const int i = cc[0] + e.di, j = cc[1] + e.dj, k = cc[2] + e.dk;
                const bool inside = i >= 0 && i < nodes.pad_n[0] && j >= 0 && j < nodes.pad_n[1] &&
                                    k >= 0 && k < nodes.pad_n[2];
                if (c < ce && cross_stencil[c] == s) {
                    if (inside) f(nodes.id_of(i, j, k), e, corrections[cross_corr[c]]);
                    ++c;
                } else if (inside) {
                    f(nodes.id_of(i, j, k), e, Vec3{});
                }
            }
        }
    }
};

/// Links every node pair within horizon + dx/2, assigns ramp-corrected
/// effective volumes and influence weights, and accumulates the per-node
/// weighted volume m = sum(omega |xi|^2 V_eff).
NeighborList build_neighbors(const NodeSet& nodes, double horizon);

} // namespace edpd
