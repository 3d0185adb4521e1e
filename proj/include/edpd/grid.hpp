#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "edpd/vec.hpp"

namespace edpd {

/// Axis-aligned box to be discretized with N cells per axis, nodes at cell
/// centers. The grid spacing must come out identical on every axis.
struct BoxSpec {
    Vec3 lower;
    Vec3 edge_lengths;
    std::array<int, 3> cells{1, 1, 1};
    int dim = 3; // 2 or 3

    double spacing() const;
    void validate() const;
};

enum class NodeRole : std::uint8_t { interior, fictitious };

/// Discretized body: interior nodes at the cell centers of the box plus a
/// fictitious layer (ceil(horizon/dx) cells) wrapped around every face. The
/// padded lattice is a full rectangular grid; node ids are row-major.
struct NodeSet {
    int dim = 3;
    double dx = 0.0;
    double horizon = 0.0;
    int layer = 0;                  // fictitious layer thickness in cells
    std::array<int, 3> pad_n{};     // padded lattice extents
    std::array<int, 3> box_n{};     // interior extents (N per axis)
    Vec3 origin;                    // position of padded node (0,0,0)
    std::vector<Vec3> positions;    // padded lattice, row-major
    std::vector<NodeRole> roles;

    std::size_t size() const { return positions.size(); }
    std::size_t interior_count() const;

    double nominal_volume() const; // dx^dim (unit thickness in 2D)

    bool is_interior(std::size_t id) const { return roles[id] == NodeRole::interior; }

    std::size_t id_of(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * pad_n[1] + j) * pad_n[0] + i;
    }
    std::array<int, 3> coords(std::size_t id) const {
        const int i = static_cast<int>(id % pad_n[0]);
        const int j = static_cast<int>((id / pad_n[0]) % pad_n[1]);
        const int k = static_cast<int>(id / (static_cast<std::size_t>(pad_n[0]) * pad_n[1]));
        return {i, j, k};
    }
};

/// Builds the padded uniform grid. Requires horizon > dx so neighborhoods are
/// nonempty; rejects boxes whose per-axis spacing differs.
NodeSet build_grid(const BoxSpec& box, double horizon);

} // namespace edpd
