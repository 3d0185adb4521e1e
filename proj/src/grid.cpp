#include "edpd/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace edpd {

double BoxSpec::spacing() const {
    return edge_lengths.x / cells[0];
}

void BoxSpec::validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("box: dim must be 2 or 3");
    for (int a = 0; a < dim; ++a) {
        if (edge_lengths[a] <= 0.0) throw std::invalid_argument("box: edge lengths must be positive");
        if (cells[a] < 2) throw std::invalid_argument("box: need at least 2 cells per axis");
    }
    const double dx = spacing();
    for (int a = 1; a < dim; ++a) {
        const double dxa = edge_lengths[a] / cells[a];
        if (std::abs(dxa - dx) > 1e-12 * dx)
            throw std::invalid_argument("box: grid spacing differs across axes");
    }
}

std::size_t NodeSet::interior_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(box_n[a]);
    return n;
}

double NodeSet::nominal_volume() const {
    return dim == 2 ? dx * dx : dx * dx * dx;
}

NodeSet build_grid(const BoxSpec& box, double horizon) {
    box.validate();
    const double dx = box.spacing();
    if (!(horizon > dx)) throw std::invalid_argument("build_grid: horizon must exceed grid spacing");

    NodeSet ns;
    ns.dim = box.dim;
    ns.dx = dx;
    ns.horizon = horizon;
    ns.layer = static_cast<int>(std::ceil(horizon / dx - 1e-12));

    for (int a = 0; a < 3; ++a) {
        if (a < box.dim) {
            ns.box_n[a] = box.cells[a];
            ns.pad_n[a] = box.cells[a] + 2 * ns.layer;
        } else {
            ns.box_n[a] = 1;
            ns.pad_n[a] = 1;
        }
    }

    // Padded node (0,0,0) sits layer cells below the box's first cell center.
    ns.origin = Vec3{box.lower.x + (0.5 - ns.layer) * dx,
                     box.lower.y + (0.5 - ns.layer) * dx,
                     box.dim == 3 ? box.lower.z + (0.5 - ns.layer) * dx : 0.0};

    const std::size_t total = static_cast<std::size_t>(ns.pad_n[0]) * ns.pad_n[1] * ns.pad_n[2];
    ns.positions.resize(total);
    ns.roles.resize(total);

    std::size_t id = 0;
    for (int k = 0; k < ns.pad_n[2]; ++k)
        for (int j = 0; j < ns.pad_n[1]; ++j)
            for (int i = 0; i < ns.pad_n[0]; ++i, ++id) {
                ns.positions[id] = Vec3{ns.origin.x + i * dx, ns.origin.y + j * dx,
                                        box.dim == 3 ? ns.origin.z + k * dx : 0.0};
                const bool in_x = i >= ns.layer && i < ns.layer + ns.box_n[0];
                const bool in_y = j >= ns.layer && j < ns.layer + ns.box_n[1];
                const bool in_z = box.dim == 2 || (k >= ns.layer && k < ns.layer + ns.box_n[2]);
                ns.roles[id] = (in_x && in_y && in_z) ? NodeRole::interior : NodeRole::fictitious;
            }
    return ns;
}

} // namespace edpd
