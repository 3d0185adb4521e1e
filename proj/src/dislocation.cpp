#include "edpd/dislocation.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace edpd {

namespace {

void check_unit(const Vec3& v, const char* what) {
    if (std::abs(norm(v) - 1.0) > 1e-9) throw std::invalid_argument(std::string(what) + " must be a unit vector");
}

Vec3 cut_anchor(const DislocationSpec& d) {
    if (const auto* hp = std::get_if<HalfPlaneCut>(&d.cut)) return hp->core;
    if (const auto* rc = std::get_if<RectCut>(&d.cut)) return rc->corner;
    return std::get<DiscCut>(d.cut).center;
}

} // namespace

void DislocationSpec::validate() const {
    check_unit(normal, "dislocation: plane normal");
    if (std::abs(dot(burgers, normal)) > 1e-12 * norm(burgers))
        throw std::invalid_argument("dislocation: Burgers vector must be tangent to the cut plane");
    if (sign != 1 && sign != -1) throw std::invalid_argument("dislocation: sign flag must be +-1");

    if (const auto* hp = std::get_if<HalfPlaneCut>(&cut)) {
        check_unit(hp->dir, "dislocation: cut direction");
        if (std::abs(dot(hp->dir, normal)) > 1e-9)
            throw std::invalid_argument("dislocation: cut direction must lie in the cut plane");
    } else if (const auto* rc = std::get_if<RectCut>(&cut)) {
        if (norm(rc->e1) <= 0.0 || norm(rc->e2) <= 0.0)
            throw std::invalid_argument("dislocation: rectangle edges must be nonzero");
        if (std::abs(dot(normalized(rc->e1), normalized(rc->e2))) > 1e-9)
            throw std::invalid_argument("dislocation: rectangle edges must be orthogonal");
        if (std::abs(dot(rc->e1, normal)) > 1e-9 * norm(rc->e1) ||
            std::abs(dot(rc->e2, normal)) > 1e-9 * norm(rc->e2))
            throw std::invalid_argument("dislocation: rectangle must lie in the cut plane");
    } else {
        const auto& dc = std::get<DiscCut>(cut);
        if (dc.radius <= 0.0) throw std::invalid_argument("dislocation: disc radius must be positive");
    }
}

Vec3 DislocationSpec::reference_point(double max_extent) const {
    if (const auto* hp = std::get_if<HalfPlaneCut>(&cut)) return hp->core + hp->dir * (0.25 * max_extent);
    if (const auto* rc = std::get_if<RectCut>(&cut)) {
        // Step back from the core edge midpoint into the cut.
        const Vec3 core_mid = rc->corner + rc->e1 + rc->e2 * 0.5;
        return core_mid - normalized(rc->e1) * (0.25 * max_extent);
    }
    return std::get<DiscCut>(cut).center;
}

DislocationSpec DislocationSpec::edge2d(const Vec3& core, const Vec3& cut_dir, const Vec3& b) {
    DislocationSpec d;
    d.cut = HalfPlaneCut{core, normalized(cut_dir)};
    d.burgers = b;
    d.normal = normalized(cross(normalized(cut_dir), Vec3{0, 0, 1}));
    d.validate();
    return d;
}

DislocationSpec DislocationSpec::rect3d(const Vec3& corner, const Vec3& e1, const Vec3& e2,
                                        const Vec3& b) {
    DislocationSpec d;
    d.cut = RectCut{corner, e1, e2};
    d.burgers = b;
    d.normal = normalized(cross(e1, e2));
    d.validate();
    return d;
}

DislocationSpec DislocationSpec::disc3d(const Vec3& center, double radius, const Vec3& n,
                                        const Vec3& b) {
    DislocationSpec d;
    d.cut = DiscCut{center, radius};
    d.burgers = b;
    d.normal = normalized(n);
    d.validate();
    return d;
}

int crossing_code(const Vec3& a, const Vec3& b, const DislocationSpec& disl, double plane_tol) {
    if (norm2(b - a) == 0.0) throw std::invalid_argument("crossing_code: degenerate segment");

    const Vec3 anchor = cut_anchor(disl);
    double ha = dot(a - anchor, disl.normal);
    double hb = dot(b - anchor, disl.normal);
    if (std::abs(ha) < plane_tol) ha = 0.0; // on-plane points belong to the positive side
    if (std::abs(hb) < plane_tol) hb = 0.0;
    const bool a_pos = ha >= 0.0;
    const bool b_pos = hb >= 0.0;
    if (a_pos == b_pos) return 0;

    // Intersection of the segment with the cut plane.
    const double t = ha / (ha - hb);
    const Vec3 p = a + (b - a) * t;

    bool on_cut = false;
    if (const auto* hp = std::get_if<HalfPlaneCut>(&disl.cut)) {
        on_cut = dot(p - hp->core, hp->dir) > 0.0;
    } else if (const auto* rc = std::get_if<RectCut>(&disl.cut)) {
        const double l1 = norm(rc->e1), l2 = norm(rc->e2);
        const double u = dot(p - rc->corner, rc->e1) / (l1 * l1);
        const double v = dot(p - rc->corner, rc->e2) / (l2 * l2);
        on_cut = u >= 0.0 && u < 1.0 && v >= 0.0 && v <= 1.0; // core edge at u = 1 excluded
    } else {
        const auto& dc = std::get<DiscCut>(disl.cut);
        on_cut = norm(p - dc.center) < dc.radius; // rim (the line) excluded
    }
    if (!on_cut) return 0;
    return (b_pos ? 1 : -1) * disl.sign;
}

Vec3 bond_correction(const Vec3& a, const Vec3& b, std::span<const DislocationSpec> dislocations,
                     double plane_tol) {
    Vec3 corr{};
    for (const auto& d : dislocations)
        corr += d.burgers * static_cast<double>(crossing_code(a, b, d, plane_tol));
    return corr;
}

void precompute_crossings(NeighborList& nl, const NodeSet& nodes,
                          std::span<const DislocationSpec> dislocations) {
    nl.cross_offset.assign(nodes.size() + 1, 0);
    nl.cross_stencil.clear();
    nl.cross_corr.clear();
    nl.corrections.clear();
    if (dislocations.empty()) return;
    for (const auto& d : dislocations) d.validate();

    const double plane_tol = 1e-9 * nodes.dx;
    const double cutoff = nl.horizon + 0.5 * nodes.dx;

    // A bond can only cross a cut whose plane passes within the cutoff of the
    // node, which prunes the scan to a thin slab per dislocation.
    auto near_any_cut = [&](const Vec3& x) {
        for (const auto& d : dislocations)
            if (std::abs(dot(x - cut_anchor(d), d.normal)) <= cutoff) return true;
        return false;
    };

    struct Key {
        double x, y, z;
        bool operator<(const Key& o) const {
            if (x != o.x) return x < o.x;
            if (y != o.y) return y < o.y;
            return z < o.z;
        }
    };
    std::map<Key, std::uint16_t> corr_index;
    auto intern = [&](const Vec3& c) {
        const auto [it, fresh] = corr_index.try_emplace(Key{c.x, c.y, c.z},
                                                        static_cast<std::uint16_t>(nl.corrections.size()));
        if (fresh) nl.corrections.push_back(c);
        return it->second;
    };

    std::vector<std::uint32_t> counts(nodes.size() + 1, 0);
    std::vector<std::uint16_t> stencils;
    std::vector<std::uint16_t> corrs;
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        counts[id + 1] = counts[id];
        if (!near_any_cut(nodes.positions[id])) continue;
        const Vec3 xa = nodes.positions[id];
        const auto cc = nodes.coords(id);
        for (std::size_t s = 0; s < nl.stencil.size(); ++s) {
            const auto& e = nl.stencil[s];
            const int i = cc[0] + e.di, j = cc[1] + e.dj, k = cc[2] + e.dk;
            if (i < 0 || i >= nodes.pad_n[0] || j < 0 || j >= nodes.pad_n[1] || k < 0 ||
                k >= nodes.pad_n[2])
                continue;
            // Classify on the stored lattice positions so borderline bonds
            // (e.g. diagonals through the core) match later direct queries.
            const Vec3 corr =
                bond_correction(xa, nodes.positions[nodes.id_of(i, j, k)], dislocations, plane_tol);
            if (corr.x == 0.0 && corr.y == 0.0 && corr.z == 0.0) continue;
            stencils.push_back(static_cast<std::uint16_t>(s));
            corrs.push_back(intern(corr));
            ++counts[id + 1];
        }
    }
    nl.cross_offset = std::move(counts);
    nl.cross_stencil = std::move(stencils);
    nl.cross_corr = std::move(corrs);
}

} // namespace edpd
