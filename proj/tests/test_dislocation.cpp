#include <doctest.h>

#include <cmath>
#include <random>

#include "edpd/dislocation.hpp"
#include "edpd/grid.hpp"

using namespace edpd;

namespace {

DislocationSpec canonical_edge(double b = 8.551e-10) {
    return DislocationSpec::edge2d({0, 0, 0}, {-1, 0, 0}, {b, 0, 0});
}

} // namespace

TEST_CASE("crossing code: canonical edge cut") {
    const auto d = canonical_edge();
    CHECK(d.normal.y == doctest::Approx(1.0)); // cut along -x gives normal +y

    CHECK(crossing_code({-1e-8, -1e-9, 0}, {-1e-8, 1e-9, 0}, d) == 1);
    CHECK(crossing_code({-1e-8, 1e-9, 0}, {-1e-8, -1e-9, 0}, d) == -1);
    // Crossing the plane extension beyond the core is not a cut crossing.
    CHECK(crossing_code({1e-8, -1e-9, 0}, {1e-8, 1e-9, 0}, d) == 0);
    // Both endpoints on one side.
    CHECK(crossing_code({-1e-8, 1e-9, 0}, {-2e-8, 5e-9, 0}, d) == 0);
    CHECK_THROWS(crossing_code({1e-9, 1e-9, 0}, {1e-9, 1e-9, 0}, d));
}

TEST_CASE("crossing code: segment through the core is not a crossing") {
    const auto d = canonical_edge();
    const double h = 1e-9;
    CHECK(crossing_code({-h, -h, 0}, {h, h, 0}, d) == 0);
}

TEST_CASE("crossing code: on-plane endpoint belongs to the positive side") {
    const auto d = canonical_edge();
    const double tol = 1e-18; // 1e-9 * dx for a nanometre grid
    // Endpoint within tolerance of the plane counts as positive side.
    CHECK(crossing_code({-1e-8, -1e-9, 0}, {-1e-8, 1e-20, 0}, d, tol) == 1);
    CHECK(crossing_code({-1e-8, 1e-20, 0}, {-1e-8, 1e-9, 0}, d, tol) == 0);
    CHECK(crossing_code({-1e-8, 0.0, 0}, {-1e-8, -1e-9, 0}, d, tol) == -1);
}

TEST_CASE("crossing code: sign flag flips the code") {
    auto d = canonical_edge();
    d.sign = -1;
    CHECK(crossing_code({-1e-8, -1e-9, 0}, {-1e-8, 1e-9, 0}, d) == -1);
}

TEST_CASE("crossing code: antisymmetry on random segments") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const DislocationSpec cuts[3] = {
        canonical_edge(1e-2),
        DislocationSpec::rect3d({-2, 0, -2}, {2, 0, 0}, {0, 0, 4}, {0, 0, 1e-2}),
        DislocationSpec::disc3d({0, 0, 0}, 0.5, {0, 0, 1}, {1e-2, 0, 0}),
    };
    for (const auto& d : cuts) {
        for (int k = 0; k < 3000; ++k) {
            const Vec3 a{uni(rng), uni(rng), uni(rng)};
            const Vec3 b{uni(rng), uni(rng), uni(rng)};
            CHECK(crossing_code(a, b, d) == -crossing_code(b, a, d));
        }
    }
}

TEST_CASE("crossing code: stable under small perturbations away from the core") {
    const auto d = canonical_edge(1e-2);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const Vec3 a{uni(rng) - 1.5, uni(rng), 0.0}; // keep x < -0.5: far from the core
        const Vec3 b = a + Vec3{0.1 * uni(rng), 0.3, 0.0};
        const int code = crossing_code(a, b, d);
        const double margin = std::min(std::abs(a.x), std::abs(b.x));
        const double eps = 1e-6 * margin;
        const Vec3 shift{eps * uni(rng), eps * uni(rng), 0.0};
        CHECK(crossing_code(a + shift, b + shift, d) == code);
    }
}

TEST_CASE("crossing code: disc agrees with brute force on random segments") {
    const double R = 0.37;
    const auto d = DislocationSpec::disc3d({0.1, -0.2, 0.05}, R, {0, 0, 1}, {1e-3, 0, 0});
    const Vec3 center{0.1, -0.2, 0.05};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const Vec3 a{uni(rng), uni(rng), uni(rng)};
        const Vec3 b{uni(rng), uni(rng), uni(rng)};
        if (norm2(b - a) == 0.0) continue;
        // Independent brute force: plane parameter in (0,1), point within R.
        int want = 0;
        const double ha = a.z - center.z, hb = b.z - center.z;
        if ((ha < 0.0) != (hb < 0.0)) {
            const double t = ha / (ha - hb);
            if (t > 0.0 && t < 1.0) {
                const Vec3 p = a + (b - a) * t;
                if (std::hypot(p.x - center.x, p.y - center.y) < R) want = hb >= 0.0 ? 1 : -1;
            }
        }
        CHECK(crossing_code(a, b, d) == want);
    }
}

TEST_CASE("bond correction: sums signed Burgers vectors") {
    const Vec3 below{-1e-8, -1e-9, 0}, above{-1e-8, 1e-9, 0};
    CHECK(norm(bond_correction(below, above, {})) == 0.0);

    const auto d = canonical_edge();
    const Vec3 c = bond_correction(below, above, std::span(&d, 1));
    CHECK(c.x == doctest::Approx(8.551e-10).epsilon(1e-12));
    CHECK(c.y == 0.0);

    auto anti = canonical_edge();
    anti.sign = -1;
    const DislocationSpec both[2] = {d, anti};
    CHECK(norm(bond_correction(below, above, both)) == 0.0);
}

TEST_CASE("bond correction: antisymmetric on random bonds") {
    const DislocationSpec cuts[2] = {
        canonical_edge(1e-2),
        DislocationSpec::disc3d({0, 0, 0}, 0.5, {0, 0, 1}, {1e-2, 0, 0}),
    };
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const Vec3 a{uni(rng), uni(rng), uni(rng)};
        const Vec3 b{uni(rng), uni(rng), uni(rng)};
        const Vec3 fwd = bond_correction(a, b, cuts);
        const Vec3 rev = bond_correction(b, a, cuts);
        CHECK(fwd.x == -rev.x);
        CHECK(fwd.y == -rev.y);
        CHECK(fwd.z == -rev.z);
    }
}

TEST_CASE("dislocation: validation rejects inconsistent specs") {
    // Burgers with a normal component is not a glide dislocation.
    CHECK_THROWS(DislocationSpec::edge2d({0, 0, 0}, {-1, 0, 0}, {1e-9, 1e-9, 0}));
    // Non-orthogonal rectangle edges.
    CHECK_THROWS(DislocationSpec::rect3d({0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0, 1e-9}));
    CHECK_THROWS(DislocationSpec::disc3d({0, 0, 0}, -1.0, {0, 0, 1}, {1e-9, 0, 0}));
}

TEST_CASE("precompute: crossing table matches direct evaluation") {
    BoxSpec box;
    box.lower = {-0.5, -0.5, 0};
    box.edge_lengths = {1, 1, 0};
    box.cells = {10, 10, 1};
    box.dim = 2;
    const double delta = 3.15 / 10.0;
    const auto nodes = build_grid(box, delta);
    auto nl = build_neighbors(nodes, delta);
    const auto d = canonical_edge(1e-2);
    precompute_crossings(nl, nodes, std::span(&d, 1));

    const double plane_tol = 1e-9 * nodes.dx;
    std::size_t crossing_bonds = 0;
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        nl.for_each_bond(nodes, id, [&](std::size_t j, const StencilEntry&, const Vec3& corr) {
            const Vec3 want =
                bond_correction(nodes.positions[id], nodes.positions[j], std::span(&d, 1), plane_tol);
            CHECK(corr.x == want.x);
            CHECK(corr.y == want.y);
            if (want.x != 0.0) ++crossing_bonds;
        });
    }
    CHECK(crossing_bonds > 0);
}

TEST_CASE("precompute: zero Burgers leaves the table empty") {
    BoxSpec box;
    box.lower = {-0.5, -0.5, 0};
    box.edge_lengths = {1, 1, 0};
    box.cells = {8, 8, 1};
    box.dim = 2;
    const double delta = 2.5 / 8.0;
    const auto nodes = build_grid(box, delta);
    auto nl = build_neighbors(nodes, delta);
    const auto d = DislocationSpec::edge2d({0, 0, 0}, {-1, 0, 0}, {0, 0, 0});
    precompute_crossings(nl, nodes, std::span(&d, 1));
    CHECK(nl.cross_stencil.empty());
    CHECK(nl.cross_offset.back() == 0);
}
