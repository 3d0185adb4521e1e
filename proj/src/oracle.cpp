#include "edpd/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "edpd/quadrature.hpp"

namespace edpd {

namespace {

constexpr double pi = std::numbers::pi;

// Sign conventions of the Burgers displacement formula, pinned by the
// equilibrium and jump tests in the oracle suite.
constexpr double line_term_sign = 1.0;
constexpr double grad_term_sign = 1.0;

struct Frame {
    Vec3 origin, ex, ey, ez;

    Vec3 to_local(const Vec3& p) const {
        const Vec3 d = p - origin;
        return {dot(d, ex), dot(d, ey), dot(d, ez)};
    }
    Vec3 vec_to_global(const Vec3& v) const { return ex * v.x + ey * v.y + ez * v.z; }
    Sym3 sym_to_global(const Sym3& s) const {
        const double q[3][3] = {{ex.x, ey.x, ez.x}, {ex.y, ey.y, ez.y}, {ex.z, ey.z, ez.z}};
        const double l[3][3] = {{s.xx, s.xy, s.xz}, {s.xy, s.yy, s.yz}, {s.xz, s.yz, s.zz}};
        double g[3][3] = {};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k)
                    for (int m = 0; m < 3; ++m) acc += q[i][k] * l[k][m] * q[j][m];
                g[i][j] = acc;
            }
        Sym3 out;
        out.xx = g[0][0];
        out.yy = g[1][1];
        out.zz = g[2][2];
        out.xy = 0.5 * (g[0][1] + g[1][0]);
        out.xz = 0.5 * (g[0][2] + g[2][0]);
        out.yz = 0.5 * (g[1][2] + g[2][1]);
        return out;
    }
};

ElasticField transformed(ElasticField base, Frame frame) {
    ElasticField out;
    out.displacement = [base, frame](const Vec3& p) {
        return frame.vec_to_global(base.displacement(frame.to_local(p)));
    };
    out.stress = [base, frame](const Vec3& p) {
        return frame.sym_to_global(base.stress(frame.to_local(p)));
    };
    return out;
}

} // namespace

ElasticField edge_fields(double b, double nu, double mu) {
    ElasticField f;
    f.displacement = [b, nu](const Vec3& p) {
        const double r2 = p.x * p.x + p.y * p.y;
        if (r2 == 0.0) throw std::domain_error("edge oracle: evaluation at the core");
        const double c = b / (2.0 * pi);
        const double ux = c * (std::atan2(p.y, p.x) + p.x * p.y / (2.0 * (1.0 - nu) * r2));
        const double uy = -c * ((1.0 - 2.0 * nu) / (4.0 * (1.0 - nu)) * std::log(r2) +
                                (p.x * p.x - p.y * p.y) / (4.0 * (1.0 - nu) * r2));
        return Vec3{ux, uy, 0.0};
    };
    f.stress = [b, nu, mu](const Vec3& p) {
        const double r2 = p.x * p.x + p.y * p.y;
        if (r2 == 0.0) throw std::domain_error("edge oracle: evaluation at the core");
        const double d = mu * b / (2.0 * pi * (1.0 - nu));
        const double x2 = p.x * p.x, y2 = p.y * p.y;
        Sym3 s;
        s.xx = -d * p.y * (3.0 * x2 + y2) / (r2 * r2);
        s.yy = d * p.y * (x2 - y2) / (r2 * r2);
        s.xy = d * p.x * (x2 - y2) / (r2 * r2);
        s.zz = nu * (s.xx + s.yy); // plane strain
        return s;
    };
    return f;
}

ElasticField screw_fields(double b, double mu) {
    ElasticField f;
    f.displacement = [b](const Vec3& p) {
        if (p.x == 0.0 && p.y == 0.0) throw std::domain_error("screw oracle: evaluation on the axis");
        return Vec3{0.0, 0.0, b / (2.0 * pi) * std::atan2(p.y, p.x)};
    };
    f.stress = [b, mu](const Vec3& p) {
        const double r2 = p.x * p.x + p.y * p.y;
        if (r2 == 0.0) throw std::domain_error("screw oracle: evaluation on the axis");
        Sym3 s;
        s.xz = -mu * b / (2.0 * pi) * p.y / r2;
        s.yz = mu * b / (2.0 * pi) * p.x / r2;
        return s;
    };
    return f;
}

double disc_solid_angle(const Vec3& p, double radius, double rel_tol) {
    const double r = std::hypot(p.x, p.y);
    const double h = p.z;
    const double az = std::abs(h);
    if (az == 0.0) {
        // On-plane points count as the +z side.
        if (r < radius) return -2.0 * pi;
        if (r > radius) return 0.0;
        return -pi;
    }
    const double c = r * r + az * az;
    auto g = [&](double phi) {
        const double bb = r * std::cos(phi);
        const double u1 = radius * radius - 2.0 * bb * radius + c;
        return ((bb * radius - c) / std::sqrt(u1) + std::sqrt(c)) / (c - bb * bb);
    };
    const double mag = az * adaptive_quadrature(g, 0.0, 2.0 * pi, rel_tol);
    return h > 0.0 ? -mag : mag;
}

ElasticField loop_fields(double b, double radius, double nu, double mu, LoopQuadrature quad) {
    const double lambda = 2.0 * mu * nu / (1.0 - 2.0 * nu);
    const Vec3 bv{b, 0.0, 0.0};

    auto guard = [radius](const Vec3& p) {
        const double rim = std::hypot(std::hypot(p.x, p.y) - radius, p.z);
        if (rim < 1e-3 * radius)
            throw std::domain_error("loop oracle: evaluation too close to the loop line");
    };

    ElasticField f;
    f.displacement = [=](const Vec3& p) {
        guard(p);
        const double omega = disc_solid_angle(p, radius, quad.rel_tol);
        auto integrand = [&](double phi) -> std::array<double, 3> {
            const double cs = std::cos(phi), sn = std::sin(phi);
            const Vec3 dl{-radius * sn, radius * cs, 0.0};
            const Vec3 rv = p - Vec3{radius * cs, radius * sn, 0.0};
            const double rl = norm(rv);
            const Vec3 t2 = cross(bv, dl) * (line_term_sign / (4.0 * pi * rl));
            Vec3 t3;
            const double bxr_dl = dot(cross(bv, rv), dl);
            for (int i = 0; i < 3; ++i) {
                Vec3 ei{};
                ei[i] = 1.0;
                t3[i] = dot(cross(bv, ei), dl) / rl - bxr_dl * rv[i] / (rl * rl * rl);
            }
            t3 *= grad_term_sign / (8.0 * pi * (1.0 - nu));
            return {t2.x + t3.x, t2.y + t3.y, t2.z + t3.z};
        };
        const auto li =
            adaptive_gauss_kronrod<3>(integrand, 0.0, 2.0 * pi, quad.rel_tol, quad.abs_tol);
        return Vec3{li[0], li[1], li[2]} - bv * (omega / (4.0 * pi));
    };

    f.stress = [=](const Vec3& p) {
        guard(p);
        // Distortion u_{i,j} as a single line integral (the solid-angle
        // gradient is itself a line integral away from the cut).
        auto integrand = [&](double phi) -> std::array<double, 9> {
            const double cs = std::cos(phi), sn = std::sin(phi);
            const Vec3 dl{-radius * sn, radius * cs, 0.0};
            const Vec3 rv = p - Vec3{radius * cs, radius * sn, 0.0};
            const double rl = norm(rv);
            const double rl3 = rl * rl * rl;
            const double rl5 = rl3 * rl * rl;
            const Vec3 dlxr = cross(dl, rv);
            const Vec3 bxdl = cross(bv, dl);
            const double bxr_dl = dot(cross(bv, rv), dl);
            Vec3 bxe[3];
            for (int i = 0; i < 3; ++i) {
                Vec3 ei{};
                ei[i] = 1.0;
                bxe[i] = cross(bv, ei);
            }
            std::array<double, 9> du{};
            const double c3 = grad_term_sign / (8.0 * pi * (1.0 - nu));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double v = -bv[i] / (4.0 * pi) * dlxr[j] / rl3;
                    v -= line_term_sign / (4.0 * pi) * bxdl[i] * rv[j] / rl3;
                    v += c3 * (-dot(bxe[i], dl) * rv[j] / rl3 - dot(bxe[j], dl) * rv[i] / rl3 -
                               bxr_dl * ((i == j ? 1.0 : 0.0) / rl3 - 3.0 * rv[i] * rv[j] / rl5));
                    du[static_cast<std::size_t>(3 * i + j)] = v;
                }
            return du;
        };
        const auto du =
            adaptive_gauss_kronrod<9>(integrand, 0.0, 2.0 * pi, quad.rel_tol, quad.abs_tol);
        const double tr = du[0] + du[4] + du[8];
        Sym3 s;
        s.xx = lambda * tr + 2.0 * mu * du[0];
        s.yy = lambda * tr + 2.0 * mu * du[4];
        s.zz = lambda * tr + 2.0 * mu * du[8];
        s.xy = mu * (du[1] + du[3]);
        s.xz = mu * (du[2] + du[6]);
        s.yz = mu * (du[5] + du[7]);
        return s;
    };
    return f;
}

ElasticField oracle_for(const DislocationSpec& disl, const MaterialModel& mat,
                        LoopQuadrature quad) {
    disl.validate();
    if (const auto* hp = std::get_if<HalfPlaneCut>(&disl.cut)) {
        Frame fr;
        fr.origin = hp->core;
        fr.ex = -hp->dir;
        fr.ey = disl.normal;
        fr.ez = cross(fr.ex, fr.ey);
        const double b = dot(disl.burgers, fr.ex);
        return transformed(edge_fields(b, mat.poisson, mat.shear()), fr);
    }
    if (const auto* rc = std::get_if<RectCut>(&disl.cut)) {
        Frame fr;
        fr.origin = rc->corner + rc->e1;
        fr.ex = normalized(rc->e1);
        fr.ey = disl.normal;
        fr.ez = cross(fr.ex, fr.ey);
        const double b = dot(disl.burgers, fr.ez);
        if (std::abs(std::abs(b) - norm(disl.burgers)) > 1e-9 * norm(disl.burgers))
            throw std::invalid_argument("oracle: rectangular cuts only support screw dislocations");
        return transformed(screw_fields(b, mat.shear()), fr);
    }
    const auto& dc = std::get<DiscCut>(disl.cut);
    Frame fr;
    fr.origin = dc.center;
    fr.ez = disl.normal;
    fr.ex = normalized(disl.burgers);
    fr.ey = cross(fr.ez, fr.ex);
    return transformed(loop_fields(norm(disl.burgers), dc.radius, mat.poisson, mat.shear(), quad),
                       fr);
}

ElasticField superposed_oracle(std::span<const DislocationSpec> dislocations,
                               const MaterialModel& mat, LoopQuadrature quad) {
    std::vector<ElasticField> parts;
    parts.reserve(dislocations.size());
    for (const auto& d : dislocations) parts.push_back(oracle_for(d, mat, quad));
    ElasticField out;
    out.displacement = [parts](const Vec3& p) {
        Vec3 u{};
        for (const auto& f : parts) u += f.displacement(p);
        return u;
    };
    out.stress = [parts](const Vec3& p) {
        Sym3 s{};
        for (const auto& f : parts) s += f.stress(p);
        return s;
    };
    return out;
}

Vec3 pk_force(const Sym3& sigma, const Vec3& burgers, const Vec3& line_dir) {
    return cross(apply(sigma, burgers), line_dir);
}

std::vector<std::pair<double, double>> driving_force_eg(std::span<const double> positions,
                                                        std::span<const double> energies) {
    if (positions.size() != energies.size() || positions.size() < 3)
        throw std::invalid_argument("driving_force_eg: need at least 3 matching samples");
    const double h = positions[1] - positions[0];
    if (h == 0.0) throw std::invalid_argument("driving_force_eg: zero sample spacing");
    for (std::size_t k = 1; k + 1 < positions.size(); ++k)
        if (std::abs(positions[k + 1] - positions[k] - h) > 1e-9 * std::abs(h))
            throw std::invalid_argument("driving_force_eg: samples must be uniformly spaced");
    std::vector<std::pair<double, double>> out;
    out.reserve(positions.size() - 2);
    for (std::size_t k = 1; k + 1 < positions.size(); ++k)
        out.emplace_back(positions[k], -(energies[k + 1] - energies[k - 1]) / (2.0 * h));
    return out;
}

double relative_l2_diff(std::span<const Vec3> u_num, std::span<const Vec3> u_ref,
                        std::span<const double> volumes) {
    if (u_num.size() != u_ref.size() || u_num.size() != volumes.size())
        throw std::invalid_argument("relative_l2_diff: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u_num.size(); ++i) {
        num += norm2(u_num[i] - u_ref[i]) * volumes[i];
        den += norm2(u_ref[i]) * volumes[i];
    }
    if (den == 0.0) throw std::invalid_argument("relative_l2_diff: zero reference norm");
    return std::sqrt(num / den);
}

} // namespace edpd
