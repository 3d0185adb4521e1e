#include <doctest.h>

#include <cmath>
#include <random>

#include "edpd/oracle.hpp"
#include "edpd/quadrature.hpp"

using namespace edpd;

namespace {

constexpr double kB = 8.551e-10;
constexpr double kNu = 0.34;
constexpr double kMu = 4.5e10;

// Finite-difference stress from a displacement field (full 3D Hooke's law).
Sym3 stress_from_fd(const std::function<Vec3(const Vec3&)>& u, const Vec3& p, double h,
                    double lambda, double mu) {
    double du[3][3];
    for (int j = 0; j < 3; ++j) {
        Vec3 dp{};
        dp[j] = h;
        const Vec3 a = u(p + dp), b = u(p - dp);
        const Vec3 d = (a - b) / (2.0 * h);
        du[0][j] = d.x;
        du[1][j] = d.y;
        du[2][j] = d.z;
    }
    const double tr = du[0][0] + du[1][1] + du[2][2];
    Sym3 s;
    s.xx = lambda * tr + 2.0 * mu * du[0][0];
    s.yy = lambda * tr + 2.0 * mu * du[1][1];
    s.zz = lambda * tr + 2.0 * mu * du[2][2];
    s.xy = mu * (du[0][1] + du[1][0]);
    s.xz = mu * (du[0][2] + du[2][0]);
    s.yz = mu * (du[1][2] + du[2][1]);
    return s;
}

double sym_norm(const Sym3& s) {
    return std::sqrt(s.xx * s.xx + s.yy * s.yy + s.zz * s.zz +
                     2.0 * (s.xy * s.xy + s.xz * s.xz + s.yz * s.yz));
}

Sym3 sym_diff(const Sym3& a, const Sym3& b) {
    Sym3 d;
    d.xx = a.xx - b.xx;
    d.yy = a.yy - b.yy;
    d.zz = a.zz - b.zz;
    d.xy = a.xy - b.xy;
    d.xz = a.xz - b.xz;
    d.yz = a.yz - b.yz;
    return d;
}

double fd_div_residual(const std::function<Sym3(const Vec3&)>& sig, const Vec3& p, double h) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
            Vec3 dp{};
            dp[j] = h;
            const Sym3 a = sig(p + dp), b = sig(p - dp);
            const double comp_a = j == 0 ? (i == 0 ? a.xx : i == 1 ? a.xy : a.xz)
                                 : j == 1 ? (i == 0 ? a.xy : i == 1 ? a.yy : a.yz)
                                          : (i == 0 ? a.xz : i == 1 ? a.yz : a.zz);
            const double comp_b = j == 0 ? (i == 0 ? b.xx : i == 1 ? b.xy : b.xz)
                                 : j == 1 ? (i == 0 ? b.xy : i == 1 ? b.yy : b.yz)
                                          : (i == 0 ? b.xz : i == 1 ? b.yz : b.zz);
            acc += (comp_a - comp_b) / (2.0 * h);
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

} // namespace

TEST_CASE("quadrature: exactness and adaptivity") {
    // K15 integrates high-degree polynomials exactly.
    auto poly = [](double t) { return std::array<double, 1>{t * t * t * t * t * t}; };
    const double got = adaptive_gauss_kronrod<1>(poly, 0.0, 1.0, 1e-12)[0];
    CHECK(got == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

    CHECK(adaptive_quadrature([](double t) { return std::sin(t); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));

    // Sharply peaked integrand forces subdivision.
    const double a = 1e-4;
    const double got_peak = adaptive_quadrature(
        [&](double t) { return 1.0 / (a * a + t * t); }, -1.0, 1.0, 1e-11);
    CHECK(got_peak == doctest::Approx(2.0 * std::atan(1.0 / a) / a).epsilon(1e-9));
}

TEST_CASE("edge oracle: displacement formulas") {
    const auto f = edge_fields(kB, kNu, kMu);
    // Zero on the positive axis.
    CHECK(f.displacement({1e-7, 0.0, 0.0}).x == 0.0);

    // Jump of b across the cut (x < 0).
    const double x = -2e-7, eps = 1e-8 * std::abs(x);
    const Vec3 jump = f.displacement({x, eps, 0}) - f.displacement({x, -eps, 0});
    CHECK(jump.x == doctest::Approx(kB).epsilon(1e-6));
    CHECK(std::abs(jump.y) < 1e-6 * kB);

    // u_y on the positive axis from the closed form.
    const double r = 3e-7;
    const double want = -kB / (2.0 * M_PI) *
                        ((1.0 - 2.0 * kNu) / (4.0 * (1.0 - kNu)) * std::log(r * r) +
                         1.0 / (4.0 * (1.0 - kNu)));
    CHECK(f.displacement({r, 0.0, 0.0}).y == doctest::Approx(want).epsilon(1e-12));

    CHECK_THROWS(f.displacement({0, 0, 0}));
    CHECK_THROWS(f.stress({0, 0, 0}));
}

TEST_CASE("edge oracle: stress consistent with the displacement gradient") {
    const auto f = edge_fields(kB, kNu, kMu);
    const double lambda = 2.0 * kMu * kNu / (1.0 - 2.0 * kNu);
    for (const Vec3 p : {Vec3{1.3e-7, 0.7e-7, 0}, Vec3{-0.8e-7, -1.9e-7, 0}}) {
        const Sym3 got = f.stress(p);
        const Sym3 want = stress_from_fd(f.displacement, p, 1e-12, lambda, kMu);
        CHECK(sym_norm(sym_diff(got, want)) < 1e-5 * sym_norm(want));
    }
}

TEST_CASE("edge oracle: equilibrium away from the core") {
    const auto f = edge_fields(kB, kNu, kMu);
    const Vec3 p{1.1e-7, -0.6e-7, 0};
    const double scale = sym_norm(f.stress(p)) / norm(p);
    const double r1 = fd_div_residual(f.stress, p, 2e-9);
    const double r2 = fd_div_residual(f.stress, p, 1e-9);
    CHECK(r1 < 1e-3 * scale);
    CHECK(r2 < r1 / 2.5); // second-order FD residual
}

TEST_CASE("edge oracle: sigma_xx antisymmetric about the glide plane") {
    const auto f = edge_fields(kB, kNu, kMu);
    for (const Vec3 p : {Vec3{0.5e-7, 0.9e-7, 0}, Vec3{-1.2e-7, 0.35e-7, 0}}) {
        const double above = f.stress(p).xx;
        const double below = f.stress({p.x, -p.y, 0}).xx;
        CHECK(above == doctest::Approx(-below).epsilon(1e-12));
    }
}

TEST_CASE("screw oracle: fields and jump") {
    const auto f = screw_fields(kB, kMu);
    CHECK(f.displacement({1e-7, 0.0, 0.3e-7}).z == 0.0);

    const double y = 0.7e-7;
    CHECK(f.stress({0.0, y, 0.0}).xz == doctest::Approx(-kMu * kB / (2.0 * M_PI * y)).epsilon(1e-12));

    const double x = -1.5e-7, eps = 1e-9 * std::abs(x);
    const Vec3 jump = f.displacement({x, eps, 0}) - f.displacement({x, -eps, 0});
    CHECK(jump.z == doctest::Approx(kB).epsilon(1e-6));

    const double lambda = 2.0 * kMu * kNu / (1.0 - 2.0 * kNu);
    const Vec3 p{0.8e-7, -0.5e-7, 0.2e-7};
    const Sym3 want = stress_from_fd(f.displacement, p, 1e-12, lambda, kMu);
    CHECK(sym_norm(sym_diff(f.stress(p), want)) < 1e-5 * sym_norm(want));

    const double scale = sym_norm(f.stress(p)) / norm(p);
    CHECK(fd_div_residual(f.stress, p, 1e-9) < 1e-3 * scale);

    CHECK_THROWS(f.displacement({0, 0, 0.5e-7}));
}

TEST_CASE("disc solid angle: axis closed form and brute-force surface integral") {
    const double R = 0.7;
    // On-axis closed form, signed: positive below the disc.
    for (double z : {0.3, 1.7}) {
        const double want = 2.0 * M_PI * (1.0 - z / std::sqrt(z * z + R * R));
        CHECK(disc_solid_angle({0, 0, -z}, R) == doctest::Approx(want).epsilon(1e-10));
        CHECK(disc_solid_angle({0, 0, z}, R) == doctest::Approx(-want).epsilon(1e-10));
    }

    // Brute-force polar-grid surface integral at generic points.
    auto brute = [&](const Vec3& p) {
        const int nr = 4000, nphi = 720;
        double acc = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double rho = (i + 0.5) * R / nr;
            for (int j = 0; j < nphi; ++j) {
                const double phi = (j + 0.5) * 2.0 * M_PI / nphi;
                const Vec3 q{rho * std::cos(phi), rho * std::sin(phi), 0.0};
                const Vec3 d = q - p;
                acc += d.z / std::pow(norm(d), 3.0) * rho * (R / nr) * (2.0 * M_PI / nphi);
            }
        }
        return acc;
    };
    for (const Vec3 p : {Vec3{0.4, 0.2, 0.6}, Vec3{1.1, -0.3, -0.5}}) {
        CHECK(disc_solid_angle(p, R) == doctest::Approx(brute(p)).epsilon(1e-4));
    }
}

TEST_CASE("loop oracle: jump across the disc equals the Burgers vector") {
    const double R = 3e-8;
    const auto f = loop_fields(kB, R, kNu, kMu);
    for (const Vec3 c : {Vec3{0, 0, 0}, Vec3{0.3 * R, -0.2 * R, 0}}) {
        const double eps = 1e-6 * R;
        const Vec3 jump = f.displacement(c + Vec3{0, 0, eps}) - f.displacement(c - Vec3{0, 0, eps});
        CHECK(jump.x == doctest::Approx(kB).epsilon(1e-5));
        CHECK(std::abs(jump.y) < 1e-5 * kB);
        CHECK(std::abs(jump.z) < 1e-5 * kB);
    }
    CHECK_THROWS(f.displacement({R, 0, 0}));
}

TEST_CASE("loop oracle: stress kernel consistent with displacement gradient") {
    const double R = 3e-8;
    const auto f = loop_fields(kB, R, kNu, kMu);
    const double lambda = 2.0 * kMu * kNu / (1.0 - 2.0 * kNu);
    for (const Vec3 p : {Vec3{0.5 * R, 0.3 * R, 0.8 * R}, Vec3{1.6 * R, -0.7 * R, -0.4 * R}}) {
        const Sym3 got = f.stress(p);
        const Sym3 want = stress_from_fd(f.displacement, p, 1e-5 * R, lambda, kMu);
        CHECK(sym_norm(sym_diff(got, want)) < 1e-5 * sym_norm(want));
    }
}

TEST_CASE("loop oracle: equilibrium away from the line") {
    const double R = 3e-8;
    const auto f = loop_fields(kB, R, kNu, kMu);
    const Vec3 p{0.6 * R, 0.2 * R, 0.55 * R};
    const double scale = sym_norm(f.stress(p)) / R;
    CHECK(fd_div_residual(f.stress, p, 1e-4 * R) < 1e-4 * scale);
}

TEST_CASE("loop oracle: far field decays as distance cubed") {
    const double R = 3e-8;
    const auto f = loop_fields(kB, R, kNu, kMu);
    const Vec3 dir = normalized(Vec3{1.0, 0.4, 0.3});
    const double s1 = sym_norm(f.stress(dir * (10.0 * R)));
    const double s2 = sym_norm(f.stress(dir * (20.0 * R)));
    CHECK(s1 / s2 == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("loop oracle: smooth part is symmetric on the axis") {
    const double R = 3e-8;
    const auto f = loop_fields(kB, R, kNu, kMu);
    for (double z : {0.4 * R, 1.3 * R}) {
        const double up = f.displacement({0, 0, z}).x +
                          kB / (4.0 * M_PI) * disc_solid_angle({0, 0, z}, R);
        const double dn = f.displacement({0, 0, -z}).x +
                          kB / (4.0 * M_PI) * disc_solid_angle({0, 0, -z}, R);
        CHECK(up == doctest::Approx(dn).epsilon(1e-9));
    }
}

TEST_CASE("loop oracle: zero Burgers gives zero fields") {
    const auto f = loop_fields(0.0, 3e-8, kNu, kMu);
    CHECK(norm(f.displacement({1e-8, 0.5e-8, 2e-8})) == 0.0);
    CHECK(sym_norm(f.stress({1e-8, 0.5e-8, 2e-8})) == 0.0);
}

namespace {

// sigma_global = Q sigma_local Q^T with local axes (ex, ey, ez) given as
// global vectors.
Sym3 rotate_sym(const Sym3& s_loc, const Vec3& ex, const Vec3& ey, const Vec3& ez) {
    const double q3[3][3] = {{ex.x, ey.x, ez.x}, {ex.y, ey.y, ez.y}, {ex.z, ey.z, ez.z}};
    const double l[3][3] = {{s_loc.xx, s_loc.xy, s_loc.xz},
                            {s_loc.xy, s_loc.yy, s_loc.yz},
                            {s_loc.xz, s_loc.yz, s_loc.zz}};
    double g[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int m = 0; m < 3; ++m) g[i][j] += q3[i][k] * l[k][m] * q3[j][m];
    return Sym3{g[0][0], g[1][1], g[2][2], g[0][1], g[0][2], g[1][2]};
}

} // namespace

TEST_CASE("loop oracle: reduces to straight dislocations near the line") {
    const double R = 3e-8;
    const auto loop = loop_fields(kB, R, kNu, kMu);
    const double r = R / 200.0;

    // Screw character near (0, R, 0), where b is parallel to the tangent.
    // Map the canonical screw (cut along -x_loc, jump +b z_loc across +y_loc)
    // onto the local geometry: the disc lies toward -y_glob and the jump is
    // +b x_glob across +z_glob, giving the frame (y, z, x) with b_s = +b.
    {
        const Vec3 q{0, R, 0};
        const Vec3 p = q + Vec3{0, r * 0.6, r * 0.8};
        const Vec3 ex{0, 1, 0}, ey{0, 0, 1}, ez{1, 0, 0};
        const Vec3 lp{dot(p - q, ex), dot(p - q, ey), dot(p - q, ez)};
        const Sym3 want = rotate_sym(screw_fields(kB, kMu).stress(lp), ex, ey, ez);
        const Sym3 got = loop.stress(p);
        CHECK(sym_norm(sym_diff(got, want)) < 0.05 * sym_norm(want));
    }

    // Edge character near (R, 0, 0), where b is normal to the tangent. The
    // canonical edge (cut along -x_loc, jump +b x_loc across +y_loc) maps with
    // x_loc = x_glob, y_loc = z_glob.
    {
        const Vec3 q{R, 0, 0};
        const Vec3 p = q + Vec3{r * 0.5, 0, r * 0.86};
        const Vec3 ex{1, 0, 0}, ey{0, 0, 1}, ez{0, -1, 0};
        const Vec3 lp{dot(p - q, ex), dot(p - q, ey), dot(p - q, ez)};
        const Sym3 want = rotate_sym(edge_fields(kB, kNu, kMu).stress(lp), ex, ey, ez);
        const Sym3 got = loop.stress(p);
        CHECK(sym_norm(sym_diff(got, want)) < 0.05 * sym_norm(want));
    }
}

TEST_CASE("oracle placement: transformed edge matches a shifted canonical edge") {
    MaterialModel mat;
    mat.youngs = 1.2141e11;
    mat.poisson = kNu;
    mat.density = 8960;
    mat.mode = Mode::plane_strain;
    const Vec3 core{2e-7, -1e-7, 0};
    const auto d = DislocationSpec::edge2d(core, {-1, 0, 0}, {kB, 0, 0});
    const auto general = oracle_for(d, mat);
    const auto canonical = edge_fields(kB, kNu, mat.shear());
    const Vec3 p{3.3e-7, 0.6e-7, 0};
    CHECK(norm(general.displacement(p) - canonical.displacement(p - core)) < 1e-18);
    CHECK(sym_norm(sym_diff(general.stress(p), canonical.stress(p - core))) <
          1e-10 * sym_norm(general.stress(p)));
}

TEST_CASE("peach-koehler force") {
    // Parallel edge dislocations on one glide plane: F_x = mu b^2 / (2 pi (1-nu) d).
    const double d = 1.3e-7;
    const auto f = edge_fields(kB, kNu, kMu);
    const Vec3 force = pk_force(f.stress({d, 0, 0}), {kB, 0, 0}, {0, 0, 1});
    const double want = kMu * kB * kB / (2.0 * M_PI * (1.0 - kNu) * d);
    CHECK(force.x == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(force.y) < 1e-12 * want);

    CHECK(norm(pk_force(Sym3{}, {kB, 0, 0}, {0, 0, 1})) == 0.0);

    std::mt19937 rng(9);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        Sym3 s{uni(rng), uni(rng), uni(rng), uni(rng), uni(rng), uni(rng)};
        const Vec3 b{uni(rng), uni(rng), uni(rng)};
        const Vec3 xi = normalized(Vec3{uni(rng), uni(rng), uni(rng)});
        CHECK(std::abs(dot(pk_force(s, b, xi), xi)) < 1e-12);
        // Linearity in sigma and b.
        const Vec3 f1 = pk_force(s, b, xi);
        const Vec3 f2 = pk_force(s * 2.0, b, xi);
        CHECK(norm(f2 - f1 * 2.0) < 1e-12);
        const Vec3 f3 = pk_force(s, b * 3.0, xi);
        CHECK(norm(f3 - f1 * 3.0) < 1e-12);
    }
}

TEST_CASE("driving force by energy gradient") {
    // Constant energy: zero force.
    std::vector<double> pos, en;
    for (int k = 0; k <= 10; ++k) {
        pos.push_back(2e-9 * k);
        en.push_back(5.0);
    }
    for (const auto& [x, fval] : driving_force_eg(pos, en)) CHECK(fval == 0.0);

    // Quadratic energy: central differences are exact.
    const double c = 3.7e12;
    for (std::size_t k = 0; k < pos.size(); ++k) en[k] = c * pos[k] * pos[k];
    for (const auto& [x, fval] : driving_force_eg(pos, en))
        CHECK(fval == doctest::Approx(-2.0 * c * x).epsilon(1e-10));

    // The paper's sampling: L = 2n nm gives a 2 nm stencil.
    std::vector<double> lp, le;
    for (int nn = 0; nn <= 100; ++nn) {
        lp.push_back(2.0 * nn * 1e-9);
        le.push_back(c * lp.back() * lp.back());
    }
    const auto table = driving_force_eg(lp, le);
    CHECK(table.size() == 99);
    CHECK(table.front().first == doctest::Approx(2e-9));

    // Non-uniform spacing rejected.
    std::vector<double> bad = lp;
    bad[5] += 1e-12;
    CHECK_THROWS(driving_force_eg(bad, le));
}

TEST_CASE("relative L2 difference") {
    std::vector<Vec3> ref{{1e-9, 2e-9, 0}, {-3e-9, 1e-9, 0}, {2e-9, -2e-9, 0}};
    std::vector<double> vols{1.0, 1.0, 2.0};
    CHECK(relative_l2_diff(ref, ref, vols) == 0.0);

    std::vector<Vec3> scaled = ref;
    for (auto& v : scaled) v *= 1.01;
    CHECK(relative_l2_diff(scaled, ref, vols) == doctest::Approx(0.01).epsilon(1e-12));

    std::vector<Vec3> zero(ref.size());
    CHECK_THROWS(relative_l2_diff(ref, zero, vols));
}
