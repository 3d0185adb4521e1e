#include "edpd/constitutive.hpp"

#include <cmath>
#include <stdexcept>

namespace edpd {

double embedded_extension(const Vec3& y_prime, double xi_norm) {
    const double y = norm(y_prime);
    if (y == 0.0) throw std::runtime_error("embedded_extension: bond collapsed to zero length");
    return y - xi_norm;
}

namespace {

/// Weighted extension sum A = sum omega |xi| e' V_eff for one node.
double weighted_extension_sum(const NodeSet& nodes, const NeighborList& nl,
                              std::span<const Vec3> u, std::size_t id) {
    double acc = 0.0;
    nl.for_each_bond(nodes, id, [&](std::size_t j, const StencilEntry& e, const Vec3& corr) {
        const Vec3 yp = embedded_deformed_bond(e.xi, u[id], u[j], corr);
        const double ext = embedded_extension(yp, e.xi_norm);
        acc += e.omega * e.xi_norm * ext * e.v_eff;
    });
    return acc;
}

} // namespace

void compute_states(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                    std::span<const Vec3> u, StateField& states) {
    states.resize(nodes.size());
    const double c = mat.dilatation_coefficient();
    const bool two_d = mat.mode != Mode::three_d;
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        const double m = nl.weighted_volume[id];
        if (m <= 0.0) throw std::runtime_error("compute_states: node has zero weighted volume");
        const double a = weighted_extension_sum(nodes, nl, u, id);
        const double theta = c * a / m;
        states.dilatation[id] = theta;
        // (omega e'^d) . x = (omega e') . x - theta m / 3; identically zero in 3D.
        states.dev_coupling[id] = two_d ? a - theta * m / 3.0 : 0.0;
    }
}

double scalar_force_state(const MaterialModel& mat, double m, double theta, double dev_coupling,
                          double omega, double xi_norm, double extension) {
    const double alpha = mat.alpha_numerator() / m;
    const double e_dev = extension - theta * xi_norm / 3.0;
    if (mat.mode == Mode::three_d)
        return 3.0 * mat.k_prime() * theta * omega * xi_norm / m + alpha * omega * e_dev;
    const double c = mat.dilatation_coefficient();
    return c * (mat.k_prime() * theta - alpha / 3.0 * dev_coupling) * omega * xi_norm / m +
           alpha * omega * e_dev;
}

void compute_force_density(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                           std::span<const Vec3> u, const StateField& states,
                           std::span<Vec3> force) {
    const double c = mat.dilatation_coefficient();
    const double kp = mat.k_prime();
    const double alpha_num = mat.alpha_numerator();

    // Per-node bond-independent pieces of T': T' = omega*(P*|xi| + alpha*e' - Q*|xi|)
    // with P = (c k' theta - (c alpha/3) S)/m and Q = alpha theta / 3.
    const std::size_t n = nodes.size();
    std::vector<double> p_coef(n), q_coef(n), a_coef(n);
    for (std::size_t id = 0; id < n; ++id) {
        const double m = nl.weighted_volume[id];
        const double alpha = alpha_num / m;
        const double theta = states.dilatation[id];
        p_coef[id] = c * (kp * theta - alpha / 3.0 * states.dev_coupling[id]) / m;
        q_coef[id] = alpha * theta / 3.0;
        a_coef[id] = alpha;
    }

    for (std::size_t id = 0; id < n; ++id) {
        force[id] = Vec3{};
        if (!nodes.is_interior(id)) continue;
        Vec3 f{};
        nl.for_each_bond(nodes, id, [&](std::size_t j, const StencilEntry& e, const Vec3& corr) {
            const Vec3 yp = embedded_deformed_bond(e.xi, u[id], u[j], corr);
            const double ylen = norm(yp);
            if (ylen == 0.0) throw std::runtime_error("force: bond collapsed to zero length");
            const double ext = ylen - e.xi_norm;
            const double t_sum = e.omega * ((p_coef[id] + p_coef[j]) * e.xi_norm +
                                            (a_coef[id] + a_coef[j]) * ext -
                                            (q_coef[id] + q_coef[j]) * e.xi_norm);
            f += yp * (t_sum * e.v_eff / ylen);
        });
        force[id] = f + mat.body_force;
    }
}

double strain_energy_density(const NodeSet& nodes, const NeighborList& nl,
                             const MaterialModel& mat, std::span<const Vec3> u,
                             const StateField& states, std::size_t id) {
    const double m = nl.weighted_volume[id];
    const double alpha = mat.alpha_numerator() / m;
    const double theta = states.dilatation[id];
    double dev = 0.0;
    nl.for_each_bond(nodes, id, [&](std::size_t j, const StencilEntry& e, const Vec3& corr) {
        const Vec3 yp = embedded_deformed_bond(e.xi, u[id], u[j], corr);
        const double e_dev = embedded_extension(yp, e.xi_norm) - theta * e.xi_norm / 3.0;
        dev += e.omega * e_dev * e_dev * e.v_eff;
    });
    return 0.5 * mat.k_prime() * theta * theta + 0.5 * alpha * dev;
}

double total_strain_energy(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                           std::span<const Vec3> u, const StateField& states) {
    const double v = nodes.nominal_volume();
    double total = 0.0;
    for (std::size_t id = 0; id < nodes.size(); ++id)
        if (nodes.is_interior(id))
            total += strain_energy_density(nodes, nl, mat, u, states, id) * v;
    return total;
}

std::vector<Sym3> virial_stress(const NodeSet& nodes, const NeighborList& nl,
                                const MaterialModel& mat, std::span<const Vec3> u,
                                const StateField& states) {
    const double c = mat.dilatation_coefficient();
    const double kp = mat.k_prime();
    const double alpha_num = mat.alpha_numerator();

    const std::size_t n = nodes.size();
    std::vector<double> p_coef(n), q_coef(n), a_coef(n);
    for (std::size_t id = 0; id < n; ++id) {
        const double m = nl.weighted_volume[id];
        const double alpha = alpha_num / m;
        const double theta = states.dilatation[id];
        p_coef[id] = c * (kp * theta - alpha / 3.0 * states.dev_coupling[id]) / m;
        q_coef[id] = alpha * theta / 3.0;
        a_coef[id] = alpha;
    }

    std::vector<Sym3> sigma(n);
    for (std::size_t id = 0; id < n; ++id) {
        if (!nodes.is_interior(id)) continue;
        Sym3 s{};
        nl.for_each_bond(nodes, id, [&](std::size_t j, const StencilEntry& e, const Vec3& corr) {
            const Vec3 yp = embedded_deformed_bond(e.xi, u[id], u[j], corr);
            const double ylen = norm(yp);
            if (ylen == 0.0) throw std::runtime_error("virial: bond collapsed to zero length");
            const double ext = ylen - e.xi_norm;
            const double t_sum = e.omega * ((p_coef[id] + p_coef[j]) * e.xi_norm +
                                            (a_coef[id] + a_coef[j]) * ext -
                                            (q_coef[id] + q_coef[j]) * e.xi_norm);
            const Vec3 f = yp * (t_sum / ylen); // pairwise force density
            const double w = 0.5 * e.v_eff;
            s.xx += w * f.x * yp.x;
            s.yy += w * f.y * yp.y;
            s.zz += w * f.z * yp.z;
            s.xy += w * 0.5 * (f.x * yp.y + f.y * yp.x);
            s.xz += w * 0.5 * (f.x * yp.z + f.z * yp.x);
            s.yz += w * 0.5 * (f.y * yp.z + f.z * yp.y);
        });
        sigma[id] = s;
    }
    return sigma;
}

double node_dilatation(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                       std::span<const Vec3> u, std::size_t id) {
    const double m = nl.weighted_volume[id];
    if (m <= 0.0) throw std::runtime_error("dilatation: node has zero weighted volume");
    return mat.dilatation_coefficient() * weighted_extension_sum(nodes, nl, u, id) / m;
}

} // namespace edpd
