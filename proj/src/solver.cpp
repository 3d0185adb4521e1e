#include "edpd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edpd {

double stable_timestep(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                       double safety) {
    if (safety <= 0.0 || safety > 1.0)
        throw std::invalid_argument("stable_timestep: safety must be in (0,1]");
    mat.validate();

    const double c = mat.dilatation_coefficient();
    const double kp = mat.k_prime();
    const double alpha_num = mat.alpha_numerator();

    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        if (!nodes.is_interior(id)) continue;
        const double m = nl.weighted_volume[id];
        if (m <= 0.0) throw std::runtime_error("stable_timestep: node without bonds");
        const double alpha = alpha_num / m;
        double stiffness = 0.0; // sum over bonds of C_bond V_eff
        nl.for_each_bond(nodes, id, [&](std::size_t, const StencilEntry& e, const Vec3&) {
            const double c_bond =
                2.0 * e.omega *
                (alpha + c * c * kp * e.omega * e.xi_norm * e.xi_norm * e.v_eff / (m * m));
            stiffness += c_bond * e.v_eff;
        });
        dt_min = std::min(dt_min, std::sqrt(2.0 * mat.density / stiffness));
    }
    if (!std::isfinite(dt_min)) throw std::runtime_error("stable_timestep: no interior nodes");
    return safety * dt_min;
}

void apply_boundary(const NodeSet& nodes, SolverState& state, const BoundaryField& bc) {
    if (!bc) throw std::invalid_argument("apply_boundary: boundary field is empty");
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        if (nodes.is_interior(id)) continue;
        state.u[id] = bc(nodes.positions[id]);
        state.v[id] = Vec3{};
        state.a[id] = Vec3{};
    }
}

namespace {

double max_interior_force_norm(const NodeSet& nodes, std::span<const Vec3> f) {
    double r = 0.0;
    for (std::size_t id = 0; id < nodes.size(); ++id)
        if (nodes.is_interior(id)) r = std::max(r, norm2(f[id]));
    return std::sqrt(r);
}

} // namespace

SolverState relax(const NodeSet& nodes, const NeighborList& nl, const MaterialModel& mat,
                  const SolverParams& params, const BoundaryField& bc,
                  std::span<const Vec3> u_init) {
    mat.validate();
    const std::size_t n = nodes.size();

    SolverState st;
    st.u.assign(n, Vec3{});
    st.v.assign(n, Vec3{});
    st.a.assign(n, Vec3{});
    st.force.assign(n, Vec3{});
    if (!u_init.empty()) {
        if (u_init.size() != n) throw std::invalid_argument("relax: initial field size mismatch");
        std::copy(u_init.begin(), u_init.end(), st.u.begin());
    }

    const double dt0 = params.dt > 0.0 ? params.dt : stable_timestep(nodes, nl, mat, params.safety);
    const double dt_max = params.dt_max > 0.0 ? params.dt_max : params.dt_max_factor * dt0;
    st.dt = dt0;
    st.gamma = params.gamma0;
    int upcount = 0;
    const double inv_rho = 1.0 / mat.density;

    apply_boundary(nodes, st, bc);

    if (params.log) *params.log << "iteration,residual,dt,gamma,power_sign\n";

    auto evaluate_forces = [&]() {
        compute_states(nodes, nl, mat, st.u, st.states);
        compute_force_density(nodes, nl, mat, st.u, st.states, st.force);
    };

    evaluate_forces();
    st.residual0 = max_interior_force_norm(nodes, st.force);
    const double scale = params.residual_scale > 0.0 ? params.residual_scale : st.residual0;
    const double tol = std::max(params.tol_rel * scale, params.tol_abs);
    st.residual = st.residual0;
    st.residual_history.push_back(st.residual);
    if (st.residual <= tol) {
        st.converged = true;
        st.iterations = 1;
        return st;
    }

    for (long it = 1; it <= params.max_iterations; ++it) {
        // Velocity Verlet step on interior nodes; fictitious nodes are pinned.
        const double dt = st.dt;
        for (std::size_t id = 0; id < n; ++id) {
            if (!nodes.is_interior(id)) continue;
            st.u[id] += st.v[id] * dt + st.a[id] * (0.5 * dt * dt);
        }
        evaluate_forces();
        for (std::size_t id = 0; id < n; ++id) {
            if (!nodes.is_interior(id)) continue;
            const Vec3 a_new = st.force[id] * inv_rho;
            st.v[id] += (st.a[id] + a_new) * (0.5 * dt);
            st.a[id] = a_new;
        }

        st.residual = max_interior_force_norm(nodes, st.force);
        st.iterations = it;
        st.residual_history.push_back(st.residual);
        if (!std::isfinite(st.residual))
            throw std::runtime_error("relax: non-finite force density at iteration " +
                                     std::to_string(it));

        // FIRE: global power, then velocity mixing with the global force
        // direction and global speed.
        double power = 0.0, f2 = 0.0, v2 = 0.0;
        for (std::size_t id = 0; id < n; ++id) {
            if (!nodes.is_interior(id)) continue;
            power += dot(st.force[id], st.v[id]);
            f2 += norm2(st.force[id]);
            v2 += norm2(st.v[id]);
        }
        if (f2 > 0.0 && v2 > 0.0) {
            const double mix = st.gamma * std::sqrt(v2 / f2);
            for (std::size_t id = 0; id < n; ++id) {
                if (!nodes.is_interior(id)) continue;
                st.v[id] = st.v[id] * (1.0 - st.gamma) + st.force[id] * mix;
            }
        }
        if (power > 0.0) {
            ++upcount;
            if (upcount > params.n_min) {
                st.dt = std::min(st.dt * params.f_inc, dt_max);
                st.gamma *= params.f_gamma;
            }
        } else {
            for (std::size_t id = 0; id < n; ++id)
                if (nodes.is_interior(id)) st.v[id] = Vec3{};
            st.dt *= params.f_dec;
            st.gamma = params.gamma0;
            upcount = 0;
        }

        if (params.log && (it % params.log_every == 0 || st.residual <= tol))
            *params.log << it << ',' << st.residual << ',' << st.dt << ',' << st.gamma << ','
                        << (power > 0.0 ? 1 : -1) << '\n';

        if (st.residual <= tol) {
            st.converged = true;
            break;
        }
    }
    return st;
}

} // namespace edpd
