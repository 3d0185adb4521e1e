#include "edpd/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace edpd {

namespace {

namespace fs = std::filesystem;

ElasticField oracle_field(const RunConfig& cfg) {
    LoopQuadrature quad{cfg.oracle_rel_tol, 0.0};
    return superposed_oracle(cfg.dislocations, cfg.material, quad);
}

void validate_bc_kind(const RunConfig& cfg) {
    auto expect = [&](const char* what, bool ok) {
        if (!ok)
            throw ConfigError("boundary_condition",
                              std::string(cfg.bc_source) + " requires " + what);
    };
    if (cfg.bc_source == "oracle-edge")
        expect("a single half-plane dislocation",
               cfg.dislocations.size() == 1 &&
                   std::holds_alternative<HalfPlaneCut>(cfg.dislocations[0].cut));
    else if (cfg.bc_source == "oracle-screw")
        expect("a single rectangular-cut dislocation",
               cfg.dislocations.size() == 1 &&
                   std::holds_alternative<RectCut>(cfg.dislocations[0].cut));
    else if (cfg.bc_source == "oracle-loop")
        expect("a single disc dislocation",
               cfg.dislocations.size() == 1 &&
                   std::holds_alternative<DiscCut>(cfg.dislocations[0].cut));
}

double zero_state_residual(const NodeSet& nodes, const NeighborList& nl,
                           const MaterialModel& mat, const BoundaryField& bc) {
    std::vector<Vec3> u(nodes.size());
    for (std::size_t id = 0; id < nodes.size(); ++id)
        if (!nodes.is_interior(id)) u[id] = bc(nodes.positions[id]);
    StateField states;
    compute_states(nodes, nl, mat, u, states);
    std::vector<Vec3> f(nodes.size());
    compute_force_density(nodes, nl, mat, u, states, f);
    double r = 0.0;
    for (std::size_t id = 0; id < nodes.size(); ++id)
        if (nodes.is_interior(id)) r = std::max(r, norm2(f[id]));
    return std::sqrt(r);
}

std::vector<JumpSample> measure_jump_profile(const NodeSet& nodes, std::span<const Vec3> u,
                                             const DislocationSpec& d, double max_extent) {
    // Walk outward from the core along the cut and difference the nearest
    // straddling node pair at each station.
    Vec3 core, inward; // inward: from the core into the cut surface
    double reachable = 0.0;
    if (const auto* hp = std::get_if<HalfPlaneCut>(&d.cut)) {
        core = hp->core;
        inward = hp->dir;
        reachable = max_extent;
    } else if (const auto* rc = std::get_if<RectCut>(&d.cut)) {
        core = rc->corner + rc->e1 + rc->e2 * 0.5;
        inward = -normalized(rc->e1);
        reachable = max_extent;
    } else {
        const auto& dc = std::get<DiscCut>(d.cut);
        inward = -normalized(cross(cross(d.normal, d.burgers), d.normal)); // along -b
        core = dc.center - inward * dc.radius;                             // rim point
        reachable = 2.0 * dc.radius;
    }
    const Vec3 bhat = normalized(d.burgers);
    const double half = 0.5 * nodes.dx;
    std::vector<JumpSample> out;
    for (double s = half; s < reachable; s += nodes.dx) {
        const Vec3 p = core + inward * s;
        const std::size_t above = nearest_interior_node(nodes, p + d.normal * half);
        const std::size_t below = nearest_interior_node(nodes, p - d.normal * half);
        if (above == below) continue;
        if (!nodes.is_interior(above) || !nodes.is_interior(below)) continue;
        JumpSample js;
        js.distance_to_core = s;
        js.jump = dot(u[above] - u[below], bhat);
        out.push_back(js);
    }
    return out;
}

} // namespace

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["converged"] = converged;
    j["iterations"] = iterations;
    j["residual0"] = residual0;
    j["final_residual"] = final_residual;
    j["wall_seconds"] = wall_seconds;
    if (d_u >= 0.0) j["d_u"] = d_u;
    j["n"] = n;
    j["dx"] = dx;
    j["horizon"] = horizon;
    j["m_ratio"] = m_ratio;
    j["total_energy"] = total_energy;
    j["oracle_rel_tol"] = oracle_rel_tol;
    j["config_hash"] = config_hash;
    j["dislocation_signs"] = dislocation_signs;
    j["sign_flipped"] = sign_flipped;
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& prof : jump_profiles) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& s : prof) rows.push_back({{"distance", s.distance_to_core}, {"jump", s.jump}});
        profiles.push_back(rows);
    }
    j["jump_profiles"] = profiles;
    return j;
}

BoundaryField make_boundary_field(const RunConfig& cfg) {
    if (cfg.bc_source == "zero")
        return [](const Vec3&) { return Vec3{}; };
    validate_bc_kind(cfg);
    ElasticField field = oracle_field(cfg);
    return [field](const Vec3& p) { return field.displacement(p); };
}

bool reconcile_jump_conventions(std::vector<DislocationSpec>& dislocations,
                                const MaterialModel& mat, const BoxSpec& box, double dx,
                                double oracle_rel_tol) {
    bool flipped = false;
    const double extent = std::min({box.edge_lengths.x, box.edge_lengths.y,
                                    box.dim == 3 ? box.edge_lengths.z : box.edge_lengths.x});
    for (auto& d : dislocations) {
        const ElasticField f = oracle_for(d, mat, LoopQuadrature{oracle_rel_tol, 0.0});
        const Vec3 p = d.reference_point(extent);
        const double eps = 1e-3 * dx;
        const Vec3 jump = f.displacement(p + d.normal * eps) - f.displacement(p - d.normal * eps);
        const double expected = static_cast<double>(d.sign) * norm2(d.burgers);
        if (dot(jump, d.burgers) * expected < 0.0) {
            d.sign = -d.sign;
            flipped = true;
        }
    }
    return flipped;
}

Sym3 interpolate_stress(const NodeSet& nodes, std::span<const Sym3> sigma, const Vec3& p) {
    // Multilinear interpolation on the interior lattice.
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    for (int a = 0; a < nodes.dim; ++a) {
        const double rel = (p[a] - nodes.origin[a]) / nodes.dx - nodes.layer;
        int i0 = static_cast<int>(std::floor(rel));
        i0 = std::max(0, std::min(nodes.box_n[a] - 2, i0));
        base[a] = i0;
        w[a] = std::min(1.0, std::max(0.0, rel - i0));
    }
    Sym3 acc{};
    const int kmax = nodes.dim == 3 ? 1 : 0;
    for (int dk = 0; dk <= kmax; ++dk)
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di) {
                const double weight = (di ? w[0] : 1.0 - w[0]) * (dj ? w[1] : 1.0 - w[1]) *
                                      (nodes.dim == 3 ? (dk ? w[2] : 1.0 - w[2]) : 1.0);
                if (weight == 0.0) continue;
                const std::size_t id =
                    nodes.id_of(nodes.layer + base[0] + di, nodes.layer + base[1] + dj,
                                nodes.dim == 3 ? nodes.layer + base[2] + dk : 0);
                acc += sigma[id] * weight;
            }
    return acc;
}

RunResult run_single(const RunConfig& cfg, const RunOptions& opts) {
    cfg.validate();
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
    const auto t0 = std::chrono::steady_clock::now();

    // Validate output paths before the expensive solve.
    std::ofstream log_stream;
    if (!opts.out_dir.empty()) {
        fs::create_directories(opts.out_dir);
        std::ofstream probe_ok(fs::path(opts.out_dir) / ".writable");
        if (!probe_ok) throw std::runtime_error("output directory is not writable: " + opts.out_dir);
        probe_ok.close();
        fs::remove(fs::path(opts.out_dir) / ".writable");
    }

    RunResult res;
    res.report.n = cfg.n;
    res.report.horizon = cfg.horizon();
    res.report.m_ratio =
        cfg.m_ratio > 0.0 ? cfg.m_ratio : cfg.delta * cfg.n / cfg.box.edge_lengths.x;
    res.report.config_hash = cfg.content_hash();
    res.report.oracle_rel_tol = cfg.oracle_rel_tol;

    res.nodes = build_grid(cfg.box, cfg.horizon());
    res.report.dx = res.nodes.dx;
    res.neighbors = build_neighbors(res.nodes, cfg.horizon());

    std::vector<DislocationSpec> dislocations = cfg.dislocations;
    if (cfg.bc_source != "zero")
        res.report.sign_flipped = reconcile_jump_conventions(
            dislocations, cfg.material, cfg.box, res.nodes.dx, cfg.oracle_rel_tol);
    for (const auto& d : dislocations) res.report.dislocation_signs.push_back(d.sign);
    precompute_crossings(res.neighbors, res.nodes, dislocations);

    const BoundaryField bc = make_boundary_field(cfg);

    SolverParams params = cfg.solver;
    if (opts.log_csv && !opts.out_dir.empty()) {
        log_stream.open(fs::path(opts.out_dir) / "solver_log.csv");
        params.log = &log_stream;
    }

    std::vector<Vec3> u_init;
    std::optional<ElasticField> oracle;
    if (cfg.bc_source != "zero") oracle = oracle_field(cfg);
    if (cfg.warm_start && oracle) {
        u_init.resize(res.nodes.size());
        for (std::size_t id = 0; id < res.nodes.size(); ++id)
            u_init[id] = oracle->displacement(res.nodes.positions[id]);
        // Keep the stopping rule anchored to the cold-start residual.
        params.residual_scale =
            zero_state_residual(res.nodes, res.neighbors, cfg.material, bc);
    }

    res.state = relax(res.nodes, res.neighbors, cfg.material, params, bc, u_init);

    res.report.converged = res.state.converged;
    res.report.iterations = res.state.iterations;
    res.report.residual0 = res.state.residual0;
    res.report.final_residual = res.state.residual;

    res.virial = virial_stress(res.nodes, res.neighbors, cfg.material, res.state.u, res.state.states);
    res.report.total_energy =
        total_strain_energy(res.nodes, res.neighbors, cfg.material, res.state.u, res.state.states);

    if (oracle) {
        std::vector<Vec3> u_num, u_ref;
        std::vector<double> vols;
        const double v = res.nodes.nominal_volume();
        for (std::size_t id = 0; id < res.nodes.size(); ++id) {
            if (!res.nodes.is_interior(id)) continue;
            u_num.push_back(res.state.u[id]);
            u_ref.push_back(oracle->displacement(res.nodes.positions[id]));
            vols.push_back(v);
        }
        res.report.d_u = relative_l2_diff(u_num, u_ref, vols);
    }

    const double extent = std::min({cfg.box.edge_lengths.x, cfg.box.edge_lengths.y,
                                    cfg.box.dim == 3 ? cfg.box.edge_lengths.z : cfg.box.edge_lengths.x});
    for (const auto& d : dislocations)
        res.report.jump_profiles.push_back(
            measure_jump_profile(res.nodes, res.state.u, d, 0.45 * extent));

    res.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!opts.out_dir.empty()) {
        std::vector<double> theta(res.nodes.size(), 0.0);
        for (std::size_t id = 0; id < res.nodes.size(); ++id)
            theta[id] = res.state.states.dilatation[id];
        const FieldOutput fields = collect_fields(res.nodes, res.state.u, res.virial, theta);
        if (cfg.write_fields && opts.csv)
            write_fields_csv(fields, (fs::path(opts.out_dir) / "fields.csv").string());
        if (cfg.write_fields && opts.vtk)
            write_fields_vtk(fields, res.nodes, (fs::path(opts.out_dir) / "fields.vtk").string());
        for (const auto& pr : cfg.probes) {
            const auto rows = probe_line(res.nodes, fields, pr.from, pr.to, pr.samples);
            write_probe_csv(rows, (fs::path(opts.out_dir) / ("probe_" + pr.name + ".csv")).string());
        }
        std::ofstream rep(fs::path(opts.out_dir) / "report.json");
        rep << res.report.to_json().dump(2) << '\n';
    }
    return res;
}

DeltaStudy delta_convergence_study(const RunConfig& cfg, const RunOptions& opts) {
    if (cfg.study_params.n_values.empty())
        throw ConfigError("study_params.n_values", "delta-convergence study needs resolutions");
    if (cfg.m_ratio <= 0.0)
        throw ConfigError("discretization.m",
                          "delta-convergence sweeps resolution at fixed character number M");

    DeltaStudy study;
    std::string partial;
    for (int n : cfg.study_params.n_values) {
        RunConfig member = cfg;
        member.study = "single-run";
        member.n = n;
        for (int a = 0; a < member.box.dim; ++a) member.box.cells[a] = n;
        member.canonical["discretization"]["n"] = n;
        RunOptions mo = opts;
        if (!opts.out_dir.empty())
            mo.out_dir = (fs::path(opts.out_dir) / ("n" + std::to_string(n))).string();
        const RunResult r = run_single(member, mo);
        if (!r.report.converged)
            throw std::runtime_error("delta study: member run N=" + std::to_string(n) +
                                     " did not converge (partial results kept)");
        DeltaRow row;
        row.horizon = member.horizon();
        row.m_ratio = cfg.m_ratio;
        row.n = n;
        row.d_u = r.report.d_u;
        study.rows.push_back(row);

        if (!opts.out_dir.empty()) {
            std::ofstream out(fs::path(opts.out_dir) / "delta_convergence.csv");
            out << "delta,M,N,D_u\n";
            for (const auto& rr : study.rows)
                out << format_double(rr.horizon) << ',' << format_double(rr.m_ratio) << ',' << rr.n
                    << ',' << format_double(rr.d_u) << '\n';
        }
    }
    std::sort(study.rows.begin(), study.rows.end(),
              [](const DeltaRow& a, const DeltaRow& b) { return a.horizon < b.horizon; });
    for (std::size_t i = 1; i < study.rows.size(); ++i)
        if (study.rows[i].d_u < study.rows[i - 1].d_u) study.monotone = false;
    if (!study.monotone)
        std::cerr << "warning: D_u is not monotone non-increasing as the horizon shrinks\n";
    return study;
}

ForceStudy force_sweep_study(const RunConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    if (cfg.study != "force-sweep")
        throw ConfigError("study", "force_sweep_study requires study type force-sweep");

    const DislocationSpec& fixed = cfg.dislocations[0];
    const DislocationSpec& movable = cfg.dislocations[1];
    const auto* hp_fixed = std::get_if<HalfPlaneCut>(&fixed.cut);
    const auto* hp_mov = std::get_if<HalfPlaneCut>(&movable.cut);
    if (!hp_fixed || !hp_mov)
        throw ConfigError("dislocations", "force sweep supports half-plane dislocations");
    const Vec3 axis{1.0, 0.0, 0.0}; // glide direction of the pair
    const Vec3 line{0.0, 0.0, 1.0};

    const bool want_nlpk = std::count(cfg.study_params.methods.begin(),
                                      cfg.study_params.methods.end(), "NLPK") > 0;
    const bool want_lpk = std::count(cfg.study_params.methods.begin(),
                                     cfg.study_params.methods.end(), "LPK") > 0;
    const bool want_eg = std::count(cfg.study_params.methods.begin(),
                                    cfg.study_params.methods.end(), "EG") > 0;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::map<double, ForceRow> table;
    for (double s : cfg.study_params.separations)
        table[s] = ForceRow{s, nan, nan, nan};

    // Single-dislocation run; its virial stress feeds the nonlocal PK force.
    if (want_nlpk) {
        RunConfig single = cfg;
        single.study = "single-run";
        single.dislocations = {fixed};
        single.bc_source = "oracle-edge";
        single.probes.clear();
        single.canonical["derived"] = "nlpk-base";
        RunOptions so = opts;
        if (!opts.out_dir.empty()) so.out_dir = (fs::path(opts.out_dir) / "single").string();
        const RunResult base = run_single(single, so);
        if (!base.report.converged)
            throw std::runtime_error("force sweep: base single-dislocation run did not converge");
        for (auto& [s, row] : table) {
            const Vec3 p = hp_fixed->core + axis * s;
            const Sym3 sig = interpolate_stress(base.nodes, base.virial, p);
            row.nlpk = dot(pk_force(sig, movable.burgers, line), axis);
        }
    }

    if (want_lpk) {
        const ElasticField f = oracle_for(fixed, cfg.material, LoopQuadrature{cfg.oracle_rel_tol});
        for (auto& [s, row] : table) {
            const Vec3 p = hp_fixed->core + axis * s;
            row.lpk = dot(pk_force(f.stress(p), movable.burgers, line), axis);
        }
    }

    if (want_eg) {
        if (cfg.study_params.eg_positions.size() < 3)
            throw ConfigError("study_params.eg_positions", "EG needs at least 3 energy samples");
        std::vector<double> positions = cfg.study_params.eg_positions;
        std::sort(positions.begin(), positions.end());
        std::vector<double> energies;
        for (double L : positions) {
            RunConfig member = cfg;
            member.study = "single-run";
            member.dislocations = {fixed, movable};
            member.dislocations[1].cut = HalfPlaneCut{hp_fixed->core + axis * L, hp_mov->dir};
            member.bc_source = "oracle-superposition";
            member.probes.clear();
            member.write_fields = false;
            member.canonical["derived_eg_position"] = L;
            RunOptions mo = opts;
            if (!opts.out_dir.empty())
                mo.out_dir = (fs::path(opts.out_dir) / ("eg_" + format_double(L))).string();
            const RunResult r = run_single(member, mo);
            if (!r.report.converged)
                throw std::runtime_error("force sweep: EG member did not converge at L=" +
                                         format_double(L));
            energies.push_back(r.report.total_energy);
        }
        for (const auto& [pos, force] : driving_force_eg(positions, energies)) {
            auto it = table.find(pos);
            if (it == table.end()) table[pos] = ForceRow{pos, nan, nan, force};
            else it->second.eg = force;
        }
    }

    ForceStudy study;
    for (auto& [s, row] : table) study.rows.push_back(row);
    if (!opts.out_dir.empty()) {
        std::ofstream out(fs::path(opts.out_dir) / "force_sweep.csv");
        out << "separation,NLPK,LPK,EG\n";
        for (const auto& r : study.rows)
            out << format_double(r.separation) << ',' << format_double(r.nlpk) << ','
                << format_double(r.lpk) << ',' << format_double(r.eg) << '\n';
    }
    return study;
}

} // namespace edpd
