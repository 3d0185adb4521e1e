#include "edpd/config.hpp"

#include <fstream>

namespace edpd {

namespace {

using nlohmann::json;

Vec3 parse_vec(const json& j, const std::string& field, int dim) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3))
        throw ConfigError(field, "expected an array of 2 or 3 numbers");
    if (dim > 0 && static_cast<int>(j.size()) != dim)
        throw ConfigError(field, "expected " + std::to_string(dim) + " components");
    Vec3 v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(field, "components must be numbers");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

double require_number(const json& j, const char* key, const std::string& field) {
    if (!j.contains(key)) throw ConfigError(field, "missing required value");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    return v.get<double>();
}

Mode parse_mode(const std::string& s) {
    if (s == "3d") return Mode::three_d;
    if (s == "plane-stress") return Mode::plane_stress;
    if (s == "plane-strain") return Mode::plane_strain;
    throw ConfigError("material.mode", "unknown mode '" + s + "'");
}

DislocationSpec parse_dislocation(const json& j, int dim, const std::string& field) {
    if (!j.contains("type")) throw ConfigError(field + ".type", "missing");
    const std::string type = j.at("type").get<std::string>();
    const Vec3 b = parse_vec(j.at("burgers"), field + ".burgers", 0);
    try {
        if (type == "half-plane" || type == "edge") {
            if (dim != 2) throw ConfigError(field, "half-plane cuts require a 2D box");
            return DislocationSpec::edge2d(parse_vec(j.at("core"), field + ".core", 0),
                                           parse_vec(j.at("cut_direction"), field + ".cut_direction", 0),
                                           b);
        }
        if (type == "rectangle" || type == "screw") {
            if (dim != 3) throw ConfigError(field, "rectangular cuts require a 3D box");
            auto d = DislocationSpec::rect3d(parse_vec(j.at("corner"), field + ".corner", 3),
                                             parse_vec(j.at("e1"), field + ".e1", 3),
                                             parse_vec(j.at("e2"), field + ".e2", 3), b);
            if (j.contains("normal")) {
                d.normal = normalized(parse_vec(j.at("normal"), field + ".normal", 3));
                d.validate();
            }
            return d;
        }
        if (type == "disc" || type == "loop") {
            if (dim != 3) throw ConfigError(field, "disc cuts require a 3D box");
            return DislocationSpec::disc3d(parse_vec(j.at("center"), field + ".center", 3),
                                           j.at("radius").get<double>(),
                                           parse_vec(j.at("normal"), field + ".normal", 3), b);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    } catch (const json::exception& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(field + ".type", "unknown cut type '" + type + "'");
}

} // namespace

std::uint64_t RunConfig::content_hash() const {
    const std::string dump = canonical.dump();
    std::uint64_t h = 1469598103934665603ull; // FNV-1a 64
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void RunConfig::validate() const {
    if (study != "single-run" && study != "delta-convergence" && study != "force-sweep")
        throw ConfigError("study", "unknown study type '" + study + "'");
    try {
        box.validate();
        material.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("geometry/material", e.what());
    }
    if ((material.mode == Mode::three_d) != (box.dim == 3))
        throw ConfigError("material.mode", "dimensional mode must match the box dimension");
    if (n < 2) throw ConfigError("discretization.n", "need at least 2 nodes per edge");
    if ((m_ratio > 0.0) == (delta > 0.0))
        throw ConfigError("discretization", "exactly one of m or delta must be given");
    if (horizon() <= box.spacing())
        throw ConfigError("discretization", "horizon must exceed the grid spacing");

    for (std::size_t i = 0; i < dislocations.size(); ++i) {
        const auto& d = dislocations[i];
        Vec3 anchor; // a point on the dislocation line
        if (const auto* hp = std::get_if<HalfPlaneCut>(&d.cut)) anchor = hp->core;
        else if (const auto* rc = std::get_if<RectCut>(&d.cut)) anchor = rc->corner + rc->e1 + rc->e2 * 0.5;
        else anchor = std::get<DiscCut>(d.cut).center;
        for (int a = 0; a < box.dim; ++a)
            if (anchor[a] < box.lower[a] || anchor[a] > box.lower[a] + box.edge_lengths[a])
                throw ConfigError("dislocations[" + std::to_string(i) + "]",
                                  "core must lie inside the box");
    }

    if (bc_source != "zero" && bc_source != "oracle-edge" && bc_source != "oracle-screw" &&
        bc_source != "oracle-loop" && bc_source != "oracle-superposition")
        throw ConfigError("boundary_condition", "unknown source '" + bc_source + "'");
    if (bc_source != "zero" && dislocations.empty())
        throw ConfigError("boundary_condition", "oracle sources require at least one dislocation");

    for (const auto& p : probes)
        if (p.samples < 1) throw ConfigError("outputs.probes", "samples must be positive");

    if (study == "delta-convergence" && study_params.n_values.size() < 1)
        throw ConfigError("study_params.n_values", "need at least one resolution");
    if (study == "force-sweep") {
        if (dislocations.size() != 2)
            throw ConfigError("dislocations", "force sweep requires exactly two dislocations");
        for (double s : study_params.separations)
            if (s < box.spacing())
                throw ConfigError("study_params.separations",
                                  "separation below one grid spacing");
    }
}

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        if (j.contains("study")) cfg.study = j.at("study").get<std::string>();

        const auto& geom = j.at("geometry");
        const Vec3 lower = parse_vec(geom.at("lower"), "geometry.lower", 0);
        const Vec3 edges = parse_vec(geom.at("edge_lengths"), "geometry.edge_lengths", 0);
        const int dim = geom.at("edge_lengths").size() == 2 ? 2 : 3;
        cfg.box.lower = lower;
        cfg.box.edge_lengths = edges;
        cfg.box.dim = dim;

        const auto& disc = j.at("discretization");
        cfg.n = disc.at("n").get<int>();
        for (int a = 0; a < 3; ++a) cfg.box.cells[a] = a < dim ? cfg.n : 1;
        if (disc.contains("m")) cfg.m_ratio = disc.at("m").get<double>();
        if (disc.contains("delta")) cfg.delta = disc.at("delta").get<double>();

        const auto& mat = j.at("material");
        cfg.material.youngs = require_number(mat, "youngs_modulus", "material.youngs_modulus");
        cfg.material.poisson = require_number(mat, "poisson_ratio", "material.poisson_ratio");
        cfg.material.density = require_number(mat, "density", "material.density");
        cfg.material.mode = parse_mode(mat.at("mode").get<std::string>());
        if (mat.contains("body_force"))
            cfg.material.body_force = parse_vec(mat.at("body_force"), "material.body_force", 0);

        if (j.contains("dislocations")) {
            const auto& ds = j.at("dislocations");
            for (std::size_t i = 0; i < ds.size(); ++i)
                cfg.dislocations.push_back(
                    parse_dislocation(ds[i], dim, "dislocations[" + std::to_string(i) + "]"));
        }

        if (j.contains("boundary_condition"))
            cfg.bc_source = j.at("boundary_condition").get<std::string>();

        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            if (s.contains("tolerance_rel")) cfg.solver.tol_rel = s.at("tolerance_rel").get<double>();
            if (s.contains("tolerance_abs")) cfg.solver.tol_abs = s.at("tolerance_abs").get<double>();
            if (s.contains("max_iterations"))
                cfg.solver.max_iterations = s.at("max_iterations").get<long>();
            if (s.contains("safety")) cfg.solver.safety = s.at("safety").get<double>();
            if (s.contains("dt_max_factor"))
                cfg.solver.dt_max_factor = s.at("dt_max_factor").get<double>();
            if (s.contains("n_min")) cfg.solver.n_min = s.at("n_min").get<int>();
            if (s.contains("gamma0")) cfg.solver.gamma0 = s.at("gamma0").get<double>();
            if (s.contains("f_gamma")) cfg.solver.f_gamma = s.at("f_gamma").get<double>();
            if (s.contains("f_dec")) cfg.solver.f_dec = s.at("f_dec").get<double>();
            if (s.contains("f_inc")) cfg.solver.f_inc = s.at("f_inc").get<double>();
            if (s.contains("warm_start")) cfg.warm_start = s.at("warm_start").get<bool>();
        }
        if (j.contains("oracle") && j.at("oracle").contains("rel_tol"))
            cfg.oracle_rel_tol = j.at("oracle").at("rel_tol").get<double>();

        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            if (o.contains("fields")) cfg.write_fields = o.at("fields").get<bool>();
            if (o.contains("probes")) {
                for (const auto& p : o.at("probes")) {
                    ProbeSpec ps;
                    ps.name = p.value("name", "probe" + std::to_string(cfg.probes.size()));
                    ps.from = parse_vec(p.at("from"), "outputs.probes.from", 0);
                    ps.to = parse_vec(p.at("to"), "outputs.probes.to", 0);
                    ps.samples = p.value("samples", 100);
                    cfg.probes.push_back(ps);
                }
            }
        }

        if (j.contains("study_params")) {
            const auto& sp = j.at("study_params");
            if (sp.contains("n_values"))
                cfg.study_params.n_values = sp.at("n_values").get<std::vector<int>>();
            if (sp.contains("separations"))
                cfg.study_params.separations = sp.at("separations").get<std::vector<double>>();
            if (sp.contains("eg_positions"))
                cfg.study_params.eg_positions = sp.at("eg_positions").get<std::vector<double>>();
            if (sp.contains("methods"))
                cfg.study_params.methods = sp.at("methods").get<std::vector<std::string>>();
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", e.what());
    }

    cfg.canonical = j;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", std::string("parse failure: ") + e.what());
    }
    return parse_config(j);
}

} // namespace edpd
