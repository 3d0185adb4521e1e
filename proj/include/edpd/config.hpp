#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "edpd/dislocation.hpp"
#include "edpd/grid.hpp"
#include "edpd/material.hpp"
#include "edpd/solver.hpp"

namespace edpd {

/// Invalid or inconsistent run configuration; carries the offending field.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what) {}
};

struct ProbeSpec {
    std::string name;
    Vec3 from, to;
    int samples = 100;
};

struct StudyParams {
    std::vector<int> n_values;           // delta-convergence series (fixed M)
    std::vector<double> separations;     // force sweep: NLPK/LPK evaluation points
    std::vector<double> eg_positions;    // force sweep: energy sample positions
    std::vector<std::string> methods{"NLPK", "LPK", "EG"};
};

struct RunConfig {
    std::string study = "single-run"; // single-run | delta-convergence | force-sweep
    BoxSpec box;                      // cells resolved from discretization
    MaterialModel material;
    std::vector<DislocationSpec> dislocations;
    std::string bc_source = "zero";

    int n = 0;             // nodes per edge
    double m_ratio = 0.0;  // character number M = delta N / L (exclusive with delta)
    double delta = 0.0;

    SolverParams solver;
    bool warm_start = false;
    double oracle_rel_tol = 1e-8;

    bool write_fields = true;
    std::vector<ProbeSpec> probes;
    StudyParams study_params;

    nlohmann::json canonical; // resolved config used for hashing

    double horizon_for(int n_cells) const {
        return delta > 0.0 ? delta : m_ratio * box.edge_lengths.x / n_cells;
    }
    double horizon() const { return horizon_for(n); }

    std::uint64_t content_hash() const;
    void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

} // namespace edpd
