#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edpd/config.hpp"
#include "edpd/oracle.hpp"
#include "edpd/output.hpp"
#include "edpd/solver.hpp"

namespace edpd {

struct RunOptions {
    std::string out_dir;   // empty: no files written
    bool csv = true;
    bool vtk = false;
    int threads = 0;       // 0: leave as-is
    bool log_csv = false;
};

struct JumpSample {
    double distance_to_core = 0.0;
    double jump = 0.0; // measured jump projected on the Burgers direction
};

struct RunReport {
    bool converged = false;
    long iterations = 0;
    double residual0 = 0.0;
    double final_residual = 0.0;
    double wall_seconds = 0.0;
    double d_u = -1.0; // relative L2 displacement difference (-1: no oracle)
    int n = 0;
    double dx = 0.0;
    double horizon = 0.0;
    double m_ratio = 0.0;
    double total_energy = 0.0;
    double oracle_rel_tol = 0.0;
    std::uint64_t config_hash = 0;
    std::vector<int> dislocation_signs;
    bool sign_flipped = false;
    std::vector<std::vector<JumpSample>> jump_profiles; // one per dislocation

    nlohmann::json to_json() const;
};

/// Full single-run pipeline: grid, crossings, jump-convention check, relax,
/// virial stress, field/probe outputs and the metrics report.
struct RunResult {
    RunReport report;
    NodeSet nodes;
    NeighborList neighbors;
    SolverState state;
    std::vector<Sym3> virial;
};

RunResult run_single(const RunConfig& cfg, const RunOptions& opts);

struct DeltaRow {
    double horizon = 0.0;
    double m_ratio = 0.0;
    int n = 0;
    double d_u = 0.0;
};

/// Runs the configured resolutions at fixed M and tabulates D_u vs horizon.
/// Emits a warning (returned flag) if D_u fails to decrease monotonically.
struct DeltaStudy {
    std::vector<DeltaRow> rows;
    bool monotone = true;
};
DeltaStudy delta_convergence_study(const RunConfig& cfg, const RunOptions& opts);

struct ForceRow {
    double separation = 0.0;
    double nlpk = 0.0, lpk = 0.0, eg = 0.0; // NaN where not computed
};

struct ForceStudy {
    std::vector<ForceRow> rows;
};
ForceStudy force_sweep_study(const RunConfig& cfg, const RunOptions& opts);

/// Builds the boundary displacement provider for the configured source.
BoundaryField make_boundary_field(const RunConfig& cfg);

/// Compares the oracle jump across each cut against the spec's sign
/// convention and flips mismatched sign flags; returns true if any flipped.
bool reconcile_jump_conventions(std::vector<DislocationSpec>& dislocations,
                                const MaterialModel& mat, const BoxSpec& box, double dx,
                                double oracle_rel_tol);

/// Bilinear/trilinear interpolation of interior virial stress at p.
Sym3 interpolate_stress(const NodeSet& nodes, std::span<const Sym3> sigma, const Vec3& p);

} // namespace edpd
