#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edpd/config.hpp"
#include "edpd/run.hpp"

namespace {

int default_threads() {
    if (const char* env = std::getenv("EDPD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string format = "csv";
    int threads = default_threads();
    bool log_csv = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "field output format: csv|vtk|both")
        ->check(CLI::IsMember({"csv", "vtk", "both"}));
    cmd->add_option("--threads", args.threads, "worker thread count (overrides EDPD_THREADS)");
    cmd->add_flag("--log-csv", args.log_csv, "stream solver progress to solver_log.csv");
}

edpd::RunOptions to_options(const CommonArgs& args) {
    edpd::RunOptions o;
    o.out_dir = args.out_dir;
    o.csv = args.format == "csv" || args.format == "both";
    o.vtk = args.format == "vtk" || args.format == "both";
    o.threads = args.threads;
    o.log_csv = args.log_csv;
    return o;
}

constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meshless peridynamic simulator for Volterra dislocations"};
    app.require_subcommand(1);

    CommonArgs run_args, delta_args, force_args, probe_args;
    auto* cmd_run = app.add_subcommand("run", "single simulation from a config");
    add_common(cmd_run, run_args);
    auto* cmd_delta = app.add_subcommand("study-delta", "horizon-convergence study");
    add_common(cmd_delta, delta_args);
    auto* cmd_force = app.add_subcommand("study-force", "two-dislocation driving-force study");
    add_common(cmd_force, force_args);
    auto* cmd_probe = app.add_subcommand("probe", "re-extract probe lines from a finished run");
    add_common(cmd_probe, probe_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const auto cfg = edpd::load_config(run_args.config_path);
            const auto res = edpd::run_single(cfg, to_options(run_args));
            std::cout << res.report.to_json().dump(2) << '\n';
            if (!res.report.converged) {
                std::cerr << "solver did not converge: residual " << res.report.final_residual
                          << " after " << res.report.iterations << " iterations\n";
                return kExitNoConvergence;
            }
        } else if (cmd_delta->parsed()) {
            const auto cfg = edpd::load_config(delta_args.config_path);
            const auto study = edpd::delta_convergence_study(cfg, to_options(delta_args));
            std::cout << "delta,M,N,D_u\n";
            for (const auto& r : study.rows)
                std::cout << r.horizon << ',' << r.m_ratio << ',' << r.n << ',' << r.d_u << '\n';
        } else if (cmd_force->parsed()) {
            const auto cfg = edpd::load_config(force_args.config_path);
            const auto study = edpd::force_sweep_study(cfg, to_options(force_args));
            std::cout << "separation,NLPK,LPK,EG\n";
            for (const auto& r : study.rows)
                std::cout << r.separation << ',' << r.nlpk << ',' << r.lpk << ',' << r.eg << '\n';
        } else if (cmd_probe->parsed()) {
            const auto cfg = edpd::load_config(probe_args.config_path);
            if (cfg.probes.empty()) throw edpd::ConfigError("outputs.probes", "no probes configured");
            const auto nodes = edpd::build_grid(cfg.box, cfg.horizon());
            const auto fields = edpd::read_fields_csv(
                (std::filesystem::path(probe_args.out_dir) / "fields.csv").string());
            for (const auto& pr : cfg.probes) {
                const auto rows = edpd::probe_line(nodes, fields, pr.from, pr.to, pr.samples);
                const auto path =
                    std::filesystem::path(probe_args.out_dir) / ("probe_" + pr.name + ".csv");
                edpd::write_probe_csv(rows, path.string());
                std::cout << "wrote " << path.string() << '\n';
            }
        }
    } catch (const edpd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
