#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kamtrans/catalog.hpp"
#include "kamtrans/errors.hpp"
#include "kamtrans/experiment.hpp"
#include "kamtrans/gaussian_affine.hpp"
#include "kamtrans/score_nd.hpp"
#include "kamtrans/selftest.hpp"

using namespace kamtrans;
namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, const std::string& output_dir, bool dump_system,
            bool dump_samples, int jobs) {
    if (fs::is_directory(config_path)) return run_config_directory(config_path, jobs);
    ExperimentConfig cfg = parse_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    cfg.dump_system = cfg.dump_system || dump_system;
    cfg.dump_samples = cfg.dump_samples || dump_samples;
    const ExperimentReport rep = run_experiment(cfg);
    for (const auto& [k, v] : rep.summary) std::cout << k << '=' << v << '\n';
    return rep.exit_code;
}

int cmd_oracle(const std::string& mu, const std::string& nu, double a, double b, int n,
               const std::string& out) {
    const Grid grid(a, b, n);
    const CatalogEntry me = resolve_catalog(mu, grid);
    const CatalogEntry ne = resolve_catalog(nu, grid);
    if (!me.density || !ne.density)
        throw ConfigError("oracle: both catalog entries need a closed-form density");
    const GridFunction T = increasing_rearrangement(*me.density, *ne.density, grid);
    std::ofstream os(out);
    if (!os) throw DomainError("cannot open " + out);
    os << "x,T_ot\n";
    for (int i = 0; i < grid.n; ++i)
        os << format_double(grid.node(i)) << ',' << format_double(T.value(i)) << '\n';
    std::cout << "wrote " << out << " (" << grid.n << " rows)\n";
    return 0;
}

int cmd_gaussian_demo(double m, double sigma, double a0, double b0, int iters,
                      const std::string& out) {
    const AffineTrajectory traj = run_affine(m, sigma, a0, b0, iters);
    if (out.empty()) {
        write_affine_csv(traj, std::cout);
    } else {
        std::ofstream os(out);
        if (!os) throw DomainError("cannot open " + out);
        write_affine_csv(traj, os);
    }
    return 0;
}

int cmd_check_nd() {
    int failures = 0;
    for (const NdCheck& c : run_nd_checks()) {
        std::printf("[%s] %s  (measured %.3g, allowed %.3g)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measure, c.tolerance);
        if (!c.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

int cmd_selftest() { return print_check_results(run_selftest(), std::cout) == 0 ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transport map construction by score-matching Newton iterations"};
    app.require_subcommand(1);

    // run
    std::string config_path, output_dir;
    bool dump_system = false, dump_samples = false;
    int jobs = 1;
    CLI::App* run = app.add_subcommand("run", "run an experiment config (or a directory of them)");
    run->add_option("config", config_path, "config file, or directory with --jobs")->required();
    run->add_option("--output-dir", output_dir, "override [experiment] output_dir");
    run->add_flag("--dump-system", dump_system, "write the assembled bands and rhs as CSV");
    run->add_flag("--dump-samples", dump_samples, "write the pushed sample batch as CSV");
    run->add_option("--jobs", jobs, "concurrent configs when running a directory");

    // oracle
    std::string mu = "uniform", nu;
    double oa = 0.0, ob = 1.0;
    int on = 128;
    std::string oracle_out = "map.csv";
    CLI::App* oracle = app.add_subcommand("oracle", "emit the increasing rearrangement as CSV");
    oracle->add_option("--mu", mu, "source catalog entry");
    oracle->add_option("--nu", nu, "target catalog entry")->required();
    oracle->add_option("--a", oa, "interval left endpoint");
    oracle->add_option("--b", ob, "interval right endpoint");
    oracle->add_option("--n", on, "grid nodes");
    oracle->add_option("--out", oracle_out, "output path");

    // gaussian-demo
    double gm = 1.0, gsigma = 2.0, ga0 = -1.0, gb0 = 0.0;
    int giters = 12;
    std::string demo_out;
    CLI::App* demo =
        app.add_subcommand("gaussian-demo", "closed-form affine recurrence trajectory as CSV");
    demo->add_option("--m", gm, "target mean");
    demo->add_option("--sigma", gsigma, "target standard deviation");
    demo->add_option("--a0", ga0, "initial score slope");
    demo->add_option("--b0", gb0, "initial score intercept");
    demo->add_option("--iters", giters, "iterations");
    demo->add_option("--out", demo_out, "output path (default stdout)");

    // fixed-point
    std::string fp_config, fp_outdir;
    double fp_omega = -1.0;
    CLI::App* fixed =
        app.add_subcommand("fixed-point", "run a config with the fixed-point constructor");
    fixed->add_option("config", fp_config, "experiment config file")->required();
    fixed->add_option("--omega", fp_omega, "override relaxation in (0, 1]");
    fixed->add_option("--output-dir", fp_outdir, "override [experiment] output_dir");

    CLI::App* check = app.add_subcommand("check-nd", "invariants of the general-d score operator");
    CLI::App* self = app.add_subcommand("selftest", "run the full cross-module invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, output_dir, dump_system, dump_samples, jobs);
        if (oracle->parsed()) return cmd_oracle(mu, nu, oa, ob, on, oracle_out);
        if (demo->parsed()) return cmd_gaussian_demo(gm, gsigma, ga0, gb0, giters, demo_out);
        if (fixed->parsed()) {
            ExperimentConfig cfg = parse_config(fp_config);
            cfg.method = Method::fixed_point;
            if (fp_omega > 0.0) cfg.fixed_point.omega = fp_omega;
            if (!fp_outdir.empty()) cfg.output_dir = fp_outdir;
            const ExperimentReport rep = run_experiment(cfg);
            for (const auto& [k, v] : rep.summary) std::cout << k << '=' << v << '\n';
            return rep.exit_code;
        }
        if (check->parsed()) return cmd_check_nd();
        if (self->parsed()) return cmd_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
