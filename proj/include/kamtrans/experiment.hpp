#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kamtrans/fixed_point.hpp"
#include "kamtrans/kam.hpp"

namespace kamtrans {

enum class Method { kam, fixed_point, gaussian_affine };

/// One experiment, as read from a key=value config file with sections:
///
///   [experiment]
///   source = uniform            # catalog entry
///   target = quadratic_paper
///   a = 0.0
///   b = 1.0
///   grid_n = 128
///   method = kam                # kam | fixed_point | gaussian_affine
///   sample_count = 1000000
///   seed = 20240817
///   bins = 50
///   output_dir = out/run
///   dump_system = false
///   dump_samples = false
///
///   [kam]                       # optional overrides
///   max_iters = 20
///   tol_v = 1e-8
///   tol_residual = 1e-8
///   omega = 1.0
///   monotonicity_guard = true
///   bc = dirichlet              # dirichlet | free
///
///   [fixed_point]
///   max_iters = 50
///   tol = 1e-8
///   omega = 0.5
///   extend_q_inverse = false
///
///   [gaussian_affine]
///   iters = 12
struct ExperimentConfig {
    std::string source = "uniform";
    std::string target;
    double a = 0.0;
    double b = 1.0;
    int grid_n = 128;
    Method method = Method::kam;
    std::size_t sample_count = 1000000;
    std::uint64_t seed = 20240817;
    int bins = 50;
    std::string output_dir = "out";
    bool dump_system = false;
    bool dump_samples = false;
    KamOptions kam;
    FpOptions fixed_point;
    int affine_iters = 12;
};

/// Parse and validate (grid_n >= 16, a < b, resolvable names checked at run
/// time). Throws ConfigError on malformed input.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

struct ExperimentReport {
    std::vector<std::string> files;                         // paths written
    std::vector<std::pair<std::string, std::string>> summary;  // ordered key=value
    int exit_code = 0;  // 0 ok, 2 not converged (1 = error, reported by throwing)

    std::string summary_value(const std::string& key) const;
};

/// Run one experiment and write history.csv / map.csv / score.csv /
/// hist.csv / summary.txt into cfg.output_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Run every *.cfg in a directory, `jobs` at a time. Returns the worst exit
/// code.
int run_config_directory(const std::string& dir, int jobs);

}  // namespace kamtrans
