#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kamtrans/errors.hpp"
#include "kamtrans/experiment.hpp"
#include "kamtrans/grid.hpp"

using namespace kamtrans;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("experiment");

namespace {

std::string tmp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("kamtrans_test_" + tag);
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parsing with sections and defaults") {
    const ExperimentConfig cfg = parse_config_text(R"(
# benchmark run
[experiment]
source = uniform
target = quadratic_paper
a = 0.0
b = 1.0
grid_n = 128
method = kam
sample_count = 1000
seed = 7
output_dir = /tmp/x

[kam]
max_iters = 9
omega = 0.5
bc = free
)");
    CHECK(cfg.source == "uniform");
    CHECK(cfg.target == "quadratic_paper");
    CHECK(cfg.grid_n == 128);
    CHECK(cfg.kam.max_iters == 9);
    CHECK(cfg.kam.omega == 0.5);
    CHECK(cfg.kam.bc == BoundaryCondition::free_collocation);
    CHECK(cfg.fixed_point.omega == 0.5);  // default
}

TEST_CASE("config validation rejects bad values") {
    CHECK_THROWS_AS(parse_config_text("[experiment]\ntarget = uniform\ngrid_n = 8\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\ntarget = uniform\na = 2\nb = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\n"), ConfigError);  // target required
    CHECK_THROWS_AS(parse_config_text("[experiment]\ntarget = uniform\nmethod = nope\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\ntarget = uniform\nnonsense line\n"),
                    ConfigError);
}

TEST_CASE("unknown catalog names fail at run time with ConfigError") {
    ExperimentConfig cfg = parse_config_text("[experiment]\ntarget = mystery\n");
    cfg.output_dir = tmp_dir("badname");
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("benchmark run writes all declared artifacts and they parse back") {
    ExperimentConfig cfg;
    cfg.source = "uniform";
    cfg.target = "quadratic_paper";
    cfg.grid_n = 64;
    cfg.sample_count = 20000;
    cfg.kam.max_iters = 30;
    cfg.output_dir = tmp_dir("nu2_small");
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.exit_code == 0);

    for (const std::string& f : rep.files) CHECK(fs::exists(f));
    // columns x,T,T_ot and x,q,p parse back into grid functions
    {
        std::ifstream is(cfg.output_dir + "/map.csv");
        std::string header;
        std::getline(is, header);
        CHECK(header == "x,T,T_ot");
    }
    const std::string hist = slurp(cfg.output_dir + "/history.csv");
    CHECK(hist.rfind("iter,v_sup,residual_sup,residual_l2\n", 0) == 0);
    const std::string summary = slurp(cfg.output_dir + "/summary.txt");
    CHECK(summary.find("converged=true") != std::string::npos);
    CHECK(rep.summary_value("method") == "kam");
}

TEST_CASE("source equal to target converges immediately with W1 near zero") {
    ExperimentConfig cfg;
    cfg.source = "quadratic_paper";
    cfg.target = "quadratic_paper";
    cfg.grid_n = 64;
    cfg.sample_count = 5000;
    cfg.output_dir = tmp_dir("same");
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.exit_code == 0);
    CHECK(rep.summary_value("iterations") == "1");
    CHECK(std::stod(rep.summary_value("w1_pushforward_target")) <= 1e-6);
    CHECK(std::stod(rep.summary_value("map_sup_vs_ot")) <= 1e-6);
}

TEST_CASE("gaussian_affine method reports the recurrence errors") {
    ExperimentConfig cfg;
    cfg.source = "gaussian(0,1)";
    cfg.target = "gaussian(1,2)";
    cfg.method = Method::gaussian_affine;
    cfg.a = -7.0;
    cfg.b = 9.0;
    cfg.grid_n = 64;
    cfg.sample_count = 5000;
    cfg.affine_iters = 12;
    cfg.output_dir = tmp_dir("aff");
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.exit_code == 0);
    CHECK(std::stod(rep.summary_value("err_a_final")) <= 1e-12);
    CHECK(std::stod(rep.summary_value("err_b_final")) <= 1e-12);
    const std::string hist = slurp(cfg.output_dir + "/history.csv");
    CHECK(hist.rfind("n,a,b,A,B,err_a,err_b\n", 0) == 0);
}

TEST_CASE("identical config and seed produce byte-identical outputs") {
    ExperimentConfig cfg;
    cfg.source = "uniform";
    cfg.target = "cubic_paper";
    cfg.grid_n = 64;
    cfg.sample_count = 20000;
    cfg.kam.max_iters = 6;
    cfg.output_dir = tmp_dir("det1");
    run_experiment(cfg);
    ExperimentConfig cfg2 = cfg;
    cfg2.output_dir = tmp_dir("det2");
    run_experiment(cfg2);
    for (const std::string name :
         {"history.csv", "map.csv", "score.csv", "hist.csv", "summary.txt"}) {
        CHECK(slurp(cfg.output_dir + "/" + name) == slurp(cfg2.output_dir + "/" + name));
    }
}

TEST_CASE("custom_grid scores run without an oracle") {
    const Grid g(0.0, 1.0, 64);
    const std::string dir = tmp_dir("custom");
    fs::create_directories(dir);
    const std::string csv = dir + "/score_in.csv";
    write_csv(GridFunction::sample(g, [](double x) { return -(x - 0.5); }), csv);

    ExperimentConfig cfg;
    cfg.source = "uniform";
    cfg.target = "custom_grid(" + csv + ")";
    cfg.grid_n = 64;
    cfg.sample_count = 100;
    cfg.output_dir = dir + "/out";
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.summary_value("oracle") == "unavailable");
    CHECK(!fs::exists(cfg.output_dir + "/map.csv"));
    CHECK(fs::exists(cfg.output_dir + "/score.csv"));
}

TEST_CASE("fixed_point method produces its own history format") {
    ExperimentConfig cfg;
    cfg.source = "gaussian(0,1)";
    cfg.target = "gaussian(1,2)";
    cfg.method = Method::fixed_point;
    cfg.a = -7.0;
    cfg.b = 9.0;
    cfg.grid_n = 17;
    cfg.sample_count = 5000;
    cfg.fixed_point.omega = 0.5;
    cfg.fixed_point.tol = 1e-5;
    cfg.fixed_point.max_iters = 24;
    cfg.fixed_point.extend_q_inverse = true;
    cfg.output_dir = tmp_dir("fp");
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.exit_code == 0);
    const std::string hist = slurp(cfg.output_dir + "/history.csv");
    CHECK(hist.rfind("iter,increment_sup,clamped\n", 0) == 0);
}

TEST_SUITE_END();
