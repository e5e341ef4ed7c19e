#include "kamtrans/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "kamtrans/catalog.hpp"
#include "kamtrans/errors.hpp"
#include "kamtrans/gaussian_affine.hpp"
#include "kamtrans/sampling.hpp"

namespace fs = std::filesystem;

namespace kamtrans {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using KvMap = std::map<std::string, std::string>;  // "section.key" -> value

KvMap read_kv(const std::string& text, const std::string& origin) {
    KvMap kv;
    std::istringstream is(text);
    std::string line, section = "experiment";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, double>) return std::stod(v);
        else if constexpr (std::is_same_v<T, int>) return std::stoi(v);
        else return static_cast<T>(std::stoull(v));
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    const KvMap kv = read_kv(text, origin);
    ExperimentConfig cfg;
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("experiment.source")) cfg.source = *v;
    if (const auto* v = get("experiment.target")) cfg.target = *v;
    if (const auto* v = get("experiment.a")) cfg.a = parse_num<double>(*v, "a");
    if (const auto* v = get("experiment.b")) cfg.b = parse_num<double>(*v, "b");
    if (const auto* v = get("experiment.grid_n")) cfg.grid_n = parse_num<int>(*v, "grid_n");
    if (const auto* v = get("experiment.method")) {
        if (*v == "kam") cfg.method = Method::kam;
        else if (*v == "fixed_point") cfg.method = Method::fixed_point;
        else if (*v == "gaussian_affine") cfg.method = Method::gaussian_affine;
        else throw ConfigError("config: unknown method '" + *v + "'");
    }
    if (const auto* v = get("experiment.sample_count"))
        cfg.sample_count = parse_num<std::size_t>(*v, "sample_count");
    if (const auto* v = get("experiment.seed")) cfg.seed = parse_num<std::uint64_t>(*v, "seed");
    if (const auto* v = get("experiment.bins")) cfg.bins = parse_num<int>(*v, "bins");
    if (const auto* v = get("experiment.output_dir")) cfg.output_dir = *v;
    if (const auto* v = get("experiment.dump_system")) cfg.dump_system = parse_bool(*v, "dump_system");
    if (const auto* v = get("experiment.dump_samples"))
        cfg.dump_samples = parse_bool(*v, "dump_samples");

    if (const auto* v = get("kam.max_iters")) cfg.kam.max_iters = parse_num<int>(*v, "kam.max_iters");
    if (const auto* v = get("kam.tol_v")) cfg.kam.tol_v = parse_num<double>(*v, "kam.tol_v");
    if (const auto* v = get("kam.tol_residual"))
        cfg.kam.tol_residual = parse_num<double>(*v, "kam.tol_residual");
    if (const auto* v = get("kam.omega")) cfg.kam.omega = parse_num<double>(*v, "kam.omega");
    if (const auto* v = get("kam.monotonicity_guard"))
        cfg.kam.monotonicity_guard = parse_bool(*v, "kam.monotonicity_guard");
    if (const auto* v = get("kam.bc")) {
        if (*v == "dirichlet") cfg.kam.bc = BoundaryCondition::dirichlet_zero;
        else if (*v == "free") cfg.kam.bc = BoundaryCondition::free_collocation;
        else throw ConfigError("config: kam.bc must be dirichlet or free");
    }

    if (const auto* v = get("fixed_point.max_iters"))
        cfg.fixed_point.max_iters = parse_num<int>(*v, "fixed_point.max_iters");
    if (const auto* v = get("fixed_point.tol"))
        cfg.fixed_point.tol = parse_num<double>(*v, "fixed_point.tol");
    if (const auto* v = get("fixed_point.omega"))
        cfg.fixed_point.omega = parse_num<double>(*v, "fixed_point.omega");
    if (const auto* v = get("fixed_point.extend_q_inverse"))
        cfg.fixed_point.extend_q_inverse = parse_bool(*v, "fixed_point.extend_q_inverse");

    if (const auto* v = get("gaussian_affine.iters"))
        cfg.affine_iters = parse_num<int>(*v, "gaussian_affine.iters");

    if (cfg.target.empty()) throw ConfigError("config: target is required");
    if (!(cfg.a < cfg.b)) throw ConfigError("config: requires a < b");
    if (cfg.grid_n < 16) throw ConfigError("config: grid_n must be >= 16");
    if (cfg.sample_count < 1) throw ConfigError("config: sample_count must be >= 1");
    if (cfg.bins < 1) throw ConfigError("config: bins must be >= 1");
    if (!(cfg.kam.omega > 0.0 && cfg.kam.omega <= 1.0))
        throw ConfigError("config: kam.omega must be in (0, 1]");
    if (!(cfg.fixed_point.omega > 0.0 && cfg.fixed_point.omega <= 1.0))
        throw ConfigError("config: fixed_point.omega must be in (0, 1]");
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string ExperimentReport::summary_value(const std::string& key) const {
    for (const auto& [k, v] : summary)
        if (k == key) return v;
    throw DomainError("summary key not found: " + key);
}

namespace {

struct GaussParams {
    double m, sigma;
};

GaussParams gaussian_params(const std::string& spec) {
    const auto open = spec.find('(');
    if (spec.rfind("gaussian(", 0) != 0 || spec.back() != ')')
        throw ConfigError("gaussian_affine method requires gaussian(m,sigma) endpoints, got '" +
                          spec + "'");
    const std::string inner = spec.substr(open + 1, spec.size() - open - 2);
    const auto comma = inner.find(',');
    if (comma == std::string::npos) throw ConfigError("gaussian(m,sigma): missing comma");
    return {std::stod(inner.substr(0, comma)), std::stod(inner.substr(comma + 1))};
}

class OutputWriter {
public:
    OutputWriter(const std::string& dir, ExperimentReport& report) : dir_(dir), report_(report) {
        fs::create_directories(dir_);
    }

    std::ofstream open(const std::string& name) {
        const std::string path = (fs::path(dir_) / name).string();
        std::ofstream os(path);
        if (!os) throw DomainError("cannot open " + path + " for writing");
        report_.files.push_back(path);
        return os;
    }

private:
    std::string dir_;
    ExperimentReport& report_;
};

void add(ExperimentReport& r, const std::string& k, const std::string& v) {
    r.summary.emplace_back(k, v);
}
void add(ExperimentReport& r, const std::string& k, double v) {
    r.summary.emplace_back(k, format_double(v));
}

/// map.csv, score.csv, hist.csv and the shared summary entries for a
/// constructed transport map; used by all three methods.
void write_map_outputs(const ExperimentConfig& cfg, const Grid& grid, const GridFunction& T,
                       const ScoreModel& q, const GridFunction& p_final,
                       const CatalogEntry& source, const CatalogEntry& target, OutputWriter& out,
                       ExperimentReport& report) {
    const bool have_densities = source.density.has_value() && target.density.has_value();

    if (have_densities) {
        const GridFunction T_ot = increasing_rearrangement(*source.density, *target.density, grid);
        {
            auto os = out.open("map.csv");
            os << "x,T,T_ot\n";
            for (int i = 0; i < grid.n; ++i)
                os << format_double(grid.node(i)) << ',' << format_double(T.value(i)) << ','
                   << format_double(T_ot.value(i)) << '\n';
        }
        double map_sup = 0.0;
        for (int i = 1; i + 1 < grid.n; ++i)
            map_sup = std::max(map_sup, std::abs(T.value(i) - T_ot.value(i)));
        add(report, "map_sup_vs_ot", map_sup);

        const QuadratureResult w1 = wasserstein1_pushforward(*source.density, T, *target.density);
        add(report, "w1_pushforward_target", w1.value);
        add(report, "w1_error_estimate", w1.error_estimate);

        const SampleBatch src = sample_source(*source.density, cfg.sample_count, cfg.seed);
        const SampleBatch pushed = pushforward_samples(T, src);
        const double ks = ks_distance(pushed, *target.density);
        add(report, "ks_distance", ks);

        const Histogram hist = histogram(pushed, grid.a, grid.b, cfg.bins);
        {
            auto os = out.open("hist.csv");
            write_histogram_csv(hist, pushed.size(), *target.density, os);
        }
        if (cfg.dump_samples) {
            auto os = out.open("samples.csv");
            write_samples_csv(pushed, os);
        }
    } else {
        add(report, "oracle", "unavailable");
    }

    {
        auto os = out.open("score.csv");
        os << "x,q,p\n";
        for (int i = 0; i < grid.n; ++i)
            os << format_double(grid.node(i)) << ',' << format_double(q(grid.node(i))) << ','
               << format_double(p_final.value(i)) << '\n';
    }
}

void write_summary(OutputWriter& out, const ExperimentReport& report) {
    auto os = out.open("summary.txt");
    for (const auto& [k, v] : report.summary) os << k << '=' << v << '\n';
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const Grid grid(cfg.a, cfg.b, cfg.grid_n);
    const CatalogEntry source = resolve_catalog(cfg.source, grid);
    const CatalogEntry target = resolve_catalog(cfg.target, grid);

    ExperimentReport report;
    OutputWriter out(cfg.output_dir, report);
    add(report, "source", cfg.source);
    add(report, "target", cfg.target);
    add(report, "a", cfg.a);
    add(report, "b", cfg.b);
    add(report, "grid_n", static_cast<double>(cfg.grid_n));
    add(report, "seed", std::to_string(cfg.seed));

    if (cfg.method == Method::kam) {
        add(report, "method", "kam");
        if (cfg.dump_system) {
            const EllipticOperator op = assemble(target.score, grid, cfg.kam.bc);
            std::vector<double> rhs(static_cast<std::size_t>(grid.n));
            for (int i = 0; i < grid.n; ++i)
                rhs[static_cast<std::size_t>(i)] =
                    source.score(grid.node(i)) - target.score(grid.node(i));
            auto os = out.open("system.csv");
            op.dump_system(os, &rhs);
        }
        const KamState state = run_kam(source.score, target.score, grid, cfg.kam);
        {
            auto os = out.open("history.csv");
            write_history_csv(state.history, os);
        }
        const GridFunction T = flatten(state.T);
        write_map_outputs(cfg, grid, T, target.score, state.p_n.grid_values(), source, target, out,
                          report);
        add(report, "converged", state.converged ? "true" : "false");
        add(report, "iterations", std::to_string(state.iter));
        if (!state.history.empty()) {
            add(report, "v_sup_final", state.history.back().v_sup);
            add(report, "residual_sup_final", state.history.back().residual_sup);
            add(report, "residual_l2_final", state.history.back().residual_l2);
        }
        add(report, "score_clamp_events", std::to_string(target.score.clamp_count()));
        report.exit_code = state.converged ? 0 : 2;
        write_summary(out, report);
        return report;
    }

    if (cfg.method == Method::fixed_point) {
        add(report, "method", "fixed_point");
        const FpResult res = run_fixed_point(source.score, target.score, grid, cfg.fixed_point);
        {
            auto os = out.open("history.csv");
            os << "iter,increment_sup,clamped\n";
            for (const auto& row : res.history)
                os << row.iter << ',' << format_double(row.increment_sup) << ',' << row.clamped
                   << '\n';
        }
        const GridFunction p_final = score_operator_1d(source.score, res.T);
        write_map_outputs(cfg, grid, res.T, target.score, p_final, source, target, out, report);
        add(report, "converged", res.converged ? "true" : "false");
        add(report, "iterations", std::to_string(res.iterations));
        if (!res.history.empty()) add(report, "increment_sup_final", res.history.back().increment_sup);
        report.exit_code = res.converged ? 0 : 2;
        write_summary(out, report);
        return report;
    }

    // gaussian_affine
    add(report, "method", "gaussian_affine");
    const GaussParams ps = gaussian_params(cfg.source);
    const GaussParams pt = gaussian_params(cfg.target);
    const double a0 = -1.0 / (ps.sigma * ps.sigma);
    const double b0 = ps.m / (ps.sigma * ps.sigma);
    const AffineTrajectory traj = run_affine(pt.m, pt.sigma, a0, b0, cfg.affine_iters);
    {
        auto os = out.open("history.csv");
        write_affine_csv(traj, os);
    }
    const GridFunction T = GridFunction::sample(
        grid, [&](double x) { return traj.map_slope * x + traj.map_intercept; },
        Interp::monotone_cubic);
    const GridFunction p_final = GridFunction::sample(grid, [&](double x) {
        return traj.states.back().a * x + traj.states.back().b;
    });
    write_map_outputs(cfg, grid, T, target.score, p_final, source, target, out, report);
    const AffineState& last = traj.states.back();
    const double err_a = std::abs(last.a + 1.0 / (pt.sigma * pt.sigma));
    const double err_b = std::abs(last.b - pt.m / (pt.sigma * pt.sigma));
    add(report, "err_a_final", err_a);
    add(report, "err_b_final", err_b);
    add(report, "map_slope", traj.map_slope);
    add(report, "map_intercept", traj.map_intercept);
    const bool converged = std::abs(last.A - 1.0) <= cfg.kam.tol_v && std::abs(last.B) <= cfg.kam.tol_v;
    add(report, "converged", converged ? "true" : "false");
    add(report, "iterations", std::to_string(cfg.affine_iters));
    report.exit_code = converged ? 0 : 2;
    write_summary(out, report);
    return report;
}

int run_config_directory(const std::string& dir, int jobs) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".cfg") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw ConfigError("no *.cfg files in " + dir);
    jobs = std::max(1, jobs);

    std::vector<int> codes(paths.size(), 0);
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= paths.size()) return;
                i = next++;
            }
            try {
                codes[i] = run_experiment(parse_config(paths[i])).exit_code;
            } catch (const std::exception&) {
                codes[i] = 1;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

}  // namespace kamtrans
