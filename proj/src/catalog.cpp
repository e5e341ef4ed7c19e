#include "kamtrans/catalog.hpp"

#include <cmath>

#include "kamtrans/errors.hpp"

namespace kamtrans {

namespace {

struct Parsed {
    std::string name;
    std::vector<std::string> args;
};

Parsed parse_call(const std::string& s) {
    const auto open = s.find('(');
    if (open == std::string::npos) return {s, {}};
    if (s.back() != ')') throw ConfigError("catalog: malformed entry '" + s + "'");
    Parsed p{s.substr(0, open), {}};
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::size_t pos = 0;
    while (pos <= inner.size()) {
        const auto comma = inner.find(',', pos);
        if (comma == std::string::npos) {
            p.args.push_back(inner.substr(pos));
            break;
        }
        p.args.push_back(inner.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return p;
}

double arg_num(const Parsed& p, std::size_t i) {
    try {
        return std::stod(p.args.at(i));
    } catch (const std::exception&) {
        throw ConfigError("catalog: bad numeric argument in '" + p.name + "'");
    }
}

}  // namespace

CatalogEntry resolve_catalog(const std::string& spec, const Grid& grid) {
    const Parsed p = parse_call(spec);

    if (p.name == "uniform") {
        return {spec,
                ScoreModel::closed_form("uniform", [](double) { return 0.0; },
                                        [](double) { return 0.0; }),
                Density1D("uniform", [](double) { return 1.0; }, grid.a, grid.b)};
    }

    if (p.name == "gaussian") {
        if (p.args.size() != 2) throw ConfigError("catalog: gaussian needs (m,sigma)");
        const double m = arg_num(p, 0);
        const double sigma = arg_num(p, 1);
        if (!(sigma > 0)) throw ConfigError("catalog: gaussian sigma must be > 0");
        const double inv_s2 = 1.0 / (sigma * sigma);
        return {spec,
                ScoreModel::closed_form(spec, [m, inv_s2](double x) { return -(x - m) * inv_s2; },
                                        [inv_s2](double) { return -inv_s2; }),
                Density1D(spec,
                          [m, inv_s2](double x) {
                              return std::exp(-0.5 * (x - m) * (x - m) * inv_s2);
                          },
                          grid.a, grid.b)};
    }

    if (p.name == "cubic_paper" || p.name == "cubic") {
        // rho(x) = ((x+1)^3 - 1)/7, vanishing at x = 0
        auto rho = [](double x) {
            const double w = x + 1.0;
            return (w * w * w - 1.0) / 7.0;
        };
        auto s = [](double x) {
            const double w = x + 1.0;
            return 3.0 * w * w / (w * w * w - 1.0);
        };
        auto sp = [](double x) {
            const double w = x + 1.0;
            const double den = w * w * w - 1.0;
            return (6.0 * w * den - 9.0 * w * w * w * w) / (den * den);
        };
        return {spec, ScoreModel::closed_form(spec, s, sp), Density1D(spec, rho, grid.a, grid.b)};
    }

    if (p.name == "quadratic_paper" || p.name == "quadratic") {
        // rho(x) = 4/3 - (2-x)^2/3, vanishing at x = 0
        auto rho = [](double x) {
            const double w = 2.0 - x;
            return 4.0 / 3.0 - w * w / 3.0;
        };
        auto s = [](double x) {
            const double w = 2.0 - x;
            return 2.0 * w / (4.0 - w * w);
        };
        auto sp = [](double x) {
            const double w = 2.0 - x;
            const double den = 4.0 - w * w;
            return -(8.0 + 2.0 * w * w) / (den * den);
        };
        return {spec, ScoreModel::closed_form(spec, s, sp), Density1D(spec, rho, grid.a, grid.b)};
    }

    if (p.name == "custom_grid") {
        if (p.args.size() != 1) throw ConfigError("catalog: custom_grid needs (file.csv)");
        GridFunction gf = read_csv_file(p.args[0]);
        if (!(gf.grid() == grid))
            throw ConfigError("catalog: custom_grid file '" + p.args[0] +
                              "' is not sampled on the working grid");
        return {spec, ScoreModel::from_grid(spec, std::move(gf)), std::nullopt};
    }

    throw ConfigError("catalog: unknown entry '" + spec + "'");
}

}  // namespace kamtrans
