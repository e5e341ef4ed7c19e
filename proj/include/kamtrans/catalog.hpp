#pragma once

#include <optional>
#include <string>

#include "kamtrans/density.hpp"
#include "kamtrans/grid.hpp"
#include "kamtrans/score.hpp"

namespace kamtrans {

/// A named distribution resolved on a working grid: its score, and — when
/// the density is known in closed form — a normalized Density1D for the OT
/// oracle and sampling. `custom_grid` entries carry a score only.
struct CatalogEntry {
    std::string name;
    ScoreModel score;
    std::optional<Density1D> density;
};

/// Resolve a catalog string on [grid.a, grid.b]:
///   uniform                  flat density, zero score
///   gaussian(m,sigma)        truncated Gaussian, score -(x-m)/sigma^2
///   cubic_paper  | cubic     density ((x+1)^3 - 1)/7
///   quadratic_paper | quadratic   density 4/3 - (2-x)^2/3
///   custom_grid(file.csv)    score read from a GridFunction CSV
/// Throws ConfigError for unknown names or malformed parameters.
CatalogEntry resolve_catalog(const std::string& spec, const Grid& grid);

}  // namespace kamtrans
