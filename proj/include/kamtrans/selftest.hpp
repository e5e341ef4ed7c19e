#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kamtrans/grid.hpp"

namespace kamtrans {

/// Group-property tolerance for the randomized map trials at n = 128:
/// 10x the largest discretization error observed over a 100-seed
/// grid-refinement study (max ~2.9e-3, first-order in h from
/// second-differencing composed interpolants).
inline constexpr double kTolGroup = 0.03;

struct CheckResult {
    std::string name;
    bool pass;
    double measure;
    double tolerance;
};

/// A randomized strictly increasing endpoint-fixing cubic on the grid's
/// interval: x + g (b-a) t(1-t)(2t-1-d) with g in [-0.2, 0.2], d in
/// [-0.5, 0.5] drawn from the SplitMix64 stream of `seed`.
GridFunction random_monotone_cubic_map(const Grid& grid, std::uint64_t seed);

/// The cross-module invariant suite behind the `selftest` subcommand.
/// Every entry corresponds to a documented property; all should pass on a
/// healthy build.
std::vector<CheckResult> run_selftest();

/// Render results as one line per property; returns the number of failures.
int print_check_results(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace kamtrans
