#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kamtrans/grid.hpp"

namespace kamtrans {

/// Execution policy for the batch kernels. The parallel variants use OpenMP
/// and are bit-identical to the serial references: every element is computed
/// independently from its index, and reductions are order-independent
/// (integer sums, max).
enum class Exec { serial, parallel };

/// SplitMix64 finalizer. The i-th draw of a stream is mix64(seed + (i+1)*GAMMA),
/// so any element can be generated in O(1) — the property that makes sampling
/// deterministic under both execution policies.
std::uint64_t mix64(std::uint64_t z);

/// u[i] in [0, 1): the i-th SplitMix64 output of the stream `seed`.
double uniform01_at(std::uint64_t seed, std::uint64_t i);

namespace kernels {

void uniform01(std::uint64_t seed, std::span<double> out, Exec exec);

/// out[i] = T(in[i]) through the grid interpolant.
void apply_map(const GridFunction& T, std::span<const double> in, std::span<double> out,
               Exec exec);

/// out[i] = f(in[i]) for an arbitrary pure function (used for quantile batches).
void transform(const std::function<double(double)>& f, std::span<const double> in,
               std::span<double> out, Exec exec);

/// Equal-width bin counts over [a, b]; samples outside are clamped into the
/// boundary bins.
std::vector<std::int64_t> histogram(std::span<const double> xs, double a, double b, int bins,
                                    Exec exec);

/// sup_x |F_emp(x) - cdf(x)| over a sorted sample.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf,
                    Exec exec);

}  // namespace kernels

}  // namespace kamtrans
