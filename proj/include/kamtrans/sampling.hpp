#pragma once

#include <cstdint>
#include <vector>

#include "kamtrans/density.hpp"
#include "kamtrans/grid.hpp"
#include "kamtrans/kernels.hpp"

namespace kamtrans {

/// A seeded batch of draws. Reproducible: the i-th value depends only on
/// (seed, i), so serial and parallel generation agree bitwise.
struct SampleBatch {
    std::vector<double> values;
    std::uint64_t seed = 0;

    std::size_t size() const { return values.size(); }
};

/// Inverse-CDF sampling driven by the SplitMix64 counter stream.
SampleBatch sample_source(const Density1D& d, std::size_t n, std::uint64_t seed,
                          Exec exec = Exec::parallel);

/// Push every sample through the (monotone) map interpolant.
SampleBatch pushforward_samples(const GridFunction& T, const SampleBatch& batch,
                                Exec exec = Exec::parallel);

/// Kolmogorov–Smirnov distance between the batch and the density's CDF.
double ks_distance(const SampleBatch& batch, const Density1D& d, Exec exec = Exec::parallel);

struct Histogram {
    double a, b;
    std::vector<std::int64_t> counts;

    int bins() const { return static_cast<int>(counts.size()); }
    double bin_width() const { return (b - a) / bins(); }
    double center(int k) const { return a + (k + 0.5) * bin_width(); }
    /// Empirical density value of bin k (count / (total * width)).
    double density(int k, std::size_t total) const {
        return static_cast<double>(counts[static_cast<std::size_t>(k)]) /
               (static_cast<double>(total) * bin_width());
    }
};

Histogram histogram(const SampleBatch& batch, double a, double b, int bins = 50,
                    Exec exec = Exec::parallel);

/// CSV: `bin_center,count,empirical_density,target_density`.
void write_histogram_csv(const Histogram& hist, std::size_t total, const Density1D& target,
                         std::ostream& os);

void write_samples_csv(const SampleBatch& batch, std::ostream& os);

}  // namespace kamtrans
