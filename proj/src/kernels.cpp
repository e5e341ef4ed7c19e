#include "kamtrans/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kamtrans {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01_at(std::uint64_t seed, std::uint64_t i) {
    constexpr std::uint64_t GAMMA = 0x9E3779B97F4A7C15ULL;
    const std::uint64_t z = mix64(seed + (i + 1) * GAMMA);
    return static_cast<double>(z >> 11) * 0x1.0p-53;  // 53-bit mantissa in [0,1)
}

namespace kernels {

void uniform01(std::uint64_t seed, std::span<double> out, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(out.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = uniform01_at(seed, static_cast<std::uint64_t>(i));
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = uniform01_at(seed, static_cast<std::uint64_t>(i));
    }
}

void apply_map(const GridFunction& T, std::span<const double> in, std::span<double> out,
               Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(in.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = T(in[static_cast<std::size_t>(i)]);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = T(in[static_cast<std::size_t>(i)]);
    }
}

void transform(const std::function<double(double)>& f, std::span<const double> in,
               std::span<double> out, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(in.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = f(in[static_cast<std::size_t>(i)]);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = f(in[static_cast<std::size_t>(i)]);
    }
}

namespace {
inline int bin_index(double x, double a, double inv_width, int bins) {
    int k = static_cast<int>((x - a) * inv_width);
    return std::clamp(k, 0, bins - 1);
}
}  // namespace

std::vector<std::int64_t> histogram(std::span<const double> xs, double a, double b, int bins,
                                    Exec exec) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    const double inv_width = bins / (b - a);
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            std::vector<std::int64_t> local(static_cast<std::size_t>(bins), 0);
#pragma omp for schedule(static) nowait
            for (std::int64_t i = 0; i < n; ++i)
                ++local[static_cast<std::size_t>(
                    bin_index(xs[static_cast<std::size_t>(i)], a, inv_width, bins))];
#pragma omp critical
            for (int k = 0; k < bins; ++k)
                counts[static_cast<std::size_t>(k)] += local[static_cast<std::size_t>(k)];
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            ++counts[static_cast<std::size_t>(
                bin_index(xs[static_cast<std::size_t>(i)], a, inv_width, bins))];
    }
    return counts;
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf,
                    Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(sorted.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    double ks = 0.0;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(max : ks)
        for (std::int64_t i = 0; i < n; ++i) {
            const double F = cdf(sorted[static_cast<std::size_t>(i)]);
            const double lo = F - static_cast<double>(i) * inv_n;
            const double hi = static_cast<double>(i + 1) * inv_n - F;
            ks = std::max(ks, std::max(lo, hi));
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            const double F = cdf(sorted[static_cast<std::size_t>(i)]);
            const double lo = F - static_cast<double>(i) * inv_n;
            const double hi = static_cast<double>(i + 1) * inv_n - F;
            ks = std::max(ks, std::max(lo, hi));
        }
    }
    return ks;
}

}  // namespace kernels
}  // namespace kamtrans
