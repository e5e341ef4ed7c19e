// Benchmark comparing the serial reference kernels against the OpenMP
// variants. Sizes are chosen so each timing is a few tens of milliseconds;
// every pair is also checked for bitwise agreement.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kamtrans/catalog.hpp"
#include "kamtrans/kernels.hpp"

using namespace kamtrans;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        f();
        const auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, std::size_t n, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-22s n=%-9zu serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   %s\n", name,
                n, serial_ms, parallel_ms, serial_ms / parallel_ms,
                match ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel timings run the serial path\n\n");
#endif

    const std::size_t n_big = 10'000'000;
    const std::size_t n_mid = 1'000'000;

    // uniform draws
    {
        std::vector<double> a(n_big), b(n_big);
        const double ts = time_ms([&] { kernels::uniform01(42, a, Exec::serial); });
        const double tp = time_ms([&] { kernels::uniform01(42, b, Exec::parallel); });
        report("uniform01", n_big, ts, tp, a == b);
    }

    const Grid g(0.0, 1.0, 128);
    const CatalogEntry target = resolve_catalog("quadratic_paper", g);
    const CatalogEntry source = resolve_catalog("uniform", g);
    const GridFunction T = increasing_rearrangement(*source.density, *target.density, g);

    std::vector<double> u(n_big);
    kernels::uniform01(7, u, Exec::parallel);

    // map evaluation
    {
        std::vector<double> a(n_big), b(n_big);
        const double ts = time_ms([&] { kernels::apply_map(T, u, a, Exec::serial); });
        const double tp = time_ms([&] { kernels::apply_map(T, u, b, Exec::parallel); });
        report("apply_map", n_big, ts, tp, a == b);
    }

    // quantile batches (inverse-CDF sampling)
    {
        std::vector<double> a(n_mid), b(n_mid);
        const std::span<const double> uu(u.data(), n_mid);
        auto q = [&](double x) { return target.density->quantile(x); };
        const double ts = time_ms([&] { kernels::transform(q, uu, a, Exec::serial); });
        const double tp = time_ms([&] { kernels::transform(q, uu, b, Exec::parallel); });
        report("quantile transform", n_mid, ts, tp, a == b);
    }

    // histogram
    {
        const double ts = time_ms([&] { (void)kernels::histogram(u, 0.0, 1.0, 50, Exec::serial); });
        const double tp =
            time_ms([&] { (void)kernels::histogram(u, 0.0, 1.0, 50, Exec::parallel); });
        const bool match = kernels::histogram(u, 0.0, 1.0, 50, Exec::serial) ==
                           kernels::histogram(u, 0.0, 1.0, 50, Exec::parallel);
        report("histogram", n_big, ts, tp, match);
    }

    // KS scan
    {
        std::vector<double> sorted(u.begin(), u.begin() + static_cast<long>(n_mid));
        std::sort(sorted.begin(), sorted.end());
        auto cdf = [&](double x) { return target.density->cdf(x); };
        double ks_s = 0.0, ks_p = 0.0;
        const double ts = time_ms([&] { ks_s = kernels::ks_statistic(sorted, cdf, Exec::serial); });
        const double tp =
            time_ms([&] { ks_p = kernels::ks_statistic(sorted, cdf, Exec::parallel); });
        report("ks_statistic", n_mid, ts, tp, ks_s == ks_p);
    }

    return 0;
}
