#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kamtrans/catalog.hpp"
#include "kamtrans/sampling.hpp"

using namespace kamtrans;

TEST_SUITE_BEGIN("sampling");

TEST_CASE("identical seeds give bit-identical batches, serial or parallel") {
    const Density1D u("uniform", [](double) { return 1.0; }, 0.0, 1.0);
    const SampleBatch a = sample_source(u, 4, 12345, Exec::serial);
    const SampleBatch b = sample_source(u, 4, 12345, Exec::parallel);
    const SampleBatch c = sample_source(u, 4, 12345, Exec::parallel);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.values[i] == b.values[i]);
        CHECK(b.values[i] == c.values[i]);
        CHECK(a.values[i] >= 0.0);
        CHECK(a.values[i] < 1.0);
    }
    const SampleBatch d = sample_source(u, 4, 54321, Exec::serial);
    CHECK(d.values != a.values);
}

TEST_CASE("larger batches agree bitwise across execution policies") {
    const Grid g(0.0, 1.0, 128);
    const CatalogEntry e = resolve_catalog("quadratic_paper", g);
    const SampleBatch s = sample_source(*e.density, 50000, 777, Exec::serial);
    const SampleBatch p = sample_source(*e.density, 50000, 777, Exec::parallel);
    CHECK(s.values == p.values);

    const GridFunction T = increasing_rearrangement(
        *resolve_catalog("uniform", g).density, *e.density, g);
    const SampleBatch ps = pushforward_samples(T, s, Exec::serial);
    const SampleBatch pp = pushforward_samples(T, s, Exec::parallel);
    CHECK(ps.values == pp.values);

    CHECK(ks_distance(ps, *e.density, Exec::serial) == ks_distance(ps, *e.density, Exec::parallel));
    CHECK(histogram(ps, 0.0, 1.0, 50, Exec::serial).counts ==
          histogram(ps, 0.0, 1.0, 50, Exec::parallel).counts);
}

TEST_CASE("law of large numbers for the uniform mean") {
    const Density1D u("uniform", [](double) { return 1.0; }, 0.0, 1.0);
    const SampleBatch batch = sample_source(u, 1000000, 2024);
    const double mean =
        std::accumulate(batch.values.begin(), batch.values.end(), 0.0) / batch.size();
    CHECK(std::abs(mean - 0.5) <= 0.002);
}

TEST_CASE("truncated Gaussian draws pass a KS test against their own cdf") {
    const Grid g(0.0, 1.0, 16);
    const CatalogEntry e = resolve_catalog("gaussian(0.4,0.3)", g);
    const SampleBatch batch = sample_source(*e.density, 100000, 99);
    // 99% critical value 1.63/sqrt(n)
    CHECK(ks_distance(batch, *e.density) <= 0.006);
}

TEST_CASE("pushforward through the identity leaves the batch unchanged") {
    const Grid g(0.0, 1.0, 64);
    const Density1D u("uniform", [](double) { return 1.0; }, 0.0, 1.0);
    const SampleBatch batch = sample_source(u, 1000, 5);
    const SampleBatch out = pushforward_samples(GridFunction::identity(g), batch);
    for (std::size_t i = 0; i < batch.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(batch.values[i]).epsilon(1e-14));
}

TEST_CASE("pushforward through the rearrangement passes KS at one percent") {
    const Grid g(0.0, 1.0, 128);
    const CatalogEntry uni = resolve_catalog("uniform", g);
    const CatalogEntry nu = resolve_catalog("quadratic_paper", g);
    const GridFunction T = increasing_rearrangement(*uni.density, *nu.density, g);
    const SampleBatch src = sample_source(*uni.density, 100000, 31415);
    const SampleBatch pushed = pushforward_samples(T, src);
    CHECK(ks_distance(pushed, *nu.density) <= 1.63 / std::sqrt(100000.0));
}

TEST_CASE("histogram counts total the batch size") {
    const Density1D u("uniform", [](double) { return 1.0; }, 0.0, 1.0);
    const SampleBatch batch = sample_source(u, 10000, 8);
    const Histogram h = histogram(batch, 0.0, 1.0, 50);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0}) == 10000);
    // roughly uniform occupancy
    for (int k = 0; k < h.bins(); ++k) CHECK(h.counts[static_cast<std::size_t>(k)] > 100);
}

TEST_SUITE_END();
