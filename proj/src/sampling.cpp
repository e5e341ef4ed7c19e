#include "kamtrans/sampling.hpp"

#include <algorithm>
#include <ostream>

#include "kamtrans/errors.hpp"

namespace kamtrans {

SampleBatch sample_source(const Density1D& d, std::size_t n, std::uint64_t seed, Exec exec) {
    if (n < 1) throw DomainError("sample_source: n must be >= 1");
    SampleBatch batch;
    batch.seed = seed;
    std::vector<double> u(n);
    kernels::uniform01(seed, u, exec);
    batch.values.resize(n);
    kernels::transform([&](double ui) { return d.quantile(ui); }, u, batch.values, exec);
    return batch;
}

SampleBatch pushforward_samples(const GridFunction& T, const SampleBatch& batch, Exec exec) {
    SampleBatch out;
    out.seed = batch.seed;
    out.values.resize(batch.values.size());
    kernels::apply_map(T, batch.values, out.values, exec);
    return out;
}

double ks_distance(const SampleBatch& batch, const Density1D& d, Exec exec) {
    std::vector<double> sorted = batch.values;
    std::sort(sorted.begin(), sorted.end());
    return kernels::ks_statistic(sorted, [&](double x) { return d.cdf(x); }, exec);
}

Histogram histogram(const SampleBatch& batch, double a, double b, int bins, Exec exec) {
    if (bins < 1) throw DomainError("histogram: bins must be >= 1");
    Histogram h;
    h.a = a;
    h.b = b;
    h.counts = kernels::histogram(batch.values, a, b, bins, exec);
    return h;
}

void write_histogram_csv(const Histogram& hist, std::size_t total, const Density1D& target,
                         std::ostream& os) {
    os << "bin_center,count,empirical_density,target_density\n";
    for (int k = 0; k < hist.bins(); ++k) {
        const double c = hist.center(k);
        os << format_double(c) << ',' << hist.counts[static_cast<std::size_t>(k)] << ','
           << format_double(hist.density(k, total)) << ',' << format_double(target.pdf(c))
           << '\n';
    }
}

void write_samples_csv(const SampleBatch& batch, std::ostream& os) {
    os << "value\n";
    for (double v : batch.values) os << format_double(v) << '\n';
}

}  // namespace kamtrans
