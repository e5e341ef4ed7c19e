#include "kamtrans/density.hpp"

#include <algorithm>
#include <cmath>

#include "kamtrans/errors.hpp"

namespace kamtrans {

namespace {

double simpson3(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson3(a, m, fa, flm, fm);
    const double right = simpson3(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    // absolute floor keeps zero-integral oscillatory panels from recursing
    // past the roundoff level of the local quadrature
    const double floor_tol =
        1e-15 * (std::abs(left) + std::abs(right) +
                 (b - a) * (std::abs(fa) + 4.0 * std::abs(fm) + std::abs(fb)) / 6.0);
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, floor_tol))
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson3(a, b, fa, fm, fb);
    const double scale = std::max(std::abs(whole), 1e-300);
    return adaptive_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 48);
}

Density1D::Density1D(std::string label, std::function<double(double)> unnormalized, double a,
                     double b, int cache_panels)
    : label_(std::move(label)), rho_(std::move(unnormalized)), a_(a), b_(b),
      panels_(cache_panels) {
    if (!(a_ < b_)) throw DomainError("Density1D: requires a < b");
    if (panels_ < 16) throw DomainError("Density1D: cache_panels too small");

    cumulative_.assign(static_cast<std::size_t>(panels_) + 1, 0.0);
    const double w = (b_ - a_) / panels_;
    double left = a_;
    double fl = rho_(left);
    if (!(fl >= 0.0) || !std::isfinite(fl))
        throw DomainError(label_ + ": density must be finite and >= 0 on [a,b]");
    for (int k = 0; k < panels_; ++k) {
        const double right = (k + 1 == panels_) ? b_ : a_ + (k + 1) * w;
        const double mid = 0.5 * (left + right);
        const double fm = rho_(mid), fr = rho_(right);
        if (!(fm >= 0.0) || !(fr >= 0.0) || !std::isfinite(fm) || !std::isfinite(fr))
            throw DomainError(label_ + ": density must be finite and >= 0 on [a,b]");
        cumulative_[static_cast<std::size_t>(k) + 1] =
            cumulative_[static_cast<std::size_t>(k)] + simpson3(left, right, fl, fm, fr);
        left = right;
        fl = fr;
    }
    cache_total_ = cumulative_.back();
    if (!(cache_total_ > 0.0)) throw DomainError(label_ + ": density integrates to zero");
    z_ = adaptive_simpson(rho_, a_, b_, 1e-10);
}

double Density1D::pdf(double x) const {
    if (x < a_ || x > b_) return 0.0;
    return rho_(x) / cache_total_;
}

double Density1D::cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    const double w = (b_ - a_) / panels_;
    int k = std::clamp(static_cast<int>((x - a_) / w), 0, panels_ - 1);
    double xl = a_ + k * w;
    if (xl > x) {
        --k;
        xl = a_ + k * w;
    }
    const double partial =
        simpson3(xl, x, rho_(xl), rho_(0.5 * (xl + x)), rho_(x));
    return (cumulative_[static_cast<std::size_t>(k)] + partial) / cache_total_;
}

double Density1D::quantile(double u) const {
    if (u < 0.0 || u > 1.0 || !std::isfinite(u))
        throw DomainError(label_ + ": quantile argument outside [0,1]");
    if (u == 0.0) return a_;
    if (u == 1.0) return b_;
    const double target = u * cache_total_;
    // bracket by the cumulative cache, then safeguarded Newton in the panel
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    int k = static_cast<int>(it - cumulative_.begin()) - 1;
    k = std::clamp(k, 0, panels_ - 1);
    const double w = (b_ - a_) / panels_;
    double lo = a_ + k * w;
    double hi = std::min(b_, lo + w);
    const double mass = cumulative_[static_cast<std::size_t>(k) + 1] -
                        cumulative_[static_cast<std::size_t>(k)];
    double x = mass > 0.0
                   ? lo + w * (target - cumulative_[static_cast<std::size_t>(k)]) / mass
                   : 0.5 * (lo + hi);
    x = std::clamp(x, lo, hi);
    for (int step = 0; step < 100 && hi - lo > 1e-15 * (b_ - a_); ++step) {
        const double g = cdf(x) - u;
        if (std::abs(g) <= 1e-13) break;
        if (g < 0.0)
            lo = x;
        else
            hi = x;
        const double dens = rho_(x) / cache_total_;
        double next = dens > 0.0 ? x - g / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

GridFunction increasing_rearrangement(const Density1D& mu, const Density1D& nu, const Grid& grid) {
    std::vector<double> t(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        t[static_cast<std::size_t>(i)] = nu.quantile(mu.cdf(grid.node(i)));
    return GridFunction(grid, std::move(t), Interp::monotone_cubic);
}

namespace {
QuadratureResult w1_between_quantiles(const std::function<double(double)>& qmu,
                                      const std::function<double(double)>& qnu) {
    auto integrand = [&](double u) { return std::abs(qmu(u) - qnu(u)); };
    auto composite = [&](int panels) {
        const double w = 1.0 / panels;
        double s = 0.0;
        double left = 0.0, fl = integrand(0.0);
        for (int k = 0; k < panels; ++k) {
            const double right = (k + 1 == panels) ? 1.0 : (k + 1) * w;
            const double fm = integrand(0.5 * (left + right));
            const double fr = integrand(right);
            s += (right - left) / 6.0 * (fl + 4.0 * fm + fr);
            left = right;
            fl = fr;
        }
        return s;
    };
    const double coarse = composite(2048);
    const double fine = composite(4096);
    return {fine, std::abs(fine - coarse)};
}
}  // namespace

QuadratureResult wasserstein1(const Density1D& mu, const Density1D& nu) {
    return w1_between_quantiles([&](double u) { return mu.quantile(u); },
                                [&](double u) { return nu.quantile(u); });
}

QuadratureResult wasserstein1_pushforward(const Density1D& mu, const GridFunction& T,
                                          const Density1D& nu) {
    return w1_between_quantiles([&](double u) { return T(mu.quantile(u)); },
                                [&](double u) { return nu.quantile(u); });
}

}  // namespace kamtrans
