#include "zipzip/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace zipzip {

double harmonic(std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("harmonic: m must be positive");
    double h = 0.0;
    for (std::uint64_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

double expected_depth(std::uint64_t j, std::uint64_t n) {
    if (j < 1 || j > n) throw std::invalid_argument("expected_depth: need 1 <= j <= n");
    return harmonic(j) + harmonic(n - j + 1) - 1.0;
}

namespace {

FitResult ols(const std::vector<std::pair<double, double>>& t);

}  // namespace

FitResult fit_loglog(const std::vector<std::pair<double, double>>& points, XScale xs) {
    if (points.size() < 3) throw std::invalid_argument("fit_loglog: need at least 3 points");
    std::vector<std::pair<double, double>> t;
    t.reserve(points.size());
    for (const auto& [x, y] : points) {
        if (y <= 0.0) throw std::invalid_argument("fit_loglog: y values must be positive");
        double tx = std::log2(x);
        if (xs == XScale::log2_log2_x) tx = std::log2(tx);
        if (!std::isfinite(tx))
            throw std::invalid_argument("fit_loglog: x too small for the transform");
        t.emplace_back(tx, std::log2(y));
    }
    return ols(t);
}

FitResult fit_linear(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_linear: need at least 3 points");
    return ols(points);
}

namespace {

FitResult ols(const std::vector<std::pair<double, double>>& t) {
    const double m = static_cast<double>(t.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : t) {
        sx += x;
        sy += y;
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : t) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit: x values are all equal");

    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy == 0.0) {
        f.r_squared = 1.0;
    } else {
        double ss_res = 0.0;
        for (const auto& [x, y] : t) {
            const double e = y - (f.intercept + f.slope * x);
            ss_res += e * e;
        }
        f.r_squared = 1.0 - ss_res / syy;
        if (f.r_squared < 0.0) f.r_squared = 0.0;
        if (f.r_squared > 1.0) f.r_squared = 1.0;
    }
    return f;
}

}  // namespace

DepthSummary summarize(const std::vector<TreeStats>& runs, std::uint64_t n) {
    if (runs.empty()) throw std::invalid_argument("summarize: no runs");
    DepthSummary s;
    s.n = n;
    s.trials = runs.size();
    for (const TreeStats& r : runs) {
        if (r.per_key_depth.size() != n)
            throw std::invalid_argument("summarize: run key count differs from n");
        s.mean_depth_smallest += r.per_key_depth.front().second;
        s.mean_depth_largest += r.per_key_depth.back().second;
        double total = 0.0;
        for (const auto& [key, depth] : r.per_key_depth) total += depth;
        s.mean_depth_all += total / static_cast<double>(n);
        s.mean_height += r.height;
        s.mean_root_r1 += static_cast<double>(r.root_r1);
    }
    const double trials = static_cast<double>(s.trials);
    s.mean_depth_smallest /= trials;
    s.mean_depth_largest /= trials;
    s.mean_depth_all /= trials;
    s.mean_height /= trials;
    s.mean_root_r1 /= trials;

    const double lg = std::log2(static_cast<double>(n));
    if (lg > 0.0) {
        s.scaled_depth_smallest = s.mean_depth_smallest / lg;
        s.scaled_depth_largest = s.mean_depth_largest / lg;
        s.scaled_depth_all = s.mean_depth_all / lg;
        s.scaled_height = s.mean_height / lg;
        const double lglg = std::log2(lg);
        if (lglg > 0.0) s.scaled_root_r1 = s.mean_root_r1 / lglg;
    }
    return s;
}

}  // namespace zipzip
