#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nlc {

/// Monotone cubic Hermite interpolation on a uniform grid (Fritsch-Carlson
/// style slope limiting, harmonic-mean slopes). Does not overshoot the data.
class MonotoneCubic {
public:
    MonotoneCubic(double x0, double dx, std::span<const double> y)
        : x0_(x0), dx_(dx), y_(y.begin(), y.end()), slope_(y.size(), 0.0) {
        const std::size_t n = y_.size();
        if (n < 2) return;
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / dx_;
        slope_[0] = d[0];
        slope_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0)
                slope_[i] = 0.0;
            else
                slope_[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
        }
    }

    double operator()(double x) const {
        const std::size_t n = y_.size();
        if (n == 1) return y_[0];
        double s = (x - x0_) / dx_;
        if (s <= 0.0) return y_.front();
        if (s >= double(n - 1)) return y_.back();
        std::size_t i = std::min<std::size_t>(std::size_t(s), n - 2);
        double t = s - double(i);
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * dx_ * slope_[i] + h01 * y_[i + 1] + h11 * dx_ * slope_[i + 1];
    }

private:
    double x0_, dx_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

/// Piecewise-linear interpolation with strictly increasing abscissae,
/// clamped outside the range.
inline double lerp_tabulated(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = std::size_t(it - xs.begin()) - 1;
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace nlc
