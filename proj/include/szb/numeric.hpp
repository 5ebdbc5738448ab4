#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace szb::numeric {

// Neumaier-compensated accumulator.
template <typename T = long double>
class CompensatedSum {
public:
    void add(T v) {
        const T t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] T value() const { return sum_ + comp_; }

private:
    T sum_{0};
    T comp_{0};
};

[[nodiscard]] inline long double log_gamma(long double x) { return std::lgamma(x); }

// ln C(a, b) for real a >= b >= 0.
[[nodiscard]] inline long double log_binomial(long double a, long double b) {
    return log_gamma(a + 1) - log_gamma(b + 1) - log_gamma(a - b + 1);
}

// n points, log-spaced on [lo, hi] (lo > 0), endpoints included.
[[nodiscard]] inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {lo};
    out.reserve(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1)));
    out.back() = hi;
    return out;
}

[[nodiscard]] inline std::vector<double> lin_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {lo};
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.back() = hi;
    return out;
}

[[nodiscard]] inline double relative_difference(double a, double b) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

} // namespace szb::numeric
