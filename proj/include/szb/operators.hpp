#pragma once

// The Dunkl-Szasz operator S*_n and the Dunkl-Szasz-Beta operator T_n.
//
//   T_n(g; x) = (n-1)/e_nu(nx) sum_{r>=1} C(n+r-2, r-1) (nx)^r / gamma_nu(r)
//                 * int_0^inf s^{r-1} (1+s)^{-n-r+1} g(s) ds  +  g(0) / e_nu(nx)
//
// Every series here is evaluated through a DunklWindow: normalized weights
// p_r = (nx)^r / (gamma_nu(r) e_nu(nx)) over a certified index range.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <tuple>

#include "szb/dunkl_core.hpp"
#include "szb/errors.hpp"
#include "szb/numeric.hpp"
#include "szb/policy.hpp"
#include "szb/special.hpp"
#include "szb/test_function.hpp"

namespace szb {

struct OperatorQuery {
    int n = 2;
    double x = 0.0;
    DunklParams params = DunklParams::operator_domain(0.0);
    SeriesPolicy series{};
    QuadraturePolicy quad{};

    [[nodiscard]] static OperatorQuery make(int n, double x, double nu, SeriesPolicy series = {},
                                            QuadraturePolicy quad = {}) {
        return {n, x, DunklParams::operator_domain(nu), series, quad};
    }

    [[nodiscard]] double y() const noexcept { return static_cast<double>(n) * x; }

    // T_1 collapses to g(0)/e_nu(x) and is not normalized, so n >= 2.
    void validate() const {
        if (n < 2) throw DomainError("operator order n must be >= 2 (n = 1 does not reproduce constants)");
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("evaluation point x must be finite and >= 0");
        params.require_operator_domain();
        series.validate();
        quad.validate();
    }
};

// Kernel expectations keyed by (function label, r, n). They do not depend
// on x, so a sweep over x reuses them. Concurrent readers share the lock;
// insertion is serialized.
class IntegralCache {
public:
    template <typename Compute>
    double get_or_compute(const std::string& label, int r, int n, Compute&& compute) {
        const Key key{label, r, n};
        {
            std::shared_lock lock(mutex_);
            if (auto it = values_.find(key); it != values_.end()) return it->second;
        }
        const double v = compute();
        std::unique_lock lock(mutex_);
        values_.emplace(key, v);
        return v;
    }

    [[nodiscard]] std::size_t size() const {
        std::shared_lock lock(mutex_);
        return values_.size();
    }

private:
    using Key = std::tuple<std::string, int, int>;
    mutable std::shared_mutex mutex_;
    std::map<Key, double> values_;
};

// S*_n(g; x) = sum_r p_r g((r + 2 nu theta_r) / n).
[[nodiscard]] inline double szasz_dunkl(const OperatorQuery& q, const TestFunction& g) {
    if (q.n < 1) throw DomainError("operator order n must be >= 1");
    if (!(q.x >= 0.0) || !std::isfinite(q.x)) throw DomainError("evaluation point x must be finite and >= 0");
    q.params.require_operator_domain();
    const double nu = q.params.nu();
    const int d = g.growth_degree;
    if (d < 0) throw GrowthTooLarge("growth degree must be >= 0");
    const DunklWindow w(q.y(), q.params, q.series, d, std::max(d + 1.0, 2.0 * nu + 1.0));
    const double n = q.n;
    return static_cast<double>(w.expectation([&](std::uint64_t r) {
        return g((static_cast<double>(r) + 2.0 * nu * theta(r)) / n);
    }));
}

namespace detail {

inline void require_growth(const OperatorQuery& q, const TestFunction& g) {
    if (q.n <= g.growth_degree + 1) {
        std::ostringstream os;
        os << "T_n(" << g.label << ") needs n > " << g.growth_degree + 1 << ", got n=" << q.n;
        throw MomentDiverges(os.str());
    }
}

// ln[(n-1) C(n+r-2, r-1) B(r, n-1)], identically zero; evaluated so that
// the quadrature path assembles each term exactly as the operator is written.
inline long double log_series_prefactor(int n, std::uint64_t r) {
    const long double ln = n, lr = static_cast<long double>(r);
    return std::log(ln - 1) + numeric::log_binomial(ln + lr - 2, lr - 1) + numeric::log_gamma(lr) +
           numeric::log_gamma(ln - 1) - numeric::log_gamma(lr + ln - 1);
}

// (n-2)(n-3)...(n-m-1).
inline long double falling_denominator(int n, int m) {
    long double d = 1;
    for (int j = 2; j <= m + 1; ++j) d *= static_cast<long double>(n - j);
    return d;
}

inline long double rising(std::uint64_t r, int m) {
    long double p = 1;
    for (int j = 0; j < m; ++j) p *= static_cast<long double>(r + j);
    return p;
}

} // namespace detail

// General path: one Beta-prime quadrature per series index. Pass a cache to
// share kernel integrals across x for the same (g, n).
[[nodiscard]] inline double szasz_beta_dunkl(const OperatorQuery& q, const TestFunction& g,
                                             IntegralCache* cache = nullptr) {
    q.validate();
    detail::require_growth(q, g);
    const double g0 = g(0.0);
    if (q.x == 0.0) return g0;
    const DunklWindow w(q.y(), q.params, q.series, g.growth_degree);
    auto inner = [&](std::uint64_t r) -> double {
        const KernelSpec k{static_cast<int>(r), q.n};
        auto compute = [&] { return kernel_expectation(k, g, q.quad).value; };
        return cache ? cache->get_or_compute(g.label, k.r, k.n, compute) : compute();
    };
    numeric::CompensatedSum<long double> sum;
    for (std::uint64_t r = std::max<std::uint64_t>(1, w.lo()); r <= w.hi(); ++r) {
        const long double weight = w.weight(r) * std::exp(detail::log_series_prefactor(q.n, r));
        sum.add(weight * static_cast<long double>(inner(r)));
    }
    sum.add(static_cast<long double>(g0) * std::exp(-w.log_norm()));
    return static_cast<double>(sum.value());
}

// T_n(s^m; x) for m <= 4 via the exact reduction
//   (n-1) C(n+r-2, r-1) B(r+m, n-m-1) = r(r+1)...(r+m-1) / [(n-2)...(n-m-1)].
[[nodiscard]] inline std::array<long double, 5> raw_moments(const OperatorQuery& q, int max_m = 4) {
    q.validate();
    if (max_m < 0 || max_m > 4) throw DomainError("closed-form moments are available for m = 0..4");
    if (q.n <= max_m + 1) {
        std::ostringstream os;
        os << "moment of order " << max_m << " diverges for n=" << q.n << " (needs n > m + 1)";
        throw MomentDiverges(os.str());
    }
    std::array<long double, 5> out{};
    out[0] = 1;
    if (q.x == 0.0) return out;
    const DunklWindow w(q.y(), q.params, q.series, max_m);
    for (int m = 1; m <= max_m; ++m)
        out[m] = w.expectation([m](std::uint64_t r) { return detail::rising(r, m); }) /
                 detail::falling_denominator(q.n, m);
    out[0] = w.expectation([](std::uint64_t) { return 1.0L; });
    return out;
}

[[nodiscard]] inline double szasz_beta_dunkl_monomial(const OperatorQuery& q, int m) {
    if (m < 0 || m > 4) throw DomainError("closed-form moments are available for m = 0..4");
    return static_cast<double>(raw_moments(q, m)[m]);
}

// Closed-form path for s^m (m <= 4), quadrature path otherwise.
[[nodiscard]] inline double apply_operator(const OperatorQuery& q, const TestFunction& g,
                                           IntegralCache* cache = nullptr) {
    if (g.monomial && *g.monomial <= 4) return szasz_beta_dunkl_monomial(q, *g.monomial);
    return szasz_beta_dunkl(q, g, cache);
}

} // namespace szb
