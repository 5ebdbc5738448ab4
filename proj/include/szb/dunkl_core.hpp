#pragma once

// Dunkl coefficients gamma_nu(r), the parity indicator theta_r, and the
// Dunkl exponential e_nu(y) = sum_r y^r / gamma_nu(r).
//
// gamma_nu is accumulated in log space through its ratio recursion
//   gamma_nu(r + 1) / gamma_nu(r) = 2 nu theta_{r+1} + r + 1,  gamma_nu(0) = 1,
// and memoized per nu. The Gamma-function closed form is kept only as a
// cross-check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "szb/errors.hpp"
#include "szb/numeric.hpp"
#include "szb/policy.hpp"

namespace szb {

[[nodiscard]] constexpr int theta(std::uint64_t r) noexcept { return static_cast<int>(r & 1u); }

class DunklParams {
public:
    // Domain of the coefficients: nu > -1/2.
    static DunklParams coefficients(double nu) {
        if (!(nu > -0.5) || !std::isfinite(nu))
            throw DomainError("Dunkl parameter must satisfy nu > -1/2");
        return DunklParams(nu);
    }
    // Domain of the operators: nu >= 0.
    static DunklParams operator_domain(double nu) {
        if (!(nu >= 0.0) || !std::isfinite(nu))
            throw DomainError("operator parameter must satisfy nu >= 0");
        return DunklParams(nu);
    }

    [[nodiscard]] double nu() const noexcept { return nu_; }
    [[nodiscard]] bool in_operator_domain() const noexcept { return nu_ >= 0.0; }
    void require_operator_domain() const {
        if (!in_operator_domain()) throw DomainError("operator parameter must satisfy nu >= 0");
    }

    // gamma_nu(r + 1) / gamma_nu(r).
    [[nodiscard]] double ratio(std::uint64_t r) const noexcept {
        return 2.0 * nu_ * theta(r + 1) + static_cast<double>(r) + 1.0;
    }

private:
    explicit DunklParams(double nu) : nu_(nu) {}
    double nu_;
};

// ln of a strictly positive coefficient.
struct LogCoefficient {
    long double log_value = 0;
    int sign = +1;

    [[nodiscard]] double value() const { return static_cast<double>(std::exp(log_value)); }
};

// Memoized ln gamma_nu(r). Readers share; extension is serialized and the
// table only ever grows.
class CoefficientTable {
public:
    explicit CoefficientTable(double nu) : params_(DunklParams::coefficients(nu)) {
        logs_.push_back(0.0L);
    }

    [[nodiscard]] long double log_gamma(std::size_t r) {
        {
            std::shared_lock lock(mutex_);
            if (r < logs_.size()) return logs_[r];
        }
        std::unique_lock lock(mutex_);
        extend_locked(r + 1);
        return logs_[r];
    }

    [[nodiscard]] std::size_t size() const {
        std::shared_lock lock(mutex_);
        return logs_.size();
    }

    [[nodiscard]] const DunklParams& params() const noexcept { return params_; }

private:
    void extend_locked(std::size_t want) {
        if (want <= logs_.size()) return;
        // grow geometrically so sweeps over increasing r do not relock often
        want = std::max(want, logs_.size() + logs_.size() / 2);
        logs_.reserve(want);
        for (std::size_t r = logs_.size(); r < want; ++r) {
            acc_.add(std::log(static_cast<long double>(params_.ratio(r - 1))));
            logs_.push_back(acc_.value());
        }
    }

    DunklParams params_;
    mutable std::shared_mutex mutex_;
    std::vector<long double> logs_;
    numeric::CompensatedSum<long double> acc_;
};

// Process-wide registry of coefficient tables, one per distinct nu.
[[nodiscard]] inline CoefficientTable& coefficient_table(double nu) {
    static std::mutex mutex;
    static std::map<double, std::unique_ptr<CoefficientTable>> tables;
    std::lock_guard lock(mutex);
    auto& slot = tables[nu];
    if (!slot) slot = std::make_unique<CoefficientTable>(nu);
    return *slot;
}

[[nodiscard]] inline LogCoefficient log_gamma_nu(std::size_t r, const DunklParams& p) {
    return {coefficient_table(p.nu()).log_gamma(r), +1};
}

// Closed Gamma-function form:
//   gamma(2k)   = 2^{2k}   k! Gamma(k + nu + 1/2) / Gamma(nu + 1/2)
//   gamma(2k+1) = 2^{2k+1} k! Gamma(k + nu + 3/2) / Gamma(nu + 1/2)
[[nodiscard]] inline LogCoefficient log_gamma_nu_closed_form(std::size_t r, const DunklParams& p) {
    const long double nu = p.nu();
    const long double k = static_cast<long double>(r / 2);
    const long double shift = (r % 2 == 0) ? 0.5L : 1.5L;
    const long double v = static_cast<long double>(r) * std::log(2.0L) + numeric::log_gamma(k + 1) +
                          numeric::log_gamma(k + nu + shift) - numeric::log_gamma(nu + 0.5L);
    return {v, +1};
}

// Largest relative discrepancy between the recursion and the closed form
// over r = 0..r_max.
[[nodiscard]] inline double gamma_nu_ratio_check(std::size_t r_max, const DunklParams& p) {
    if (r_max < 1) throw DomainError("gamma_nu_ratio_check requires r_max >= 1");
    long double worst = 0;
    for (std::size_t r = 0; r <= r_max; ++r) {
        const long double d = log_gamma_nu(r, p).log_value - log_gamma_nu_closed_form(r, p).log_value;
        worst = std::max(worst, std::fabs(std::expm1(d)));
    }
    return static_cast<double>(worst);
}

namespace detail {

inline bool tail_certified(TailMode mode, long double bound_ratio, long double last_term,
                           long double partial, long double rel_tol) {
    if (mode == TailMode::term_ratio)
        return bound_ratio < 0.5L && last_term <= rel_tol * partial;
    return bound_ratio < 1.0L && last_term * bound_ratio / (1.0L - bound_ratio) <= rel_tol * partial;
}

inline void require_argument(double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("Dunkl series argument must be finite and >= 0");
}

[[noreturn]] inline void budget_exceeded(double y, std::size_t max_terms) {
    std::ostringstream os;
    os.precision(17);
    os << "series at y=" << y << " needs more than " << max_terms << " terms";
    throw TermBudgetExceeded(os.str());
}

enum class Parity { all, even, odd };

// Forward summation from r = 0 in linear space; the tail is certified
// against the full series, which majorizes either parity part.
inline double direct_series(double y, const DunklParams& p, const SeriesPolicy& pol, Parity parity) {
    require_argument(y);
    pol.validate();
    auto keep = [parity](std::uint64_t r) {
        return parity == Parity::all || (parity == Parity::odd) == (r % 2 == 1);
    };
    if (y == 0.0) return parity == Parity::odd ? 0.0 : 1.0;
    long double term = 1.0L;
    numeric::CompensatedSum<long double> sum;
    if (keep(0)) sum.add(term);
    std::uint64_t r = 0;
    std::size_t count = 1;
    for (;;) {
        const long double bound = static_cast<long double>(y) / static_cast<long double>(r + 1);
        const long double partial = sum.value();
        if (partial > 0 && tail_certified(pol.tail_mode, bound, term, partial, pol.rel_tol)) break;
        term *= static_cast<long double>(y) / static_cast<long double>(p.ratio(r));
        ++r;
        if (++count > pol.max_terms) budget_exceeded(y, pol.max_terms);
        if (keep(r)) sum.add(term);
    }
    const double out = static_cast<double>(sum.value());
    if (!std::isfinite(out))
        throw NumericalError("Dunkl exponential overflows double precision; use log_dunkl_exp");
    return out;
}

} // namespace detail

// e_nu(y), summed forward in linear space. Overflows for y beyond ~700;
// log_dunkl_exp covers that range.
[[nodiscard]] inline double dunkl_exp(double y, const DunklParams& p, const SeriesPolicy& pol = {}) {
    return detail::direct_series(y, p, pol, detail::Parity::all);
}

// sum_r theta_r y^r / gamma_nu(r).
[[nodiscard]] inline double dunkl_exp_odd_part(double y, const DunklParams& p, const SeriesPolicy& pol = {}) {
    return detail::direct_series(y, p, pol, detail::Parity::odd);
}

[[nodiscard]] inline double dunkl_exp_even_part(double y, const DunklParams& p, const SeriesPolicy& pol = {}) {
    return detail::direct_series(y, p, pol, detail::Parity::even);
}

// Normalized Dunkl weights p_r = y^r / (gamma_nu(r) e_nu(y)) over a certified
// index window [lo, hi] centred on the mode. The window is wide enough that
// for any f with |f(r)| <= C (r + offset)^degree the omitted part of
// sum_r p_r f(r) is below rel_tol times the majorant's own sum.
class DunklWindow {
public:
    DunklWindow(double y, const DunklParams& p, const SeriesPolicy& pol, int degree = 0, double offset = -1.0)
        : y_(y) {
        detail::require_argument(y);
        pol.validate();
        if (degree < 0) throw DomainError("majorant degree must be >= 0");
        if (y == 0.0) {
            lo_ = hi_ = 0;
            weights_.assign(1, 1.0L);
            log_norm_ = 0;
            return;
        }
        if (y > 1e12) detail::budget_exceeded(y, pol.max_terms);

        const long double c = offset >= 0.0 ? offset : static_cast<long double>(degree) + 1.0L;
        const long double ly = std::log(static_cast<long double>(y));
        const long double nu = p.nu();
        const auto r0 = static_cast<std::uint64_t>(std::floor(y));
        auto log_majorant = [&](std::uint64_t r, long double l) {
            return l + static_cast<long double>(degree) * std::log(static_cast<long double>(r) + c);
        };

        std::vector<long double> up{0.0L};    // relative log-terms for r0, r0+1, ...
        std::vector<long double> down;        // r0-1, r0-2, ...
        // Both the plain series and its degree-d majorant must have certified
        // tails, so normalization and weighted sums are covered together.
        long double plain_sum = 1.0L;
        long double majorant_sum = std::exp(log_majorant(r0, 0.0L));
        auto certified = [&](long double q_plain, long double q_major, long double l, std::uint64_t r) {
            return detail::tail_certified(pol.tail_mode, q_plain, std::exp(l), plain_sum, pol.rel_tol) &&
                   detail::tail_certified(pol.tail_mode, q_major, std::exp(log_majorant(r, l)), majorant_sum,
                                          pol.rel_tol);
        };

        std::uint64_t r = r0;
        long double l = 0;
        for (;;) {
            const long double q = static_cast<long double>(y) / static_cast<long double>(r + 1);
            const long double growth =
                std::pow((static_cast<long double>(r) + 1 + c) / (static_cast<long double>(r) + c),
                         static_cast<long double>(degree));
            if (certified(q, q * growth, l, r)) break;
            l += ly - std::log(static_cast<long double>(p.ratio(r)));
            ++r;
            up.push_back(l);
            plain_sum += std::exp(l);
            majorant_sum += std::exp(log_majorant(r, l));
            if (up.size() > pol.max_terms) detail::budget_exceeded(y, pol.max_terms);
        }
        hi_ = r;

        r = r0;
        l = 0;
        while (r > 0) {
            // going down, the polynomial factor only shrinks the ratio
            const long double q = (2.0L * nu + static_cast<long double>(r)) / static_cast<long double>(y);
            if (certified(q, q, l, r)) break;
            // t_{r-1} = t_r * gamma(r) / (gamma(r-1) y)
            l -= ly - std::log(static_cast<long double>(p.ratio(r - 1)));
            --r;
            down.push_back(l);
            plain_sum += std::exp(l);
            majorant_sum += std::exp(log_majorant(r, l));
            if (up.size() + down.size() > pol.max_terms) detail::budget_exceeded(y, pol.max_terms);
        }
        lo_ = r;

        weights_.reserve(up.size() + down.size());
        for (auto it = down.rbegin(); it != down.rend(); ++it) weights_.push_back(std::exp(*it));
        for (long double v : up) weights_.push_back(std::exp(v));
        numeric::CompensatedSum<long double> s;
        for (long double w : weights_) s.add(w);
        const long double total = s.value();
        for (long double& w : weights_) w /= total;

        const long double log_t0 = static_cast<long double>(r0) * ly - log_gamma_nu(r0, p).log_value;
        log_norm_ = log_t0 + std::log(total);
    }

    [[nodiscard]] double y() const noexcept { return y_; }
    [[nodiscard]] std::uint64_t lo() const noexcept { return lo_; }
    [[nodiscard]] std::uint64_t hi() const noexcept { return hi_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    // ln e_nu(y).
    [[nodiscard]] long double log_norm() const noexcept { return log_norm_; }

    [[nodiscard]] long double weight(std::uint64_t r) const noexcept {
        return (r < lo_ || r > hi_) ? 0.0L : weights_[r - lo_];
    }

    // sum_r p_r f(r) over the window.
    template <typename F>
    [[nodiscard]] long double expectation(F&& f) const {
        numeric::CompensatedSum<long double> s;
        for (std::size_t i = 0; i < weights_.size(); ++i) s.add(weights_[i] * static_cast<long double>(f(lo_ + i)));
        return s.value();
    }

private:
    double y_;
    std::uint64_t lo_ = 0;
    std::uint64_t hi_ = 0;
    std::vector<long double> weights_;
    long double log_norm_ = 0;
};

// ln e_nu(y), summed outward from the mode; finite for any y the term budget
// can cover.
[[nodiscard]] inline double log_dunkl_exp(double y, const DunklParams& p, const SeriesPolicy& pol = {}) {
    return static_cast<double>(DunklWindow(y, p, pol).log_norm());
}

} // namespace szb
