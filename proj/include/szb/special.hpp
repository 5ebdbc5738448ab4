#pragma once

// Log-Beta evaluation and adaptive quadrature over the Beta-prime kernel
//   s^{r-1} (1 + s)^{-n-r+1},   s in [0, inf),
// whose total mass is B(r, n - 1). Quadrature runs on t in [0, 1) after
// s = t / (1 - t), where the kernel becomes t^{r-1} (1 - t)^{n-2}.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <type_traits>
#include <sstream>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "szb/errors.hpp"
#include "szb/numeric.hpp"
#include "szb/policy.hpp"
#include "szb/test_function.hpp"

namespace szb {

[[nodiscard]] inline double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_beta requires a > 0 and b > 0");
    const long double la = a, lb = b;
    return static_cast<double>(numeric::log_gamma(la) + numeric::log_gamma(lb) - numeric::log_gamma(la + lb));
}

struct KernelSpec {
    int r = 1;  // series index
    int n = 2;  // operator order

    void validate() const {
        if (r < 1 || n < 1) throw DomainError("kernel requires r >= 1 and n >= 1");
    }
};

// ln of int_0^inf s^{r-1} (1+s)^{-n-r+1} s^m ds = ln B(r + m, n - m - 1).
[[nodiscard]] inline double kernel_moment_closed(const KernelSpec& k, int m) {
    k.validate();
    if (m < 0) throw DomainError("moment order must be >= 0");
    if (k.n - m - 1 <= 0) {
        std::ostringstream os;
        os << "moment of order " << m << " diverges for n=" << k.n << " (needs n > m + 1)";
        throw MomentDiverges(os.str());
    }
    return log_beta(static_cast<double>(k.r + m), static_cast<double>(k.n - m - 1));
}

struct QuadratureResult {
    double value = 0;
    double error = 0;
    std::size_t subdivisions = 0;
};

namespace detail {

// Exceptions must not unwind through GSL frames; the first one is parked
// and rethrown after the call returns.
template <typename F>
struct GslCallable {
    F* f;
    std::exception_ptr error;
};

template <typename F>
double gsl_trampoline(double t, void* p) {
    auto* c = static_cast<GslCallable<F>*>(p);
    if (c->error) return 0.0;
    try {
        return (*c->f)(t);
    } catch (...) {
        c->error = std::current_exception();
        return 0.0;
    }
}

struct GslWorkspace {
    gsl_integration_workspace* w = nullptr;
    std::size_t limit = 0;

    gsl_integration_workspace* get(std::size_t n) {
        if (n > limit) {
            if (w) gsl_integration_workspace_free(w);
            w = gsl_integration_workspace_alloc(n);
            if (!w) throw NumericalError("cannot allocate quadrature workspace");
            limit = n;
        }
        return w;
    }
    ~GslWorkspace() {
        if (w) gsl_integration_workspace_free(w);
    }
};

} // namespace detail

// Adaptive 21-point Gauss-Kronrod integration (GSL qag) on each panel
// between consecutive breakpoints. Panel i must reach
// max(abs_tol / panels, rel_tol |I_i|), so the total error stays below
// abs_tol + rel_tol sum |I_i|. No extrapolation: integrands here have kinks.
template <typename F>
[[nodiscard]] QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& breaks,
                                                  const QuadraturePolicy& q) {
    q.validate();
    if (breaks.size() < 2) throw DomainError("integration needs at least two breakpoints");
    static const auto previous = gsl_set_error_handler_off();
    (void)previous;
    thread_local detail::GslWorkspace ws;
    using Fn = std::remove_reference_t<F>;
    detail::GslCallable<Fn> callable{&f, nullptr};
    gsl_function gf{&detail::gsl_trampoline<Fn>, &callable};
    const std::size_t panels = breaks.size() - 1;
    auto* w = ws.get(q.max_subdivisions);
    numeric::CompensatedSum<long double> total, total_err;
    std::size_t subdivisions = 0;
    for (std::size_t i = 0; i < panels; ++i) {
        double value = 0, error = 0;
        const int status = gsl_integration_qag(&gf, breaks[i], breaks[i + 1], q.abs_tol / panels, q.rel_tol,
                                               q.max_subdivisions, GSL_INTEG_GAUSS21, w, &value, &error);
        if (callable.error) std::rethrow_exception(callable.error);
        subdivisions += w->size;
        if (status != GSL_SUCCESS) {
            std::ostringstream os;
            os.precision(6);
            os << "quadrature did not converge within " << q.max_subdivisions << " subdivisions on ["
               << breaks[i] << ", " << breaks[i + 1] << "] (" << gsl_strerror(status) << "; estimate " << value
               << ", error " << error << ")";
            throw QuadratureNoConverge(os.str());
        }
        total.add(value);
        total_err.add(error);
    }
    return {static_cast<double>(total.value()), static_cast<double>(total_err.value()), subdivisions};
}

namespace detail {

inline void require_kernel_growth(const KernelSpec& k, const TestFunction& g) {
    if (k.n <= g.growth_degree + 1) {
        std::ostringstream os;
        os << "function '" << g.label << "' of growth degree " << g.growth_degree
           << " is not integrable against the kernel for n=" << k.n << " (needs n > d + 1)";
        throw GrowthTooLarge(os.str());
    }
}

// Breakpoints in t that bracket the bulk of Beta(a, b), so narrow peaks at
// large r, n are never straddled by a single coarse panel.
inline void add_beta_breaks(std::vector<double>& out, double a, double b) {
    const double mean = a / (a + b);
    const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
    out.push_back(mean);
    if (a > 1.0 && b > 1.0) out.push_back((a - 1.0) / (a + b - 2.0));
    for (double k : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        out.push_back(mean - k * sd);
        out.push_back(mean + k * sd);
    }
}

inline std::vector<double> kernel_breaks(const KernelSpec& k, int degree) {
    std::vector<double> pts{0.0, 1.0};
    add_beta_breaks(pts, k.r, k.n - 1);
    if (degree > 0 && k.n - 1 - degree > 0) add_beta_breaks(pts, k.r + degree, k.n - 1 - degree);
    std::vector<double> out;
    for (double p : pts)
        if (p >= 0.0 && p <= 1.0) out.push_back(p);
    std::sort(out.begin(), out.end());
    std::vector<double> uniq;
    for (double p : out)
        if (uniq.empty() || p - uniq.back() > 1e-12) uniq.push_back(p);
    if (uniq.back() < 1.0) uniq.back() = 1.0;
    return uniq;
}

} // namespace detail

// int g dP over the normalized Beta-prime law with density
// s^{r-1} (1+s)^{-n-r+1} / B(r, n-1). Integrand assembled in log space and
// exponentiated per node before multiplying by g.
[[nodiscard]] inline QuadratureResult kernel_expectation(const KernelSpec& k, const TestFunction& g,
                                                         const QuadraturePolicy& q = {}) {
    k.validate();
    detail::require_kernel_growth(k, g);
    const double log_norm = log_beta(k.r, k.n - 1);
    const double rm1 = k.r - 1, nm2 = k.n - 2;
    auto integrand = [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double log_density = rm1 * std::log(t) + nm2 * std::log1p(-t) - log_norm;
        const double w = std::exp(log_density);
        if (w == 0.0) return 0.0;
        return w * g(t / (1.0 - t));
    };
    return integrate_adaptive(integrand, detail::kernel_breaks(k, g.growth_degree), q);
}

// int_0^inf s^{r-1} (1+s)^{-n-r+1} g(s) ds. Underflows to 0 once B(r, n-1)
// leaves double range; operators use kernel_expectation instead.
[[nodiscard]] inline double kernel_integral(const KernelSpec& k, const TestFunction& g,
                                            const QuadraturePolicy& q = {}) {
    const double e = kernel_expectation(k, g, q).value;
    return std::exp(log_beta(k.r, k.n - 1)) * e;
}

} // namespace szb
