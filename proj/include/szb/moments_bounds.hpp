#pragma once

// Central moments Psi_1 = T_n(s - x; x), Psi_2 = T_n((s - x)^2; x),
// Psi_3 = T_n((s - x)^4; x), and pass/fail checks of the explicit raw- and
// central-moment bounds for T_n.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "szb/errors.hpp"
#include "szb/operators.hpp"

namespace szb {

enum class InequalityId {
    L2_E10,       // T_n(1; x) = 1
    L2_E101,      // |T_n(s; x) - x|
    L2_E11,       // |T_n(s^2; x) - x^2|
    L2_E102,      // |T_n(s^3; x) - x^3|
    L2_E103,      // |T_n(s^4; x) - x^4|
    L3_psi1,      // signed Psi_1
    L3_psi1_abs,  // |Psi_1|
    L3_psi2_A,
    L3_psi3_B,
};

inline const char* to_string(InequalityId id) {
    switch (id) {
    case InequalityId::L2_E10: return "L2_E10";
    case InequalityId::L2_E101: return "L2_E101";
    case InequalityId::L2_E11: return "L2_E11";
    case InequalityId::L2_E102: return "L2_E102";
    case InequalityId::L2_E103: return "L2_E103";
    case InequalityId::L3_psi1: return "L3_psi1";
    case InequalityId::L3_psi1_abs: return "L3_psi1_abs";
    case InequalityId::L3_psi2_A: return "L3_psi2_A";
    case InequalityId::L3_psi3_B: return "L3_psi3_B";
    }
    return "?";
}

// Smallest n for which each inequality is stated (strict lower bound + 1).
inline int min_order(InequalityId id) {
    switch (id) {
    case InequalityId::L2_E10: return 2;
    case InequalityId::L2_E101:
    case InequalityId::L3_psi1:
    case InequalityId::L3_psi1_abs: return 3;
    case InequalityId::L2_E11:
    case InequalityId::L3_psi2_A: return 4;
    case InequalityId::L2_E102: return 5;
    case InequalityId::L2_E103: return 6;
    case InequalityId::L3_psi3_B: return 7;
    }
    return 2;
}

enum class CheckStatus { pass, fail, skipped_domain };

inline const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped_domain: return "skipped_domain";
    }
    return "?";
}

// Slack for rounding only.
[[nodiscard]] inline double bound_slack(double rhs) { return 1e-9 * std::max(1.0, std::fabs(rhs)); }

struct BoundReport {
    InequalityId id{};
    int n = 0;
    double x = 0, nu = 0;
    double lhs = 0, rhs = 0, margin = 0;
    CheckStatus status = CheckStatus::skipped_domain;

    [[nodiscard]] bool pass() const { return status == CheckStatus::pass; }
    // A margin this negative is not rounding: either a transcription or an
    // evaluation defect.
    [[nodiscard]] bool genuine_violation() const {
        return status == CheckStatus::fail && margin < -1e-6 * std::max(1.0, std::fabs(rhs));
    }
};

[[nodiscard]] inline BoundReport make_report(InequalityId id, const OperatorQuery& q, double lhs, double rhs) {
    BoundReport b{id, q.n, q.x, q.params.nu(), lhs, rhs, rhs - lhs, CheckStatus::pass};
    b.status = b.margin >= -bound_slack(rhs) ? CheckStatus::pass : CheckStatus::fail;
    return b;
}

[[nodiscard]] inline BoundReport skipped_report(InequalityId id, const OperatorQuery& q) {
    return {id, q.n, q.x, q.params.nu(), 0.0, 0.0, 0.0, CheckStatus::skipped_domain};
}

// Right-hand sides, transcribed term by term.
namespace bound_rhs {

inline double eq101(double n, double x, double nu) { return 2.0 / (n - 2) * x + 2.0 * nu / (n - 2); }

inline double eq11(double n, double x, double nu) {
    const double d = n * n - 5 * n + 6;
    return (5 * n - 6) / d * x * x + (4 * nu * n / d + 2 * n / d) * x + (4 * nu * nu + 6 * nu) / d;
}

inline double eq102(double n, double x, double nu) {
    const double poly = (9 * n * n - 26 * n + 24) * x * x * x + 6 * n * n * (nu + 1) * x * x +
                        (12 * nu * nu * n + 18 * nu * n + 6 * n) * x + 12 * nu * nu + 4 * nu + 8 * nu * nu * nu;
    return poly / ((n - 2) * (n - 3) * (n - 4));
}

inline double quartic_denominator(double n) {
    return n * n * n * n - 14 * n * n * n + 71 * n * n - 154 * n + 120;
}

inline double eq103(double n, double x, double nu) {
    const double nu2 = nu * nu, nu3 = nu2 * nu, nu4 = nu3 * nu;
    const double n2 = n * n, n3 = n2 * n;
    const double poly = (14 * n3 - 71 * n2 + 154 * n - 120) * x * x * x * x + (8 * nu * n3 + 12 * n3) * x * x * x +
                        (62 * nu * n2 + 24 * nu2 * n2 + 36 * n2) * x * x +
                        (32 * nu3 * n + 96 * nu2 * n + 56 * nu * n + 24 * n) * x +
                        16 * nu4 + 48 * nu3 + 44 * nu2 + 12 * nu;
    return poly / quartic_denominator(n);
}

inline double psi1(double n, double x, double nu) { return eq101(n, x, nu); }

// Rational form of the Psi_2 bound, denominator n^2 - 5n + 6.
inline double psi2(double n, double x, double nu) {
    return 9.0 / (n - 3) * x * x + (8 * nu * n - 12 * nu + 2 * n) / (n * n - 5 * n + 6) * x;
}

// Psi_2 majorant as it appears inside the modulus-of-continuity rate,
// denominator n - 2 and no 1/(n-3) on the quadratic term.
inline double psi2_rate_form(double n, double x, double nu) {
    return 9.0 * x * x + (8 * nu * n - 12 * nu + 2 * n) / (n - 2) * x;
}

inline double psi3(double n, double x, double nu) {
    const double nu2 = nu * nu, nu3 = nu2 * nu, nu4 = nu3 * nu;
    const double n2 = n * n, n3 = n2 * n;
    const double q = quartic_denominator(n);
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    return (88 * n2 - 405 * n + 450) / ((n - 2) * (n - 3) * (n - 5)) * x4 +
           (240 * n - 480 * nu + 856 * n * nu - 432 * n2 * nu + 64 * n3 * nu - 228 * n2 + 48 * n3) / q * x3 +
           (96 * n2 * nu2 + 170 * n2 * nu + 60 * n2 - 456 * n * nu2 - 684 * n * nu - 120 * n + 480 * nu2 + 720 * nu) /
               q * x2 +
           (24 * n - 80 * nu + 72 * n * nu - 240 * nu2 - 160 * nu3 + 144 * n * nu2 + 64 * n * nu3) / q * x +
           (16 * nu4 + 48 * nu3 + 44 * nu2 + 12 * nu) / q;
}

} // namespace bound_rhs

struct MomentSet {
    int n = 0;
    double x = 0, nu = 0;
    std::array<double, 5> raw{};  // T_n(s^m; x), m = 0..4
    double psi1 = 0;              // T_n(s - x; x), signed
    double psi2 = 0;              // T_n((s - x)^2; x)
    double psi3_fourth = 0;       // T_n((s - x)^4; x)
    // Quadrature route, kept for the cancellation guard.
    std::optional<double> psi2_direct;
    std::optional<double> psi3_direct;
    bool compensated_fallback = false;
};

namespace detail {

inline void require_order(const OperatorQuery& q, int min_n, const char* what) {
    if (q.n < min_n) {
        std::ostringstream os;
        os << what << " needs n >= " << min_n << ", got n=" << q.n;
        throw MomentDiverges(os.str());
    }
}

// sum_j C(k, j) (-x)^{k-j} raw_j
inline long double binomial_central(const std::array<long double, 5>& raw, long double x, int k) {
    static constexpr long double binom[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    numeric::CompensatedSum<long double> s;
    for (int j = 0; j <= k; ++j) s.add(binom[k][j] * std::pow(-x, k - j) * raw[j]);
    return s.value();
}

// Central moment assembled per series index before the outer sum.
inline long double per_index_central(const OperatorQuery& q, int k) {
    static constexpr long double binom[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    const long double x = q.x;
    std::array<long double, 5> den{};
    for (int j = 0; j <= k; ++j) den[j] = falling_denominator(q.n, j);
    const DunklWindow w(q.y(), q.params, q.series, k);
    return w.expectation([&](std::uint64_t r) {
        long double c = 0;
        for (int j = 0; j <= k; ++j)
            c += binom[k][j] * std::pow(-x, k - j) * (r == 0 && j > 0 ? 0.0L : rising(r, j) / den[j]);
        return c;
    });
}

inline TestFunction centred_power(double x, int k) {
    std::ostringstream os;
    os.precision(17);
    os << "(s-" << x << ")^" << k;
    return TestFunction{os.str(), [x, k](double s) { return std::pow(s - x, k); }, k};
}

} // namespace detail

// Psi_1, n > 2.
[[nodiscard]] inline double psi1(const OperatorQuery& q) {
    detail::require_order(q, 3, "Psi_1");
    const auto raw = raw_moments(q, 1);
    return static_cast<double>(raw[1] - static_cast<long double>(q.x) * raw[0]);
}

// Psi_2, n > 3.
[[nodiscard]] inline double psi2(const OperatorQuery& q) {
    detail::require_order(q, 4, "Psi_2");
    return static_cast<double>(detail::binomial_central(raw_moments(q, 2), q.x, 2));
}

// Full moment set, n > 5. With verify_direct the even central moments are
// also computed as T_n((s - x)^k; x) by quadrature; if the two routes
// disagree by more than 1e-7 relative, the per-index assembly replaces the
// binomial expansion.
[[nodiscard]] inline MomentSet central_moments(const OperatorQuery& q, bool verify_direct = true,
                                               IntegralCache* cache = nullptr) {
    detail::require_order(q, 6, "central moments through order 4");
    const auto raw = raw_moments(q, 4);
    MomentSet m;
    m.n = q.n;
    m.x = q.x;
    m.nu = q.params.nu();
    for (int j = 0; j <= 4; ++j) m.raw[j] = static_cast<double>(raw[j]);
    m.psi1 = static_cast<double>(detail::binomial_central(raw, q.x, 1));
    long double p2 = detail::binomial_central(raw, q.x, 2);
    long double p4 = detail::binomial_central(raw, q.x, 4);
    if (verify_direct) {
        m.psi2_direct = szasz_beta_dunkl(q, detail::centred_power(q.x, 2), cache);
        m.psi3_direct = szasz_beta_dunkl(q, detail::centred_power(q.x, 4), cache);
        auto agrees = [](long double a, double b) {
            return std::fabs(b) <= 1e-6 || numeric::relative_difference(static_cast<double>(a), b) <= 1e-7;
        };
        if (!agrees(p2, *m.psi2_direct) || !agrees(p4, *m.psi3_direct)) {
            m.compensated_fallback = true;
            p2 = detail::per_index_central(q, 2);
            p4 = detail::per_index_central(q, 4);
            if (!agrees(p2, *m.psi2_direct) || !agrees(p4, *m.psi3_direct)) {
                std::ostringstream os;
                os.precision(17);
                os << "central moments disagree between routes at n=" << q.n << " x=" << q.x
                   << " nu=" << q.params.nu() << ": Psi_2 " << static_cast<double>(p2) << " vs "
                   << *m.psi2_direct << ", Psi_3 " << static_cast<double>(p4) << " vs " << *m.psi3_direct;
                throw NumericalError(os.str());
            }
        }
    }
    m.psi2 = static_cast<double>(p2);
    m.psi3_fourth = static_cast<double>(p4);
    return m;
}

// Raw-moment bounds. Inequalities whose n-condition fails come back as
// skipped_domain. The normalization check runs through the quadrature path.
[[nodiscard]] inline std::vector<BoundReport> check_lemma2(const OperatorQuery& q, IntegralCache* cache = nullptr) {
    q.validate();
    const double n = q.n, x = q.x, nu = q.params.nu();
    std::vector<BoundReport> out;
    const int top = std::min(4, q.n - 2);
    const auto raw = raw_moments(q, top);
    auto raw_err = [&](int m) {
        return static_cast<double>(std::fabs(raw[m] - std::pow(static_cast<long double>(x), m)));
    };
    out.push_back(make_report(InequalityId::L2_E10, q,
                              std::fabs(szasz_beta_dunkl(q, functions::constant(1.0), cache) - 1.0), 0.0));
    const std::array<std::pair<InequalityId, double (*)(double, double, double)>, 4> rows = {{
        {InequalityId::L2_E101, bound_rhs::eq101},
        {InequalityId::L2_E11, bound_rhs::eq11},
        {InequalityId::L2_E102, bound_rhs::eq102},
        {InequalityId::L2_E103, bound_rhs::eq103},
    }};
    for (int m = 1; m <= 4; ++m) {
        const auto [id, rhs] = rows[m - 1];
        if (q.n < min_order(id)) {
            out.push_back(skipped_report(id, q));
            continue;
        }
        out.push_back(make_report(id, q, raw_err(m), rhs(n, x, nu)));
    }
    return out;
}

// Central-moment bounds. Psi_1 is reported both signed and in absolute value.
[[nodiscard]] inline std::vector<BoundReport> check_lemma3(const OperatorQuery& q, IntegralCache* cache = nullptr,
                                                           bool verify_direct = true) {
    q.validate();
    const double n = q.n, x = q.x, nu = q.params.nu();
    std::vector<BoundReport> out;
    if (q.n < 3) {
        for (auto id : {InequalityId::L3_psi1, InequalityId::L3_psi1_abs, InequalityId::L3_psi2_A,
                        InequalityId::L3_psi3_B})
            out.push_back(skipped_report(id, q));
        return out;
    }
    const double p1 = psi1(q);
    out.push_back(make_report(InequalityId::L3_psi1, q, p1, bound_rhs::psi1(n, x, nu)));
    out.push_back(make_report(InequalityId::L3_psi1_abs, q, std::fabs(p1), bound_rhs::psi1(n, x, nu)));
    if (q.n < min_order(InequalityId::L3_psi2_A)) {
        out.push_back(skipped_report(InequalityId::L3_psi2_A, q));
        out.push_back(skipped_report(InequalityId::L3_psi3_B, q));
        return out;
    }
    if (q.n < min_order(InequalityId::L3_psi3_B)) {
        out.push_back(make_report(InequalityId::L3_psi2_A, q, psi2(q), bound_rhs::psi2(n, x, nu)));
        out.push_back(skipped_report(InequalityId::L3_psi3_B, q));
        return out;
    }
    const auto m = central_moments(q, verify_direct, cache);
    out.push_back(make_report(InequalityId::L3_psi2_A, q, m.psi2, bound_rhs::psi2(n, x, nu)));
    out.push_back(make_report(InequalityId::L3_psi3_B, q, m.psi3_fourth, bound_rhs::psi3(n, x, nu)));
    return out;
}

} // namespace szb
