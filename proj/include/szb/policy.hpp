#pragma once

#include <cstddef>
#include <string>

#include "szb/errors.hpp"

namespace szb {

enum class TailMode {
    // Rigorous geometric majorant: term * q / (1 - q) with q the bounding ratio.
    geometric_bound,
    // Ratio below 1/2 and the last term below rel_tol times the partial sum.
    term_ratio,
};

inline const char* to_string(TailMode m) {
    return m == TailMode::geometric_bound ? "geometric_bound" : "term_ratio";
}

inline TailMode tail_mode_from_string(const std::string& s) {
    if (s == "geometric_bound") return TailMode::geometric_bound;
    if (s == "term_ratio") return TailMode::term_ratio;
    throw ConfigInvalid("unknown tail_mode '" + s + "'");
}

// Truncation contract shared by every infinite sum over r.
struct SeriesPolicy {
    double rel_tol = 1e-14;
    std::size_t max_terms = 10'000;
    TailMode tail_mode = TailMode::geometric_bound;

    void validate() const {
        if (!(rel_tol > 0.0)) throw ConfigInvalid("series rel_tol must be > 0");
        if (max_terms < 1) throw ConfigInvalid("series max_terms must be >= 1");
    }
};

// Adaptive quadrature contract for the Beta-prime kernel integrals. The
// semi-infinite range is always mapped onto [0, 1) by s = t / (1 - t).
struct QuadraturePolicy {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 2000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw ConfigInvalid("quadrature tolerances must be > 0");
        if (max_subdivisions < 1)
            throw ConfigInvalid("quadrature max_subdivisions must be >= 1");
    }
};

} // namespace szb
