#pragma once

#include <stdexcept>
#include <string>

namespace modstein {

// Invalid parameters or a request outside a result's hypotheses. CLI exit 2.
struct hypothesis_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Root target not enclosed by the supplied bracket. CLI exit 2.
struct bracket_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Argument outside the open range of a monotone bijection (the inverse of a
// strictly decreasing Laplace exponent derivative does not exist there).
// CLI exit 2.
struct range_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Adaptive quadrature exhausted its refinement budget. Carries the best
// estimate so callers can decide whether it is still usable. CLI exit 4.
struct tolerance_error : std::runtime_error {
    tolerance_error(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

// Characteristic function does not satisfy its declared decay bound at the
// requested truncation point. CLI exit 4.
struct cutoff_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace modstein
