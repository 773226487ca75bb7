#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "modstein/penalize.hpp"

namespace modstein {

// Jump measures for subordinators. Every representation here has compact
// support, so all exponential moments are finite and tilting by negative y
// stays legal.
struct LevyAtom {
    double position = 1;  // > 0
    double mass = 1;      // > 0
};

struct AtomicMeasure {
    std::vector<LevyAtom> atoms;
};

// Pi restricted to a bounded interval, given by a pointwise density. The
// density itself may blow up at the lower endpoint (the tilted Dickman
// weight e^{-yu}/u is the canonical case); only u Pi(du) needs to be
// finite, and every integral below carries a factor that cancels a pole of
// that order.
struct DensityMeasure {
    double lower = 0;
    double upper = 1;
    std::function<double(double)> density;
};

struct PoissonMeasure {};  // unit atom at 1
struct DickmanMeasure {};  // du/u on (0, 1]

using LevyMeasure =
    std::variant<AtomicMeasure, DensityMeasure, PoissonMeasure,
                 DickmanMeasure>;

struct LevyTriplet {
    double kill = 0;
    double drift = 0;
    LevyMeasure measure = PoissonMeasure{};

    // Structural checks: nonnegative kill and drift, positive atom data,
    // ordered density support with nonnegative probed values.
    void validate() const;
};

// Exponential tilt by y: the kill term drops, the drift survives, and the
// jump measure is reweighted to e^{-yu} Pi(du).
struct TiltedTriplet {
    LevyTriplet base;
    double y = 0;

    // The tilt written out as an ordinary triplet.
    LevyTriplet effective() const;
};

// Lambda(theta) = kill + drift theta + Int (1 - e^{-theta u}) Pi(du), by
// closed form for atoms, quadrature for densities, and the alternating
// series sum_{j>=1} (-1)^{j+1} theta^j / (j j!) for the Dickman measure.
double laplace_exponent(const LevyTriplet& t, double theta);

// Lambda'(y) = drift + Int u e^{-yu} Pi(du), strictly decreasing in y
// whenever the measure is nonzero.
double lambda_prime(const LevyTriplet& t, double y);

// Inverse bijection of lambda_prime. Arguments at or outside the closure of
// its range throw range_error (the inverse simply does not exist there).
double upsilon(const LevyTriplet& t, double x);

TiltedTriplet tilt(const LevyTriplet& t, double y);

// Monte Carlo controls for triplets without tractable expectations.
struct McOptions {
    int n = 200'000;
    std::uint64_t seed = 0x5eed;
    double eps = 1e-6;
};

struct LevyDualityResult {
    double lhs = 0;   // E[e^{-yX(phi)}] / E[e^{-yX}], y = upsilon(x)
    double rhs = 0;   // E[phi(X^{(y)}/gamma)] / E[phi(X/gamma)]
    double gap = 0;   // |lhs - rhs|
    double se = 0;    // combined standard error (0 for exact routes)
};

// Both sides of the tilt duality at y = upsilon(x). Poisson triplets are
// evaluated by exact truncated series; everything else falls back to Monte
// Carlo over sample_subordinator, with the two sides drawn independently so
// the comparison does not collapse into an identity.
LevyDualityResult mod_levy_duality(const PenalizingFunction& phi,
                                   const LevyTriplet& t, double gamma,
                                   double x, const McOptions& opts = {});

double mod_levy_duality_gap(const PenalizingFunction& phi,
                            const LevyTriplet& t, double gamma, double x);

// Common value of E[x^{X(phi)}]/E[x^{P_gamma}] and
// E[phi(P_{x gamma}/gamma)]/E[phi(P_gamma/gamma)] for the unit-rate Poisson
// subordinator, each side summed independently; disagreement beyond 1e-10
// throws tolerance_error.
double poisson_char_ratio(const PenalizingFunction& phi, double gamma,
                          double x);

// n draws of the subordinator at time gamma: drift plus a compound-Poisson
// sum of the jumps of size >= eps, which undershoots the true law by at
// most gamma Int_0^eps u Pi(du) in the mean (for Dickman: gamma eps).
std::vector<double> sample_subordinator(const LevyTriplet& t, double gamma,
                                        double eps, int n,
                                        std::uint64_t seed);

}  // namespace modstein
