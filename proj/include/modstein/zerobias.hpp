#pragma once

#include <cstddef>
#include <vector>

#include "modstein/numerics.hpp"
#include "modstein/phi4.hpp"

namespace modstein {

// Finite lattice law, symmetric about zero. Construction checks that the
// atoms are strictly increasing, that atoms and weights are invariant under
// negation, and that the weights are positive and sum to one; the first four
// moments are cached. Symmetry is structural here, not a tolerance on the
// odd moments: every downstream transform relies on it.
class DiscreteDist {
  public:
    DiscreteDist(std::vector<double> atoms, std::vector<double> probs);

    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& probs() const { return probs_; }

    double m1() const { return m_[0]; }
    double m2() const { return m_[1]; }
    double m3() const { return m_[2]; }
    double m4() const { return m_[3]; }
    double abs_moment(int k) const;  // E|X|^k, k >= 0

    double cdf(double x) const;       // P(X <= x)
    double cdf_left(double x) const;  // P(X < x)

    // Law of factor * X; factor must be positive to keep the atom order.
    DiscreteDist scaled(double factor) const;

  private:
    std::vector<double> atoms_, probs_;
    double m_[4] = {0, 0, 0, 0};
};

DiscreteDist rademacher();

// Exact law of the sum of n independent copies, by repeated squaring of the
// convolution. Atom counts are capped rather than n itself: lattice summands
// stay linear in n, while off-lattice atom sets can grow geometrically.
// Products whose probability underflows to zero are dropped; the mass lost
// that way sits below the subnormal floor and never reaches the tolerances
// used downstream.
DiscreteDist iid_sum(const DiscreteDist& dist, std::size_t n);

// Density that is polynomial (degree <= 3) between consecutive breakpoints
// and zero outside. Construction validates nonnegativity on the support
// (endpoints and interior critical points of each piece) and unit mass; the
// cumulative integral is cached at the breakpoints so cdf queries are one
// polynomial evaluation.
class PiecewiseDensity {
  public:
    PiecewiseDensity(std::vector<double> breakpoints,
                     std::vector<Polynomial> pieces);

    const std::vector<double>& breakpoints() const { return bp_; }
    const std::vector<Polynomial>& pieces() const { return pieces_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double mass() const { return mass_; }

    // Exact piecewise integrals (antiderivative evaluation, no quadrature).
    double integrate_poly(const Polynomial& q) const;
    double integrate_poly(const Polynomial& q, double lo, double hi) const;
    double moment(int k) const;      // E[X^k]
    double abs_moment(int k) const;  // E|X|^k, pieces split at zero

    // Law of factor * X; negative factors are rejected.
    PiecewiseDensity scaled(double factor) const;

  private:
    std::vector<double> bp_;
    std::vector<Polynomial> pieces_;
    std::vector<double> cum_;  // cdf at each breakpoint
    double mass_ = 0;
};

// Law with an atomic part and an absolutely continuous part, either of which
// may carry zero mass. The sum decomposition below always lands in the
// density slot (a lattice sum plus one independent continuous term is
// continuous), but the type keeps atoms representable so callers can compare
// mixed objects through one cdf.
struct MixedLaw {
    std::vector<double> atom_x;
    std::vector<double> atom_p;
    PiecewiseDensity density;
    double density_weight = 1.0;

    double cdf(double x) const;
};

// Transform with density E[X 1{X > x}] / E[X^2]: piecewise constant between
// atoms, zero outside the atom range. Requires zero mean, which the
// DiscreteDist invariants already guarantee.
PiecewiseDensity zero_bias(const DiscreteDist& dist);

// |E[X f(X)] - E[X^2] E[f'(X*)]| with X* the transformed variable; both
// sides are exact (finite sum against antiderivative differences), so the
// gap measures nothing but accumulated rounding.
double zero_bias_identity_gap(const DiscreteDist& dist, const Polynomial& f);

struct ZeroBiasMoments {
    double abs_first;  // E|X*| = E|X|^3 / (2 E[X^2])
    double second;     // E[X*^2] = E[X^4] / (3 E[X^2])
};
ZeroBiasMoments zero_bias_moments(const DiscreteDist& dist);

// Law of (sum_{k != I} X_k + X*_I) / scale for a uniformly random index I:
// the transform of the full sum equals the sum with one summand replaced by
// an independent transformed copy. Computed as the convolution of the exact
// (n-1)-fold sum with the transform density, then rescaled.
MixedLaw sum_zero_bias_law(const DiscreteDist& dist, std::size_t n,
                           double scale);

// Cubic coefficient for the quartic-tilted transform. The default derives
// from the drift of the characterizing operator (b * gamma^2 = c / gamma^6),
// which is the unique choice whose fixed point is the penalized law itself;
// the printed variant carries an extra factor 4 and is exposed for
// comparison without that fixed-point property.
double c_bias_coefficient(double gamma, double c, bool printed_variant = false);

// Discrete-input transform with density E[(X + c3 X^3) 1{X >= x}], divided
// by its own mass (= E[X^2] + c3 E[X^4], checked numerically). c3 = 0
// recovers zero_bias up to the shared normalization.
PiecewiseDensity c_bias_density(const DiscreteDist& dist, double c3);

// Continuous-input variant on an explicit grid: numerator by quadrature of
// (u + c3 u^3) against the density from x upward, mass by the matching
// moment integrals. Deliberately avoids the closed-form fixed point so that
// comparing the output against the input density stays an actual test.
GridFunction c_bias_density(const Phi4Dist& dist, double c3,
                            const std::vector<double>& x_grid);

}  // namespace modstein
