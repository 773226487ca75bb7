#pragma once

#include <functional>
#include <string>
#include <vector>

#include "modstein/numerics.hpp"
#include "modstein/phi4.hpp"
#include "modstein/report.hpp"

namespace modstein {

// Drift data of the characterizing operator L h = h' - rho h. All polynomial
// evaluators delegate to Phi4Params; the difference is admissibility:
// c_quartic = 0 selects the plain Gaussian drift x / gamma^2, which the
// density family itself rejects but the operator machinery degenerates to.
struct SteinCoefficients {
    Phi4Params params;

    static SteinCoefficients from(const Phi4Params& p) { return {p}; }
    static SteinCoefficients gaussian(double gamma) { return {{gamma, 0.0}}; }

    double gamma() const { return params.gamma; }
    double c() const { return params.c_quartic; }
    double rho(double x) const { return params.rho(x); }
    double rho_tilde(double x) const { return params.rho_tilde(x); }
    double rho_prime(double x) const { return params.rho_prime(x); }
    double rho_second(double x) const { return params.rho_second(x); }
    // Negative log density up to normalization; kappa' = rho.
    double kappa(double x) const { return params.kappa(x); }
    double big_b(double x) const { return params.big_b(x); }
    double big_d(double x) const { return params.big_d(x); }

    void validate() const;  // gamma positive and finite, 0 <= c <= 3
};

// The solver touches the reference law only through its density, its
// distribution function and the first-moment tail integrals. Wraps either a
// penalized distribution (borrowed; keep it alive while the law is in use)
// or the closed-form centered Gaussian reached at c = 0.
class ReferenceLaw {
public:
    ReferenceLaw(const Phi4Dist& dist);
    static ReferenceLaw gaussian(double gamma);

    double gamma() const { return gamma_; }
    double c() const { return c_; }
    SteinCoefficients coefficients() const;

    double pdf(double x) const;
    double cdf(double x) const;
    double tail(double x) const;
    double psi(double x) const;      // E[H 1{H >= x}]
    double phi_low(double x) const;  // E[(x - H)+]
    double phi_up(double x) const;   // E[(H - x)+]

    // E[w(H)] by adaptive quadrature at relative tolerance 1e-12.
    double expect(const std::function<double(double)>& w) const;

private:
    ReferenceLaw() = default;
    const Phi4Dist* dist_ = nullptr;  // null selects the closed-form Gaussian
    double gamma_ = 1;
    double c_ = 0;
};

// Named test function together with the derivatives the estimates consume.
// h2 may be left empty when only first-order machinery is exercised.
struct TestFunction {
    std::string name;
    std::function<double(double)> h;
    std::function<double(double)> h1;
    std::function<double(double)> h2;
};

// Which constant is removed before inverting the operator: the mean alone,
// or the mean and the linear term x E[h'(H)] (the second-order recentering
// that the third-derivative estimate needs).
enum class Centering { mean, affine };

struct SolveOptions {
    std::size_t grid_points = 20'000;
    double span_scale = 8.0;  // half-width of the grid in units of gamma
    double panel_rel_tol = 1e-9;
};

// g = L^{-1} h_centered tabulated on a graded grid. The grid values come
// from cumulative stable-side quadrature (lower tail integrated upward for
// x <= 0, upper tail downward for x > 0, so every partial sum is dominated
// by its panels nearest the evaluation point and relative accuracy survives
// into the tails). Derivatives follow the exact recurrences
//   g'   = rho g + w
//   g''  = (rho' + rho^2) g + rho w + w'
//   g''' = B g + D w + rho w' + w''
// with w the centered right-hand side. Sup norms are measured over the grid
// plus decaying probe evaluations beyond it; probes where the density has
// left the representable range are skipped (the integrand ratio argument
// makes those values smaller still).
struct SteinSolution {
    std::vector<double> xs;
    std::vector<double> g, dg, d2g, d3g;  // d3g empty when h2 is absent
    std::vector<double> tail_xs, tail_g;  // probes beyond the grid
    double h_mean = 0;                    // E[h(H)]
    double h1_mean = 0;                   // E[h'(H)], zero for mean centering
    Centering centering = Centering::mean;
    double sup_g = 0, sup_dg = 0, sup_d2g = 0, sup_d3g = 0;
    double arg_sup_g = 0, arg_sup_dg = 0, arg_sup_d2g = 0, arg_sup_d3g = 0;
};

SteinSolution solve_stein(const SteinCoefficients& coeffs,
                          const ReferenceLaw& law, const TestFunction& h,
                          Centering centering, const SolveOptions& opts = {});

// h'(x) - rho(x) h(x).
double apply_operator(const SteinCoefficients& coeffs,
                      const std::function<double(double)>& h,
                      const std::function<double(double)>& h_prime, double x);

// g(x) = E[(h(H) - E h(H)) 1{H <= x}] / f(x), evaluated from whichever tail
// of the expectation is numerically stable at x.
double pseudo_inverse(const SteinCoefficients& coeffs, const ReferenceLaw& law,
                      const std::function<double(double)>& h, double x);

// Solution for the step function h = 1{. <= x0}, in the covariance-free
// closed form tail(x0) cdf(x) / f(x) below x0 and cdf(x0) tail(x) / f(x)
// above it.
double indicator_solution(const SteinCoefficients& coeffs,
                          const ReferenceLaw& law, double x0, double x);

// |E[h'(Y) - rho(Y) h(Y)]| per test function, with the law of Y given either
// as an integrable density or as a sample. Near zero iff the law matches the
// operator's own distribution.
std::vector<double> characterization_residual(
    const SteinCoefficients& coeffs,
    const std::function<double(double)>& density,
    const std::vector<TestFunction>& h_family);
std::vector<double> characterization_residual(
    const SteinCoefficients& coeffs, const std::vector<double>& samples,
    const std::vector<TestFunction>& h_family);

// The four kernel identities relating centered test functions and their
// operator inverses to weighted tail integrals of h' or h''.
enum class ReprVariant { h_gamma, h_hat, linv_h, linv_hhat };

// Evaluates the direct definition and the kernel integral at every grid
// point and returns the largest absolute gap. The hat variants require h2.
double integral_representation_check(const ReferenceLaw& law,
                                     const TestFunction& h,
                                     ReprVariant variant,
                                     const std::vector<double>& x_grid);

// Which family of operator-norm estimates to measure: bounds driven by
// sup|h|, by sup|h'|, or the third-derivative bound driven by sup|h''|.
enum class BoundClass { bounded, ac, d3 };

// Measures the solution norms for each test function against the proved
// bounds. Requires gamma >= 3 c. The d3 class reports the bound under both
// published constants (12 c / gamma^4 from the derivation and 35 c / gamma^4
// from the statement).
std::vector<NormReport> operator_norm_report(
    const ReferenceLaw& law, const std::vector<TestFunction>& h_family,
    BoundClass which);

// Stationarity defect |integral (L g) d mu| of the signed measure with
// characteristic function e^{P(xi) - gamma^2 xi^2 / 2}, for the operator
// L g = g' - x g / gamma^2 - P'(-d/dx) g. Derivatives of g are formed by
// five-point central differences with one Richardson refinement. Quartic P
// only: higher multiples of four would need seventh and higher derivatives,
// which finite differences cannot deliver at the contract tolerance.
double signed_stein_residual(const Polynomial& p, double gamma,
                             const std::function<double(double)>& g);

}  // namespace modstein
