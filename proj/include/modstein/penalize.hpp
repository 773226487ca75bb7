#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "modstein/numerics.hpp"

namespace modstein {

// A positive weight applied to a centered Gaussian. The closed forms for
// the log-derivative are carried explicitly because downstream operators
// need them exactly, not through numerical differentiation.
struct PenalizingFunction {
    std::string name;
    std::function<double(double)> eval;       // u -> Phi(u) > 0
    std::function<double(double)> log_eval;   // u -> log Phi(u)
    std::function<double(double)> dlog_eval;  // u -> (log Phi)'(u)
    // entire extension, empty when only the real restriction is known
    std::function<std::complex<double>(std::complex<double>)> complex_eval;
    bool integrable_on_line = false;
    bool phi_at_zero_is_one = true;
    bool even_symmetric = true;
    // global bound sup |Phi| on the real line, used for quadrature envelopes
    double sup_value = 1.0;
    // largest imaginary offset v such that u -> |Phi(u + iv)| e^{-g^2 u^2 / 2}
    // stays peaked at the origin for the given gamma g; empty or zero
    // disables contour shifts in the Fourier-side evaluations
    std::function<double(double /*gamma*/)> imag_shift_cap;

    // Spot-checks the declared structure at a handful of probe points
    // (positivity, value at zero, log consistency, parity, and agreement
    // of the entire extension with the real restriction, including the
    // imaginary-axis symmetry Phi(iu) = Phi(u) required by the Fourier
    // construction). A finite probe grid cannot certify these globally;
    // it guards against wiring mistakes, not adversarial inputs.
    void validate() const;
};

// Phi_C(u) = e^{-C u^4 / 4}, the quartic weight, for 0 < C <= 3.
PenalizingFunction phi_quartic(double c);

// The trivial weight Phi = 1 (the penalized law is the plain Gaussian).
PenalizingFunction phi_one();

// Normalization c_gamma = Int Phi(x/gamma^2) e^{-x^2/(2 gamma^2)} dx, equal
// to gamma sqrt(2 pi) E[Phi(G/gamma)] for a standard Gaussian G.
double penalized_normalization(const PenalizingFunction& phi, double gamma);

// Density of the penalized law at x: Phi(x/gamma^2) e^{-x^2/(2 gamma^2)} / c.
double penalized_density(const PenalizingFunction& phi, double gamma,
                         double x);

// |E[e^{uH}] / E[e^{uX}] - E[Phi(X/gamma^2 + u)] / E[Phi(X/gamma^2)]| with
// H the penalized variable and X ~ N(0, gamma^2); the two sides are computed
// by independent quadratures (moment-generating route vs Gaussian shift).
double laplace_duality_gap(const PenalizingFunction& phi, double gamma,
                           double u);

// |E[e^{i theta H}] e^{+theta^2 gamma^2 / 2} - E[Phi(G/gamma + i theta)] /
// E[Phi(G/gamma)]|. Requires the entire extension. Both sides use at most a
// capped imaginary contour shift so the cancellation stays within double
// precision across the supported parameter range.
double fourier_duality_gap(const PenalizingFunction& phi, double gamma,
                           double theta);

// Gap between the two parameterizations of the shifted-weight expectation,
// E[Phi(X/gamma^2 + u)] under X ~ N(0, gamma^2) versus E[Phi(G/gamma + u)]
// under G ~ N(0, 1); they agree analytically, so this measures quadrature
// consistency of the tilt interpretation.
double tilt_gap(const PenalizingFunction& phi, double gamma, double u);

enum class DualityMode { laplace, fourier };

struct ModLimitReport {
    std::vector<double> u_grid;
    std::vector<double> ratio_values;   // real part of the normalized ratio
    std::vector<double> target_values;  // Phi(u)
    double sup_error = 0;
    double gamma = 0;
};

// Normalized Laplace or Fourier ratios of the penalized law against the
// matching Gaussian, swept over u_grid for each gamma; sup_error tracks the
// distance to the limiting weight Phi.
std::vector<ModLimitReport> mod_limit_check(const PenalizingFunction& phi,
                                            const std::vector<double>& gammas,
                                            const std::vector<double>& u_grid,
                                            DualityMode mode);

// Coefficients a_k = E[He_k(G) Phi(G/gamma)] / k! of the Hermite expansion
// of u -> Phi(u/gamma) in L^2 of the standard Gaussian, k = 0..max_degree.
// max_degree is capped at 60: factorials beyond that amplify coefficient
// noise past any useful accuracy.
std::vector<double> hermite_coeffs(const PenalizingFunction& phi, double gamma,
                                   int max_degree);

// Truncated Hermite series density e^{-y^2/2} Sum_{l <= k_trunc} a_l He_l(y)
// in standardized coordinates. Signed for low truncation orders.
double edgeworth_density(const std::vector<double>& coeffs, double y,
                         int k_trunc);

// Truncated characteristic-function factor Sum_{k <= k_trunc} a_k (i gamma
// u)^k / a_0, normalized so the value at u = 0 is 1; the characteristic
// function of the penalized law is this times e^{-gamma^2 u^2 / 2}.
std::complex<double> phi_tilde(const std::vector<double>& coeffs, double gamma,
                               double u, int k_trunc);

// Density values of the signed measure whose Fourier transform is
// e^{P(xi)} e^{-gamma^2 xi^2 / 2}, recovered by trapezoid inversion on
// x_grid. P must vanish at 0, contain only degrees divisible by 4 (so that
// P(i xi) = P(xi)), and have a nonpositive leading coefficient.
GridFunction signed_density(const Polynomial& p, double gamma,
                            const std::vector<double>& x_grid);

}  // namespace modstein
