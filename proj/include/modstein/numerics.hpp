#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "modstein/errors.hpp"

namespace modstein {

struct QuadratureResult {
    double value = 0;
    double abs_error_estimate = 0;
    std::size_t evaluations = 0;
};

// Analytic continuation of a tabulated function beyond its grid.
struct TailModel {
    std::function<double(double)> below;  // x < xs.front()
    std::function<double(double)> above;  // x > xs.back()
};

struct GridFunction {
    std::vector<double> xs;  // strictly increasing
    std::vector<double> ys;
    std::optional<TailModel> tail_model;

    // Piecewise-linear interpolation, tail model outside the grid.
    double operator()(double x) const;
};

// |f(x)| <= amplitude * exp(-(x-mean)^2 / (2 sd^2)) outside the core window.
struct GaussianEnvelope {
    double mean = 0;
    double sd = 1;
    double amplitude = 1;
};

// Adaptive Gauss-Kronrod integration of f over the whole line. The envelope,
// when given, fixes the core window [mean - 12 sd, mean + 12 sd] and bounds
// the truncated tails analytically; without one the window grows by doubling
// until the added panels stop contributing. Throws tolerance_error when the
// refinement budget is exhausted before reaching rel_tol.
QuadratureResult integrate_line(const std::function<double(double)>& f,
                                double rel_tol,
                                std::optional<GaussianEnvelope> envelope = {});

// Same machinery over a finite interval [a, b].
QuadratureResult integrate_interval(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol);

// Complex-valued variants (used for characteristic functions and
// contour-shifted integrands). Error control is on the modulus.
struct ComplexQuadratureResult {
    std::complex<double> value{0, 0};
    double abs_error_estimate = 0;
    std::size_t evaluations = 0;
};
ComplexQuadratureResult integrate_line_complex(
    const std::function<std::complex<double>(double)>& f, double rel_tol,
    std::optional<GaussianEnvelope> envelope = {});

// Gauss-Hermite rule for the weight e^{-x^2/2}/sqrt(2 pi): sum w_i = 1 and
// the rule is exact for polynomials of degree <= 2n-1. Requires 1 <= n <= 512.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);

// Probabilists' Hermite polynomial He_k via the three-term recurrence
// He_{k+1}(x) = x He_k(x) - k He_{k-1}(x).
double hermite_he(int k, double x);

// Solve f(x) = target for monotone f on [lo, hi] by bisection. Throws
// bracket_error when f(lo), f(hi) do not enclose the target.
double invert_monotone(const std::function<double(double)>& f, double target,
                       double lo, double hi, double tol);

// Density reconstruction f(x) = (1/2pi) Int e^{-i xi x} charfn(xi) d xi by
// the trapezoid rule on a uniform grid over [-xi_cutoff, xi_cutoff]. Throws
// cutoff_error when |charfn| has not decayed below 1e-16 at the cutoff.
GridFunction fourier_invert(
    const std::function<std::complex<double>(double)>& charfn,
    const std::vector<double>& x_grid, double xi_cutoff, double xi_step);

// Fixed 15-point panel rule on [-1, 1] (the Kronrod nodes of the adaptive
// integrator), exact through degree 22. Exposed so table builders can
// evaluate a shared integrand once per node and reuse it across several
// weighted integrals.
const std::array<double, 15>& panel15_nodes();
const std::array<double, 15>& panel15_weights();

// Dense polynomial in the monomial basis, coeffs[k] the coefficient of x^k.
struct Polynomial {
    std::vector<double> coeffs;

    double operator()(double x) const {
        double r = 0;
        for (std::size_t k = coeffs.size(); k-- > 0;) r = r * x + coeffs[k];
        return r;
    }
    Polynomial derivative() const {
        if (coeffs.size() <= 1) return {{0.0}};
        Polynomial d;
        d.coeffs.resize(coeffs.size() - 1);
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            d.coeffs[k - 1] = static_cast<double>(k) * coeffs[k];
        return d;
    }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Neumaier compensated accumulator; exact-ish sums of many panel values.
struct Accumulator {
    double sum = 0, comp = 0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

}  // namespace modstein
