#pragma once

#include <cstdint>
#include <vector>

#include "modstein/numerics.hpp"
#include "modstein/report.hpp"

namespace modstein {

// Parameters of the quartic-penalized Gaussian family with density
// exp(-a x^2/2 - b x^4/4) / z, where a = gamma^-2 and b = c / gamma^8.
// The polynomial evaluators below are shared with the operator machinery:
// rho is the drift of the characterizing operator, kappa the negative
// log-density up to the normalization constant, and big_b / big_d the
// coefficients that appear in second- and third-derivative bounds.
struct Phi4Params {
    double gamma = 1.0;
    double c_quartic = 1.0 / 3;

    double a() const { return 1 / (gamma * gamma); }
    double b() const {
        const double g2 = gamma * gamma;
        const double g4 = g2 * g2;
        return c_quartic / (g4 * g4);
    }

    double rho(double x) const { return a() * x + b() * x * x * x; }
    double rho_tilde(double x) const { return a() + b() * x * x; }
    double rho_prime(double x) const { return a() + 3 * b() * x * x; }
    double rho_second(double x) const { return 6 * b() * x; }
    double kappa(double x) const {
        const double x2 = x * x;
        return 0.5 * a() * x2 + 0.25 * b() * x2 * x2;
    }
    // rho'' + 3 rho rho' + rho^3 = x * big_b_even(x^2)
    double big_b(double x) const { return x * big_b_even(x * x); }
    double big_b_even(double y) const {
        const double av = a(), bv = b();
        return ((bv * bv * bv * y + 3 * av * bv * bv) * y +
                3 * bv * (av * av + 3 * bv)) *
                   y * y +
               av * (av * av + 12 * bv) * y + 3 * (av * av + 2 * bv);
    }
    // 2 rho' + rho^2
    double big_d(double x) const {
        const double r = rho(x);
        return 2 * rho_prime(x) + r * r;
    }

    void validate() const;  // throws hypothesis_error on bad gamma or c
};

struct TailFunctionals {
    double psi;      // E[H 1{H >= x}]
    double phi_low;  // E[(x - H)+]
    double phi_up;   // E[(H - x)+]
    double chi_low;  // E[(x - H)^2 1{H <= x}] / 2
    double chi_up;   // E[(H - x)^2 1{H >= x}] / 2
};

// Immutable distribution object. Construction integrates the density once
// into a graded panel table over [0, x_end] (kappa(x_end) ~ 760, past the
// double-precision floor); all tail quantities are suffix sums over that
// table plus a partial-panel rule, so they keep full relative precision
// down to subnormal magnitudes. Negative arguments reduce by symmetry.
class Phi4Dist {
public:
    explicit Phi4Dist(const Phi4Params& params, double rel_tol = 1e-12);

    const Phi4Params& params() const { return params_; }
    double gamma() const { return params_.gamma; }
    double c_quartic() const { return params_.c_quartic; }
    double normalization() const { return z_; }
    double variance() const { return sigma2_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double tail(double x) const;
    double psi(double x) const;
    double phi_low(double x) const;
    double phi_up(double x) const;
    double chi_low(double x) const;
    double chi_up(double x) const;
    TailFunctionals tail_functionals(double x) const;

    // E[H^k] for even k <= 12; odd or out-of-range degrees are rejected.
    double moment(int k) const;
    double abs_mean() const { return abs_mean_; }

    // tail(x)/pdf(x) and psi(x)/pdf(x) for x >= 0, evaluated by a shifted
    // quadrature when the density underflows, so they stay finite and
    // accurate arbitrarily far out.
    double tail_ratio(double x) const;
    double psi_ratio(double x) const;

    double big_g(double x) const;      // 1 + rho(x) cdf(x)/pdf(x)
    double big_g_bar(double x) const;  // 1 - rho(x) tail(x)/pdf(x)

    const GridFunction& cdf_table() const { return cdf_table_; }
    double quantile(double p) const;

    // Rejection sampler: propose N(0, gamma^2), accept with probability
    // exp(-b x^4 / 4). Deterministic given the seed.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;
    double acceptance_rate() const;

private:
    struct Query {
        double w;    // integral of the unnormalized density on [x, inf)
        double uw;   // same with integrand u * w(u)
        double uuw;  // same with integrand u^2 * w(u)
    };
    Query suffix(double x) const;  // requires x >= 0
    double weight(double x) const;

    Phi4Params params_;
    double z_ = 0;        // table normalization 2 * S_w(0)
    double sigma2_ = 0;
    double abs_mean_ = 0;
    double x_end_ = 0;
    std::vector<double> edges_;
    std::vector<double> suf_w_, suf_uw_, suf_uuw_;
    std::vector<double> moments_;  // E[H^k] for even k = 0..12
    GridFunction cdf_table_;
};

inline Phi4Dist make_dist(const Phi4Params& params, double rel_tol = 1e-12) {
    return Phi4Dist(params, rel_tol);
}

// Pointwise verification of the distribution's inequality suite.
struct VerifyOptions {
    std::size_t grid_points = 10000;
    double slack = 1e-12;  // margins must stay >= -slack
};

// Sweeps every inequality family over [-10 gamma, 10 gamma] (linear grid
// plus logarithmic refinements near 0 and +-gamma). Families whose
// hypotheses exclude the given parameters come back with applicable =
// false and a reason instead of a spurious margin.
std::vector<VerificationReport> verify_basic_estimates(
    const Phi4Dist& dist, const VerifyOptions& opts = {});

// Names accepted by the family filter of the CLI.
const std::vector<std::string>& basic_estimate_names();

}  // namespace modstein
