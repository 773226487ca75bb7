#include "modstein/penalize.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "modstein/errors.hpp"

namespace modstein {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024157652;
constexpr double kQuadTol = 1e-12;

void require_positive_gamma(double gamma) {
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw hypothesis_error("gamma must be positive and finite");
}

// capped imaginary offset shared by the Fourier-side evaluations; without a
// declared cap no shift is attempted
double shift_offset(const PenalizingFunction& phi, double gamma,
                    double theta) {
    const double cap =
        phi.imag_shift_cap ? std::max(phi.imag_shift_cap(gamma), 0.0) : 0.0;
    const double v = std::min(std::abs(theta), cap);
    return theta >= 0 ? v : -v;
}

void require_entire(const PenalizingFunction& phi) {
    if (!phi.complex_eval)
        throw hypothesis_error(
            "Fourier-side evaluation needs an entire extension of the weight");
    // the construction also needs Phi(iu) = Phi(u) on the real line; a
    // finite probe grid cannot certify that globally, so this only guards
    // against wiring mistakes
    for (double u : {0.5, 1.0, 2.0}) {
        const double on_line = std::abs(phi.complex_eval({u, 0.0}));
        const double on_axis = std::abs(phi.complex_eval({0.0, u}));
        if (std::abs(on_axis - on_line) > 1e-10 * (1 + on_line))
            throw hypothesis_error(
                "weight breaks Phi(iu) = Phi(u) at a probe point");
    }
}

// E[e^{i theta H}] e^{+theta^2 gamma^2 / 2} evaluated on the contour
// Im(x) = v gamma^2:
//   e^{(theta-v)^2 gamma^2 / 2} / c *
//       Int e^{i (theta - v) y} Phi(y/gamma^2 + iv) e^{-y^2/(2 gamma^2)} dy
// A full shift (v = theta) removes the oscillation entirely; the cap keeps
// the shifted weight from developing an interior peak that double
// precision could not cancel.
std::complex<double> fourier_ratio_char_side(const PenalizingFunction& phi,
                                             double gamma, double theta) {
    const double g2 = gamma * gamma;
    const double c = penalized_normalization(phi, gamma);
    const double v = shift_offset(phi, gamma, theta);
    const double residual = theta - v;
    const auto q = integrate_line_complex(
        [&](double y) {
            const std::complex<double> w = phi.complex_eval({y / g2, v});
            const double gauss = std::exp(-y * y / (2 * g2));
            const double phase = residual * y;
            return w * gauss *
                   std::complex<double>(std::cos(phase), std::sin(phase));
        },
        1e-11);
    return q.value * (std::exp(residual * residual * g2 / 2) / c);
}

// E[Phi(G/gamma + i theta)] / E[Phi(G/gamma)], shifted down to the same cap
// when the direct integrand would develop an interior peak: with
// w = gamma (v - theta) <= 0,
//   E[Phi(G/gamma + i theta)] =
//       e^{w^2/2} / sqrt(2 pi) Int e^{-i g w} e^{-g^2/2} Phi(g/gamma + iv) dg
std::complex<double> fourier_ratio_shift_side(const PenalizingFunction& phi,
                                              double gamma, double theta) {
    const double v = shift_offset(phi, gamma, theta);
    const double w = gamma * (v - theta);
    const auto num = integrate_line_complex(
        [&](double g) {
            const std::complex<double> val = phi.complex_eval({g / gamma, v});
            const double gauss = std::exp(-g * g / 2);
            const double phase = -g * w;
            return val * gauss *
                   std::complex<double>(std::cos(phase), std::sin(phase)) /
                   kSqrt2Pi;
        },
        1e-11);
    const auto den = integrate_line(
        [&](double g) {
            return phi.eval(g / gamma) * std::exp(-g * g / 2) / kSqrt2Pi;
        },
        kQuadTol, GaussianEnvelope{0.0, 1.0, phi.sup_value / kSqrt2Pi});
    return num.value * (std::exp(w * w / 2) / den.value);
}

// E[e^{uH}] e^{-u^2 gamma^2 / 2} by quadrature of the exponentially tilted
// density; the peak sits at x = u gamma^2 with height e^{+u^2 gamma^2 / 2}.
double laplace_ratio(const PenalizingFunction& phi, double gamma, double c,
                     double u) {
    const double g2 = gamma * gamma;
    const double log_peak = u * u * g2 / 2;
    const GaussianEnvelope env{u * g2, gamma,
                               phi.sup_value * std::exp(log_peak) / c};
    const auto q = integrate_line(
        [&](double x) {
            return phi.eval(x / g2) * std::exp(u * x - x * x / (2 * g2)) / c;
        },
        kQuadTol, env);
    return q.value * std::exp(-log_peak);
}

}  // namespace

void PenalizingFunction::validate() const {
    if (!eval || !log_eval || !dlog_eval)
        throw hypothesis_error(
            "penalizing function needs eval, log_eval and dlog_eval");
    for (double u : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
        const double v = eval(u);
        if (!(v > 0) || !std::isfinite(v))
            throw hypothesis_error("weight must be positive and finite");
        if (std::abs(log_eval(u) - std::log(v)) > 1e-10)
            throw hypothesis_error("log_eval disagrees with log of eval");
        const double h = 1e-5;
        const double fd = (log_eval(u + h) - log_eval(u - h)) / (2 * h);
        if (std::abs(fd - dlog_eval(u)) > 1e-6 * (1 + std::abs(dlog_eval(u))))
            throw hypothesis_error("dlog_eval inconsistent with log_eval");
        if (even_symmetric && std::abs(eval(-u) - v) > 1e-12 * v)
            throw hypothesis_error("weight declared even but is not");
        if (complex_eval) {
            if (std::abs(complex_eval({u, 0.0}) - v) > 1e-12 * v)
                throw hypothesis_error(
                    "entire extension disagrees with the real restriction");
            const double on_axis = std::abs(complex_eval({0.0, u}));
            if (std::abs(on_axis - v) > 1e-10 * (1 + v))
                throw hypothesis_error(
                    "entire extension breaks Phi(iu) = Phi(u) at a probe "
                    "point");
        }
    }
    if (phi_at_zero_is_one && std::abs(eval(0.0) - 1.0) > 1e-14)
        throw hypothesis_error("weight must equal 1 at the origin");
}

PenalizingFunction phi_quartic(double c) {
    if (!(c > 0) || c > 3)
        throw hypothesis_error("quartic weight needs 0 < C <= 3");
    PenalizingFunction phi;
    phi.name = "quartic";
    phi.eval = [c](double u) {
        const double u2 = u * u;
        return std::exp(-c * u2 * u2 / 4);
    };
    phi.log_eval = [c](double u) {
        const double u2 = u * u;
        return -c * u2 * u2 / 4;
    };
    phi.dlog_eval = [c](double u) { return -c * u * u * u; };
    phi.complex_eval = [c](std::complex<double> z) {
        const std::complex<double> z2 = z * z;
        return std::exp(-c * z2 * z2 / 4.0);
    };
    phi.integrable_on_line = true;
    phi.sup_value = 1.0;
    // |Phi(u + iv)| = e^{-C (u^4 - 6 u^2 v^2 + v^4) / 4}; against the
    // Gaussian factor in the shifted integrands the u^2 coefficient stays
    // nonpositive exactly when 3 C v^2 <= gamma^2
    phi.imag_shift_cap = [c](double gamma) {
        return gamma / std::sqrt(3 * c);
    };
    return phi;
}

PenalizingFunction phi_one() {
    PenalizingFunction phi;
    phi.name = "one";
    phi.eval = [](double) { return 1.0; };
    phi.log_eval = [](double) { return 0.0; };
    phi.dlog_eval = [](double) { return 0.0; };
    phi.complex_eval = [](std::complex<double>) {
        return std::complex<double>(1.0, 0.0);
    };
    phi.integrable_on_line = false;
    phi.sup_value = 1.0;
    phi.imag_shift_cap = [](double) {
        return std::numeric_limits<double>::infinity();
    };
    return phi;
}

double penalized_normalization(const PenalizingFunction& phi, double gamma) {
    require_positive_gamma(gamma);
    const double g2 = gamma * gamma;
    const auto q = integrate_line(
        [&](double x) {
            return phi.eval(x / g2) * std::exp(-x * x / (2 * g2));
        },
        kQuadTol, GaussianEnvelope{0.0, gamma, phi.sup_value});
    return q.value;
}

double penalized_density(const PenalizingFunction& phi, double gamma,
                         double x) {
    const double c = penalized_normalization(phi, gamma);
    const double g2 = gamma * gamma;
    return phi.eval(x / g2) * std::exp(-x * x / (2 * g2)) / c;
}

double laplace_duality_gap(const PenalizingFunction& phi, double gamma,
                           double u) {
    require_positive_gamma(gamma);
    const double c = penalized_normalization(phi, gamma);
    const double lhs = laplace_ratio(phi, gamma, c, u);
    const GaussianEnvelope env{0.0, 1.0, phi.sup_value / kSqrt2Pi};
    const auto num = integrate_line(
        [&](double g) {
            return phi.eval(g / gamma + u) * std::exp(-g * g / 2) / kSqrt2Pi;
        },
        kQuadTol, env);
    const auto den = integrate_line(
        [&](double g) {
            return phi.eval(g / gamma) * std::exp(-g * g / 2) / kSqrt2Pi;
        },
        kQuadTol, env);
    return std::abs(lhs - num.value / den.value);
}

double fourier_duality_gap(const PenalizingFunction& phi, double gamma,
                           double theta) {
    require_positive_gamma(gamma);
    require_entire(phi);
    return std::abs(fourier_ratio_char_side(phi, gamma, theta) -
                    fourier_ratio_shift_side(phi, gamma, theta));
}

double tilt_gap(const PenalizingFunction& phi, double gamma, double u) {
    require_positive_gamma(gamma);
    const double g2 = gamma * gamma;
    const auto in_x = integrate_line(
        [&](double x) {
            return phi.eval(x / g2 + u) * std::exp(-x * x / (2 * g2)) /
                   (gamma * kSqrt2Pi);
        },
        kQuadTol,
        GaussianEnvelope{0.0, gamma, phi.sup_value / (gamma * kSqrt2Pi)});
    const auto in_g = integrate_line(
        [&](double g) {
            return phi.eval(g / gamma + u) * std::exp(-g * g / 2) / kSqrt2Pi;
        },
        kQuadTol, GaussianEnvelope{0.0, 1.0, phi.sup_value / kSqrt2Pi});
    return std::abs(in_x.value - in_g.value);
}

std::vector<ModLimitReport> mod_limit_check(const PenalizingFunction& phi,
                                            const std::vector<double>& gammas,
                                            const std::vector<double>& u_grid,
                                            DualityMode mode) {
    if (mode == DualityMode::fourier) require_entire(phi);
    std::vector<ModLimitReport> reports;
    reports.reserve(gammas.size());
    for (double gamma : gammas) {
        require_positive_gamma(gamma);
        ModLimitReport rep;
        rep.gamma = gamma;
        rep.u_grid = u_grid;
        rep.ratio_values.reserve(u_grid.size());
        rep.target_values.reserve(u_grid.size());
        const double c = penalized_normalization(phi, gamma);
        for (double u : u_grid) {
            const double ratio =
                mode == DualityMode::laplace
                    ? laplace_ratio(phi, gamma, c, u)
                    : fourier_ratio_char_side(phi, gamma, u).real();
            const double target = phi.eval(u);
            rep.ratio_values.push_back(ratio);
            rep.target_values.push_back(target);
            rep.sup_error = std::max(rep.sup_error, std::abs(ratio - target));
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<double> hermite_coeffs(const PenalizingFunction& phi, double gamma,
                                   int max_degree) {
    require_positive_gamma(gamma);
    if (max_degree < 0)
        throw hypothesis_error("max_degree must be nonnegative");
    if (max_degree > 60)
        throw hypothesis_error(
            "Hermite degrees beyond 60 rejected: k! amplifies quadrature "
            "noise past any useful accuracy");
    const auto [xs, ws] = gauss_hermite(240);
    std::vector<double> weighted(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        weighted[i] = ws[i] * phi.eval(xs[i] / gamma);
    std::vector<double> coeffs(static_cast<std::size_t>(max_degree) + 1);
    double factorial = 1.0;
    for (int k = 0; k <= max_degree; ++k) {
        if (k > 0) factorial *= k;
        Accumulator acc;
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc.add(weighted[i] * hermite_he(k, xs[i]));
        coeffs[static_cast<std::size_t>(k)] = acc.total() / factorial;
    }
    return coeffs;
}

double edgeworth_density(const std::vector<double>& coeffs, double y,
                         int k_trunc) {
    if (k_trunc < 0 || k_trunc >= static_cast<int>(coeffs.size()))
        throw hypothesis_error(
            "truncation order exceeds the available coefficients");
    Accumulator acc;
    for (int l = 0; l <= k_trunc; ++l)
        acc.add(coeffs[static_cast<std::size_t>(l)] * hermite_he(l, y));
    return std::exp(-y * y / 2) * acc.total();
}

std::complex<double> phi_tilde(const std::vector<double>& coeffs, double gamma,
                               double u, int k_trunc) {
    require_positive_gamma(gamma);
    if (k_trunc < 0 || k_trunc >= static_cast<int>(coeffs.size()))
        throw hypothesis_error(
            "truncation order exceeds the available coefficients");
    if (coeffs[0] == 0)
        throw hypothesis_error("coefficient a_0 must be nonzero");
    const std::complex<double> step(0.0, gamma * u);
    std::complex<double> power(1.0, 0.0);
    std::complex<double> sum(0.0, 0.0);
    for (int k = 0; k <= k_trunc; ++k) {
        sum += coeffs[static_cast<std::size_t>(k)] * power;
        power *= step;
    }
    return sum / coeffs[0];
}

GridFunction signed_density(const Polynomial& p, double gamma,
                            const std::vector<double>& x_grid) {
    require_positive_gamma(gamma);
    if (x_grid.size() < 2 ||
        !std::is_sorted(x_grid.begin(), x_grid.end()))
        throw hypothesis_error("x_grid must be sorted with at least 2 points");
    int lead = -1;
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
        if (p.coeffs[k] == 0) continue;
        if (k == 0 || k % 4 != 0)
            throw hypothesis_error(
                "exponent polynomial must vanish at 0 and use only degrees "
                "divisible by 4");
        lead = static_cast<int>(k);
    }
    if (lead >= 0 && p.coeffs[static_cast<std::size_t>(lead)] > 0)
        throw hypothesis_error(
            "positive leading coefficient: transform not integrable");
    const double g2 = gamma * gamma;
    const auto log_charfn = [&](double xi) { return p(xi) - g2 * xi * xi / 2; };
    // expand the cutoff until the transform has decayed, guarding against
    // an interior bump from positive low-order coefficients
    double cutoff = std::max(8.6 / gamma, 1.0);
    int rounds = 0;
    while (log_charfn(cutoff) > -40 || log_charfn(-cutoff) > -40) {
        cutoff *= 2;
        if (++rounds > 60)
            throw hypothesis_error("transform does not decay: not integrable");
    }
    double peak = 0.0;  // log scale; exp overflow means non-integrable input
    for (int j = 0; j <= 400; ++j) {
        const double xi = -cutoff + 2 * cutoff * j / 400.0;
        peak = std::max(peak, log_charfn(xi));
    }
    if (peak > 700)
        throw hypothesis_error("transform overflows: not integrable");
    // the trapezoid inversion periodizes the density with period 2 pi / h;
    // keep that period well beyond the grid plus the Gaussian tail width
    const double reach =
        std::max(std::abs(x_grid.front()), std::abs(x_grid.back()));
    const double step = 2 * std::acos(-1.0) / (reach + 16 * gamma);
    const auto charfn = [&](double xi) {
        return std::complex<double>(std::exp(log_charfn(xi)), 0.0);
    };
    return fourier_invert(charfn, x_grid, cutoff, step);
}

}  // namespace modstein
