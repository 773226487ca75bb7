#include "modstein/stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "modstein/errors.hpp"
#include "modstein/penalize.hpp"

namespace modstein {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024157652;
constexpr double kMeanTol = 1e-12;   // expectations of test functions
constexpr double kKernelTol = 1e-10; // kernel integrals of the identities

// Density arguments past this kappa level are useless: the density is still
// representable but every quantity built on it has left the range the rest
// of the pipeline can compare against.
constexpr double kKappaGridCap = 610;
constexpr double kKappaProbeCap = 590;

double gauss_pdf(double gamma, double x) {
    const double t = x / gamma;
    return std::exp(-0.5 * t * t) / (gamma * kSqrt2Pi);
}

double gauss_cdf(double gamma, double x) {
    return 0.5 * std::erfc(-x / (gamma * std::sqrt(2.0)));
}

// Largest x with kappa(x) <= cap, found by bisection on the increasing
// restriction to [0, inf).
double kappa_reach(const SteinCoefficients& coeffs, double cap) {
    double hi = coeffs.gamma();
    while (coeffs.kappa(hi) < cap) hi *= 2;
    double lo = 0;
    for (int i = 0; i < 200 && hi - lo > 1e-9 * (1 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (coeffs.kappa(mid) <= cap ? lo : hi) = mid;
    }
    return lo;
}

// E[w(H) 1{H <= x}] / f(x) evaluated from the stable side, with the
// centering already folded into w. Requires E[w(H)] = 0 for the two sides
// to describe the same function.
double centered_inverse(const ReferenceLaw& law,
                        const std::function<double(double)>& w, double x) {
    const double f = law.pdf(x);
    if (!(f > 0) || !std::isfinite(f))
        throw tolerance_error(
            "stein: density underflows at the evaluation point", 0.0,
            std::numeric_limits<double>::infinity());
    const double reach = 12 * law.gamma();
    auto wf = [&](double u) { return w(u) * law.pdf(u); };
    double num;
    if (x <= 0)
        num = integrate_interval(wf, x - reach, x, kKernelTol).value;
    else
        num = -integrate_interval(wf, x, x + reach, kKernelTol).value;
    return num / f;
}

struct Extremum {
    double value = 0;
    double arg = 0;
    void offer(double v, double x) {
        if (std::abs(v) > value) {
            value = std::abs(v);
            arg = x;
        }
    }
};

}  // namespace

void SteinCoefficients::validate() const {
    if (!(params.gamma > 0) || !std::isfinite(params.gamma))
        throw hypothesis_error("stein: gamma must be positive and finite");
    if (!(params.c_quartic >= 0) || !(params.c_quartic <= 3))
        throw hypothesis_error(
            "stein: quartic coefficient must lie in [0, 3] (0 selects the "
            "plain Gaussian drift)");
}

ReferenceLaw::ReferenceLaw(const Phi4Dist& dist)
    : dist_(&dist), gamma_(dist.gamma()), c_(dist.c_quartic()) {}

ReferenceLaw ReferenceLaw::gaussian(double gamma) {
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw hypothesis_error("stein: gamma must be positive and finite");
    ReferenceLaw law;
    law.gamma_ = gamma;
    law.c_ = 0;
    return law;
}

SteinCoefficients ReferenceLaw::coefficients() const {
    return SteinCoefficients{{gamma_, c_}};
}

double ReferenceLaw::pdf(double x) const {
    return dist_ ? dist_->pdf(x) : gauss_pdf(gamma_, x);
}

double ReferenceLaw::cdf(double x) const {
    return dist_ ? dist_->cdf(x) : gauss_cdf(gamma_, x);
}

double ReferenceLaw::tail(double x) const {
    return dist_ ? dist_->tail(x) : gauss_cdf(gamma_, -x);
}

double ReferenceLaw::psi(double x) const {
    return dist_ ? dist_->psi(x) : gamma_ * gamma_ * gauss_pdf(gamma_, x);
}

double ReferenceLaw::phi_low(double x) const {
    if (dist_) return dist_->phi_low(x);
    return x * gauss_cdf(gamma_, x) + gamma_ * gamma_ * gauss_pdf(gamma_, x);
}

double ReferenceLaw::phi_up(double x) const {
    if (dist_) return dist_->phi_up(x);
    return gamma_ * gamma_ * gauss_pdf(gamma_, x) - x * gauss_cdf(gamma_, -x);
}

double ReferenceLaw::expect(const std::function<double(double)>& w) const {
    auto integrand = [&](double u) { return w(u) * pdf(u); };
    return integrate_line(integrand, kMeanTol).value;
}

double apply_operator(const SteinCoefficients& coeffs,
                      const std::function<double(double)>& h,
                      const std::function<double(double)>& h_prime, double x) {
    coeffs.validate();
    if (!h || !h_prime)
        throw hypothesis_error("stein: test function and derivative required");
    return h_prime(x) - coeffs.rho(x) * h(x);
}

double pseudo_inverse(const SteinCoefficients& coeffs, const ReferenceLaw& law,
                      const std::function<double(double)>& h, double x) {
    coeffs.validate();
    if (!h) throw hypothesis_error("stein: test function required");
    const double m0 = law.expect(h);
    return centered_inverse(law, [&](double u) { return h(u) - m0; }, x);
}

double indicator_solution(const SteinCoefficients& coeffs,
                          const ReferenceLaw& law, double x0, double x) {
    coeffs.validate();
    const double f = law.pdf(x);
    if (!(f > 0) || !std::isfinite(f))
        throw tolerance_error(
            "stein: density underflows at the evaluation point", 0.0,
            std::numeric_limits<double>::infinity());
    if (x <= x0) return law.tail(x0) * law.cdf(x) / f;
    return law.cdf(x0) * law.tail(x) / f;
}

SteinSolution solve_stein(const SteinCoefficients& coeffs,
                          const ReferenceLaw& law, const TestFunction& h,
                          Centering centering, const SolveOptions& opts) {
    coeffs.validate();
    if (!h.h || !h.h1)
        throw hypothesis_error(
            "stein: solver needs the test function and its derivative");
    if (opts.grid_points < 64)
        throw hypothesis_error("stein: grid needs at least 64 points");

    const double gamma = law.gamma();
    const double span =
        std::min(opts.span_scale * gamma, kappa_reach(coeffs, kKappaGridCap));

    SteinSolution sol;
    sol.centering = centering;
    sol.h_mean = law.expect(h.h);
    sol.h1_mean = centering == Centering::affine ? law.expect(h.h1) : 0.0;

    auto w = [&](double u) { return h.h(u) - sol.h_mean - sol.h1_mean * u; };
    auto w1 = [&](double u) { return h.h1(u) - sol.h1_mean; };
    auto wf = [&](double u) { return w(u) * law.pdf(u); };
    const bool have_h2 = static_cast<bool>(h.h2);

    // Most of the points go to the central band, where the extrema sit
    // (near 0 and +-gamma in pilot sweeps); the wings keep enough density
    // for the tail decay to be visible.
    const double band = std::min(2.5 * gamma, 0.6 * span);
    const std::size_t n_central = 3 * opts.grid_points / 5;
    const std::size_t n_wing = (opts.grid_points - n_central) / 2;
    auto& xs = sol.xs;
    xs.reserve(n_central + 2 * n_wing);
    for (std::size_t i = 0; i < n_wing; ++i)
        xs.push_back(-span + (span - band) * static_cast<double>(i) /
                                 static_cast<double>(n_wing));
    for (std::size_t i = 0; i < n_central; ++i)
        xs.push_back(-band + 2 * band * static_cast<double>(i) /
                                 static_cast<double>(n_central - 1));
    for (std::size_t i = 1; i <= n_wing; ++i)
        xs.push_back(band + (span - band) * static_cast<double>(i) /
                                static_cast<double>(n_wing));
    const std::size_t n = xs.size();

    // Cumulative quadrature from whichever tail is nearer, so the partial
    // integrals stay dominated by the panels adjacent to the node and keep
    // relative accuracy even where the density is far below the peak.
    sol.g.assign(n, 0.0);
    const double reach = 12 * gamma;
    std::size_t split = 0;  // first index with xs > 0
    while (split < n && xs[split] <= 0) ++split;

    Accumulator left;
    left.add(integrate_interval(wf, xs[0] - reach, xs[0], opts.panel_rel_tol)
                 .value);
    sol.g[0] = left.total() / law.pdf(xs[0]);
    for (std::size_t i = 1; i < split; ++i) {
        left.add(
            integrate_interval(wf, xs[i - 1], xs[i], opts.panel_rel_tol).value);
        sol.g[i] = left.total() / law.pdf(xs[i]);
    }
    Accumulator right;
    right.add(
        integrate_interval(wf, xs[n - 1], xs[n - 1] + reach, opts.panel_rel_tol)
            .value);
    sol.g[n - 1] = -right.total() / law.pdf(xs[n - 1]);
    for (std::size_t i = n - 1; i-- > split;) {
        right.add(
            integrate_interval(wf, xs[i], xs[i + 1], opts.panel_rel_tol).value);
        sol.g[i] = -right.total() / law.pdf(xs[i]);
    }

    sol.dg.resize(n);
    sol.d2g.resize(n);
    if (have_h2) sol.d3g.resize(n);
    Extremum eg, edg, ed2g, ed3g;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = xs[i];
        const double r = coeffs.rho(x);
        const double wv = w(x), w1v = w1(x);
        sol.dg[i] = r * sol.g[i] + wv;
        sol.d2g[i] = (coeffs.rho_prime(x) + r * r) * sol.g[i] + r * wv + w1v;
        eg.offer(sol.g[i], x);
        edg.offer(sol.dg[i], x);
        ed2g.offer(sol.d2g[i], x);
        if (have_h2) {
            sol.d3g[i] = coeffs.big_b(x) * sol.g[i] + coeffs.big_d(x) * wv +
                         r * w1v + h.h2(x);
            ed3g.offer(sol.d3g[i], x);
        }
    }

    // Probe the analytic formula beyond the grid; the same stable-side
    // expectation keeps working as long as the density is representable.
    std::vector<std::pair<double, double>> probes;
    for (double factor : {1.07, 1.16, 1.3, 1.5}) {
        for (double sign : {-1.0, 1.0}) {
            const double x = sign * span * factor;
            if (coeffs.kappa(x) > kKappaProbeCap) continue;
            const double gv = centered_inverse(law, w, x);
            probes.emplace_back(x, gv);
            const double r = coeffs.rho(x);
            const double wv = w(x), w1v = w1(x);
            eg.offer(gv, x);
            edg.offer(r * gv + wv, x);
            ed2g.offer((coeffs.rho_prime(x) + r * r) * gv + r * wv + w1v, x);
            if (have_h2)
                ed3g.offer(coeffs.big_b(x) * gv + coeffs.big_d(x) * wv +
                               r * w1v + h.h2(x),
                           x);
        }
    }
    std::sort(probes.begin(), probes.end());
    for (const auto& [x, gv] : probes) {
        sol.tail_xs.push_back(x);
        sol.tail_g.push_back(gv);
    }

    sol.sup_g = eg.value;
    sol.arg_sup_g = eg.arg;
    sol.sup_dg = edg.value;
    sol.arg_sup_dg = edg.arg;
    sol.sup_d2g = ed2g.value;
    sol.arg_sup_d2g = ed2g.arg;
    sol.sup_d3g = ed3g.value;
    sol.arg_sup_d3g = ed3g.arg;
    return sol;
}

std::vector<double> characterization_residual(
    const SteinCoefficients& coeffs,
    const std::function<double(double)>& density,
    const std::vector<TestFunction>& h_family) {
    coeffs.validate();
    if (!density) throw hypothesis_error("stein: density required");
    std::vector<double> out;
    out.reserve(h_family.size());
    for (const auto& tf : h_family) {
        if (!tf.h || !tf.h1)
            throw hypothesis_error(
                "stein: test function and derivative required");
        auto integrand = [&](double x) {
            return (tf.h1(x) - coeffs.rho(x) * tf.h(x)) * density(x);
        };
        out.push_back(std::abs(integrate_line(integrand, kMeanTol).value));
    }
    return out;
}

std::vector<double> characterization_residual(
    const SteinCoefficients& coeffs, const std::vector<double>& samples,
    const std::vector<TestFunction>& h_family) {
    coeffs.validate();
    if (samples.empty()) throw hypothesis_error("stein: empty sample");
    std::vector<double> out;
    out.reserve(h_family.size());
    for (const auto& tf : h_family) {
        if (!tf.h || !tf.h1)
            throw hypothesis_error(
                "stein: test function and derivative required");
        Accumulator acc;
        for (double x : samples) acc.add(tf.h1(x) - coeffs.rho(x) * tf.h(x));
        out.push_back(std::abs(acc.total() / static_cast<double>(samples.size())));
    }
    return out;
}

double integral_representation_check(const ReferenceLaw& law,
                                     const TestFunction& h,
                                     ReprVariant variant,
                                     const std::vector<double>& x_grid) {
    if (x_grid.empty())
        throw hypothesis_error("stein: empty evaluation grid");
    if (!h.h || !h.h1)
        throw hypothesis_error("stein: test function and derivative required");
    const bool need_h2 =
        variant == ReprVariant::h_hat || variant == ReprVariant::linv_hhat;
    if (need_h2 && !h.h2)
        throw hypothesis_error(
            "stein: this identity integrates the second derivative");

    const double gamma = law.gamma();
    const double reach = 12 * gamma;
    const double m0 = law.expect(h.h);
    const double m1 = need_h2 ? law.expect(h.h1) : 0.0;

    double sup = 0;
    for (double x : x_grid) {
        auto below = [&](const std::function<double(double)>& q) {
            return integrate_interval(q, std::min(x, 0.0) - reach, x,
                                      kKernelTol)
                .value;
        };
        auto above = [&](const std::function<double(double)>& q) {
            return integrate_interval(q, x, std::max(x, 0.0) + reach,
                                      kKernelTol)
                .value;
        };
        double direct = 0, kernel = 0;
        switch (variant) {
            case ReprVariant::h_gamma: {
                direct = h.h(x) - m0;
                kernel =
                    below([&](double u) { return h.h1(u) * law.cdf(u); }) -
                    above([&](double u) { return h.h1(u) * law.tail(u); });
                break;
            }
            case ReprVariant::h_hat: {
                direct = h.h(x) - m0 - x * m1;
                const double first =
                    below([&](double u) { return h.h2(u) * law.cdf(u); }) -
                    above([&](double u) { return h.h2(u) * law.tail(u); });
                // The moment-kernel coefficient is x F(u) - phi_low(u) below
                // the evaluation point and -(x tail(u) + phi_up(u)) above it,
                // so the first-moment group enters as a sum of the two tail
                // integrals. (A parity check pins the sign: at x = 0 with
                // even h the value h(0) - E h is nonzero, while a difference
                // of the two groups would cancel identically.)
                const double second =
                    below([&](double u) { return h.h2(u) * law.phi_low(u); }) +
                    above([&](double u) { return h.h2(u) * law.phi_up(u); });
                kernel = x * first - second;
                break;
            }
            case ReprVariant::linv_h: {
                direct = centered_inverse(
                    law, [&](double u) { return h.h(u) - m0; }, x);
                const double f = law.pdf(x);
                kernel =
                    -(law.tail(x) *
                          below([&](double u) { return h.h1(u) * law.cdf(u); }) +
                      law.cdf(x) *
                          above([&](double u) { return h.h1(u) * law.tail(u); })) /
                    f;
                break;
            }
            case ReprVariant::linv_hhat: {
                direct = centered_inverse(
                    law, [&](double u) { return h.h(u) - m0 - m1 * u; }, x);
                const double f = law.pdf(x);
                const double first =
                    below([&](double u) { return h.h2(u) * law.cdf(u); }) -
                    above([&](double u) { return h.h2(u) * law.tail(u); });
                const double second =
                    law.tail(x) *
                        below([&](double u) { return h.h2(u) * law.phi_low(u); }) -
                    law.cdf(x) *
                        above([&](double u) { return h.h2(u) * law.phi_up(u); });
                kernel = -(law.psi(x) / f) * first + second / f;
                break;
            }
        }
        sup = std::max(sup, std::abs(direct - kernel));
    }
    return sup;
}

std::vector<NormReport> operator_norm_report(
    const ReferenceLaw& law, const std::vector<TestFunction>& h_family,
    BoundClass which) {
    const double gamma = law.gamma();
    const double c = law.c();
    if (!(gamma >= 3 * c)) {
        std::ostringstream os;
        os << "stein: norm estimates need gamma >= 3c, got gamma = " << gamma
           << ", c = " << c;
        throw hypothesis_error(os.str());
    }
    const SteinCoefficients coeffs = law.coefficients();

    std::vector<NormReport> out;
    for (const auto& tf : h_family) {
        if (which == BoundClass::d3 && !tf.h2)
            throw hypothesis_error(
                "stein: the third-derivative bound integrates h''");
        const Centering centering =
            which == BoundClass::d3 ? Centering::affine : Centering::mean;
        const SteinSolution sol = solve_stein(coeffs, law, tf, centering);

        double sup_hc = std::abs(sol.h_mean);  // value of h - Eh at infinity
        double sup_h1 = 0, sup_h2 = 0;
        for (double x : sol.xs) {
            sup_hc = std::max(sup_hc, std::abs(tf.h(x) - sol.h_mean));
            sup_h1 = std::max(sup_h1, std::abs(tf.h1(x)));
            if (tf.h2) sup_h2 = std::max(sup_h2, std::abs(tf.h2(x)));
        }

        auto make = [&](const std::string& bound, double measured,
                        double bound_value) {
            NormReport r;
            r.bound = bound;
            r.gamma = gamma;
            r.c = c;
            r.h_name = tf.name;
            r.measured = measured;
            r.bound_value = bound_value;
            r.ratio = bound_value > 0 ? measured / bound_value : 0.0;
            r.pass = measured <= bound_value + 1e-9;
            return r;
        };
        const double g4 = gamma * gamma * gamma * gamma;
        switch (which) {
            case BoundClass::bounded:
                out.push_back(make("sup|Linv h| <= gamma sqrt(pi/2) sup|h - Eh|",
                                   sol.sup_g,
                                   gamma * std::sqrt(std::acos(-1.0) / 2) *
                                       sup_hc));
                out.push_back(make("sup|D Linv h| <= 2 sup|h - Eh|", sol.sup_dg,
                                   2 * sup_hc));
                break;
            case BoundClass::ac:
                out.push_back(make("sup|D Linv h| <= 11 gamma sup|h'|",
                                   sol.sup_dg, 11 * gamma * sup_h1));
                out.push_back(make("sup|D2 Linv h| <= 4 sup|h'|", sol.sup_d2g,
                                   4 * sup_h1));
                break;
            case BoundClass::d3:
                out.push_back(
                    make("sup|D3 Linv hhat| <= (3 + 2c + 12c/g^4) sup|h''|",
                         sol.sup_d3g, (3 + 2 * c + 12 * c / g4) * sup_h2));
                out.push_back(
                    make("sup|D3 Linv hhat| <= (3 + 2c + 35c/g^4) sup|h''|",
                         sol.sup_d3g, (3 + 2 * c + 35 * c / g4) * sup_h2));
                break;
        }
    }
    return out;
}

double signed_stein_residual(const Polynomial& p, double gamma,
                             const std::function<double(double)>& g) {
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw hypothesis_error("stein: gamma must be positive and finite");
    if (!g) throw hypothesis_error("stein: test function required");
    if (p.degree() > 4)
        throw hypothesis_error(
            "stein: signed operator supports quartic penalties only; higher "
            "multiples of four would need seventh derivatives");

    const double span = 8 * gamma + 6;
    const double dx = 1.0 / 16;
    const auto half = static_cast<std::size_t>(std::lround(span / dx));
    std::vector<double> xs(2 * half + 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = (static_cast<double>(i) - static_cast<double>(half)) * dx;
    const GridFunction mu = signed_density(p, gamma, xs);

    const double c4 = p.coeffs.size() > 4 ? p.coeffs[4] : 0.0;
    auto d1 = [&](double x) {
        auto stencil = [&](double s) {
            return (g(x - 2 * s) - 8 * g(x - s) + 8 * g(x + s) - g(x + 2 * s)) /
                   (12 * s);
        };
        const double s = 1e-4 * (1 + std::abs(x));
        return (16 * stencil(0.5 * s) - stencil(s)) / 15;
    };
    auto d3 = [&](double x) {
        auto stencil = [&](double s) {
            return (g(x + 2 * s) - 2 * g(x + s) + 2 * g(x - s) -
                    g(x - 2 * s)) /
                   (2 * s * s * s);
        };
        const double s = 0.05 * (1 + 0.05 * std::abs(x));
        return (4 * stencil(0.5 * s) - stencil(s)) / 3;
    };

    Accumulator acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        double lg = d1(x) - x * g(x) / (gamma * gamma);
        if (c4 != 0) lg += 4 * c4 * d3(x);
        const double weight = (i == 0 || i + 1 == xs.size()) ? 0.5 : 1.0;
        acc.add(weight * lg * mu.ys[i]);
    }
    return std::abs(acc.total() * dx);
}

}  // namespace modstein
