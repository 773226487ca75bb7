#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "modstein/errors.hpp"
#include "modstein/numerics.hpp"
#include "modstein/phi4.hpp"
#include "modstein/stein.hpp"

using namespace modstein;

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024157652;

TestFunction gauss_half() {
    return {"exp(-x^2/2)", [](double x) { return std::exp(-0.5 * x * x); },
            [](double x) { return -x * std::exp(-0.5 * x * x); },
            [](double x) { return (x * x - 1) * std::exp(-0.5 * x * x); }};
}

TestFunction cauchy_bump() {
    return {"1/(1+x^2)", [](double x) { return 1 / (1 + x * x); },
            [](double x) {
                const double d = 1 + x * x;
                return -2 * x / (d * d);
            },
            [](double x) {
                const double d = 1 + x * x;
                return (6 * x * x - 2) / (d * d * d);
            }};
}

TestFunction gauss_quarter() {
    return {"exp(-x^2/4)", [](double x) { return std::exp(-0.25 * x * x); },
            [](double x) { return -0.5 * x * std::exp(-0.25 * x * x); },
            [](double x) {
                return (0.25 * x * x - 0.5) * std::exp(-0.25 * x * x);
            }};
}

TestFunction odd_gauss() {
    return {"x exp(-x^2/4)",
            [](double x) { return x * std::exp(-0.25 * x * x); },
            [](double x) { return (1 - 0.5 * x * x) * std::exp(-0.25 * x * x); },
            [](double x) {
                return (0.25 * x * x * x - 1.5 * x) * std::exp(-0.25 * x * x);
            }};
}

// Odd bump whose width follows the law's own scale.
TestFunction adapted_odd(double gamma) {
    const double g2 = gamma * gamma;
    return {"x exp(-x^2/(2 g^2))",
            [g2](double x) { return x * std::exp(-0.5 * x * x / g2); },
            [g2](double x) {
                return (1 - x * x / g2) * std::exp(-0.5 * x * x / g2);
            },
            {}};
}

TestFunction constant_fn(double value) {
    return {"constant", [value](double) { return value; },
            [](double) { return 0.0; }, [](double) { return 0.0; }};
}

double gauss_pdf(double gamma, double x) {
    const double t = x / gamma;
    return std::exp(-0.5 * t * t) / (gamma * kSqrt2Pi);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = a + (b - a) * static_cast<double>(i) /
                        static_cast<double>(n - 1);
    return xs;
}

}  // namespace

TEST_CASE("drift coefficients and operator application") {
    const Phi4Params params{2.0, 1.0 / 3};
    const auto coeffs = SteinCoefficients::from(params);

    for (double x : {0.1, 0.7, 1.9, 4.4}) {
        const double expected =
            x / 4 + (1.0 / 3) * x * x * x / 256.0;
        CHECK(coeffs.rho(x) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(coeffs.rho(-x) == -coeffs.rho(x));  // odd by construction
        CHECK(coeffs.rho_prime(x) >= 0);
        // composite coefficients against their defining combinations
        const double r = coeffs.rho(x), r1 = coeffs.rho_prime(x);
        CHECK(coeffs.big_b(x) ==
              doctest::Approx(coeffs.rho_second(x) + 3 * r * r1 + r * r * r)
                  .epsilon(1e-12));
        CHECK(coeffs.big_d(x) == doctest::Approx(2 * r1 + r * r).epsilon(1e-13));
    }
    CHECK(coeffs.kappa(2) > 0);
    CHECK(coeffs.kappa(10) > coeffs.kappa(4));

    const SteinCoefficients bad_gamma{{0.0, 0.5}};
    const SteinCoefficients bad_c_low{{1.0, -0.1}};
    const SteinCoefficients bad_c_high{{1.0, 3.5}};
    const SteinCoefficients edge_c{{1.0, 3.0}};
    CHECK_THROWS_AS(bad_gamma.validate(), hypothesis_error);
    CHECK_THROWS_AS(bad_c_low.validate(), hypothesis_error);
    CHECK_THROWS_AS(bad_c_high.validate(), hypothesis_error);
    CHECK_NOTHROW(SteinCoefficients::gaussian(1.0).validate());
    CHECK_NOTHROW(edge_c.validate());

    // Plain Gaussian drift at c = 0.
    const auto gaussian = SteinCoefficients::gaussian(1.5);
    const auto h = gauss_half();
    for (double x : {-2.0, -0.3, 0.0, 1.1}) {
        CHECK(apply_operator(gaussian, h.h, h.h1, x) ==
              doctest::Approx(h.h1(x) - x * h.h(x) / 2.25).epsilon(1e-15));
        CHECK(apply_operator(coeffs, h.h, h.h1, x) ==
              doctest::Approx(h.h1(x) - coeffs.rho(x) * h.h(x)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(apply_operator(coeffs, {}, h.h1, 0.0), hypothesis_error);

    // The drift integrates to zero against the symmetric density: the
    // integrand is odd, even though the stated reason elsewhere is parity
    // of the drift itself (which is odd, not even).
    const Phi4Dist dist(params);
    const double drift_mean =
        integrate_line(
            [&](double x) { return coeffs.rho(x) * dist.pdf(x); }, 1e-12)
            .value;
    CHECK(std::abs(drift_mean) <= 1e-12);
}

TEST_CASE("pseudo-inverse of the operator") {
    const Phi4Params params{1.0, 1.0 / 3};
    const Phi4Dist dist(params);
    const ReferenceLaw law(dist);
    const auto coeffs = SteinCoefficients::from(params);

    SUBCASE("constant functions invert to zero") {
        const auto h = constant_fn(2.7);
        for (double x : {-3.0, -1.0, 0.5, 2.0})
            CHECK(std::abs(pseudo_inverse(coeffs, law, h.h, x)) <= 1e-9);
    }

    SUBCASE("identity function under the plain Gaussian gives -1") {
        // g' - x g = x - E[G] has the bounded solution g = -1.
        const auto gcoeffs = SteinCoefficients::gaussian(1.0);
        const auto glaw = ReferenceLaw::gaussian(1.0);
        for (double x : {-2.5, -0.7, 0.0, 0.4, 1.8, 3.0})
            CHECK(pseudo_inverse(gcoeffs, glaw, [](double u) { return u; },
                                 x) == doctest::Approx(-1.0).epsilon(1e-9));
    }

    SUBCASE("solves the operator equation at probe points") {
        const auto h = gauss_half();
        const double m0 =
            integrate_line([&](double u) { return h.h(u) * dist.pdf(u); },
                           1e-12)
                .value;
        auto g = [&](double x) {
            return pseudo_inverse(coeffs, law, h.h, x);
        };
        double worst = 0;
        for (double x : linspace(-4, 4, 101)) {
            const double s = 1e-5 * (1 + std::abs(x));
            const double dg = (g(x + s) - g(x - s)) / (2 * s);
            const double residual =
                dg - coeffs.rho(x) * g(x) - (h.h(x) - m0);
            worst = std::max(worst, std::abs(residual));
        }
        CHECK(worst <= 1e-7);
    }

    SUBCASE("even input produces an odd solution, continuous at the seam") {
        const auto h = gauss_half();
        for (double x : {0.4, 1.0, 2.2, 3.5}) {
            const double plus = pseudo_inverse(coeffs, law, h.h, x);
            const double minus = pseudo_inverse(coeffs, law, h.h, -x);
            CHECK(plus + minus ==
                  doctest::Approx(0.0).epsilon(0).scale(1).epsilon(1e-9));
        }
        const double lo = pseudo_inverse(coeffs, law, gauss_half().h, -1e-8);
        const double hi = pseudo_inverse(coeffs, law, gauss_half().h, 1e-8);
        CHECK(std::abs(hi - lo) <= 1e-7);
    }

    SUBCASE("rejects missing functions") {
        CHECK_THROWS_AS(pseudo_inverse(coeffs, law, {}, 0.0),
                        hypothesis_error);
    }
}

TEST_CASE("tabulated solution object") {
    const Phi4Params params{2.0, 1.0 / 3};
    const Phi4Dist dist(params);
    const ReferenceLaw law(dist);
    const auto coeffs = SteinCoefficients::from(params);
    const auto h = gauss_half();

    SolveOptions opts;
    opts.grid_points = 6000;  // plenty for the cross-checks below
    const SteinSolution sol = solve_stein(coeffs, law, h, Centering::mean, opts);
    const std::size_t n = sol.xs.size();
    REQUIRE(n >= 5900);
    REQUIRE(sol.g.size() == n);
    REQUIRE(sol.d3g.size() == n);  // h'' was supplied

    SUBCASE("grid is symmetric and the solution inherits the parity") {
        double worst_x = 0, worst_g = 0, worst_dg = 0, worst_d2g = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = n - 1 - i;
            worst_x = std::max(worst_x, std::abs(sol.xs[i] + sol.xs[j]));
            worst_g = std::max(worst_g, std::abs(sol.g[i] + sol.g[j]));
            worst_dg = std::max(worst_dg, std::abs(sol.dg[i] - sol.dg[j]));
            worst_d2g = std::max(worst_d2g, std::abs(sol.d2g[i] + sol.d2g[j]));
        }
        CHECK(worst_x <= 1e-12);
        CHECK(worst_g <= 1e-9);    // even h: odd solution
        CHECK(worst_dg <= 1e-9);   // its derivative is even
        CHECK(worst_d2g <= 1e-9);  // second derivative odd again
    }

    SUBCASE("grid values agree with the pointwise formula") {
        for (std::size_t i : {n / 7, n / 3, n / 2, 2 * n / 3, 6 * n / 7}) {
            const double direct =
                pseudo_inverse(coeffs, law, h.h, sol.xs[i]);
            CHECK(sol.g[i] ==
                  doctest::Approx(direct).epsilon(1e-8).scale(1.0));
        }
    }

    SUBCASE("derivative table is consistent with differencing the values") {
        // Interior non-uniform central differences; the comparison is
        // limited by the grid spacing, not by the table itself.
        double worst = 0;
        for (std::size_t i = n / 5; i < 4 * n / 5; i += 97) {
            const double dl = sol.xs[i] - sol.xs[i - 1];
            const double dr = sol.xs[i + 1] - sol.xs[i];
            const double fd = (dl * dl * sol.g[i + 1] +
                               (dr * dr - dl * dl) * sol.g[i] -
                               dr * dr * sol.g[i - 1]) /
                              (dl * dr * (dl + dr));
            worst = std::max(worst, std::abs(fd - sol.dg[i]));
        }
        CHECK(worst <= 1e-5);
    }

    SUBCASE("solution decays past the grid") {
        REQUIRE(sol.tail_xs.size() >= 4);
        double sup_w = std::abs(sol.h_mean);
        for (double x : sol.xs)
            sup_w = std::max(sup_w, std::abs(h.h(x) - sol.h_mean));
        // Probes are sorted by x, so on the left wing |g| grows as the
        // probes approach the grid and on the right wing it shrinks as
        // they recede: the farthest probe on each side is the smallest.
        double prev_neg = 0.0, prev_pos = 1e300;
        for (std::size_t k = 0; k < sol.tail_xs.size(); ++k) {
            const double x = sol.tail_xs[k];
            const double v = std::abs(sol.tail_g[k]);
            CHECK(v <= sup_w / std::abs(coeffs.rho(x)) * (1 + 1e-9));
            if (x < 0) {
                CHECK(v >= prev_neg * (1 - 1e-12));
                prev_neg = v;
            } else {
                CHECK(v <= prev_pos * (1 + 1e-12));
                prev_pos = v;
            }
        }
        CHECK(sol.sup_g > 0);
        MESSAGE("sup|g| = ", sol.sup_g, " at x = ", sol.arg_sup_g);
    }

    SUBCASE("third derivative needs the second derivative of h") {
        TestFunction no_h2{"x exp(-x^2/4)", odd_gauss().h, odd_gauss().h1, {}};
        const SteinSolution lean =
            solve_stein(coeffs, law, no_h2, Centering::mean, opts);
        CHECK(lean.d3g.empty());
        CHECK(lean.sup_d3g == 0);
    }

    SUBCASE("affine centering removes mean and linear response") {
        const auto odd = odd_gauss();
        const SteinSolution hat =
            solve_stein(coeffs, law, odd, Centering::affine, opts);
        CHECK(std::abs(hat.h_mean) <= 1e-12);  // odd h under a symmetric law
        CHECK(hat.h1_mean > 0);
        // Re-derive one node from scratch with the hat recentering.
        const std::size_t i = hat.xs.size() / 3;
        const double x = hat.xs[i];
        REQUIRE(x < 0);
        const double num =
            integrate_interval(
                [&](double u) {
                    return (odd.h(u) - hat.h_mean - hat.h1_mean * u) *
                           dist.pdf(u);
                },
                x - 24, x, 1e-11)
                .value;
        CHECK(hat.g[i] ==
              doctest::Approx(num / dist.pdf(x)).epsilon(1e-8).scale(1.0));
    }

    SUBCASE("rejects degenerate requests") {
        SolveOptions tiny;
        tiny.grid_points = 32;
        CHECK_THROWS_AS(solve_stein(coeffs, law, h, Centering::mean, tiny),
                        hypothesis_error);
        TestFunction broken{"broken", h.h, {}, {}};
        CHECK_THROWS_AS(solve_stein(coeffs, law, broken, Centering::mean),
                        hypothesis_error);
    }
}

TEST_CASE("step-function solutions") {
    const Phi4Params params{1.0, 1.0 / 3};
    const Phi4Dist dist(params);
    const ReferenceLaw law(dist);
    const auto coeffs = SteinCoefficients::from(params);

    SUBCASE("covariance form agrees with the closed expression") {
        // Independent route: distribution function by raw quadrature,
        // then cov(1{H <= x0}, 1{H <= y}) / f(y).
        auto cdf_quad = [&](double t) {
            return integrate_interval([&](double u) { return dist.pdf(u); },
                                      t - 14, t, 1e-11)
                .value;
        };
        const double x0 = 0.7;
        const double fx0 = cdf_quad(x0);
        for (double y : {-3.0, -1.2, -0.4, 0.0, 0.4, 0.7, 1.1, 2.0, 3.2}) {
            const double cov = cdf_quad(std::min(x0, y)) - fx0 * cdf_quad(y);
            CHECK(indicator_solution(coeffs, law, x0, y) ==
                  doctest::Approx(cov / dist.pdf(y)).epsilon(1e-8).scale(1.0));
        }
    }

    SUBCASE("far-left threshold makes the solution vanish") {
        for (double y : linspace(-5, 5, 41))
            CHECK(std::abs(indicator_solution(coeffs, law, -20, y)) <= 1e-6);
    }

    SUBCASE("derivative bound and tail bound") {
        // The operator equation gives the exact derivative away from the
        // threshold: Dg = rho g + 1{y <= x0} - F(x0).
        const double f0 = dist.cdf(0.0);
        double worst = 0;
        for (double y : linspace(-8, 8, 4001)) {
            const double g = indicator_solution(coeffs, law, 0.0, y);
            const double dg = coeffs.rho(y) * g + (y <= 0.0 ? 1.0 : 0.0) - f0;
            worst = std::max(worst, std::abs(dg));
        }
        CHECK(worst <= 4.0 + 1e-9);
        MESSAGE("sup|D indicator solution| = ", worst);
        for (double y : {-6.0, -5.0, -4.0, 4.0, 5.0, 6.0})
            CHECK(std::abs(indicator_solution(coeffs, law, 0.0, y)) <=
                  2 / std::abs(coeffs.rho(y)));
    }

    SUBCASE("reflection symmetry of thresholds") {
        for (double y : {-2.0, -0.5, 0.3, 1.4})
            CHECK(indicator_solution(coeffs, law, 0.8, y) ==
                  doctest::Approx(indicator_solution(coeffs, law, -0.8, -y))
                      .epsilon(1e-12));
    }
}

TEST_CASE("characterization of the law by the operator") {
    const Phi4Params params{2.0, 1.0 / 3};
    const Phi4Dist dist(params);
    const auto coeffs = SteinCoefficients::from(params);
    const std::vector<TestFunction> family{gauss_half(), cauchy_bump(),
                                           odd_gauss()};

    SUBCASE("matching law annihilates the operator") {
        const auto residuals = characterization_residual(
            coeffs, [&](double x) { return dist.pdf(x); }, family);
        REQUIRE(residuals.size() == 3);
        for (double r : residuals) CHECK(r <= 1e-9);
    }

    SUBCASE("plain Gaussian operator annihilates the Gaussian") {
        const auto gcoeffs = SteinCoefficients::gaussian(1.7);
        const auto residuals = characterization_residual(
            gcoeffs, [](double x) { return gauss_pdf(1.7, x); }, family);
        for (double r : residuals) CHECK(r <= 1e-9);
    }

    SUBCASE("mismatched law is detected, with the predicted defect") {
        // Against N(0, gamma^2) the Gaussian part of the operator cancels
        // and only the cubic drift term survives:
        //   E[h'(Y) - rho(Y) h(Y)] = -(c/g^8) E[Y^3 h(Y)]
        // which for h(x) = x e^{-x^2/(2 g^2)} evaluates to 3c/(4 sqrt2 g^4).
        const double gamma = 2.0, c = 1.0 / 3;
        const double predicted =
            3 * c / (4 * std::sqrt(2.0) * gamma * gamma * gamma * gamma);
        const auto residuals = characterization_residual(
            coeffs, [&](double x) { return gauss_pdf(gamma, x); },
            {adapted_odd(gamma)});
        REQUIRE(residuals.size() == 1);
        CHECK(residuals[0] > 1e-3);
        CHECK(residuals[0] == doctest::Approx(predicted).epsilon(1e-10));
    }

    SUBCASE("sampler route") {
        const auto samples = dist.sample(200'000, 0x5eed);
        const auto residuals =
            characterization_residual(coeffs, samples, family);
        for (double r : residuals) CHECK(r <= 0.02);
        const auto again = characterization_residual(coeffs, samples, family);
        CHECK(residuals == again);
    }

    SUBCASE("rejections") {
        CHECK_THROWS_AS(
            characterization_residual(coeffs, std::function<double(double)>{},
                                      family),
            hypothesis_error);
        CHECK_THROWS_AS(
            characterization_residual(coeffs, std::vector<double>{}, family),
            hypothesis_error);
        CHECK(characterization_residual(
                  coeffs, [&](double x) { return dist.pdf(x); }, {})
                  .empty());
    }
}

TEST_CASE("kernel integral identities") {
    const Phi4Params params{2.0, 1.0 / 3};
    const Phi4Dist dist(params);
    const ReferenceLaw law(dist);
    const auto grid = linspace(-4, 4, 11);
    const auto h = gauss_half();

    SUBCASE("all four identities on the penalized law") {
        CHECK(integral_representation_check(law, h, ReprVariant::h_gamma,
                                            grid) <= 1e-7);
        CHECK(integral_representation_check(law, h, ReprVariant::h_hat,
                                            grid) <= 1e-7);
        CHECK(integral_representation_check(law, h, ReprVariant::linv_h,
                                            grid) <= 1e-7);
        CHECK(integral_representation_check(law, h, ReprVariant::linv_hhat,
                                            grid) <= 1e-6);
    }

    SUBCASE("constant test function gives zero everywhere") {
        const auto c = constant_fn(0.7);
        for (auto v : {ReprVariant::h_gamma, ReprVariant::h_hat,
                       ReprVariant::linv_h, ReprVariant::linv_hhat})
            CHECK(integral_representation_check(law, c, v, grid) <= 1e-9);
    }

    SUBCASE("closed-form Gaussian kernels") {
        const auto glaw = ReferenceLaw::gaussian(1.3);
        CHECK(integral_representation_check(glaw, h, ReprVariant::h_gamma,
                                            grid) <= 1e-7);
        CHECK(integral_representation_check(glaw, h, ReprVariant::linv_hhat,
                                            grid) <= 1e-6);
    }

    SUBCASE("rejections") {
        CHECK_THROWS_AS(integral_representation_check(
                            law, h, ReprVariant::h_gamma, {}),
                        hypothesis_error);
        TestFunction no_h2{"lean", h.h, h.h1, {}};
        CHECK_THROWS_AS(integral_representation_check(
                            law, no_h2, ReprVariant::linv_hhat, grid),
                        hypothesis_error);
    }
}

TEST_CASE("operator norm estimates") {
    const Phi4Params params{2.0, 1.0 / 3};
    const Phi4Dist dist(params);
    const ReferenceLaw law(dist);
    const std::vector<TestFunction> family{gauss_half(), cauchy_bump(),
                                           gauss_quarter()};

    SUBCASE("all five bounds hold on the penalized law") {
        for (auto which :
             {BoundClass::bounded, BoundClass::ac, BoundClass::d3}) {
            const auto reports = operator_norm_report(law, family, which);
            REQUIRE(reports.size() == 2 * family.size());
            for (const auto& r : reports) {
                CHECK(r.pass);
                CHECK(r.ratio <= 1.0);
                MESSAGE(r.h_name, ": ", r.bound, " ratio = ", r.ratio);
            }
        }
        // The derivation constant is smaller than the stated one, so the
        // two d3 entries must be ordered.
        const auto d3 = operator_norm_report(law, {gauss_half()},
                                             BoundClass::d3);
        REQUIRE(d3.size() == 2);
        CHECK(d3[0].bound_value < d3[1].bound_value);
        CHECK(d3[0].measured == d3[1].measured);
    }

    SUBCASE("plain Gaussian recovers the classical constants") {
        const auto glaw = ReferenceLaw::gaussian(1.0);
        const auto bounded =
            operator_norm_report(glaw, {gauss_half()}, BoundClass::bounded);
        REQUIRE(bounded.size() == 2);
        // Constant sqrt(pi/2) times sup|h - Eh|; for h = exp(-x^2/2) under
        // the standard Gaussian both E h and the sup equal 1/sqrt(2), so
        // the bound value collapses to sqrt(pi)/2.
        CHECK(bounded[0].bound_value ==
              doctest::Approx(std::sqrt(std::acos(-1.0)) / 2));
        for (const auto& r : bounded) CHECK(r.pass);
        // The general second-derivative constant is 4; the Gaussian
        // sharpens it to 2, so the measured/bound ratio stays below 1/2.
        const auto ac =
            operator_norm_report(glaw, {gauss_half()}, BoundClass::ac);
        REQUIRE(ac.size() == 2);
        CHECK(ac[1].ratio <= 0.5 + 1e-9);
    }

    SUBCASE("degenerate test function measures zero") {
        TestFunction zero{"zero", [](double) { return 0.0; },
                          [](double) { return 0.0; },
                          [](double) { return 0.0; }};
        for (auto which :
             {BoundClass::bounded, BoundClass::ac, BoundClass::d3})
            for (const auto& r : operator_norm_report(law, {zero}, which)) {
                CHECK(r.measured == 0);
                CHECK(r.pass);
            }
    }

    SUBCASE("hypothesis gate") {
        const Phi4Dist narrow(Phi4Params{1.0, 0.5});  // gamma < 3c
        CHECK_THROWS_AS(operator_norm_report(ReferenceLaw(narrow), family,
                                             BoundClass::bounded),
                        hypothesis_error);
        TestFunction no_h2{"lean", gauss_half().h, gauss_half().h1, {}};
        CHECK_THROWS_AS(operator_norm_report(law, {no_h2}, BoundClass::d3),
                        hypothesis_error);
    }
}

TEST_CASE("signed measure stationarity") {
    SUBCASE("pure Gaussian identity") {
        const double gamma = 2.0;
        auto g = [gamma](double x) {
            return x * std::exp(-0.5 * x * x / (gamma * gamma));
        };
        CHECK(signed_stein_residual(Polynomial{}, gamma, g) <= 1e-8);
    }

    SUBCASE("quartic correction, even test function") {
        const double gamma = 2.0, c = 1.0 / 3;
        Polynomial p{{0, 0, 0, 0, -c / (4 * std::pow(gamma, 8))}};
        auto g = [](double x) { return std::exp(-0.5 * x * x); };
        CHECK(signed_stein_residual(p, gamma, g) <= 1e-5);
    }

    SUBCASE("odd test function sees the scale mismatch of the literal form") {
        // The prescribed operator pairs the 1/gamma^2-normalized Gaussian
        // part with a unit-coefficient correction term; the measure is
        // exactly stationary only when the correction also carries
        // 1/gamma^2. Even test functions hide this by parity; an odd one
        // exposes a small but genuine defect at gamma != 1.
        const double gamma = 2.0, c = 1.0 / 3;
        Polynomial p{{0, 0, 0, 0, -c / (4 * std::pow(gamma, 8))}};
        auto g = [](double x) { return x * std::exp(-0.5 * x * x); };
        const double r = signed_stein_residual(p, gamma, g);
        CHECK(r > 1e-5);
        CHECK(r < 5e-4);
        MESSAGE("odd-probe stationarity defect = ", r);
    }

    SUBCASE("zero test function") {
        CHECK(signed_stein_residual(Polynomial{}, 1.0,
                                    [](double) { return 0.0; }) == 0.0);
    }

    SUBCASE("rejections") {
        Polynomial deg8{{0, 0, 0, 0, 0, 0, 0, 0, -1e-4}};
        auto g = [](double x) { return std::exp(-0.5 * x * x); };
        CHECK_THROWS_AS(signed_stein_residual(deg8, 1.0, g),
                        hypothesis_error);
        CHECK_THROWS_AS(signed_stein_residual(Polynomial{}, -1.0, g),
                        hypothesis_error);
        CHECK_THROWS_AS(signed_stein_residual(
                            Polynomial{}, 1.0,
                            std::function<double(double)>{}),
                        hypothesis_error);
    }
}
