#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "modstein/numerics.hpp"
#include "reference_values.hpp"

using namespace modstein;

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024157652;
}

TEST_CASE("kronrod panels are exact on high-degree polynomials") {
    // K15 integrates degree <= 22 exactly on each panel.
    auto r = integrate_interval([](double x) { return std::pow(x, 22); }, 0,
                                1, 1e-12);
    CHECK(r.value == doctest::Approx(1.0 / 23).epsilon(1e-14));

    auto r2 = integrate_interval(
        [](double x) { return 5 * x * x * x * x - 2 * x + 7; }, -2, 3, 1e-12);
    // antiderivative x^5 - x^2 + 7x
    CHECK(r2.value == doctest::Approx((243.0 + 32) - (9 - 4) + 7 * 5)
                          .epsilon(1e-14));
}

TEST_CASE("gaussian mass over the line") {
    auto f = [](double x) { return std::exp(-0.5 * x * x); };
    SUBCASE("with envelope") {
        auto r = integrate_line(f, 1e-12, GaussianEnvelope{0, 1, 1});
        CHECK(r.value == doctest::Approx(kSqrt2Pi).epsilon(1e-12));
        CHECK(r.abs_error_estimate < 1e-10);
    }
    SUBCASE("without envelope, window doubling") {
        auto r = integrate_line(f, 1e-12);
        CHECK(r.value == doctest::Approx(kSqrt2Pi).epsilon(1e-12));
    }
    SUBCASE("wide gaussian needs the doubling rounds") {
        auto g = [](double x) { return std::exp(-x * x / 50); };
        auto r = integrate_line(g, 1e-12);
        CHECK(r.value ==
              doctest::Approx(std::sqrt(50 * std::acos(-1.0))).epsilon(1e-12));
    }
}

TEST_CASE("quartic-tilted gaussian mass matches the frozen reference") {
    auto f = [](double x) {
        return std::exp(-0.5 * x * x - 0.25 * x * x * x * x);
    };
    auto r = integrate_line(f, 1e-13, GaussianEnvelope{0, 1, 1});
    CHECK(r.value == doctest::Approx(oracle::kZ_g1_c1).epsilon(1e-13));
}

TEST_CASE("cancelling integrals terminate instead of refining forever") {
    // odd integrand: the true value is 0, so a purely relative criterion
    // could never be met
    auto f = [](double x) { return x * std::exp(-0.5 * x * x); };
    auto r = integrate_line(f, 1e-12, GaussianEnvelope{0, 1, 1});
    CHECK(std::abs(r.value) < 1e-14);

    auto z = integrate_line([](double) { return 0.0; }, 1e-12);
    CHECK(z.value == 0.0);
}

TEST_CASE("complex line integral") {
    // Int e^{i x} e^{-x^2/2} dx = sqrt(2 pi) e^{-1/2}
    auto f = [](double x) {
        return std::exp(std::complex<double>(-0.5 * x * x, x));
    };
    auto r = integrate_line_complex(f, 1e-12, GaussianEnvelope{0, 1, 1});
    CHECK(r.value.real() ==
          doctest::Approx(kSqrt2Pi * std::exp(-0.5)).epsilon(1e-12));
    CHECK(std::abs(r.value.imag()) < 1e-13);
}

TEST_CASE("integrable endpoint singularity") {
    auto r = integrate_interval([](double x) { return 1 / std::sqrt(x); }, 0,
                                1, 1e-10);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("unreachable tolerance reports the best estimate") {
    // oscillation keeps the Kronrod/Gauss disagreement above exact zero, so
    // a tolerance below the roundoff floor can never be certified
    auto f = [](double x) {
        return std::exp(-0.5 * x * x) * (1 + 1e-3 * std::cos(137 * x));
    };
    bool threw = false;
    try {
        integrate_line(f, 1e-30, GaussianEnvelope{0, 1, 2});
    } catch (const tolerance_error& e) {
        threw = true;
        CHECK(e.best_estimate == doctest::Approx(kSqrt2Pi).epsilon(1e-6));
        CHECK(e.error_estimate > 0);
    }
    CHECK(threw);
}

TEST_CASE("integration is deterministic") {
    auto f = [](double x) { return std::cos(3 * x) * std::exp(-x * x); };
    auto a = integrate_line(f, 1e-12);
    auto b = integrate_line(f, 1e-12);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("gauss-hermite nodes and weights") {
    SUBCASE("n = 1 is the mean rule") {
        auto [x, w] = gauss_hermite(1);
        CHECK(x.size() == 1);
        CHECK(x[0] == 0.0);
        CHECK(w[0] == 1.0);
    }
    SUBCASE("n = 5 matches the frozen closed-form rule") {
        auto [x, w] = gauss_hermite(5);
        CHECK(x[0] == doctest::Approx(-oracle::kGH5_x2).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(-oracle::kGH5_x1).epsilon(1e-14));
        CHECK(std::abs(x[2]) < 1e-14);
        CHECK(x[3] == doctest::Approx(oracle::kGH5_x1).epsilon(1e-14));
        CHECK(x[4] == doctest::Approx(oracle::kGH5_x2).epsilon(1e-14));
        CHECK(w[2] == doctest::Approx(oracle::kGH5_w0).epsilon(1e-14));
        CHECK(w[1] == doctest::Approx(oracle::kGH5_w1).epsilon(1e-14));
        CHECK(w[0] == doctest::Approx(oracle::kGH5_w2).epsilon(1e-14));
    }
    SUBCASE("weights sum to one and match gaussian moments") {
        for (int n : {2, 5, 20, 40, 128}) {
            auto [x, w] = gauss_hermite(n);
            double s0 = 0, s2 = 0, s4 = 0, s6 = 0;
            for (int i = 0; i < n; ++i) {
                s0 += w[i];
                s2 += w[i] * x[i] * x[i];
                s4 += w[i] * std::pow(x[i], 4);
                s6 += w[i] * std::pow(x[i], 6);
            }
            CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
            if (n >= 2) CHECK(s2 == doctest::Approx(1.0).epsilon(1e-12));
            if (n >= 5) {
                CHECK(s4 == doctest::Approx(3.0).epsilon(1e-12));
                CHECK(s6 == doctest::Approx(15.0).epsilon(1e-12));
            }
        }
    }
    SUBCASE("degree bounds are enforced") {
        CHECK_THROWS_AS(gauss_hermite(0), hypothesis_error);
        CHECK_THROWS_AS(gauss_hermite(513), hypothesis_error);
    }
}

TEST_CASE("probabilists' hermite polynomials") {
    auto he4 = [](double x) { return std::pow(x, 4) - 6 * x * x + 3; };
    auto he5 = [](double x) {
        return std::pow(x, 5) - 10 * x * x * x + 15 * x;
    };
    auto he6 = [](double x) {
        return std::pow(x, 6) - 15 * std::pow(x, 4) + 45 * x * x - 15;
    };
    for (double x : {-2.0, 0.0, 1.0, 3.0}) {
        CHECK(hermite_he(4, x) == doctest::Approx(he4(x)).epsilon(1e-14));
        CHECK(hermite_he(5, x) == doctest::Approx(he5(x)).epsilon(1e-14));
        CHECK(hermite_he(6, x) == doctest::Approx(he6(x)).epsilon(1e-14));
    }
    CHECK(hermite_he(0, 2.5) == 1.0);
    CHECK(hermite_he(1, 2.5) == 2.5);
}

TEST_CASE("monotone inversion") {
    auto f = [](double x) { return std::exp(x); };
    double r = invert_monotone(f, std::exp(1.5), 0, 3, 1e-14);
    CHECK(r == doctest::Approx(1.5).epsilon(1e-12));

    // decreasing function
    auto g = [](double x) { return 1 / x; };
    double r2 = invert_monotone(g, 0.25, 1, 10, 1e-14);
    CHECK(r2 == doctest::Approx(4.0).epsilon(1e-12));

    CHECK_THROWS_AS(invert_monotone(f, 100.0, 0, 3, 1e-14), bracket_error);
    CHECK_THROWS_AS(invert_monotone(f, 0.5, 0, 3, 1e-14), bracket_error);
}

TEST_CASE("fourier inversion recovers gaussian densities") {
    const double pi = std::acos(-1.0);
    SUBCASE("standard normal") {
        auto charfn = [](double xi) {
            return std::complex<double>(std::exp(-0.5 * xi * xi), 0);
        };
        std::vector<double> grid;
        for (int i = -16; i <= 16; ++i) grid.push_back(0.25 * i);
        auto g = fourier_invert(charfn, grid, 10.0, 0.05);
        double worst = 0;
        for (double x : grid) {
            const double exact = std::exp(-0.5 * x * x) / std::sqrt(2 * pi);
            worst = std::max(worst, std::abs(g(x) - exact));
        }
        CHECK(worst < 1e-8);
    }
    SUBCASE("variance 4") {
        auto charfn = [](double xi) {
            return std::complex<double>(std::exp(-2 * xi * xi), 0);
        };
        std::vector<double> grid{-3, -1, 0, 0.5, 2};
        auto g = fourier_invert(charfn, grid, 6.0, 0.02);
        for (double x : grid) {
            const double exact =
                std::exp(-x * x / 8) / std::sqrt(8 * pi);
            CHECK(g(x) == doctest::Approx(exact).epsilon(1e-9));
        }
    }
    SUBCASE("undecayed cutoff is rejected") {
        auto charfn = [](double xi) {
            return std::complex<double>(std::exp(-0.5 * xi * xi), 0);
        };
        CHECK_THROWS_AS(fourier_invert(charfn, {0.0}, 2.0, 0.05),
                        cutoff_error);
    }
}

TEST_CASE("grid function interpolation and tails") {
    GridFunction g;
    g.xs = {0, 1, 2, 4};
    g.ys = {0, 2, 4, 8};  // y = 2x
    CHECK(g(0.5) == doctest::Approx(1.0));
    CHECK(g(3.0) == doctest::Approx(6.0));
    CHECK(g(0.0) == doctest::Approx(0.0));
    CHECK(g(4.0) == doctest::Approx(8.0));
    // flat continuation without a tail model
    CHECK(g(5.0) == doctest::Approx(8.0));
    g.tail_model = TailModel{[](double) { return -1.0; },
                             [](double x) { return 10 * x; }};
    CHECK(g(-1.0) == doctest::Approx(-1.0));
    CHECK(g(5.0) == doctest::Approx(50.0));
}

TEST_CASE("polynomial helper") {
    Polynomial p{{3, -2, 0, 5}};  // 3 - 2x + 5x^3
    CHECK(p(2.0) == doctest::Approx(3 - 4 + 40));
    CHECK(p.degree() == 3);
    auto d = p.derivative();  // -2 + 15x^2
    CHECK(d(2.0) == doctest::Approx(-2 + 60));
    CHECK(d.degree() == 2);
}

TEST_CASE("compensated accumulator") {
    Accumulator acc;
    for (int i = 0; i < 10000; ++i) acc.add(0.1);
    CHECK(acc.total() == doctest::Approx(1000.0).epsilon(1e-15));
    // alternating large/small magnitudes
    Accumulator b;
    b.add(1e16);
    for (int i = 0; i < 100; ++i) b.add(1.0);
    b.add(-1e16);
    CHECK(b.total() == doctest::Approx(100.0).epsilon(1e-13));
}
