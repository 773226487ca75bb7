#include "modstein/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "modstein/errors.hpp"
#include "modstein/numerics.hpp"

namespace modstein {

namespace {

void require_finite_nonneg(double v, const char* what) {
    if (!(v >= 0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be finite and nonnegative, got " << v;
        throw hypothesis_error(os.str());
    }
}

double support_upper(const LevyMeasure& m) {
    struct V {
        double operator()(const AtomicMeasure& a) const {
            double u = 0;
            for (const auto& at : a.atoms) u = std::max(u, at.position);
            return u;
        }
        double operator()(const DensityMeasure& d) const { return d.upper; }
        double operator()(const PoissonMeasure&) const { return 1; }
        double operator()(const DickmanMeasure&) const { return 1; }
    };
    return std::visit(V{}, m);
}

void require_moment(const LevyTriplet& t, double theta) {
    // compact support keeps every exponential moment finite in principle;
    // reject only what double precision cannot represent
    if (theta < 0 && -theta * support_upper(t.measure) > 700)
        throw hypothesis_error(
            "exponential moment overflows double range for this tilt");
}

// alternating series sum_{j>=1} (-1)^{j+1} theta^j / (j j!), entire in theta
double dickman_exponent_series(double theta) {
    if (std::abs(theta) > 200)
        throw tolerance_error(
            "Dickman exponent series overflows before converging", 0.0,
            std::numeric_limits<double>::infinity());
    Accumulator acc;
    double term = theta;  // j = 1
    for (int j = 1; j <= 500; ++j) {
        acc.add(term);
        const double next = term * -theta * j / ((j + 1.0) * (j + 1.0));
        if (std::abs(next) <= 1e-18 * (1 + std::abs(acc.total()))) break;
        term = next;
    }
    return acc.total();
}

// sum_{k>=0} e^{-lambda} lambda^k / k! g(k), truncated once k is past the
// bulk of the summand and the running term has collapsed
double poisson_expect(double lambda, double bulk,
                      const std::function<double(double)>& g) {
    if (lambda < 0 || !std::isfinite(lambda))
        throw hypothesis_error("Poisson rate must be finite and nonnegative");
    if (lambda > 700)
        throw tolerance_error("Poisson series weight underflows at this rate",
                              0.0, std::numeric_limits<double>::infinity());
    const double past = std::max(lambda, bulk);
    Accumulator acc;
    double w = std::exp(-lambda);  // weight at k = 0
    for (int k = 0; k < 200000; ++k) {
        const double term = w * g(k);
        acc.add(term);
        if (k > past + 12 * std::sqrt(past + 1) &&
            std::abs(term) <= 1e-18 * (1 + std::abs(acc.total())))
            return acc.total();
        w *= lambda / (k + 1);
    }
    throw tolerance_error("Poisson series failed to truncate", acc.total(),
                          std::numeric_limits<double>::infinity());
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    // strictly inside (0, 1) so logs are safe
    double uniform() {
        return (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
    }
};

// exact Poisson count by Knuth's product method, split into blocks so the
// running product never underflows
int poisson_count(Rng& rng, double lambda) {
    int total = 0;
    while (lambda > 0) {
        const double block = std::min(lambda, 30.0);
        const double limit = std::exp(-block);
        double prod = rng.uniform();
        while (prod > limit) {
            ++total;
            prod *= rng.uniform();
        }
        lambda -= block;
    }
    return total;
}

// inverse-CDF jump sampler over [lo, up] built on a log-spaced trapezoid
// table, which absorbs an integrable 1/u-type blowup at the lower end
class DensityJumpSampler {
  public:
    DensityJumpSampler(const std::function<double(double)>& density,
                       double lo, double up) {
        const int cells = 16384;
        s_lo_ = std::log(lo);
        s_hi_ = std::log(up);
        const double h = (s_hi_ - s_lo_) / cells;
        cum_.resize(cells + 1);
        cum_[0] = 0;
        double prev = mass_per_log(density, s_lo_);
        for (int i = 1; i <= cells; ++i) {
            const double cur = mass_per_log(density, s_lo_ + i * h);
            cum_[i] = cum_[i - 1] + 0.5 * (prev + cur) * h;
            prev = cur;
        }
    }

    double draw(Rng& rng) const {
        const double target = rng.uniform() * cum_.back();
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
        const auto i = static_cast<std::size_t>(
            std::max<std::ptrdiff_t>(1, it - cum_.begin()));
        const std::size_t j = std::min(i, cum_.size() - 1);
        const double frac = (target - cum_[j - 1]) /
                            std::max(cum_[j] - cum_[j - 1], 1e-300);
        const double h = (s_hi_ - s_lo_) / (cum_.size() - 1);
        return std::exp(s_lo_ + (j - 1 + frac) * h);
    }

  private:
    static double mass_per_log(const std::function<double(double)>& density,
                               double s) {
        const double u = std::exp(s);
        return density(u) * u;  // Pi(du) in the s = log u coordinate
    }
    double s_lo_ = 0, s_hi_ = 0;
    std::vector<double> cum_;
};

double measure_tail_mass(const LevyMeasure& m, double eps) {
    struct V {
        double eps;
        double operator()(const AtomicMeasure& a) const {
            double s = 0;
            for (const auto& at : a.atoms)
                if (at.position >= eps) s += at.mass;
            return s;
        }
        double operator()(const DensityMeasure& d) const {
            const double lo = std::max(d.lower, eps);
            if (!(lo < d.upper)) return 0;
            return integrate_interval(d.density, lo, d.upper, 1e-10).value;
        }
        double operator()(const PoissonMeasure&) const {
            return eps <= 1 ? 1.0 : 0.0;
        }
        double operator()(const DickmanMeasure&) const {
            return eps < 1 ? std::log(1 / eps) : 0.0;
        }
    };
    return std::visit(V{eps}, m);
}

}  // namespace

void LevyTriplet::validate() const {
    require_finite_nonneg(kill, "kill");
    require_finite_nonneg(drift, "drift");
    if (const auto* a = std::get_if<AtomicMeasure>(&measure)) {
        for (const auto& at : a->atoms) {
            if (!(at.position > 0) || !std::isfinite(at.position))
                throw hypothesis_error("atom positions must be positive");
            if (!(at.mass > 0) || !std::isfinite(at.mass))
                throw hypothesis_error("atom masses must be positive");
        }
    } else if (const auto* d = std::get_if<DensityMeasure>(&measure)) {
        if (!d->density)
            throw hypothesis_error("density measure needs a density");
        if (!(d->lower >= 0) || !(d->lower < d->upper) ||
            !std::isfinite(d->upper))
            throw hypothesis_error(
                "density support must satisfy 0 <= lower < upper < inf");
        for (int i = 1; i <= 5; ++i) {
            const double u = d->lower + (d->upper - d->lower) * i / 6.0;
            const double v = d->density(u);
            if (!(v >= 0) || !std::isfinite(v))
                throw hypothesis_error(
                    "density must be finite and nonnegative on its support");
        }
    }
}

LevyTriplet TiltedTriplet::effective() const {
    const double ty = y;
    struct V {
        double y;
        LevyMeasure operator()(const AtomicMeasure& a) const {
            AtomicMeasure out;
            out.atoms.reserve(a.atoms.size());
            for (const auto& at : a.atoms)
                out.atoms.push_back(
                    {at.position, at.mass * std::exp(-y * at.position)});
            return out;
        }
        LevyMeasure operator()(const DensityMeasure& d) const {
            const auto dens = d.density;
            const double yy = y;
            return DensityMeasure{d.lower, d.upper, [dens, yy](double u) {
                                      return std::exp(-yy * u) * dens(u);
                                  }};
        }
        LevyMeasure operator()(const PoissonMeasure&) const {
            return AtomicMeasure{{{1.0, std::exp(-y)}}};
        }
        LevyMeasure operator()(const DickmanMeasure&) const {
            const double yy = y;
            return DensityMeasure{0.0, 1.0, [yy](double u) {
                                      return std::exp(-yy * u) / u;
                                  }};
        }
    };
    LevyTriplet out;
    out.kill = 0;
    out.drift = base.drift;
    out.measure = std::visit(V{ty}, base.measure);
    return out;
}

double laplace_exponent(const LevyTriplet& t, double theta) {
    t.validate();
    require_moment(t, theta);
    struct V {
        double theta;
        double operator()(const AtomicMeasure& a) const {
            Accumulator acc;
            for (const auto& at : a.atoms)
                acc.add(at.mass * -std::expm1(-theta * at.position));
            return acc.total();
        }
        double operator()(const DensityMeasure& d) const {
            const double th = theta;
            const auto dens = d.density;
            return integrate_interval(
                       [th, dens](double u) {
                           return -std::expm1(-th * u) * dens(u);
                       },
                       d.lower, d.upper, 1e-12)
                .value;
        }
        double operator()(const PoissonMeasure&) const {
            return -std::expm1(-theta);
        }
        double operator()(const DickmanMeasure&) const {
            return dickman_exponent_series(theta);
        }
    };
    return t.kill + t.drift * theta + std::visit(V{theta}, t.measure);
}

double lambda_prime(const LevyTriplet& t, double y) {
    t.validate();
    require_moment(t, y);
    struct V {
        double y;
        double operator()(const AtomicMeasure& a) const {
            Accumulator acc;
            for (const auto& at : a.atoms)
                acc.add(at.mass * at.position * std::exp(-y * at.position));
            return acc.total();
        }
        double operator()(const DensityMeasure& d) const {
            const double yy = y;
            const auto dens = d.density;
            return integrate_interval(
                       [yy, dens](double u) {
                           return u * std::exp(-yy * u) * dens(u);
                       },
                       d.lower, d.upper, 1e-12)
                .value;
        }
        double operator()(const PoissonMeasure&) const {
            return std::exp(-y);
        }
        double operator()(const DickmanMeasure&) const {
            // (1 - e^{-y})/y, continued through the removable point
            if (std::abs(y) < 1e-8) return 1 - y / 2 + y * y / 6;
            return -std::expm1(-y) / y;
        }
    };
    return t.drift + std::visit(V{y}, t.measure);
}

double upsilon(const LevyTriplet& t, double x) {
    t.validate();
    if (!std::isfinite(x) || x <= t.drift) {
        std::ostringstream os;
        os << "upsilon: " << x
           << " is at or below the infimum of the derivative range ("
           << t.drift << ")";
        throw range_error(os.str());
    }
    const auto f = [&](double y) { return lambda_prime(t, y); };
    double lo = -1, hi = 1;
    for (int i = 0; f(lo) < x; ++i) {
        if (i > 80) {
            std::ostringstream os;
            os << "upsilon: " << x << " is above the derivative range";
            throw range_error(os.str());
        }
        lo *= 2;
    }
    for (int i = 0; f(hi) > x; ++i) {
        if (i > 80) {
            std::ostringstream os;
            os << "upsilon: " << x
               << " is below the reachable part of the derivative range";
            throw range_error(os.str());
        }
        hi *= 2;
    }
    return invert_monotone(f, x, lo, hi, 1e-12);
}

TiltedTriplet tilt(const LevyTriplet& t, double y) {
    t.validate();
    if (!std::isfinite(y)) throw hypothesis_error("tilt needs a finite y");
    require_moment(t, y);
    return TiltedTriplet{t, y};
}

std::vector<double> sample_subordinator(const LevyTriplet& t, double gamma,
                                        double eps, int n,
                                        std::uint64_t seed) {
    t.validate();
    if (t.kill > 0)
        throw hypothesis_error("killed subordinators cannot be sampled");
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw hypothesis_error("gamma must be positive and finite");
    if (!(eps > 0)) throw hypothesis_error("jump cutoff eps must be positive");
    if (n < 0) throw hypothesis_error("sample count must be nonnegative");

    const double rate = gamma * measure_tail_mass(t.measure, eps);
    if (rate > 1e6) {
        std::ostringstream os;
        os << "jump cutoff " << eps << " implies a compound rate of " << rate
           << " per path; raise eps";
        throw hypothesis_error(os.str());
    }

    // per-representation jump generator for Pi restricted to [eps, inf)
    std::function<double(Rng&)> draw_jump;
    const LevyMeasure& m = t.measure;
    std::shared_ptr<DensityJumpSampler> table;
    if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
        auto big = std::make_shared<std::vector<LevyAtom>>();
        auto cum = std::make_shared<std::vector<double>>();
        double s = 0;
        for (const auto& at : a->atoms)
            if (at.position >= eps) {
                big->push_back(at);
                s += at.mass;
                cum->push_back(s);
            }
        draw_jump = [big, cum, s](Rng& rng) {
            const double target = rng.uniform() * s;
            const auto it =
                std::lower_bound(cum->begin(), cum->end(), target);
            const auto i = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(it - cum->begin(),
                                         static_cast<std::ptrdiff_t>(
                                             cum->size() - 1)));
            return (*big)[i].position;
        };
    } else if (const auto* d = std::get_if<DensityMeasure>(&m)) {
        const double lo = std::max(d->lower, eps);
        if (lo < d->upper)
            table = std::make_shared<DensityJumpSampler>(d->density, lo,
                                                         d->upper);
        draw_jump = [table](Rng& rng) { return table->draw(rng); };
    } else if (std::holds_alternative<PoissonMeasure>(m)) {
        draw_jump = [](Rng&) { return 1.0; };
    } else {
        // Dickman: ln(u/eps)/ln(1/eps) inverts in closed form
        const double leps = std::log(eps);
        draw_jump = [leps](Rng& rng) {
            return std::exp(leps * (1 - rng.uniform()));
        };
    }

    Rng rng(seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = t.drift * gamma;
        const int jumps = poisson_count(rng, rate);
        for (int j = 0; j < jumps; ++j) x += draw_jump(rng);
        out.push_back(x);
    }
    return out;
}

namespace {

// exact series evaluation of both duality sides for the Poisson measure
LevyDualityResult poisson_duality(const PenalizingFunction& phi,
                                  const LevyTriplet& t, double gamma,
                                  double y) {
    const double drift_part = t.drift * gamma;
    const double lam = gamma;  // unit mass at 1
    const double bias = std::exp(-y);
    const auto weight = [&](double k) {
        return phi.eval(t.drift + k / gamma);
    };
    const double bulk = lam * std::max(1.0, bias);
    const double b = poisson_expect(lam, lam, weight);
    const double a = std::exp(-y * drift_part) *
                     poisson_expect(lam, bulk, [&](double k) {
                         return std::exp(-y * k) * weight(k);
                     });
    const double c = std::exp(-y * drift_part) *
                     poisson_expect(lam, bulk, [&](double k) {
                         return std::exp(-y * k);
                     });
    const double lam_tilt = gamma * bias;
    const double d = poisson_expect(lam_tilt, lam_tilt, weight);
    LevyDualityResult out;
    out.lhs = (a / b) / c;
    out.rhs = d / b;
    out.gap = std::abs(out.lhs - out.rhs);
    out.se = 0;
    return out;
}

LevyDualityResult mc_duality(const PenalizingFunction& phi,
                             const LevyTriplet& t, double gamma, double y,
                             const McOptions& opts) {
    if (opts.n < 1000)
        throw hypothesis_error("Monte Carlo duality needs at least 1000 draws");
    const auto xs = sample_subordinator(t, gamma, opts.eps, opts.n, opts.seed);
    const auto zs = sample_subordinator(tilt(t, y).effective(), gamma,
                                        opts.eps, opts.n, opts.seed + 1);
    const auto n = static_cast<double>(opts.n);
    Accumulator sa, sb, sc, sd, saa, sbb, scc, sdd, sab, sac, sbc;
    for (int i = 0; i < opts.n; ++i) {
        const double bi = phi.eval(xs[static_cast<std::size_t>(i)] / gamma);
        const double ci = std::exp(-y * xs[static_cast<std::size_t>(i)]);
        const double ai = bi * ci;
        const double di = phi.eval(zs[static_cast<std::size_t>(i)] / gamma);
        sa.add(ai);
        sb.add(bi);
        sc.add(ci);
        sd.add(di);
        saa.add(ai * ai);
        sbb.add(bi * bi);
        scc.add(ci * ci);
        sdd.add(di * di);
        sab.add(ai * bi);
        sac.add(ai * ci);
        sbc.add(bi * ci);
    }
    const double ma = sa.total() / n, mb = sb.total() / n,
                 mc = sc.total() / n, md = sd.total() / n;
    const double vaa = saa.total() / n - ma * ma;
    const double vbb = sbb.total() / n - mb * mb;
    const double vcc = scc.total() / n - mc * mc;
    const double vdd = sdd.total() / n - md * md;
    const double vab = sab.total() / n - ma * mb;
    const double vac = sac.total() / n - ma * mc;
    const double vbc = sbc.total() / n - mb * mc;

    LevyDualityResult out;
    out.lhs = ma / (mb * mc);
    out.rhs = md / mb;
    out.gap = std::abs(out.lhs - out.rhs);
    // delta method on G = A/(BC) - D/B with (A,B,C) from one sample and D
    // from the other
    const double ga = 1 / (mb * mc);
    const double gb = -ma / (mb * mb * mc) + md / (mb * mb);
    const double gc = -ma / (mb * mc * mc);
    const double gd = -1 / mb;
    const double var =
        (ga * ga * vaa + gb * gb * vbb + gc * gc * vcc +
         2 * (ga * gb * vab + ga * gc * vac + gb * gc * vbc) +
         gd * gd * vdd) /
        n;
    out.se = std::sqrt(std::max(var, 0.0));
    return out;
}

}  // namespace

LevyDualityResult mod_levy_duality(const PenalizingFunction& phi,
                                   const LevyTriplet& t, double gamma,
                                   double x, const McOptions& opts) {
    t.validate();
    if (t.kill > 0)
        throw hypothesis_error(
            "duality expectations are undefined for killed subordinators");
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw hypothesis_error("gamma must be positive and finite");
    const double mean_rate = lambda_prime(t, 0.0);
    if (!std::isfinite(mean_rate))
        throw hypothesis_error("Lambda'(0) must be finite");
    if (std::abs(phi.eval(mean_rate) - 1) > 1e-10)
        throw hypothesis_error(
            "weight must equal 1 at Lambda'(0) for the normalized duality");
    const double y = upsilon(t, x);
    if (std::holds_alternative<PoissonMeasure>(t.measure))
        return poisson_duality(phi, t, gamma, y);
    return mc_duality(phi, t, gamma, y, opts);
}

double mod_levy_duality_gap(const PenalizingFunction& phi,
                            const LevyTriplet& t, double gamma, double x) {
    return mod_levy_duality(phi, t, gamma, x).gap;
}

double poisson_char_ratio(const PenalizingFunction& phi, double gamma,
                          double x) {
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw hypothesis_error("gamma must be positive and finite");
    if (!(x >= 0) || !std::isfinite(x))
        throw hypothesis_error("pgf argument must be finite and nonnegative");
    if (std::abs(phi.eval(1.0) - 1) > 1e-12)
        throw hypothesis_error(
            "weight must equal 1 at Lambda'(0) = 1 for the Poisson ratio");
    const auto pow_x = [x](double k) {
        return k == 0 ? 1.0 : std::pow(x, k);
    };
    const double bulk = gamma * std::max(1.0, x);
    const double b =
        poisson_expect(gamma, gamma, [&](double k) { return phi.eval(k / gamma); });
    const double biased = poisson_expect(gamma, bulk, [&](double k) {
        return pow_x(k) * phi.eval(k / gamma);
    });
    const double pgf =
        poisson_expect(gamma, bulk, [&](double k) { return pow_x(k); });
    const double left = (biased / b) / pgf;
    const double right =
        poisson_expect(gamma * x, gamma * x,
                       [&](double k) { return phi.eval(k / gamma); }) /
        b;
    if (std::abs(left - right) > 1e-10)
        throw tolerance_error(
            "Poisson characteristic ratio routes disagree",
            0.5 * (left + right), std::abs(left - right));
    return 0.5 * (left + right);
}

}  // namespace modstein
