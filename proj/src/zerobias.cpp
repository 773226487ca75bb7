#include "modstein/zerobias.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "modstein/errors.hpp"

namespace modstein {

namespace {

// Cluster width for merging convolution atoms. Lattice inputs produce exact
// duplicates, so this only absorbs last-ulp noise from off-lattice sums.
double merge_tol(double v) { return 1e-12 * (1.0 + std::abs(v)); }

double poly_segment_integral(const Polynomial& q, double lo, double hi) {
    // Antiderivative evaluated at both ends by Horner.
    double at_hi = 0, at_lo = 0;
    for (std::size_t k = q.coeffs.size(); k-- > 0;) {
        const double c = q.coeffs[k] / static_cast<double>(k + 1);
        at_hi = at_hi * hi + c;
        at_lo = at_lo * lo + c;
    }
    return hi * at_hi - lo * at_lo;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    return r;
}

// q(x) = p(x - s), by synthetic multiplication from the top coefficient.
Polynomial poly_shift(const Polynomial& p, double s) {
    Polynomial r{{0.0}};
    for (std::size_t k = p.coeffs.size(); k-- > 0;) {
        Polynomial next;
        next.coeffs.assign(r.coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
            next.coeffs[i + 1] += r.coeffs[i];
            next.coeffs[i] -= s * r.coeffs[i];
        }
        next.coeffs[0] += p.coeffs[k];
        r = std::move(next);
    }
    while (r.coeffs.size() > 1 && r.coeffs.back() == 0.0) r.coeffs.pop_back();
    return r;
}

Polynomial monomial(int k) {
    Polynomial q;
    q.coeffs.assign(static_cast<std::size_t>(k) + 1, 0.0);
    q.coeffs.back() = 1.0;
    return q;
}

struct RawLaw {
    std::vector<double> a, p;
};

bool integer_atoms(const RawLaw& l) {
    for (double v : l.a)
        if (std::abs(v) >= 9.007199254740992e15 || v != std::rint(v))
            return false;
    return true;
}

RawLaw convolve(const RawLaw& A, const RawLaw& B) {
    const std::size_t pairs = A.a.size() * B.a.size();
    if (pairs > (std::size_t{1} << 26))
        throw range_error("convolution: atom budget exceeded");

    RawLaw out;
    if (integer_atoms(A) && integer_atoms(B)) {
        // Integer lattices: atom sums are exact, so bucket by offset.
        const double lo = A.a.front() + B.a.front();
        const double hi = A.a.back() + B.a.back();
        const std::size_t slots = static_cast<std::size_t>(hi - lo) + 1;
        std::vector<Accumulator> bucket(slots);
        for (std::size_t i = 0; i < A.a.size(); ++i)
            for (std::size_t j = 0; j < B.a.size(); ++j)
                bucket[static_cast<std::size_t>(A.a[i] + B.a[j] - lo)].add(
                    A.p[i] * B.p[j]);
        for (std::size_t k = 0; k < slots; ++k) {
            const double mass = bucket[k].total();
            if (mass > 0) {
                out.a.push_back(lo + static_cast<double>(k));
                out.p.push_back(mass);
            }
        }
        return out;
    }

    std::vector<std::pair<double, double>> sums;
    sums.reserve(pairs);
    for (std::size_t i = 0; i < A.a.size(); ++i)
        for (std::size_t j = 0; j < B.a.size(); ++j)
            sums.emplace_back(A.a[i] + B.a[j], A.p[i] * B.p[j]);
    std::sort(sums.begin(), sums.end());
    std::size_t k = 0;
    while (k < sums.size()) {
        const double anchor = sums[k].first;
        Accumulator mass;
        while (k < sums.size() && sums[k].first - anchor <= merge_tol(anchor))
            mass.add(sums[k++].second);
        const double m = mass.total();
        if (m > 0) {
            out.a.push_back(anchor);
            out.p.push_back(m);
        }
    }
    return out;
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<double> atoms, std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
    const std::size_t n = atoms_.size();
    if (n == 0 || probs_.size() != n)
        throw hypothesis_error("discrete law: need matching atoms and weights");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(atoms_[i] < atoms_[i + 1]))
            throw hypothesis_error("discrete law: atoms must strictly increase");
    Accumulator total;
    for (double p : probs_) {
        if (!(p > 0))
            throw hypothesis_error("discrete law: weights must be positive");
        total.add(p);
    }
    if (std::abs(total.total() - 1.0) > 1e-14)
        throw hypothesis_error("discrete law: weights must sum to one");
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        if (std::abs(atoms_[i] + atoms_[j]) > merge_tol(atoms_[i]) ||
            std::abs(probs_[i] - probs_[j]) >
                1e-12 * std::max(probs_[i], probs_[j]))
            throw hypothesis_error(
                "discrete law: must be symmetric about zero");
    }
    Accumulator m[4];
    for (std::size_t i = 0; i < n; ++i) {
        double power = probs_[i];
        for (auto& acc : m) {
            power *= atoms_[i];
            acc.add(power);
        }
    }
    for (int k = 0; k < 4; ++k) m_[k] = m[k].total();
}

double DiscreteDist::abs_moment(int k) const {
    if (k < 0) throw hypothesis_error("abs_moment: nonnegative order required");
    Accumulator acc;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        double power = probs_[i];
        for (int j = 0; j < k; ++j) power *= std::abs(atoms_[i]);
        acc.add(power);
    }
    return acc.total();
}

double DiscreteDist::cdf(double x) const {
    Accumulator acc;
    for (std::size_t i = 0; i < atoms_.size() && atoms_[i] <= x; ++i)
        acc.add(probs_[i]);
    return acc.total();
}

double DiscreteDist::cdf_left(double x) const {
    Accumulator acc;
    for (std::size_t i = 0; i < atoms_.size() && atoms_[i] < x; ++i)
        acc.add(probs_[i]);
    return acc.total();
}

DiscreteDist DiscreteDist::scaled(double factor) const {
    if (!(factor > 0))
        throw hypothesis_error("discrete law: scale factor must be positive");
    std::vector<double> a(atoms_);
    for (double& v : a) v *= factor;
    return DiscreteDist(std::move(a), probs_);
}

DiscreteDist rademacher() { return DiscreteDist({-1.0, 1.0}, {0.5, 0.5}); }

DiscreteDist iid_sum(const DiscreteDist& dist, std::size_t n) {
    if (n == 0) throw hypothesis_error("iid_sum: need at least one summand");
    if (n > 4096)
        throw range_error("iid_sum: exact convolution capped at n = 4096");
    RawLaw base{dist.atoms(), dist.probs()};
    RawLaw acc{{0.0}, {1.0}};
    std::size_t m = n;
    while (m > 0) {
        if (m & 1) acc = convolve(acc, base);
        m >>= 1;
        if (m > 0) base = convolve(base, base);
    }
    // The weight sum drifts by a few ulp over the convolution stages (and
    // loses the sub-subnormal tail atoms); scale it out once.
    Accumulator total;
    for (double p : acc.p) total.add(p);
    const double t = total.total();
    for (double& p : acc.p) p /= t;
    return DiscreteDist(std::move(acc.a), std::move(acc.p));
}

PiecewiseDensity::PiecewiseDensity(std::vector<double> breakpoints,
                                   std::vector<Polynomial> pieces)
    : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (bp_.size() < 2 || pieces_.size() + 1 != bp_.size())
        throw hypothesis_error(
            "piecewise density: need one piece per breakpoint gap");
    for (std::size_t j = 0; j + 1 < bp_.size(); ++j)
        if (!(bp_[j] < bp_[j + 1]))
            throw hypothesis_error(
                "piecewise density: breakpoints must strictly increase");
    cum_.assign(bp_.size(), 0.0);
    Accumulator mass;
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
        const Polynomial& q = pieces_[j];
        if (q.coeffs.empty() || q.degree() > 3)
            throw hypothesis_error("piecewise density: pieces are cubic at most");
        const double lo = bp_[j], hi = bp_[j + 1];
        // Nonnegativity: endpoints plus interior critical points.
        std::vector<double> probes{lo, hi};
        const Polynomial d = q.derivative();
        if (d.coeffs.size() == 3 && d.coeffs[2] != 0) {
            const double disc =
                d.coeffs[1] * d.coeffs[1] - 4 * d.coeffs[2] * d.coeffs[0];
            if (disc >= 0) {
                const double root = std::sqrt(disc);
                probes.push_back((-d.coeffs[1] + root) / (2 * d.coeffs[2]));
                probes.push_back((-d.coeffs[1] - root) / (2 * d.coeffs[2]));
            }
        } else if (d.coeffs.size() >= 2 && d.coeffs[1] != 0) {
            probes.push_back(-d.coeffs[0] / d.coeffs[1]);
        }
        for (double x : probes)
            if (x >= lo && x <= hi && q(x) < -1e-12)
                throw hypothesis_error(
                    "piecewise density: negative value on support");
        mass.add(poly_segment_integral(q, lo, hi));
        cum_[j + 1] = mass.total();
    }
    mass_ = mass.total();
    if (std::abs(mass_ - 1.0) > 1e-12)
        throw hypothesis_error("piecewise density: mass must be one");
}

double PiecewiseDensity::pdf(double x) const {
    if (x < bp_.front() || x > bp_.back()) return 0.0;
    const std::size_t j = std::min<std::size_t>(
        pieces_.size() - 1,
        std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin() - 1);
    return pieces_[j](x);
}

double PiecewiseDensity::cdf(double x) const {
    if (x <= bp_.front()) return 0.0;
    if (x >= bp_.back()) return mass_;
    const std::size_t j = std::min<std::size_t>(
        pieces_.size() - 1,
        std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin() - 1);
    return cum_[j] + poly_segment_integral(pieces_[j], bp_[j], x);
}

double PiecewiseDensity::integrate_poly(const Polynomial& q) const {
    return integrate_poly(q, bp_.front(), bp_.back());
}

double PiecewiseDensity::integrate_poly(const Polynomial& q, double lo,
                                        double hi) const {
    Accumulator acc;
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
        const double a = std::max(lo, bp_[j]);
        const double b = std::min(hi, bp_[j + 1]);
        if (a < b) acc.add(poly_segment_integral(poly_mul(q, pieces_[j]), a, b));
    }
    return acc.total();
}

double PiecewiseDensity::moment(int k) const {
    if (k < 0) throw hypothesis_error("moment: nonnegative order required");
    return integrate_poly(monomial(k));
}

double PiecewiseDensity::abs_moment(int k) const {
    if (k < 0) throw hypothesis_error("abs_moment: nonnegative order required");
    const Polynomial q = monomial(k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * integrate_poly(q, bp_.front(), 0.0) +
           integrate_poly(q, 0.0, bp_.back());
}

PiecewiseDensity PiecewiseDensity::scaled(double factor) const {
    if (!(factor > 0))
        throw hypothesis_error(
            "piecewise density: scale factor must be positive");
    std::vector<double> bp(bp_);
    for (double& v : bp) v *= factor;
    std::vector<Polynomial> pieces(pieces_);
    for (Polynomial& q : pieces) {
        double scale = 1.0 / factor;
        for (double& c : q.coeffs) {
            c *= scale;
            scale /= factor;
        }
    }
    return PiecewiseDensity(std::move(bp), std::move(pieces));
}

double MixedLaw::cdf(double x) const {
    Accumulator acc;
    for (std::size_t i = 0; i < atom_x.size() && atom_x[i] <= x; ++i)
        acc.add(atom_p[i]);
    acc.add(density_weight * density.cdf(x));
    return acc.total();
}

PiecewiseDensity zero_bias(const DiscreteDist& dist) {
    const auto& a = dist.atoms();
    const auto& p = dist.probs();
    // The type already forces symmetry; this guards direct misuse through
    // future construction paths.
    if (std::abs(dist.m1()) > 1e-12 * (1.0 + std::abs(a.back())))
        throw hypothesis_error("zero_bias: law must be centered");
    if (!(dist.m2() > 0))
        throw hypothesis_error("zero_bias: law must have positive variance");
    const std::size_t n = a.size();
    std::vector<double> suffix(n + 1, 0.0);
    Accumulator acc;
    for (std::size_t i = n; i-- > 0;) {
        acc.add(a[i] * p[i]);
        suffix[i] = acc.total();
    }
    std::vector<Polynomial> pieces;
    pieces.reserve(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j)
        pieces.push_back(Polynomial{{suffix[j + 1] / dist.m2()}});
    return PiecewiseDensity(std::vector<double>(a), std::move(pieces));
}

double zero_bias_identity_gap(const DiscreteDist& dist, const Polynomial& f) {
    Accumulator lhs;
    for (std::size_t i = 0; i < dist.atoms().size(); ++i)
        lhs.add(dist.probs()[i] * dist.atoms()[i] * f(dist.atoms()[i]));
    const PiecewiseDensity transformed = zero_bias(dist);
    const double rhs = dist.m2() * transformed.integrate_poly(f.derivative());
    return std::abs(lhs.total() - rhs);
}

ZeroBiasMoments zero_bias_moments(const DiscreteDist& dist) {
    return {dist.abs_moment(3) / (2 * dist.m2()),
            dist.m4() / (3 * dist.m2())};
}

MixedLaw sum_zero_bias_law(const DiscreteDist& dist, std::size_t n,
                           double scale) {
    if (n == 0)
        throw hypothesis_error("sum_zero_bias_law: need at least one summand");
    if (n > 4096)
        throw range_error("sum_zero_bias_law: exact budget capped at n = 4096");
    if (!(scale > 0))
        throw hypothesis_error("sum_zero_bias_law: scale must be positive");
    const PiecewiseDensity f0 = zero_bias(dist);
    if (n == 1) return MixedLaw{{}, {}, f0.scaled(1.0 / scale), 1.0};

    const DiscreteDist rest = iid_sum(dist, n - 1);
    const auto& sa = rest.atoms();
    const auto& sp = rest.probs();
    const auto& b0 = f0.breakpoints();

    std::vector<double> bp;
    bp.reserve(sa.size() * b0.size());
    for (double a : sa)
        for (double b : b0) bp.push_back(a + b);
    std::sort(bp.begin(), bp.end());
    std::vector<double> merged;
    for (double v : bp)
        if (merged.empty() || v - merged.back() > merge_tol(merged.back()))
            merged.push_back(v);

    std::vector<Polynomial> pieces;
    pieces.reserve(merged.size() - 1);
    for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
        const double mid = 0.5 * (merged[k] + merged[k + 1]);
        Accumulator co[4];
        for (std::size_t i = 0; i < sa.size(); ++i) {
            const double t = mid - sa[i];
            if (t <= b0.front() || t >= b0.back()) continue;
            const std::size_t j = std::min<std::size_t>(
                f0.pieces().size() - 1,
                std::upper_bound(b0.begin(), b0.end(), t) - b0.begin() - 1);
            const Polynomial shifted = poly_shift(f0.pieces()[j], sa[i]);
            for (std::size_t d = 0; d < shifted.coeffs.size(); ++d)
                co[d].add(sp[i] * shifted.coeffs[d]);
        }
        Polynomial piece;
        piece.coeffs = {co[0].total(), co[1].total(), co[2].total(),
                        co[3].total()};
        while (piece.coeffs.size() > 1 && piece.coeffs.back() == 0.0)
            piece.coeffs.pop_back();
        pieces.push_back(std::move(piece));
    }
    PiecewiseDensity law(std::move(merged), std::move(pieces));
    return MixedLaw{{}, {}, law.scaled(1.0 / scale), 1.0};
}

double c_bias_coefficient(double gamma, double c, bool printed_variant) {
    if (!(gamma > 0))
        throw hypothesis_error("c_bias_coefficient: gamma must be positive");
    const double g2 = gamma * gamma;
    return (printed_variant ? 4.0 : 1.0) * c / (g2 * g2 * g2);
}

PiecewiseDensity c_bias_density(const DiscreteDist& dist, double c3) {
    const auto& a = dist.atoms();
    const auto& p = dist.probs();
    if (!(dist.m2() + c3 * dist.m4() > 0))
        throw hypothesis_error("c_bias_density: weighted mass must be positive");
    const std::size_t n = a.size();
    std::vector<double> suffix(n + 1, 0.0);
    Accumulator acc;
    for (std::size_t i = n; i-- > 0;) {
        acc.add((a[i] + c3 * a[i] * a[i] * a[i]) * p[i]);
        suffix[i] = acc.total();
    }
    Accumulator geom;
    for (std::size_t j = 0; j + 1 < n; ++j)
        geom.add(suffix[j + 1] * (a[j + 1] - a[j]));
    const double mass = geom.total();
    const double mass_moments = dist.m2() + c3 * dist.m4();
    if (std::abs(mass - mass_moments) >
        1e-12 * std::max(1.0, std::abs(mass_moments)))
        throw tolerance_error("c_bias_density: mass disagrees with moments",
                              mass, std::abs(mass - mass_moments));
    std::vector<Polynomial> pieces;
    pieces.reserve(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j)
        pieces.push_back(Polynomial{{suffix[j + 1] / mass}});
    // A strongly negative cubic coefficient can push tail weights negative;
    // the density constructor rejects that case.
    return PiecewiseDensity(std::vector<double>(a), std::move(pieces));
}

GridFunction c_bias_density(const Phi4Dist& dist, double c3,
                            const std::vector<double>& x_grid) {
    if (x_grid.empty())
        throw hypothesis_error("c_bias_density: empty evaluation grid");
    for (std::size_t i = 0; i + 1 < x_grid.size(); ++i)
        if (!(x_grid[i] < x_grid[i + 1]))
            throw hypothesis_error(
                "c_bias_density: grid must strictly increase");
    const double mass = dist.moment(2) + c3 * dist.moment(4);

    // Integration reach: where the negative log-density passes the double
    // floor, found by bisection on the increasing kappa.
    double lo = 0, hi = dist.gamma();
    while (dist.params().kappa(hi) < 745) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dist.params().kappa(mid) < 745 ? lo : hi) = mid;
    }
    const double reach = hi + 1;

    const auto weighted = [&](double u) {
        return (u + c3 * u * u * u) * dist.pdf(u);
    };
    GridFunction out;
    out.xs = x_grid;
    out.ys.reserve(x_grid.size());
    for (double x : x_grid) {
        // Integrate the single-signed side: the full-line integral of the
        // weight vanishes by symmetry, so the upper tail from a negative x
        // equals minus the lower tail.
        double v;
        if (x >= 0)
            v = integrate_interval(weighted, x, std::max(reach, x + 1), 1e-10)
                    .value;
        else
            v = -integrate_interval(weighted, std::min(-reach, x - 1), x,
                                    1e-10)
                     .value;
        out.ys.push_back(v / mass);
    }
    return out;
}

}  // namespace modstein
