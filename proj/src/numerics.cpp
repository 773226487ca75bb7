#include "modstein/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace modstein {

namespace {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1], the classic QUADPACK
// dqk15 constants. Positive half; odd-indexed abscissae are the embedded
// Gauss nodes, even-indexed ones the Kronrod extension points.
constexpr double kXgk[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
constexpr double kWg[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

inline double real_part(double v) { return v; }
inline double real_part(std::complex<double> v) { return v.real(); }

// One Gauss-Kronrod panel; the error estimate is |K15 - G7|.
template <typename Value, typename F>
void gk15(const F& f, double a, double b, Value& integral, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Value resk = kWgk[7] * f(c);
    Value resg = kWg[3] * f(c);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const Value v = f(c - dx) + f(c + dx);
        resk += kWgk[j] * v;
        if (j % 2 == 1) resg += kWg[j / 2] * v;
    }
    integral = resk * h;
    err = std::abs((resk - resg) * h);
}

struct Panel {
    double a, b, err;
    bool operator<(const Panel& o) const {
        // worst error first; position breaks ties deterministically
        return err != o.err ? err < o.err : a < o.a;
    }
};

// Adaptive refinement over a fixed set of seed intervals, shared by the
// real and complex entry points. Convergence is judged against both the
// signed total and the accumulated panel mass (sum of |panel integral|, a
// lower bound on the L1 norm) so that integrals that vanish by cancellation
// still terminate at the roundoff floor instead of refining forever.
template <typename Value, typename F>
void integrate_panels(const F& f, const std::vector<double>& seeds,
                      double rel_tol, double tail_bound, Value& value,
                      double& abs_err, double& l1_scale, std::size_t& evals) {
    std::priority_queue<Panel> queue;
    Value total{};
    double err_total = 0, l1 = 0;
    evals = 0;
    auto push = [&](double a, double b) {
        Value v;
        double e;
        gk15(f, a, b, v, e);
        evals += 15;
        total += v;
        err_total += e;
        l1 += std::abs(v);
        queue.push({a, b, e});
    };
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
        push(seeds[i], seeds[i + 1]);

    auto threshold = [&] {
        return rel_tol * std::max(std::abs(total), l1) + 1e-300;
    };
    const std::size_t max_splits = 4000;
    std::size_t splits = 0;
    while (err_total + tail_bound > threshold() && splits < max_splits) {
        Panel worst = queue.top();
        queue.pop();
        Value old_v;
        double old_e;
        gk15(f, worst.a, worst.b, old_v, old_e);
        evals += 15;
        total -= old_v;
        err_total -= worst.err;
        l1 -= std::abs(old_v);
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid);
        push(mid, worst.b);
        ++splits;
    }
    value = total;
    abs_err = err_total + tail_bound;
    l1_scale = l1;
    if (err_total + tail_bound > threshold()) {
        std::ostringstream os;
        os << "integrate: tolerance not met after " << splits
           << " refinements (error estimate " << abs_err << ")";
        throw tolerance_error(os.str(), real_part(total), abs_err);
    }
}

// Gaussian upper tail: Int_t^inf e^{-u^2/2} du <= e^{-t^2/2}/t for t > 0.
double gaussian_tail_mass(double t) {
    return t > 0 ? std::exp(-0.5 * t * t) / t : 2.0;
}

template <typename Value, typename F, typename Result>
Result integrate_line_impl(const F& f, double rel_tol,
                           const std::optional<GaussianEnvelope>& envelope) {
    Result out;
    if (envelope) {
        const double m = envelope->mean, s = envelope->sd;
        std::vector<double> seeds;
        for (int k = -12; k <= 12; k += 3)
            seeds.push_back(m + s * static_cast<double>(k));
        const double tail =
            2 * envelope->amplitude * s * gaussian_tail_mass(12.0);
        Value v;
        double err, l1;
        integrate_panels<Value>(f, seeds, rel_tol, tail, v, err, l1,
                                out.evaluations);
        out.value = v;
        out.abs_error_estimate = err;
        return out;
    }
    // No envelope: start from a fixed core window and extend it by doubling
    // until a coarse probe of the next extension stops contributing.
    double lo = -16, hi = 16;
    std::vector<double> seeds;
    for (int k = -8; k <= 8; ++k) seeds.push_back(2.0 * k);
    Value v;
    double err, l1;
    std::size_t evals = 0;
    integrate_panels<Value>(f, seeds, rel_tol, 0.0, v, err, l1, evals);
    for (int round = 0; round < 16; ++round) {
        Value probe_hi, probe_lo;
        double e_hi, e_lo;
        gk15(f, hi, 2 * hi, probe_hi, e_hi);
        gk15(f, 2 * lo, lo, probe_lo, e_lo);
        evals += 30;
        const double grow = std::abs(probe_hi) + std::abs(probe_lo) +
                            e_hi + e_lo;
        if (grow <= 0.25 * rel_tol * (std::abs(v) + l1) + 1e-300) break;
        Value vh, vl;
        double eh, el, l1h, l1l;
        std::size_t ev = 0;
        integrate_panels<Value>(f, {hi, 1.5 * hi, 2 * hi}, rel_tol, 0.0, vh,
                                eh, l1h, ev);
        evals += ev;
        integrate_panels<Value>(f, {2 * lo, 1.5 * lo, lo}, rel_tol, 0.0, vl,
                                el, l1l, ev);
        evals += ev;
        v += vh + vl;
        err += eh + el;
        l1 += l1h + l1l;
        hi *= 2;
        lo *= 2;
    }
    out.value = v;
    out.abs_error_estimate = err;
    out.evaluations = evals;
    return out;
}

}  // namespace

const std::array<double, 15>& panel15_nodes() {
    static const std::array<double, 15> nodes = [] {
        std::array<double, 15> out{};
        for (int j = 0; j < 7; ++j) {
            out[j] = -kXgk[j];
            out[14 - j] = kXgk[j];
        }
        out[7] = 0;
        return out;
    }();
    return nodes;
}

const std::array<double, 15>& panel15_weights() {
    static const std::array<double, 15> weights = [] {
        std::array<double, 15> out{};
        for (int j = 0; j < 7; ++j) {
            out[j] = kWgk[j];
            out[14 - j] = kWgk[j];
        }
        out[7] = kWgk[7];
        return out;
    }();
    return weights;
}

double GridFunction::operator()(double x) const {
    if (x < xs.front()) {
        if (tail_model && tail_model->below) return tail_model->below(x);
        return ys.front();
    }
    if (x > xs.back()) {
        if (tail_model && tail_model->above) return tail_model->above(x);
        return ys.back();
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i =
        static_cast<std::size_t>(std::distance(xs.begin(), it));
    if (i == 0) return ys.front();
    if (i >= xs.size()) return ys.back();
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

QuadratureResult integrate_line(const std::function<double(double)>& f,
                                double rel_tol,
                                std::optional<GaussianEnvelope> envelope) {
    return integrate_line_impl<double, std::function<double(double)>,
                               QuadratureResult>(f, rel_tol, envelope);
}

ComplexQuadratureResult integrate_line_complex(
    const std::function<std::complex<double>(double)>& f, double rel_tol,
    std::optional<GaussianEnvelope> envelope) {
    return integrate_line_impl<std::complex<double>,
                               std::function<std::complex<double>(double)>,
                               ComplexQuadratureResult>(f, rel_tol, envelope);
}

QuadratureResult integrate_interval(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol) {
    QuadratureResult out;
    if (!(a < b)) return out;
    std::vector<double> seeds;
    const int k0 = 8;
    for (int i = 0; i <= k0; ++i) seeds.push_back(a + (b - a) * i / k0);
    double v, err, l1;
    integrate_panels<double>(f, seeds, rel_tol, 0.0, v, err, l1,
                             out.evaluations);
    out.value = v;
    out.abs_error_estimate = err;
    return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
    if (n < 1 || n > 512)
        throw hypothesis_error("gauss_hermite: n must be in [1, 512]");
    if (n == 1) return {{0.0}, {1.0}};
    // Golub-Welsch: the Jacobi matrix of the probabilists' Hermite
    // recurrence has zero diagonal and off-diagonal sqrt(k); nodes are its
    // eigenvalues and each weight is the squared first component of the
    // normalized eigenvector (total mass 1 for e^{-x^2/2}/sqrt(2 pi)).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    std::vector<double> nodes(n), weights(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = solver.eigenvalues()[i];
        const double q0 = solver.eigenvectors()(0, i);
        weights[i] = q0 * q0;
    }
    return {nodes, weights};
}

double hermite_he(int k, double x) {
    if (k < 0) throw hypothesis_error("hermite_he: negative degree");
    double h0 = 1, h1 = x;
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
        const double h2 = x * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double invert_monotone(const std::function<double(double)>& f, double target,
                       double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    const bool increasing = flo <= fhi;
    auto below = [&](double fv) {
        return increasing ? fv < target : fv > target;
    };
    if (below(fhi) || !below(flo)) {
        if (flo == target) return lo;
        if (fhi == target) return hi;
        std::ostringstream os;
        os << "invert_monotone: target " << target << " outside range ["
           << std::min(flo, fhi) << ", " << std::max(flo, fhi) << "]";
        throw bracket_error(os.str());
    }
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (std::abs(fm - target) <= tol) return m;
        if (below(fm))
            a = m;
        else
            b = m;
        if (b - a <= std::numeric_limits<double>::epsilon() *
                         (std::abs(a) + std::abs(b) + 1))
            return 0.5 * (a + b);
    }
    return 0.5 * (a + b);
}

GridFunction fourier_invert(
    const std::function<std::complex<double>(double)>& charfn,
    const std::vector<double>& x_grid, double xi_cutoff, double xi_step) {
    if (std::abs(charfn(xi_cutoff)) > 1e-16 ||
        std::abs(charfn(-xi_cutoff)) > 1e-16) {
        std::ostringstream os;
        os << "fourier_invert: |charfn(" << xi_cutoff
           << ")| = " << std::abs(charfn(xi_cutoff))
           << " has not decayed below 1e-16 at the cutoff";
        throw cutoff_error(os.str());
    }
    const auto n_steps =
        static_cast<std::size_t>(std::ceil(2 * xi_cutoff / xi_step));
    const double h = 2 * xi_cutoff / static_cast<double>(n_steps);
    std::vector<std::complex<double>> phi(n_steps + 1);
    for (std::size_t j = 0; j <= n_steps; ++j)
        phi[j] = charfn(-xi_cutoff + h * static_cast<double>(j));
    GridFunction out;
    out.xs = x_grid;
    out.ys.resize(x_grid.size());
    const double two_pi = 2 * std::acos(-1.0);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double x = x_grid[i];
        Accumulator acc;
        for (std::size_t j = 0; j <= n_steps; ++j) {
            const double xi = -xi_cutoff + h * static_cast<double>(j);
            const double w = (j == 0 || j == n_steps) ? 0.5 : 1.0;
            const std::complex<double> e{std::cos(xi * x), -std::sin(xi * x)};
            acc.add(w * (e * phi[j]).real());
        }
        out.ys[i] = acc.total() * h / two_pi;
    }
    return out;
}

}  // namespace modstein
