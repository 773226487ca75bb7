#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "modstein/phi4.hpp"
#include "modstein/stein.hpp"
#include "modstein/zerobias.hpp"

namespace modstein {

// End-to-end study of scaled i.i.d. sums against their quartic-penalized
// Gaussian targets: exact sum laws, Kolmogorov and smooth-class distances,
// and the explicit rate bounds those distances are certified against.
//
// Scaling rules, fixed throughout: a sum of n copies of a symmetric
// unit-variance summand X with E X^4 < 3 is compared at scale
// gamma_n = n^{1/4} (so Z_n = n^{-1/4} sum X_k) with the penalized target
// whose quartic coefficient is c = (3 - E X^4)/6. That choice matches the
// fourth cumulant of Z_n, which is what makes the n^{-1/4} window the
// interesting one.

struct ExperimentConfig {
    // Either the built-in name "rademacher" or a path to a CSV law file
    // with atom,prob rows (symmetric about zero, weights summing to one).
    std::string summand = "rademacher";
    std::vector<std::size_t> n_list;
    double rel_tol = 1e-10;   // quadrature tolerance for expectations
    std::uint64_t seed = 0;   // reserved for samplers; the sweep is exact
    std::string csv_path;     // empty: do not write the table
    std::string json_path;    // empty: do not write the summary
};

// One row of the sweep: measured distances next to the evaluated bounds.
// Kolmogorov bounds are the explicit leading terms of their corollaries;
// the smooth-class bounds are complete. Measured smooth-class values are
// maxima over a finite probe family, hence lower bounds for the class
// distance, which is the conservative direction when checking an upper
// bound.
struct DistanceRow {
    std::size_t n = 0;
    double gamma_n = 0;
    double d_kol = 0;
    double bound_cor42 = 0;
    double bound_cor44 = 0;
    double smooth_h1 = 0;
    double bound_thm41 = 0;
    double smooth_h2 = 0;
    double bound_thm43 = 0;
};

// The summand together with the derived constants every bound needs.
// make_profile enforces the standing hypotheses: unit variance and a
// fourth moment strictly below three.
struct SummandProfile {
    DiscreteDist dist;
    double c = 0;        // (3 - E X^4)/6, the matched quartic coefficient
    double c1 = 0;       // integral of exp(-x^2/2 - c x^4/4), by quadrature
    double sigma13 = 0;  // max(E|X|, E|X|^3 / 2)
};

double gamma_for(std::size_t n);  // n^{1/4}, n >= 1

// The normalization constant of the unit-scale penalized density; equals
// sqrt(2 pi) E[exp(-c G^4/4)] for a standard Gaussian G. Requires c > 0.
double c1_constant(double c, double rel_tol = 1e-12);

SummandProfile make_profile(const DiscreteDist& summand);

// Law of Z_n = n^{-1/4} (X_1 + ... + X_n), exact atoms and weights.
// A Rademacher summand short-circuits to binomial weights (Pascal's
// triangle in 64-bit integers up to n = 66, log-space factorials beyond);
// any other law goes through the exact convolution, so the budget is
// n <= 4096 either way.
DiscreteDist exact_sum_distribution(const DiscreteDist& summand,
                                    std::size_t n);

// sup_x |F_c(x) - F_d(x)| for a continuous F_c against a purely atomic
// F_d, evaluated exactly: between atoms the discrete side is flat and the
// continuous side monotone, so the supremum is attained at an atom from
// the left or from the right. No grid is involved.
double kolmogorov_distance(const DiscreteDist& discrete,
                           const std::function<double(double)>& cdf);

// Which explicit bound to evaluate. The first pair needs one bounded
// derivative and decays like gamma_n^{-1}; the second pair trades a C^2
// test class for one extra power. The Kolmogorov variants are the
// smoothing corollaries; only their explicit leading terms are returned,
// the unquantified remainders being exactly what the sweep probes.
enum class BoundKind {
    smooth_first,
    kolmogorov_first,
    smooth_second,
    kolmogorov_second,
};

// Sup norms of the test function entering the smooth-class bounds. The
// defaults are the class caps, which is what the sweep uses.
struct HNorms {
    double h = 1;
    double h1 = 1;
    double h2 = 1;
};

double bound_evaluator(const SummandProfile& profile, std::size_t n,
                       BoundKind which, const HNorms& norms = {});

// Test classes for the smooth distances: bounded functions with bounded
// first (and, for the second class, second) derivative, vanishing at
// infinity with integrable derivatives. Probes are validated against the
// class caps on a dense grid before use; out-of-class probes are
// rejected, since a violated cap would void the bound being checked.
enum class SmoothClass { first_order, second_order };

// Built-in probe family: Gaussian-windowed bumps scaled so every class
// cap is met and the binding one is attained.
std::vector<TestFunction> smooth_probes(SmoothClass cls);

// max over probes of |E h(Z) - E h(H)|, exact atom sums against adaptive
// quadrature.
double smooth_class_distance(const DiscreteDist& z, const Phi4Dist& target,
                             SmoothClass cls,
                             const std::vector<TestFunction>& probes,
                             double rel_tol = 1e-10);

// E[h(X)] under the two kinds of law the sweep mixes.
double expectation(const Phi4Dist& dist,
                   const std::function<double(double)>& h,
                   double rel_tol = 1e-10);
double expectation(const DiscreteDist& dist,
                   const std::function<double(double)>& h);

// E[h(G)] - E[h(H/gamma_n)]: the additive correction separating the
// penalized target, viewed at unit scale, from the standard Gaussian.
// This is the term a classical normal approximation of Z_n/gamma_n would
// have to absorb. Requires target.gamma() == n^{1/4}.
double correction_term(const Phi4Dist& target, std::size_t n,
                       const std::function<double(double)>& h,
                       double rel_tol = 1e-10);

// CSV law file: atom,prob rows (optional header line), symmetric about
// zero. resolve_summand accepts the built-in name "rademacher" or a path.
DiscreteDist load_discrete_csv(const std::string& path);
DiscreteDist resolve_summand(const std::string& name_or_path);

// Fixed report schema; the column names are part of the file contract.
// Values carry 17 significant digits so they round-trip through text.
std::string render_distance_csv(const std::vector<DistanceRow>& rows);

struct ExperimentResult {
    std::vector<DistanceRow> rows;  // sorted by n
    double c = 0;
    double c1 = 0;
    double sigma13 = 0;
    std::string csv;  // rendered table, identical to the file if written
};

// Full sweep over n_list: rows are computed independently (concurrently
// when the list has more than one entry) and assembled in ascending n.
// Writes the CSV table and a JSON summary when paths are configured.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace modstein
