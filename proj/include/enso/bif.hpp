#pragma once
/// @file bif.hpp
/// @brief Equilibria, transcendental characteristic roots, Hopf-curve
///        tracing, oscillation-boundary bisection, and period sweeps over
///        physical parameter ranges.

#include "enso/dde.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace enso::bif {

/// Equilibria of the scaled models: T = 0 always; the symmetric pair
/// +-sqrt((1-alpha)/(1-alpha*gamma)) exactly when the radicand is positive
/// (and alpha is neither 1 nor 1/gamma).
struct Equilibria {
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<double> values; ///< ascending; always contains 0
    bool pitchfork = false;     ///< alpha == 1 (pair collides with 0)
    bool singular = false;      ///< alpha*gamma == 1 (pair undefined)
};

/// Requires gamma in [0,1); throws std::invalid_argument otherwise.
Equilibria equilibria(double alpha, double gamma);

/// Linearization T(t) = T0 + x(t): dx/dt = a x + b x(t-delta), with the
/// characteristic equation lambda = a + b exp(-lambda delta).
struct CharCoeffs {
    double a = 0.0;     ///< instantaneous coefficient
    double b = 0.0;     ///< delayed coefficient
    double delta = 0.0; ///< delay
};

/// Characteristic coefficients of a scaled model kind at equilibrium T0.
/// Throws std::invalid_argument for the two-lag kinds.
CharCoeffs linearize(dde::ModelKind kind, double alpha, double gamma,
                     double delta, double T0);

/// Root of lambda = a + b exp(-lambda delta) with maximal real part, found
/// by Newton iteration from a deterministic seed grid covering
/// Re in [a-|b|-1, a+|b|+1], Im in [0, 4pi/max(delta,1e-6)]. The returned
/// root has Im >= 0 (roots come in conjugate pairs) and residual < 1e-10.
/// Throws std::runtime_error if no seed converges.
std::complex<double> rightmost_root(const CharCoeffs& c);

enum class Branch { Trivial, Nontrivial };

struct HopfPoint {
    double alpha = 0.0;
    double delta = 0.0;
    double omega = 0.0; ///< Hopf frequency: lambda = i*omega on the curve
};

struct HopfCurve {
    Branch branch = Branch::Trivial;
    double gamma = 0.0;
    std::vector<HopfPoint> points; ///< ordered by omega, then alpha
    std::size_t skipped = 0;       ///< omega samples with no bracketed root
};

/// Hopf locus in the (alpha, delta) plane where lambda = i*omega.
/// Trivial branch (T=0; a=1, b=-alpha, any scaled kind): closed form
/// alpha = sqrt(1+omega^2), delta = arccos(1/alpha)/omega.
/// Nontrivial branch (T0+-): instantaneous-gated linearization (gamma = 0
/// recovers the ungated case); per omega, every alpha in (0,1) solving
/// b^2 = a^2 + omega^2 is bracketed and refined, delta recovered from the
/// phase. omega samples are the inclusive linspace [omega_min, omega_max].
HopfCurve hopf_curve(double gamma, Branch branch, double omega_min,
                     double omega_max, int n_points);

struct BoundaryPoint {
    double alpha = 0.0;
    double delta = 0.0; ///< NaN when flagged
    bool flagged = false;
};

/// For each alpha in (0,1): bisect in delta on simulation outcomes (large
/// constant history 1.5 to land in the oscillating orbit's basin) down to
/// a delta interval of 1e-2; sustained oscillation for delta above the
/// returned value, equilibrium below. Non-monotone endpoint classification
/// widens the bracket once, then flags the point.
std::vector<BoundaryPoint> oscillation_boundary(dde::ModelKind kind,
                                                double gamma,
                                                const std::vector<double>& alphas,
                                                double delta_lo = 0.05,
                                                double delta_hi = 6.0);

/// One sweep cell: physical knobs, scaled parameters, and per-model-kind
/// classification/period/amplitude results.
struct PeriodCell {
    double theta = 0.0, A0 = 0.0, y_n = 0.0;
    double alpha = 0.0, gamma = 0.0, delta = 0.0, beta = 0.0;
    double years_per_unit = 0.0; ///< dimensional seconds-per-scaled-unit in years
    bool scale_error = false;    ///< scaling chain rejected this cell
    std::vector<dde::Classification> cls; ///< per requested kind
    std::vector<double> period;           ///< scaled units; NaN if not oscillating
    std::vector<double> period_years;     ///< NaN if not oscillating
    std::vector<double> amplitude;
};

struct PeriodGrid {
    std::vector<double> thetas, A0s, yns;
    std::vector<dde::ModelKind> kinds;
    std::vector<PeriodCell> cells; ///< theta-major, then A0, then y_n
};

/// Default sweep ranges: theta 1.0(0.2)4.0, A0 0.10(0.05)0.60,
/// y_n 1.4(0.2)3.4.
std::vector<double> default_theta_range();
std::vector<double> default_A0_range();
std::vector<double> default_yn_range();

/// Cartesian sweep over physical knobs: scaling chain -> integrate each
/// requested scaled model (history 0.1, run length 60*delta, step
/// dde::default_dt) -> classify and measure. Cells are independent work
/// items distributed over n_threads (0 = hardware concurrency), merged
/// deterministically by cell index.
PeriodGrid period_sweep(const std::vector<double>& thetas,
                        const std::vector<double>& A0s,
                        const std::vector<double>& yns,
                        const std::vector<dde::ModelKind>& kinds,
                        int n_threads = 0);

} // namespace enso::bif
