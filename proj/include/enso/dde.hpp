#pragma once
/// @file dde.hpp
/// @brief Method-of-steps RK4 integrator for scalar discrete-delay models
///        with cubic Hermite dense output, plus period/amplitude measurement.

#include <cstddef>
#include <optional>
#include <vector>

namespace enso::dde {

/// Scalar delay models.
///
/// Scaled kinds (alpha, gamma, delta):
///   SS:   dT/dt = T - T^3 - alpha T(t-delta)                 (ungated)
///   VoC:  dT/dt = T - T^3 - alpha T(t-delta)(1 - gamma T(t)^2)
///         (delayed coupling gated by the instantaneous state)
///   MZ:   dT/dt = T - T^3 - alpha T(t-delta)(1 - gamma T(t-delta)^2)
///         (delayed coupling gated by the delayed state)
///
/// Raw two-lag kinds (c_S, c_L, c_T, beta, d, d_short):
///   LinearTwoDelay: dT/dt = -c_T T + c_S T(t-d_short) - c_L T(t-d)
///   VoCTwoDelay:    dT/dt = -c_T T + (1 - beta T^2)(c_S T(t-d_short)
///                                                   - c_L T(t-d))
/// d_short = 0 is allowed and means the short lag acts instantaneously.
enum class ModelKind { SS, VoC, MZ, LinearTwoDelay, VoCTwoDelay };

struct DelayModel {
    ModelKind kind = ModelKind::SS;
    // scaled kinds
    double alpha = 0.0; ///< delayed-coupling strength
    double gamma = 0.0; ///< quadratic gate strength
    double delta = 1.0; ///< delay
    // raw two-lag kinds
    double c_S = 0.0;     ///< short-lag coupling mass
    double c_L = 0.0;     ///< long-lag coupling mass
    double c_T = 0.0;     ///< local thermal damping at the probe point
    double beta = 0.0;    ///< quadratic gate strength
    double d = 0.0;       ///< long lag
    double d_short = 0.0; ///< short lag; 0 = instantaneous

    /// Logical lags in the order rhs() expects; entries may be 0.
    std::vector<double> lags() const;
    /// Largest lag (the span of initial history required).
    double max_delay() const;
    /// Right-hand side; lagged[i] is T evaluated lags()[i] in the past.
    double rhs(double T, const double* lagged) const;
    /// Throws std::invalid_argument on invalid lags.
    void validate() const;
};

/// Initial data on [-max_delay, 0]: constant or piecewise-linear samples.
class History {
  public:
    /// Default: constant 0.1 (small symmetry-breaking perturbation).
    History() = default;
    static History constant(double v);
    /// Samples at ascending times t (covering the needed span, t.back()=0);
    /// evaluation is linear between samples and clamped outside them.
    static History sampled(std::vector<double> t, std::vector<double> v);
    double operator()(double t) const;

  private:
    std::vector<double> t_, v_; // empty => constant
    double c_ = 0.1;
};

/// Nodal trajectory with cubic Hermite dense output between nodes.
/// C0 everywhere, C1 within segments; evaluation for t <= t_begin falls
/// through to the stored history function.
class Trajectory {
  public:
    Trajectory() = default;
    /// Build from precomputed samples (tests, probe records). values and
    /// derivs must have equal size >= 1; dt > 0.
    static Trajectory from_samples(double t0, double dt,
                                   std::vector<double> values,
                                   std::vector<double> derivs,
                                   History history = History::constant(0.0));

    double operator()(double t) const;
    double t_begin() const { return t0_; }
    double t_final() const { return t0_ + dt_ * double(values_.size() - 1); }
    double dt() const { return dt_; }
    std::size_t n_nodes() const { return values_.size(); }
    double node_time(std::size_t i) const { return t0_ + dt_ * double(i); }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }
    /// True if integration aborted on |T| > 1e6 (or non-finite values).
    bool blew_up() const { return blew_up_; }
    /// Equals t_final(); on blow-up, the last time with a valid value.
    double last_valid_time() const { return t_final(); }

  private:
    friend Trajectory integrate(const DelayModel&, const History&, double,
                                double);
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> values_, derivs_;
    History history_;
    bool blew_up_ = false;
};

/// Integrate by explicit RK4 method of steps. dt is adjusted downward to
/// the largest step <= dt that divides every positive lag (relative snap
/// tolerance 1e-9), which places derivative discontinuities on grid nodes.
/// Delayed stage values come from the cubic Hermite dense output of
/// completed segments. Aborts on |T| > 1e6 (see Trajectory::blew_up).
Trajectory integrate(const DelayModel& model, const History& history,
                     double t_end, double dt);

/// Sweep default step: resolves both the shortest positive lag and the
/// O(1) local dynamics (min(lag_min/64, 0.02)).
double default_dt(const DelayModel& model);

enum class Classification { Oscillating, Equilibrium, NonPeriodic };

struct PeriodResult {
    Classification cls = Classification::NonPeriodic;
    /// Mean spacing of upward zero crossings of T - mean(T); set only when
    /// cls == Oscillating.
    std::optional<double> period;
    double amplitude = 0.0;  ///< half peak-to-peak over the window
    double spacing_cv = 0.0; ///< std/mean of crossing spacings (diagnostic)
};

/// Classify the post-transient window [t0 + f*(T-t0), T]. Gates:
///  - blow-up or fewer than 8 window samples      -> NonPeriodic
///  - half peak-to-peak amplitude < 1e-6          -> Equilibrium
///  - second-half amplitude < 0.2x first half     -> Equilibrium (decaying)
///  - fewer than 3 upward crossings               -> NonPeriodic
///  - crossing-spacing std/mean > 0.05            -> NonPeriodic
PeriodResult measure_period(const Trajectory& traj,
                            double transient_fraction = 0.5);

/// Half peak-to-peak amplitude over the post-transient window.
double amplitude(const Trajectory& traj, double transient_fraction = 0.5);

} // namespace enso::dde
