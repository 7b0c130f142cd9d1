/// @file pde.hpp
/// @brief Semi-Lagrangian solver for the two-strip wave/SST system on [0,1]
///        with reflecting boundaries: the ground truth the scalar delay
///        reductions are validated against.
#pragma once

#include <enso/dde.hpp>
#include <enso/params.hpp>

#include <complex>
#include <cstddef>
#include <vector>

namespace enso::pde {

/// Wind-forcing shape g(x) on [0,1].
/// DeltaApprox: normalized Gaussian bump centered at x_w with integral A0
/// and width sigma_w. Tabulated: uniform samples on [0,1] with linear
/// interpolation. Pointwise evaluation is zero outside [0,1].
struct WindForcing {
    enum class Kind { DeltaApprox, Tabulated };
    Kind kind = Kind::DeltaApprox;
    double x_w = 0.6;           ///< bump center (DeltaApprox)
    double A0 = 0.2;            ///< bump integral (DeltaApprox)
    double sigma_w = 0.01;      ///< bump width (DeltaApprox)
    std::vector<double> table;  ///< samples (Tabulated), size >= 2

    static WindForcing delta_approx(double x_w, double A0,
                                    double sigma_w = 0.01);
    static WindForcing tabulated(std::vector<double> samples);

    /// Pointwise g(x); zero outside [0,1].
    double operator()(double x) const;
    /// Integral of g over [a, b]: closed form via erf for the Gaussian
    /// kind, exact piecewise-linear integral (clipped to [0,1]) for tables.
    double mass(double a, double b) const;
};

/// Nodal state of the two-strip system on an N+1-node uniform grid.
struct PdeState {
    std::vector<double> x_grid;
    std::vector<double> h_c;  ///< fast-strip thermocline combination
    std::vector<double> h_n;  ///< slow-strip thermocline
    std::vector<double> T_e;  ///< SST anomaly
    double t = 0.0;

    std::size_t n_cells() const { return x_grid.size() - 1; }
};

/// Default initial data: zero thermocline fields and a localized Gaussian
/// T_e bump centered at the readout point x_E.
PdeState initial_state(const PhysicalParams& p, std::size_t N,
                       double Te_amp = 0.1, double Te_width = 0.05);

/// Linear-in-x readout weights for position x on an N-cell grid.
/// w == 0 marks an on-node readout (no interpolation).
struct ProbeWeights {
    std::size_t j = 0;
    double w = 0.0;
};

/// Throws std::domain_error for x outside [0,1]. Requires N >= 1.
ProbeWeights probe_weights(double x, std::size_t N);

/// (1-w) f[j] + w f[j+1]; returns f[j] exactly (bitwise) when w == 0.
double probe_value(const std::vector<double>& field, const ProbeWeights& pw);

/// Unforced advection-damping-reflection step for the wave fields, with the
/// time step locked to dx (the fast-strip characteristic lands exactly on
/// the next node). The pseudo-orthogonal-dynamics module advances its
/// thermocline fields through this same object, which makes the two
/// integrations bit-comparable by construction.
class WaveStep {
  public:
    /// Requires N >= 4 (cubic stencils) and r_E != 1 + y_n^2.
    WaveStep(const PhysicalParams& p, std::size_t N);

    std::size_t n_cells() const { return N_; }
    double dt() const { return dx_; }
    double damp() const { return damp_; }      ///< e^{-eps0 dx}
    double bc_west() const { return bcW_; }    ///< r_W - 1/(1+y_n^2)
    double bc_east() const { return bcE_; }    ///< r_E(1+y_n^2)/((1+y_n^2)-r_E)

    /// Interior rows only: h_c rows 1..N advance by an exact one-node shift,
    /// h_n rows 0..N-1 by cubic Lagrange interpolation at the foot point
    /// x + dx/y_n^2 (linear at the two edge rows), all damped by
    /// e^{-eps0 dt}. Boundary rows h_c[0] and h_n[N] are left untouched so
    /// the caller can add sources before applying the reflections.
    void interior(const std::vector<double>& h_c,
                  const std::vector<double>& h_n,
                  std::vector<double>& h_c_out,
                  std::vector<double>& h_n_out) const;

    /// Reflection rows: h_n[N] = bc_east * h_c[N], h_c[0] = bc_west * h_n[0].
    void boundaries(std::vector<double>& h_c, std::vector<double>& h_n) const;

    /// Full unforced step: interior followed by boundaries.
    void advance(const std::vector<double>& h_c,
                 const std::vector<double>& h_n,
                 std::vector<double>& h_c_out,
                 std::vector<double>& h_n_out) const;

    /// Wave fields a fraction c in (0,1) into a step: one-sided/cubic foot
    /// interpolation along the characteristics with damping e^{-eps0 c dt}
    /// and the reflection conditions evaluated at the fractional time. Used
    /// for 4th-order stage values in the pseudo-orthogonal dynamics.
    void fractional(double c, const std::vector<double>& h_c,
                    const std::vector<double>& h_n,
                    std::vector<double>& h_c_out,
                    std::vector<double>& h_n_out) const;

  private:
    std::size_t N_;
    double dx_, nu_, eps0_, damp_, bcW_, bcE_;
    double w_[4];  // cubic weights at the slow-strip foot offset
};

/// One-step semi-Lagrangian integrator for the wind-forced system.
/// dt is locked to dx = 1/N. The wave source term uses the Gaussian (or
/// tabulated) mass integrated exactly along each characteristic segment,
/// applied with half-step damping; the T_e equation advances by an
/// exponential trapezoid rule (exact decay for a vanishing source) with the
/// readout factor T_e(x_E) advanced by an exponential-Euler predictor.
/// Instances keep scratch buffers: not safe for concurrent step() calls.
class Stepper {
  public:
    Stepper(const PhysicalParams& p, const WindForcing& forcing,
            std::size_t N, bool nonlinear);

    double dt() const { return waves_.dt(); }
    const WaveStep& waves() const { return waves_; }

    /// Advance in place by one step. Throws std::runtime_error with the
    /// failure time when sentinel values turn non-finite or exceed 1e8.
    void step(PdeState& state);

    /// Instantaneous d/dt T_e at node j of the given state (the SST
    /// equation right-hand side); feeds dense probe records.
    double dTe_dt(const PdeState& state, std::size_t j) const;

    /// Throws std::runtime_error if any field entry is non-finite.
    void check_finite(const PdeState& state) const;

  private:
    WaveStep waves_;
    std::size_t N_;
    double one5_, beta_, dt_;
    bool nonlinear_, has_source_;
    ProbeWeights pw_E_;                   // readout weights at x_E
    std::vector<double> cT_, ch_, edt_;   // per-node coefficients
    std::vector<double> src_c_, src_n_;   // per-node source masses
    std::vector<double> hc_new_, hn_new_, Te_new_, s_now_;  // scratch

    double gate(double T) const;
};

/// Single-step convenience wrapper matching the step-operation contract.
/// Throws std::invalid_argument when dt differs from 1/N (CFL lock).
PdeState step(const PdeState& state, const WindForcing& forcing,
              const PhysicalParams& p, double dt, bool nonlinear = true);

/// A finished run: final state plus dense T_e records at probe positions.
struct RunResult {
    PdeState final_state;
    std::vector<dde::Trajectory> probes;
};

/// Integrate from `initial` to t_end (rounded to a whole number of steps),
/// recording T_e value and instantaneous derivative at every probe position
/// each step (cubic dense output between steps).
RunResult run(const PhysicalParams& p, const WindForcing& forcing,
              PdeState initial, double t_end,
              const std::vector<double>& probe_xs, bool nonlinear = true);

/// Homogeneous-dynamics mode (mu = 0): complex rate and boundary-consistent
/// amplitudes, sigma_k = -eps0 + (ln z + 2 pi i k)/(1+y_n^2) with
/// z = (r_E r_W (1+y_n^2) - r_E)/((1+y_n^2) - r_E).
struct EigenMode {
    int k = 0;
    std::complex<double> sigma;
    std::complex<double> H_n{1.0, 0.0};
    std::complex<double> H_c;  ///< (r_W - 1/(1+y_n^2)) H_n
};

/// Throws std::domain_error when r_E = 0 (or the log argument vanishes):
/// the homogeneous dynamics are trivial there, with finite-time extinction
/// instead of a mode expansion.
EigenMode eigenmode(int k, const PhysicalParams& p);

/// Real part of the mode's wave fields at time t on an N+1-node grid
/// (T_e = 0): h_c = Re[H_c e^{sigma t - (sigma+eps0) x}],
/// h_n = Re[H_n e^{sigma t + (sigma+eps0) y_n^2 x}].
PdeState eigenmode_state(const EigenMode& m, const PhysicalParams& p,
                         std::size_t N, double t = 0.0);

/// Exact scalar reduction of the delta-forced system for the readout at
/// x_E with r_E = 0: two discrete delays at the true wave transit times
/// d_short = x_E - x_w and d = x_E + y_n^2 x_w, carrying the true branch
/// masses (the slow branch includes the characteristic-speed Jacobian).
/// Throws std::invalid_argument when r_E != 0.
dde::DelayModel matched_delay_model(const PhysicalParams& p, bool nonlinear);

struct ReductionReport {
    double rel_linf = 0.0;   ///< max |probe - dde| / max |probe| on window
    double window_lo = 0.0;  ///< comparison window start (the long delay)
    double window_hi = 0.0;
    double max_abs_pde = 0.0;
    bool dde_blew_up = false;
};

/// Cross-validation harness: run the PDE at resolution N with a Gaussian
/// bump of width sigma_w, hand the x_E probe record on [0, d] to the
/// matched delay model as history, integrate both to t_end and compare in
/// relative L-infinity on [d, t_end].
ReductionReport validate_reduction(const PhysicalParams& p, std::size_t N,
                                   double sigma_w, double t_end,
                                   bool nonlinear, double Te_amp);

}  // namespace enso::pde
