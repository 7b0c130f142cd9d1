/// @file params.hpp
/// @brief Physical constants, the background-forcing profile, local reaction
///        coefficients, and the scaling chain producing the delay-model
///        parameters (alpha, gamma, delta, beta).
#pragma once

#include <string>

namespace enso {

/// Dimensional constants plus the dimensionless tunables of the two-strip
/// model. Defaults are the reference configuration.
struct PhysicalParams {
    // dimensional constants
    double eps_T = 9.25e-8;    ///< Newtonian cooling rate [1/s]
    double L = 1.5e7;          ///< basin length [m]
    double c0 = 2.0;           ///< fast-mode wave speed [m/s]
    double tau0 = 2.667e-7;    ///< background wind forcing strength [m/s^2]
    double b_w = 102.6;        ///< wind-stress parametrization constant [s]
    double H1 = 50.0;          ///< surface layer depth [m]
    double H = 200.0;          ///< top layer depth [m]
    double H_tilde = 50.0;     ///< temperature-gradient depth [m]
    double H_star = 30.0;      ///< subsurface transition steepness [m]
    double T0 = 30.0;          ///< no-dynamics equilibrium temperature [C]
    double Ts0 = 22.0;         ///< background subsurface temperature [C]
    double a_M = 1.3e-8;       ///< Rayleigh friction coefficient [1/s]
    double eps_small = 1e-4;   ///< tanh switch steepness [dimensionless]
    double x_E = 0.9;          ///< eastern readout point [dimensionless]
    double x0_wind = 0.57;     ///< background-forcing center [dimensionless]
    // dimensionless tunables
    double mu = 1.0;           ///< coupling coefficient
    double theta = 3.0;        ///< wind forcing factor at the slow strip
    double A0 = 0.2;           ///< wind forcing strength (integral of g)
    double y_n = 2.0;          ///< slow-strip latitude
    double r_W = 0.6;          ///< western boundary mass-flux measure
    double r_E = 0.0;          ///< eastern boundary mass-flux measure
    double x_w = 0.6;          ///< wind-forcing location
    double c_se = 1.0;         ///< SST/subsurface proportionality constant

    /// Throws std::invalid_argument when a structural invariant is violated
    /// (positive depths/lengths, T0 > Ts0, 0 < x_w < x_E < 1, y_n > 1,
    /// r_W >= 0, r_E >= 0).
    void validate() const;
};

/// Derived coefficients of the scaling chain. alpha, gamma, delta are the
/// scalar delay-model parameters; beta the cubic-feedback coefficient.
struct ScaledParams {
    double eps0;                ///< wave damping over one basin crossing
    double eps_w;               ///< scaled Newtonian cooling
    double alpha0;              ///< H1/H_tilde
    double deltaF1;             ///< wind-stress amplitude factor
    double cT_E;                ///< local SST damping at x_E
    double chstar_E;            ///< local thermocline feedback at x_E
    double cS_star;             ///< short (fast-path) feedback strength
    double cL_star;             ///< long (slow-path) feedback strength
    double d;                   ///< dimensionless long delay, 1 + y_n^2 x_w
    double d_short;             ///< dimensionless short delay, 1 - x_w
    double beta;                ///< nonlinearity coefficient (c_se/(T0-Ts0))^2
    double alpha;               ///< delayed-feedback ratio
    double gamma;               ///< nonlinear weighting of the delayed term
    double delta;               ///< scaled delay
    double time_scale_seconds;  ///< (L/c0)/(cS_star - cT_E)
    double A_rW;                ///< western reflection measure r_W(1+y_n^2)-1
    double A_rE;                ///< eastern reflection measure, 0 when r_E=0
};

/// Background wind-forcing profile F(x) on x in [0,1].
/// Throws std::domain_error outside [0,1].
double background_forcing(const PhysicalParams& p, double x);

/// Local reaction coefficients at position x.
struct LocalCoeffs {
    double c_T;       ///< SST damping rate
    double c_h_star;  ///< thermocline-to-SST feedback strength
};

/// Evaluates c_T(x) and c_h*(x) from the background forcing and the tanh
/// regime switch. Throws std::domain_error outside [0,1].
LocalCoeffs local_coeffs(const PhysicalParams& p, double x);

/// Runs the full scaling chain. Throws std::domain_error when
/// cS_star - cT_E < 1e-12 (non-positive growth rate; the scaled parameters
/// are undefined there).
ScaledParams scale(const PhysicalParams& p);

/// Converts scaled model time to seconds: t_scaled/(cS_star-cT_E) * (L/c0).
double dimensionalize_time_seconds(const ScaledParams& s, double t_scaled);

/// Seconds to Julian years (365.25 days).
double seconds_to_years(double seconds);

/// Parses a flat JSON object of parameter overrides. Keys must match the
/// PhysicalParams field names exactly; unknown keys throw
/// std::invalid_argument (typo protection). Missing keys keep defaults.
PhysicalParams params_from_json(const std::string& text);

/// Serializes all fields as a flat JSON object (keys = field names).
std::string params_to_json(const PhysicalParams& p);

} // namespace enso
