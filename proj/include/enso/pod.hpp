/**
 * @file pod.hpp
 * @brief Pseudo-orthogonal dynamics for the nonlinear two-strip model:
 *        gated temperature transport over freely decaying waves, its
 *        closed-form solution, the induced noise term, and the
 *        finite-difference memory-kernel probe.
 */
#pragma once

#include <enso/dde.hpp>
#include <enso/params.hpp>
#include <enso/pde.hpp>

#include <cstddef>
#include <vector>

namespace enso::pod {

/// Which closed-form branch governs a node, by the gate factor
/// 1 - beta T^2: tanh inside the gate (beta T^2 < 1), coth outside
/// (beta T^2 > 1), constant exactly on the gate (beta T^2 = 1).
enum class GateBranch { tanh, coth, constant };

/// Nodal state of the unresolved (Q-projected) dynamics.
struct PodState {
    std::vector<double> x_grid;
    std::vector<double> h_c_Q;
    std::vector<double> h_n_Q;
    std::vector<double> T_e_Q;
    std::vector<GateBranch> branch;  ///< per-node closed-form branch
    double t = 0.0;

    std::size_t n_cells() const { return x_grid.empty() ? 0 : x_grid.size() - 1; }
};

/// Classify branches from the temperature field and wrap the grid data.
PodState make_pod_state(const PhysicalParams& p, const pde::PdeState& s,
                        bool nonlinear = true);

/// A finished unresolved-dynamics run with dense records at probe points.
struct PodRunResult {
    PodState final_state;
    std::vector<dde::Trajectory> T_probes;      ///< T_e_Q at probe positions
    std::vector<dde::Trajectory> noise_probes;  ///< gated source at probes
    bool halved = false;  ///< a gate crossing forced substepping somewhere
};

/// Advance the unresolved dynamics from `initial` to t_end: the wave
/// fields decay and reflect with no wind source (shared scheme with the
/// full integration, bit-comparable), and each node's temperature obeys
/// dT/dt = c_h*(x)(1 - beta T^2)(h_c_Q + h_n_Q/(1+y_n^2)) under classic
/// 4th-order stepping with interpolated half-step wave stages. A node
/// whose gate changes sign within a step is redone with two half steps.
/// dt must equal 1/N (the wave scheme's lock); throws std::invalid_argument
/// otherwise, std::runtime_error on divergence. nonlinear = false sets
/// beta = 0 (ungated transport).
PodRunResult pod_integrate(const PhysicalParams& p,
                           const pde::PdeState& initial, double t_end,
                           double dt,
                           const std::vector<double>& probe_xs = {},
                           bool nonlinear = true);

/// Closed-form temperature of the unresolved dynamics on the bounded
/// (tanh) branch: T = (1/sqrt(beta)) tanh(artanh(sqrt(beta) T0(x)) +
/// c_h*(x) sqrt(beta) [I_c + I_n/(1+y_n^2)]) with the characteristic-line
/// integrals I_c = int_0^t e^{-eps0 s} h_c(x-s, 0) ds and
/// I_n = int_0^t e^{-eps0 s} h_n(x + s/y_n^2, 0) ds, clipped where the
/// foot leaves [0,1]; adaptive quadrature to 1e-9; initial grids read
/// through cubic interpolation. beta = 0 (nonlinear = false) degenerates
/// to T0 + c_h*(x)[I_c + I_n/(1+y_n^2)]. as_printed = true evaluates the
/// squared-tanh variant of the same argument (kept for comparison only;
/// it does not solve the governing equation). Throws std::domain_error
/// when beta T0(x)^2 >= 1: use the coth/constant branch instead.
double closed_form_TeQ(const PhysicalParams& p, const pde::PdeState& initial,
                       double x, double t, bool as_printed = false,
                       bool nonlinear = true);

/// Closed form on the unbounded (coth) branch, beta T0(x)^2 > 1:
/// T = (1/sqrt(beta)) coth(arcoth(sqrt(beta) T0(x)) + same integral term).
/// Throws std::domain_error when beta T0(x)^2 <= 1.
double closed_form_TeQ_coth(const PhysicalParams& p,
                            const pde::PdeState& initial, double x, double t);

/// The gated source c_h*(x)(1 - beta T_e_Q^2)(h_c_Q + h_n_Q/(1+y_n^2))
/// read off a state at position x (linear probe interpolation between
/// nodes). This is what forces the resolved temperature, i.e. the noise
/// term of the reduction; it equals dT_e_Q/dt along the run.
double pod_noise(const PhysicalParams& p, const PodState& state, double x,
                 bool nonlinear = true);

/// Finite-difference probe configuration and the direction normalization.
struct KernelProbe {
    double epsilon_fd = 1e-5;     ///< perturbation size (> 0)
    double direction_norm = 0.0;  ///< grid L2 norm of the unresolved kick
};

/// Memory-kernel estimate by perturbing the waves along the wind-injection
/// direction and reading the induced noise at x_E.
struct FdKernel {
    std::vector<double> lags;    ///< step grid, lag 0 first
    std::vector<double> K_raw;   ///< epsilon estimate
    std::vector<double> K_half;  ///< epsilon/2 estimate
    std::vector<double> K_rich;  ///< 2 K_half - K_raw (first-order removed)
    KernelProbe probe;
    bool left_tanh_branch = false;  ///< some node ended outside the gate
};

/// Estimate the memory kernel at resolved value T_hat: initialize the wave
/// fields to epsilon times the normalized wind-injection direction
/// (coefficients of the temperature readout in each strip times g(x)
/// times T_hat), the temperature field to T_hat at the x_E node and zero
/// elsewhere, run the unresolved dynamics to t_end on an N-cell grid, and
/// return norm * noise(t)/epsilon for epsilon and epsilon/2 with their
/// Richardson combination. Throws std::invalid_argument for epsilon <= 0
/// or a dead injection direction.
FdKernel kernel_fd(const PhysicalParams& p, const pde::WindForcing& forcing,
                   double T_hat, double t_end, std::size_t N,
                   double epsilon_fd = 1e-5, bool nonlinear = true);

/// The analytic kernel re-based from the eastern-boundary readout to the
/// x_E readout: e^{+eps0(1-x_E)} K(tau + (1-x_E)). With no eastern
/// reflection and wind support west of x_E this is exact, and is the
/// linear (beta = 0) reference curve for kernel_fd.
double linear_reference(double tau, const pde::WindForcing& forcing,
                        const PhysicalParams& p);

}  // namespace enso::pod
