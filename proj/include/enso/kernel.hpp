/**
 * @file kernel.hpp
 * @brief Memory kernel of the linear wave reduction: reflection-sum
 *        evaluation for arbitrary wind patterns and the discrete-delay
 *        limit for point forcing.
 */
#pragma once

#include <enso/params.hpp>
#include <enso/pde.hpp>

#include <utility>
#include <vector>

namespace enso::kernel {

/// Which wave carries the signal first after the wind kick.
enum class Branch {
    kelvin_first,  ///< eastward leg first: lags in [k(1+y_n^2), 1+k(1+y_n^2)]
    rossby_first,  ///< westward leg first: lags in [1+k(1+y_n^2), (k+1)(1+y_n^2)]
};

/// One branch/reflection-count contribution to the kernel at a given lag.
struct KernelSample {
    double lag = 0.0;     ///< dimensionless delay tau >= 0
    double weight = 0.0;  ///< kernel value contributed at that lag
    Branch branch = Branch::kelvin_first;
    int k_reflect = 0;    ///< completed east+west reflection pairs
};

/// Discrete-delay limit of the kernel for point (delta) wind forcing.
struct DiscreteDelaySpec {
    std::vector<std::pair<double, double>> delays;  ///< (lag, coefficient)
    int k_max = 0;                                  ///< truncation order
};

/// Completed round trips of the reflected branch by time t:
/// floor((t-1)/(1+y_n^2)) for t >= 1, else -1 (nothing has arrived).
int kmax_at(double t, const PhysicalParams& p);

/// |reflection ratio| per round trip: |A_rE A_rW| e^{-eps0 (1+y_n^2)}.
/// The geometric tail beyond k_max is bounded by ratio^{k_max+1}/(1-ratio).
/// Throws std::domain_error when the ratio reaches 1 (non-summable).
double truncation_bound(int k_max, const PhysicalParams& p);

/// Smallest k_max whose geometric tail bound is below 1e-10.
/// Throws std::domain_error when the reflection ratio reaches 1.
int default_k_max(const PhysicalParams& p);

/// Kernel value K(tau): sum over reflection counts k <= k_max of the
/// kelvin_first term (1-theta/(1+y_n^2)) c_h*(x_E) e^{-eps0(1-x)} g(x) at
/// x = 1 + k(1+y_n^2) - tau and the rossby_first term
/// -(theta/y_n^2)(A_rW/(1+y_n^2)) c_h*(x_E) e^{-eps0(1+y_n^2 x)} g(x) at
/// x = (tau - 1 - k(1+y_n^2))/y_n^2, each times
/// mu (A_rE A_rW)^k e^{-eps0 k(1+y_n^2)}; terms with x outside [0,1]
/// vanish. k_max = -1 selects default_k_max(p). Returns 0 for tau < 0.
double kernel_eval(double tau, const pde::WindForcing& forcing,
                   const PhysicalParams& p, int k_max = -1);

/// The nonzero branch/k contributions at one lag (kernel_eval's summands).
std::vector<KernelSample> kernel_terms(double tau,
                                       const pde::WindForcing& forcing,
                                       const PhysicalParams& p,
                                       int k_max = -1);

/// Discrete-delay coefficients for point forcing at forcing.x_w with mass
/// forcing.A0: lags (1-x_w) + k(1+y_n^2) carry +c_S*-like coefficients,
/// lags (1+y_n^2 x_w) + k(1+y_n^2) carry -c_L*-like ones, each damped by
/// (A_rE A_rW e^{-eps0(1+y_n^2)})^k. Sorted by lag; k_max = -1 selects
/// default_k_max(p). Throws std::invalid_argument for tabulated forcing.
DiscreteDelaySpec discrete_delays(const pde::WindForcing& forcing,
                                  const PhysicalParams& p, int k_max = -1);

}  // namespace enso::kernel
