/// @file linmz.hpp
/// @brief Linear block-system reduction: integrates the resolved block of a
///        coupled linear ODE either directly or through the equivalent
///        memory-integral form (Markovian + noise + memory decomposition),
///        with the memory integral evaluated by trapezoid quadrature on the
///        step grid.
#pragma once

#include <Eigen/Dense>

#include <vector>

namespace enso::linmz {

/// Coupled linear system d/dt (x_hat, x_tilde) = [[A11,A12],[A21,A22]] *
/// (x_hat, x_tilde). The resolved block has dimension m >= 1, the
/// unresolved block n-m >= 1.
struct BlockLinearSystem {
    Eigen::MatrixXd A11;     ///< m x m
    Eigen::MatrixXd A12;     ///< m x (n-m)
    Eigen::MatrixXd A21;     ///< (n-m) x m
    Eigen::MatrixXd A22;     ///< (n-m) x (n-m)
    Eigen::VectorXd x_hat0;  ///< resolved initial state
    Eigen::VectorXd x_tilde0;///< unresolved initial state

    int m() const { return static_cast<int>(A11.rows()); }
    int n() const { return m() + static_cast<int>(A22.rows()); }
    /// Throws std::invalid_argument on non-conformable blocks.
    void validate() const;
};

/// e^{Mt} for a square matrix (scaling-and-squaring Pade approximant).
/// Throws std::invalid_argument for non-square input.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M, double t);

/// Direct fixed-step 4th-order integration of the full coupled system.
struct FullTrajectory {
    std::vector<double> times;
    Eigen::MatrixXd x_hat;   ///< row k = resolved state at times[k]
    Eigen::MatrixXd x_tilde; ///< row k = unresolved state at times[k]
};
FullTrajectory integrate_full(const BlockLinearSystem& sys,
                              double t_end, double dt);

/// Resolved-block trajectory from the reduced (memory-integral) form
///   dphi/dt = A11 phi + A12 e^{A22 t} x_tilde0
///             + int_0^t A12 e^{A22(t-s)} A21 phi(s) ds,
/// with the three right-hand-side terms recorded per grid point.
struct ReducedTrajectory {
    std::vector<double> times;
    Eigen::MatrixXd phi_hat;     ///< row k = resolved state
    Eigen::MatrixXd markov_part; ///< A11 phi
    Eigen::MatrixXd noise_part;  ///< A12 e^{A22 t} x_tilde0
    Eigen::MatrixXd memory_part; ///< trapezoid memory integral
};
ReducedTrajectory reduce_and_integrate(const BlockLinearSystem& sys,
                                       double t_end, double dt);

/// Trapezoid-on-grid memory integral for a prescribed resolved history:
/// row k of the result is int_0^{t_k} A12 e^{A22(t_k-s)} A21 phi(s) ds with
/// phi given by the rows of phi_hist on the uniform grid t_k = k dt.
/// This is the same quadrature reduce_and_integrate uses internally.
Eigen::MatrixXd memory_term_on_grid(const Eigen::MatrixXd& A12,
                                    const Eigen::MatrixXd& A22,
                                    const Eigen::MatrixXd& A21,
                                    const Eigen::MatrixXd& phi_hist,
                                    double dt);

} // namespace enso::linmz
