#include "enso/linmz.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace enso::linmz {

void BlockLinearSystem::validate() const {
    auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
    if (A11.rows() != A11.cols()) fail("A11 must be square");
    if (A22.rows() != A22.cols()) fail("A22 must be square");
    if (A11.rows() < 1 || A22.rows() < 1)
        fail("need m >= 1 and n-m >= 1");
    if (A12.rows() != A11.rows() || A12.cols() != A22.cols())
        fail("A12 dimensions not conformable");
    if (A21.rows() != A22.rows() || A21.cols() != A11.cols())
        fail("A21 dimensions not conformable");
    if (x_hat0.size() != A11.rows() || x_tilde0.size() != A22.rows())
        fail("initial state dimensions not conformable");
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M, double t) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("matrix_exponential: non-square input");
    if (!M.allFinite())
        throw std::invalid_argument("matrix_exponential: non-finite input");
    return (M * t).exp();
}

FullTrajectory integrate_full(const BlockLinearSystem& sys,
                              double t_end, double dt) {
    sys.validate();
    if (dt <= 0.0) throw std::invalid_argument("integrate_full: dt <= 0");
    const int m = sys.m();
    const int q = sys.n() - m;
    Eigen::MatrixXd A(m + q, m + q);
    A.topLeftCorner(m, m) = sys.A11;
    A.topRightCorner(m, q) = sys.A12;
    A.bottomLeftCorner(q, m) = sys.A21;
    A.bottomRightCorner(q, q) = sys.A22;
    Eigen::VectorXd x(m + q);
    x.head(m) = sys.x_hat0;
    x.tail(q) = sys.x_tilde0;

    const int nsteps = static_cast<int>(std::llround(t_end / dt));
    FullTrajectory out;
    out.times.resize(nsteps + 1);
    out.x_hat.resize(nsteps + 1, m);
    out.x_tilde.resize(nsteps + 1, q);
    out.times[0] = 0.0;
    out.x_hat.row(0) = x.head(m);
    out.x_tilde.row(0) = x.tail(q);
    for (int k = 0; k < nsteps; ++k) {
        const Eigen::VectorXd k1 = A * x;
        const Eigen::VectorXd k2 = A * (x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = A * (x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = A * (x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.times[k + 1] = (k + 1) * dt;
        out.x_hat.row(k + 1) = x.head(m);
        out.x_tilde.row(k + 1) = x.tail(q);
    }
    return out;
}

ReducedTrajectory reduce_and_integrate(const BlockLinearSystem& sys,
                                       double t_end, double dt) {
    sys.validate();
    if (dt <= 0.0)
        throw std::invalid_argument("reduce_and_integrate: dt <= 0");
    const int m = sys.m();
    const int nsteps = static_cast<int>(std::llround(t_end / dt));

    const Eigen::MatrixXd E = matrix_exponential(sys.A22, dt);
    const Eigen::MatrixXd Eh = matrix_exponential(sys.A22, 0.5 * dt);

    Eigen::VectorXd phi = sys.x_hat0;
    Eigen::VectorXd v0 = sys.A21 * phi;      // A21 phi(0)
    Eigen::VectorXd vn = v0;                 // A21 phi(t_n)
    Eigen::VectorXd Ev0 = v0;                // e^{A22 t_n} v0
    Eigen::VectorXd noise_vec = sys.x_tilde0;// e^{A22 t_n} x_tilde0
    Eigen::VectorXd Z = v0;                  // trapezoid accumulator

    ReducedTrajectory out;
    out.times.resize(nsteps + 1);
    out.phi_hat.resize(nsteps + 1, m);
    out.markov_part.resize(nsteps + 1, m);
    out.noise_part.resize(nsteps + 1, m);
    out.memory_part.resize(nsteps + 1, m);

    for (int k = 0; k <= nsteps; ++k) {
        // memory state at t_k: dt * (Z - (v_k + e^{A22 t_k} v0)/2)
        const Eigen::VectorXd m_grid = dt * (Z - 0.5 * (vn + Ev0));
        out.times[k] = k * dt;
        out.phi_hat.row(k) = phi;
        out.markov_part.row(k) = sys.A11 * phi;
        out.noise_part.row(k) = sys.A12 * noise_vec;
        out.memory_part.row(k) = sys.A12 * m_grid;
        if (k == nsteps) break;

        // noise forcing at the three stage offsets
        const Eigen::VectorXd noise_h = sys.A12 * (Eh * noise_vec);
        const Eigen::VectorXd noise_1 = sys.A12 * (E * noise_vec);
        const Eigen::VectorXd noise_0 = sys.A12 * noise_vec;

        // memory at t_k + c dt: propagate the grid state and close the
        // partial step with a local trapezoid using the stage estimate
        auto mem_stage = [&](double c, const Eigen::MatrixXd& Ec,
                             const Eigen::VectorXd& phi_stage) {
            const Eigen::VectorXd vs = sys.A21 * phi_stage;
            return (sys.A12 * (Ec * m_grid
                               + c * dt * 0.5 * (Ec * vn + vs))).eval();
        };

        const Eigen::VectorXd k1 =
            sys.A11 * phi + noise_0 + sys.A12 * m_grid;
        const Eigen::VectorXd p2 = phi + 0.5 * dt * k1;
        const Eigen::VectorXd k2 = sys.A11 * p2 + noise_h
                                 + mem_stage(0.5, Eh, p2);
        const Eigen::VectorXd p3 = phi + 0.5 * dt * k2;
        const Eigen::VectorXd k3 = sys.A11 * p3 + noise_h
                                 + mem_stage(0.5, Eh, p3);
        const Eigen::VectorXd p4 = phi + dt * k3;
        const Eigen::VectorXd k4 = sys.A11 * p4 + noise_1
                                 + mem_stage(1.0, E, p4);
        phi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        vn = sys.A21 * phi;
        Z = E * Z + vn;
        Ev0 = E * Ev0;
        noise_vec = E * noise_vec;
    }
    return out;
}

Eigen::MatrixXd memory_term_on_grid(const Eigen::MatrixXd& A12,
                                    const Eigen::MatrixXd& A22,
                                    const Eigen::MatrixXd& A21,
                                    const Eigen::MatrixXd& phi_hist,
                                    double dt) {
    if (dt <= 0.0)
        throw std::invalid_argument("memory_term_on_grid: dt <= 0");
    const int K = static_cast<int>(phi_hist.rows()) - 1;
    if (K < 0)
        throw std::invalid_argument("memory_term_on_grid: empty history");
    const Eigen::MatrixXd E = matrix_exponential(A22, dt);
    Eigen::MatrixXd out(K + 1, A12.rows());
    Eigen::VectorXd v0 = A21 * phi_hist.row(0).transpose();
    Eigen::VectorXd vn = v0;
    Eigen::VectorXd Ev0 = v0;
    Eigen::VectorXd Z = v0;
    out.row(0).setZero();
    for (int k = 1; k <= K; ++k) {
        vn = A21 * phi_hist.row(k).transpose();
        Z = E * Z + vn;
        Ev0 = E * Ev0;
        out.row(k) = (A12 * (dt * (Z - 0.5 * (vn + Ev0)))).transpose();
    }
    return out;
}

} // namespace enso::linmz
