#include <enso/pod.hpp>

#include <enso/kernel.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace enso::pod {

namespace {

double beta_of(const PhysicalParams& p) {
    const double dT = p.T0 - p.Ts0;
    return (p.c_se / dT) * (p.c_se / dT);
}

// cubic Lagrange read of a uniform-grid field at x, one-sided at the edges
double grid_interp(const std::vector<double>& f, double x) {
    const std::ptrdiff_t N = std::ptrdiff_t(f.size()) - 1;
    if (x <= 0.0) return f.front();
    if (x >= 1.0) return f.back();
    const double u = x * double(N);
    std::ptrdiff_t base = std::ptrdiff_t(u);
    double s = u - double(base);
    if (base < 1) {
        s += double(base) - 1.0;
        base = 1;
    } else if (base > N - 2) {
        s += double(base) - double(N - 2);
        base = N - 2;
    }
    const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return w0 * f[base - 1] + w1 * f[base] + w2 * f[base + 1] +
           w3 * f[base + 2];
}

template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa,
                   double fm, double fb, double whole, double tol,
                   int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 30);
}

GateBranch classify(double beta, double T) {
    const double g = beta * T * T;
    if (g < 1.0) return GateBranch::tanh;
    if (g > 1.0) return GateBranch::coth;
    return GateBranch::constant;
}

// classic 4-stage update of dT/dt = c (1 - beta T^2) H(t) with prescribed
// source samples at the start, middle, and end of the step
double rk4_gated(double T, double c, double beta, double dt, double H0,
                 double Hh, double H1) {
    const auto f = [c, beta](double Tv, double H) {
        return c * (1.0 - beta * Tv * Tv) * H;
    };
    const double k1 = f(T, H0);
    const double k2 = f(T + 0.5 * dt * k1, Hh);
    const double k3 = f(T + 0.5 * dt * k2, Hh);
    const double k4 = f(T + dt * k3, H1);
    return T + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// shared characteristic-line integrals: c_h*(x) [I_c + I_n/(1+y_n^2)]
double source_integral(const PhysicalParams& p,
                       const pde::PdeState& initial, double x, double t) {
    const double eps0 = p.a_M * p.L / p.c0;
    const double yn2 = p.y_n * p.y_n;
    const double one5 = 1.0 + yn2;
    const double tol = 1e-9;
    const double up_c = std::min(t, x);
    const double I_c = integrate_adaptive(
        [&](double s) {
            return std::exp(-eps0 * s) * grid_interp(initial.h_c, x - s);
        },
        0.0, up_c, tol);
    const double up_n = std::min(t, (1.0 - x) * yn2);
    const double I_n = integrate_adaptive(
        [&](double s) {
            return std::exp(-eps0 * s) *
                   grid_interp(initial.h_n, x + s / yn2);
        },
        0.0, up_n, tol);
    return local_coeffs(p, x).c_h_star * (I_c + I_n / one5);
}

}  // namespace

PodState make_pod_state(const PhysicalParams& p, const pde::PdeState& s,
                        bool nonlinear) {
    const double beta = nonlinear ? beta_of(p) : 0.0;
    PodState out;
    out.x_grid = s.x_grid;
    out.h_c_Q = s.h_c;
    out.h_n_Q = s.h_n;
    out.T_e_Q = s.T_e;
    out.t = s.t;
    out.branch.resize(out.T_e_Q.size());
    for (std::size_t j = 0; j < out.T_e_Q.size(); ++j)
        out.branch[j] = classify(beta, out.T_e_Q[j]);
    return out;
}

PodRunResult pod_integrate(const PhysicalParams& p,
                           const pde::PdeState& initial, double t_end,
                           double dt, const std::vector<double>& probe_xs,
                           bool nonlinear) {
    p.validate();
    const std::size_t N = initial.n_cells();
    const pde::WaveStep waves(p, N);  // validates N >= 4 and the corner
    if (!(dt > 0.0) || std::abs(dt - waves.dt()) > 1e-12 / double(N))
        throw std::invalid_argument(
            "pod_integrate: dt must equal 1/N (wave-scheme lock)");
    if (!(t_end > initial.t))
        throw std::invalid_argument("pod_integrate: t_end before start");

    const double yn2 = p.y_n * p.y_n;
    const double one5 = 1.0 + yn2;
    const double beta = nonlinear ? beta_of(p) : 0.0;

    PodState st = make_pod_state(p, initial, nonlinear);
    std::vector<double> ch(N + 1);
    for (std::size_t j = 0; j <= N; ++j)
        ch[j] = local_coeffs(p, st.x_grid[j]).c_h_star;

    struct Probe {
        pde::ProbeWeights pw;
        double ch_star;
        std::vector<double> T, noise;
    };
    std::vector<Probe> probes;
    probes.reserve(probe_xs.size());
    for (double x : probe_xs)
        probes.push_back({pde::probe_weights(x, N),
                          local_coeffs(p, x).c_h_star,
                          {},
                          {}});
    const auto record = [&]() {
        for (auto& pr : probes) {
            const double T = pde::probe_value(st.T_e_Q, pr.pw);
            const double H = pde::probe_value(st.h_c_Q, pr.pw) +
                             pde::probe_value(st.h_n_Q, pr.pw) / one5;
            pr.T.push_back(T);
            pr.noise.push_back(pr.ch_star * (1.0 - beta * T * T) * H);
        }
    };
    record();

    const long long n_steps = std::llround((t_end - initial.t) / dt);
    std::vector<double> hc_half(N + 1), hn_half(N + 1), hc_next(N + 1),
        hn_next(N + 1), hc_q1, hn_q1, hc_q3, hn_q3, T_next(N + 1);
    bool halved = false;

    for (long long n = 0; n < n_steps; ++n) {
        waves.fractional(0.5, st.h_c_Q, st.h_n_Q, hc_half, hn_half);
        waves.advance(st.h_c_Q, st.h_n_Q, hc_next, hn_next);
        bool quarters_ready = false;
        for (std::size_t j = 0; j <= N; ++j) {
            const double H0 = st.h_c_Q[j] + st.h_n_Q[j] / one5;
            const double Hh = hc_half[j] + hn_half[j] / one5;
            const double H1 = hc_next[j] + hn_next[j] / one5;
            const double T0v = st.T_e_Q[j];
            double Tc = rk4_gated(T0v, ch[j], beta, dt, H0, Hh, H1);
            if (beta > 0.0) {
                const double g0 = 1.0 - beta * T0v * T0v;
                const double g1 = 1.0 - beta * Tc * Tc;
                if (g0 * g1 < 0.0) {
                    // gate sign change inside the step: redo with two half
                    // steps on quarter-point wave stages
                    if (!quarters_ready) {
                        hc_q1.resize(N + 1);
                        hn_q1.resize(N + 1);
                        hc_q3.resize(N + 1);
                        hn_q3.resize(N + 1);
                        waves.fractional(0.25, st.h_c_Q, st.h_n_Q, hc_q1,
                                         hn_q1);
                        waves.fractional(0.75, st.h_c_Q, st.h_n_Q, hc_q3,
                                         hn_q3);
                        quarters_ready = true;
                    }
                    const double Hq1 = hc_q1[j] + hn_q1[j] / one5;
                    const double Hq3 = hc_q3[j] + hn_q3[j] / one5;
                    const double Tm = rk4_gated(T0v, ch[j], beta, 0.5 * dt,
                                                H0, Hq1, Hh);
                    Tc = rk4_gated(Tm, ch[j], beta, 0.5 * dt, Hh, Hq3, H1);
                    halved = true;
                }
            }
            if (!(std::abs(Tc) <= 1e8))
                throw std::runtime_error("pod step diverged at t = " +
                                         std::to_string(st.t + dt));
            T_next[j] = Tc;
        }
        st.T_e_Q.swap(T_next);
        st.h_c_Q.swap(hc_next);
        st.h_n_Q.swap(hn_next);
        st.t = initial.t + double(n + 1) * dt;
        record();
    }

    for (std::size_t j = 0; j <= N; ++j)
        st.branch[j] = classify(beta, st.T_e_Q[j]);

    PodRunResult out;
    out.halved = halved;
    for (auto& pr : probes) {
        // dT/dt equals the gated source along the run, so the temperature
        // record carries the noise as its derivative channel
        out.T_probes.push_back(dde::Trajectory::from_samples(
            initial.t, dt, pr.T, pr.noise,
            dde::History::constant(pr.T.front())));
        std::vector<double> nd(pr.noise.size());
        const std::size_t m = pr.noise.size() - 1;
        if (m >= 1) {
            nd[0] = (pr.noise[1] - pr.noise[0]) / dt;
            nd[m] = (pr.noise[m] - pr.noise[m - 1]) / dt;
            for (std::size_t k = 1; k < m; ++k)
                nd[k] = (pr.noise[k + 1] - pr.noise[k - 1]) / (2.0 * dt);
        }
        out.noise_probes.push_back(dde::Trajectory::from_samples(
            initial.t, dt, pr.noise, nd,
            dde::History::constant(pr.noise.front())));
    }
    out.final_state = std::move(st);
    return out;
}

double closed_form_TeQ(const PhysicalParams& p, const pde::PdeState& initial,
                       double x, double t, bool as_printed, bool nonlinear) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("closed_form_TeQ: x outside [0,1]");
    if (!(t >= 0.0)) throw std::domain_error("closed_form_TeQ: t < 0");
    const double beta = nonlinear ? beta_of(p) : 0.0;
    const double T0 = grid_interp(initial.T_e, x);
    const double A = source_integral(p, initial, x, t);
    if (beta == 0.0) return T0 + A;
    const double sb = std::sqrt(beta);
    const double z = sb * T0;
    if (!(z * z < 1.0))
        throw std::domain_error(
            "closed_form_TeQ: beta T0^2 >= 1, outside the bounded branch; "
            "use the coth (or constant) closed form");
    const double arg = std::atanh(z) + sb * A;
    const double th = std::tanh(arg);
    return (as_printed ? th * th : th) / sb;
}

double closed_form_TeQ_coth(const PhysicalParams& p,
                            const pde::PdeState& initial, double x,
                            double t) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("closed_form_TeQ_coth: x outside [0,1]");
    if (!(t >= 0.0)) throw std::domain_error("closed_form_TeQ_coth: t < 0");
    const double beta = beta_of(p);
    const double T0 = grid_interp(initial.T_e, x);
    const double sb = std::sqrt(beta);
    const double z = sb * T0;
    if (!(z * z > 1.0))
        throw std::domain_error(
            "closed_form_TeQ_coth: beta T0^2 <= 1, not on the unbounded "
            "branch");
    const double A = source_integral(p, initial, x, t);
    const double arg = std::atanh(1.0 / z) + sb * A;  // arcoth(z) + area
    return 1.0 / (std::tanh(arg) * sb);
}

double pod_noise(const PhysicalParams& p, const PodState& state, double x,
                 bool nonlinear) {
    const double beta = nonlinear ? beta_of(p) : 0.0;
    const double one5 = 1.0 + p.y_n * p.y_n;
    const auto pw = pde::probe_weights(x, state.n_cells());
    const double T = pde::probe_value(state.T_e_Q, pw);
    const double H = pde::probe_value(state.h_c_Q, pw) +
                     pde::probe_value(state.h_n_Q, pw) / one5;
    return local_coeffs(p, x).c_h_star * (1.0 - beta * T * T) * H;
}

FdKernel kernel_fd(const PhysicalParams& p, const pde::WindForcing& forcing,
                   double T_hat, double t_end, std::size_t N,
                   double epsilon_fd, bool nonlinear) {
    if (!(epsilon_fd > 0.0))
        throw std::invalid_argument("kernel_fd: epsilon_fd must be > 0");
    const double yn2 = p.y_n * p.y_n;
    const double one5 = 1.0 + yn2;
    const double coef_c = p.mu * (1.0 - p.theta / one5);
    const double coef_n = -p.mu * p.theta / yn2;
    const double dx = 1.0 / double(N);

    std::vector<double> Rc(N + 1), Rn(N + 1);
    double nrm2 = 0.0;
    for (std::size_t j = 0; j <= N; ++j) {
        const double g = forcing(double(j) * dx);
        Rc[j] = coef_c * g * T_hat;
        Rn[j] = coef_n * g * T_hat;
        nrm2 += (Rc[j] * Rc[j] + Rn[j] * Rn[j]) * dx;
    }
    const double norm = std::sqrt(nrm2);
    if (norm == 0.0)
        throw std::invalid_argument("kernel_fd: dead injection direction");

    const auto pw = pde::probe_weights(p.x_E, N);
    FdKernel out;
    out.probe.epsilon_fd = epsilon_fd;
    out.probe.direction_norm = norm;

    for (int half = 0; half < 2; ++half) {
        const double eps = half == 0 ? epsilon_fd : 0.5 * epsilon_fd;
        pde::PdeState init = pde::initial_state(p, N, 0.0);
        for (std::size_t j = 0; j <= N; ++j) {
            init.h_c[j] = eps * Rc[j] / norm;
            init.h_n[j] = eps * Rn[j] / norm;
        }
        init.T_e[pw.j] = T_hat;
        const auto rr =
            pod_integrate(p, init, t_end, dx, {p.x_E}, nonlinear);
        const auto& vals = rr.noise_probes[0].values();
        auto& K = half == 0 ? out.K_raw : out.K_half;
        K.resize(vals.size());
        for (std::size_t k = 0; k < vals.size(); ++k)
            K[k] = norm * vals[k] / eps;
        for (const GateBranch b : rr.final_state.branch)
            if (b != GateBranch::tanh) out.left_tanh_branch = true;
    }

    out.lags.resize(out.K_raw.size());
    out.K_rich.resize(out.K_raw.size());
    for (std::size_t k = 0; k < out.K_raw.size(); ++k) {
        out.lags[k] = double(k) * dx;
        out.K_rich[k] = 2.0 * out.K_half[k] - out.K_raw[k];
    }
    return out;
}

double linear_reference(double tau, const pde::WindForcing& forcing,
                        const PhysicalParams& p) {
    const double eps0 = p.a_M * p.L / p.c0;
    const double leg = 1.0 - p.x_E;
    return std::exp(eps0 * leg) *
           kernel::kernel_eval(tau + leg, forcing, p);
}

}  // namespace enso::pod
