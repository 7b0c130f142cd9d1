#include <enso/pde.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace enso::pde {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double eps0_of(const PhysicalParams& p) { return p.a_M * p.L / p.c0; }

double beta_of(const PhysicalParams& p) {
    const double r = p.c_se / (p.T0 - p.Ts0);
    return r * r;
}

// Lagrange weights for the 4-point stencil `offsets` evaluated at s.
void lagrange4(const double offsets[4], double s, double w[4]) {
    for (int i = 0; i < 4; ++i) {
        double v = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m != i) v *= (s - offsets[m]) / (offsets[i] - offsets[m]);
        }
        w[i] = v;
    }
}

}  // namespace

WindForcing WindForcing::delta_approx(double x_w, double A0, double sigma_w) {
    if (!(sigma_w > 0.0)) throw std::invalid_argument("sigma_w must be > 0");
    WindForcing f;
    f.kind = Kind::DeltaApprox;
    f.x_w = x_w;
    f.A0 = A0;
    f.sigma_w = sigma_w;
    return f;
}

WindForcing WindForcing::tabulated(std::vector<double> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("tabulated forcing needs >= 2 samples");
    WindForcing f;
    f.kind = Kind::Tabulated;
    f.table = std::move(samples);
    return f;
}

double WindForcing::operator()(double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    if (kind == Kind::DeltaApprox) {
        const double u = (x - x_w) / sigma_w;
        return A0 / (sigma_w * kSqrt2Pi) * std::exp(-0.5 * u * u);
    }
    const double m = double(table.size() - 1);
    const double u = x * m;
    std::size_t i = std::min(std::size_t(u), table.size() - 2);
    const double fr = u - double(i);
    return (1.0 - fr) * table[i] + fr * table[i + 1];
}

double WindForcing::mass(double a, double b) const {
    if (b < a) return -mass(b, a);
    if (kind == Kind::DeltaApprox) {
        const double za = (a - x_w) / (sigma_w * kSqrt2);
        const double zb = (b - x_w) / (sigma_w * kSqrt2);
        return A0 * 0.5 * (std::erf(zb) - std::erf(za));
    }
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (b <= a) return 0.0;
    const double m = double(table.size() - 1);
    const double dx = 1.0 / m;
    // integral of the linear interpolant from cell start x_i to x_i + r*dx
    auto partial = [&](std::size_t i, double r) {
        return dx * r * (table[i] + 0.5 * r * (table[i + 1] - table[i]));
    };
    const std::size_t ia = std::min(std::size_t(a * m), table.size() - 2);
    const std::size_t ib = std::min(std::size_t(b * m), table.size() - 2);
    const double ra = a * m - double(ia);
    const double rb = b * m - double(ib);
    if (ia == ib) return partial(ia, rb) - partial(ia, ra);
    double s = partial(ia, 1.0) - partial(ia, ra);
    for (std::size_t i = ia + 1; i < ib; ++i) s += partial(i, 1.0);
    s += partial(ib, rb);
    return s;
}

PdeState initial_state(const PhysicalParams& p, std::size_t N,
                       double Te_amp, double Te_width) {
    if (N < 4) throw std::invalid_argument("grid needs N >= 4 cells");
    PdeState s;
    s.x_grid.resize(N + 1);
    s.h_c.assign(N + 1, 0.0);
    s.h_n.assign(N + 1, 0.0);
    s.T_e.resize(N + 1);
    const double dx = 1.0 / double(N);
    for (std::size_t j = 0; j <= N; ++j) {
        const double x = double(j) * dx;
        s.x_grid[j] = x;
        const double u = (x - p.x_E) / Te_width;
        s.T_e[j] = Te_amp * std::exp(-0.5 * u * u);
    }
    return s;
}

ProbeWeights probe_weights(double x, std::size_t N) {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("probe position outside [0,1]");
    const double u = x * double(N);
    ProbeWeights pw;
    pw.j = std::min(std::size_t(u), N);
    pw.w = u - double(pw.j);
    if (pw.w > 0.0 && pw.j >= N) {  // guard against rounding at x = 1
        pw.j = N - 1;
        pw.w = 1.0;
    }
    return pw;
}

double probe_value(const std::vector<double>& field, const ProbeWeights& pw) {
    if (pw.w == 0.0) return field[pw.j];
    return (1.0 - pw.w) * field[pw.j] + pw.w * field[pw.j + 1];
}

WaveStep::WaveStep(const PhysicalParams& p, std::size_t N) : N_(N) {
    p.validate();
    if (N < 4) throw std::invalid_argument("WaveStep needs N >= 4 cells");
    const double one5 = 1.0 + p.y_n * p.y_n;
    if (std::abs(one5 - p.r_E) < 1e-12)
        throw std::domain_error("eastern boundary condition is singular");
    dx_ = 1.0 / double(N);
    nu_ = 1.0 / (p.y_n * p.y_n);
    eps0_ = eps0_of(p);
    damp_ = std::exp(-eps0_ * dx_);
    bcW_ = p.r_W - 1.0 / one5;
    bcE_ = p.r_E * one5 / (one5 - p.r_E);
    const double offsets[4] = {-1.0, 0.0, 1.0, 2.0};
    lagrange4(offsets, nu_, w_);
}

void WaveStep::interior(const std::vector<double>& h_c,
                        const std::vector<double>& h_n,
                        std::vector<double>& h_c_out,
                        std::vector<double>& h_n_out) const {
    const std::size_t N = N_;
    h_c_out.resize(N + 1);
    h_n_out.resize(N + 1);
    for (std::size_t j = 1; j <= N; ++j) h_c_out[j] = damp_ * h_c[j - 1];
    for (std::size_t j = 1; j + 1 < N; ++j) {
        h_n_out[j] = damp_ * (w_[0] * h_n[j - 1] + w_[1] * h_n[j] +
                              w_[2] * h_n[j + 1] + w_[3] * h_n[j + 2]);
    }
    h_n_out[0] = damp_ * ((1.0 - nu_) * h_n[0] + nu_ * h_n[1]);
    h_n_out[N - 1] = damp_ * ((1.0 - nu_) * h_n[N - 1] + nu_ * h_n[N]);
}

void WaveStep::boundaries(std::vector<double>& h_c,
                          std::vector<double>& h_n) const {
    h_n[N_] = bcE_ * h_c[N_];
    h_c[0] = bcW_ * h_n[0];
}

void WaveStep::advance(const std::vector<double>& h_c,
                       const std::vector<double>& h_n,
                       std::vector<double>& h_c_out,
                       std::vector<double>& h_n_out) const {
    interior(h_c, h_n, h_c_out, h_n_out);
    boundaries(h_c_out, h_n_out);
}

void WaveStep::fractional(double c, const std::vector<double>& h_c,
                          const std::vector<double>& h_n,
                          std::vector<double>& h_c_out,
                          std::vector<double>& h_n_out) const {
    const std::size_t N = N_;
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("fraction must lie in (0,1)");
    h_c_out.resize(N + 1);
    h_n_out.resize(N + 1);
    const double dampc = std::exp(-eps0_ * c * dx_);
    double w[4];
    // fast strip: foot x_j - c dx, one cell upstream
    const double off_int[4] = {-2.0, -1.0, 0.0, 1.0};
    lagrange4(off_int, -c, w);
    for (std::size_t j = 2; j < N; ++j) {
        h_c_out[j] = dampc * (w[0] * h_c[j - 2] + w[1] * h_c[j - 1] +
                              w[2] * h_c[j] + w[3] * h_c[j + 1]);
    }
    const double off_lo[4] = {-1.0, 0.0, 1.0, 2.0};
    lagrange4(off_lo, -c, w);
    h_c_out[1] =
        dampc * (w[0] * h_c[0] + w[1] * h_c[1] + w[2] * h_c[2] + w[3] * h_c[3]);
    const double off_hi[4] = {-3.0, -2.0, -1.0, 0.0};
    lagrange4(off_hi, -c, w);
    h_c_out[N] = dampc * (w[0] * h_c[N - 3] + w[1] * h_c[N - 2] +
                          w[2] * h_c[N - 1] + w[3] * h_c[N]);
    // slow strip: foot x_j + c nu dx, one cell downstream
    const double s = c * nu_;
    lagrange4(off_lo, s, w);
    for (std::size_t j = 1; j + 1 < N; ++j) {
        h_n_out[j] = dampc * (w[0] * h_n[j - 1] + w[1] * h_n[j] +
                              w[2] * h_n[j + 1] + w[3] * h_n[j + 2]);
    }
    const double off_first[4] = {0.0, 1.0, 2.0, 3.0};
    lagrange4(off_first, s, w);
    h_n_out[0] =
        dampc * (w[0] * h_n[0] + w[1] * h_n[1] + w[2] * h_n[2] + w[3] * h_n[3]);
    const double off_last[4] = {-2.0, -1.0, 0.0, 1.0};
    lagrange4(off_last, s, w);
    h_n_out[N - 1] = dampc * (w[0] * h_n[N - 3] + w[1] * h_n[N - 2] +
                              w[2] * h_n[N - 1] + w[3] * h_n[N]);
    h_n_out[N] = bcE_ * h_c_out[N];
    h_c_out[0] = bcW_ * h_n_out[0];
}

Stepper::Stepper(const PhysicalParams& p, const WindForcing& forcing,
                 std::size_t N, bool nonlinear)
    : waves_(p, N), N_(N), nonlinear_(nonlinear) {
    one5_ = 1.0 + p.y_n * p.y_n;
    beta_ = beta_of(p);
    dt_ = waves_.dt();
    pw_E_ = probe_weights(p.x_E, N);
    cT_.resize(N + 1);
    ch_.resize(N + 1);
    edt_.resize(N + 1);
    const double dx = dt_;
    for (std::size_t j = 0; j <= N; ++j) {
        const LocalCoeffs lc = local_coeffs(p, double(j) * dx);
        cT_[j] = lc.c_T;
        ch_[j] = lc.c_h_star;
        edt_[j] = std::exp(-cT_[j] * dt_);
    }
    // characteristic-segment source masses, applied with half-step damping
    const double yn2 = p.y_n * p.y_n;
    const double coef_c = p.mu * (1.0 - p.theta / one5_);
    const double coef_n = -p.mu * (p.theta / yn2);
    const double damp_half = std::exp(-eps0_of(p) * dt_ / 2.0);
    src_c_.assign(N + 1, 0.0);
    src_n_.assign(N + 1, 0.0);
    has_source_ = false;
    for (std::size_t j = 1; j <= N; ++j) {
        const double x = double(j) * dx;
        src_c_[j] = damp_half * coef_c * forcing.mass(x - dt_, x);
        if (src_c_[j] != 0.0) has_source_ = true;
    }
    for (std::size_t j = 0; j < N; ++j) {
        const double x = double(j) * dx;
        src_n_[j] = damp_half * coef_n * yn2 * forcing.mass(x, x + dt_ / yn2);
        if (src_n_[j] != 0.0) has_source_ = true;
    }
}

double Stepper::gate(double T) const {
    return nonlinear_ ? 1.0 - beta_ * T * T : 1.0;
}

double Stepper::dTe_dt(const PdeState& st, std::size_t j) const {
    const double src =
        ch_[j] * gate(st.T_e[j]) * (st.h_c[j] + st.h_n[j] / one5_);
    return -cT_[j] * st.T_e[j] + src;
}

void Stepper::step(PdeState& st) {
    const std::size_t N = N_;
    if (st.x_grid.size() != N + 1)
        throw std::invalid_argument("state grid does not match stepper");
    s_now_.resize(N + 1);
    Te_new_.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        s_now_[j] =
            ch_[j] * gate(st.T_e[j]) * (st.h_c[j] + st.h_n[j] / one5_);
    }
    waves_.interior(st.h_c, st.h_n, hc_new_, hn_new_);
    if (has_source_) {
        // readout factor at the step midpoint: exponential-Euler predictor
        const std::size_t jE = pw_E_.j;
        const double wE = pw_E_.w;
        const double TeE = probe_value(st.T_e, pw_E_);
        const double Tp1 = edt_[jE] * (st.T_e[jE] + dt_ * s_now_[jE]);
        const double Tp2 = edt_[jE + 1] * (st.T_e[jE + 1] + dt_ * s_now_[jE + 1]);
        const double TeE_src = 0.5 * (TeE + (1.0 - wE) * Tp1 + wE * Tp2);
        for (std::size_t j = 1; j <= N; ++j) hc_new_[j] += src_c_[j] * TeE_src;
        for (std::size_t j = 0; j < N; ++j) hn_new_[j] += src_n_[j] * TeE_src;
    }
    waves_.boundaries(hc_new_, hn_new_);
    // exponential trapezoid for T_e: exact decay, 2nd-order source
    for (std::size_t j = 0; j <= N; ++j) {
        const double T_pred = edt_[j] * (st.T_e[j] + dt_ * s_now_[j]);
        const double s_new =
            ch_[j] * gate(T_pred) * (hc_new_[j] + hn_new_[j] / one5_);
        Te_new_[j] =
            edt_[j] * st.T_e[j] + 0.5 * dt_ * (edt_[j] * s_now_[j] + s_new);
    }
    st.h_c.swap(hc_new_);
    st.h_n.swap(hn_new_);
    st.T_e.swap(Te_new_);
    st.t += dt_;
    const double sentinel_T = probe_value(st.T_e, pw_E_);
    const double sentinel_h = st.h_c[N];
    if (!(std::abs(sentinel_T) <= 1e8) || !std::isfinite(sentinel_h)) {
        throw std::runtime_error("pde step diverged at t = " +
                                 std::to_string(st.t));
    }
}

void Stepper::check_finite(const PdeState& st) const {
    for (std::size_t j = 0; j <= N_; ++j) {
        if (!std::isfinite(st.h_c[j]) || !std::isfinite(st.h_n[j]) ||
            !std::isfinite(st.T_e[j])) {
            throw std::runtime_error("non-finite field value at t = " +
                                     std::to_string(st.t));
        }
    }
}

PdeState step(const PdeState& state, const WindForcing& forcing,
              const PhysicalParams& p, double dt, bool nonlinear) {
    const std::size_t N = state.n_cells();
    const double dx = 1.0 / double(N);
    if (!(std::abs(dt - dx) <= 1e-12 * dx))
        throw std::invalid_argument(
            "time step must equal the grid spacing (unit CFL lock)");
    Stepper s(p, forcing, N, nonlinear);
    PdeState out = state;
    s.step(out);
    return out;
}

RunResult run(const PhysicalParams& p, const WindForcing& forcing,
              PdeState initial, double t_end,
              const std::vector<double>& probe_xs, bool nonlinear) {
    const std::size_t N = initial.n_cells();
    Stepper stepper(p, forcing, N, nonlinear);
    const double dt = stepper.dt();
    if (t_end < 0.0) throw std::invalid_argument("t_end must be >= 0");
    const std::size_t n_steps = std::size_t(std::llround(t_end / dt));
    std::vector<ProbeWeights> pws;
    pws.reserve(probe_xs.size());
    for (double x : probe_xs) pws.push_back(probe_weights(x, N));
    std::vector<std::vector<double>> vals(pws.size()), ders(pws.size());
    auto record = [&](const PdeState& st) {
        for (std::size_t i = 0; i < pws.size(); ++i) {
            const ProbeWeights& pw = pws[i];
            vals[i].push_back(probe_value(st.T_e, pw));
            double f = stepper.dTe_dt(st, pw.j);
            if (pw.w != 0.0) {
                f = (1.0 - pw.w) * f + pw.w * stepper.dTe_dt(st, pw.j + 1);
            }
            ders[i].push_back(f);
        }
    };
    record(initial);
    for (std::size_t n = 0; n < n_steps; ++n) {
        stepper.step(initial);
        record(initial);
    }
    stepper.check_finite(initial);
    RunResult res;
    res.probes.reserve(pws.size());
    for (std::size_t i = 0; i < pws.size(); ++i) {
        const double v0 = vals[i].front();
        res.probes.push_back(dde::Trajectory::from_samples(
            0.0, dt, std::move(vals[i]), std::move(ders[i]),
            dde::History::constant(v0)));
    }
    res.final_state = std::move(initial);
    return res;
}

EigenMode eigenmode(int k, const PhysicalParams& p) {
    p.validate();
    const double one5 = 1.0 + p.y_n * p.y_n;
    const double num = p.r_E * p.r_W * one5 - p.r_E;
    const double den = one5 - p.r_E;
    if (p.r_E == 0.0 || num == 0.0) {
        throw std::domain_error(
            "trivial homogeneous dynamics: fields vanish identically after "
            "t = 1 + y_n^2, no mode expansion exists");
    }
    if (std::abs(den) < 1e-12)
        throw std::domain_error("eastern boundary condition is singular");
    const std::complex<double> z(num / den, 0.0);
    EigenMode m;
    m.k = k;
    const double two_pi = 6.283185307179586;
    m.sigma = -eps0_of(p) +
              (std::log(z) + std::complex<double>(0.0, two_pi * k)) / one5;
    m.H_n = 1.0;
    m.H_c = (p.r_W - 1.0 / one5) * m.H_n;
    return m;
}

PdeState eigenmode_state(const EigenMode& m, const PhysicalParams& p,
                         std::size_t N, double t) {
    PdeState s = initial_state(p, N, 0.0, 1.0);
    const double yn2 = p.y_n * p.y_n;
    const std::complex<double> rate = m.sigma + eps0_of(p);
    const std::complex<double> amp = std::exp(m.sigma * t);
    for (std::size_t j = 0; j <= N; ++j) {
        const double x = s.x_grid[j];
        s.h_c[j] = (m.H_c * amp * std::exp(-rate * x)).real();
        s.h_n[j] = (m.H_n * amp * std::exp(rate * (yn2 * x))).real();
    }
    s.t = t;
    return s;
}

dde::DelayModel matched_delay_model(const PhysicalParams& p, bool nonlinear) {
    p.validate();
    if (p.r_E != 0.0)
        throw std::invalid_argument(
            "exact two-delay reduction requires r_E = 0 (no eastern "
            "reflection)");
    const double yn2 = p.y_n * p.y_n;
    const double one5 = 1.0 + yn2;
    const double eps0 = eps0_of(p);
    const LocalCoeffs lc = local_coeffs(p, p.x_E);
    const double A_rW = p.r_W * one5 - 1.0;
    dde::DelayModel m;
    m.kind = nonlinear ? dde::ModelKind::VoCTwoDelay
                       : dde::ModelKind::LinearTwoDelay;
    m.d_short = p.x_E - p.x_w;
    m.d = p.x_E + yn2 * p.x_w;
    m.c_T = lc.c_T;
    m.c_S = p.mu * p.A0 * (1.0 - p.theta / one5) * lc.c_h_star *
            std::exp(-eps0 * m.d_short);
    m.c_L = p.mu * p.A0 * p.theta * (A_rW / one5) * lc.c_h_star *
            std::exp(-eps0 * m.d);
    m.beta = nonlinear ? beta_of(p) : 0.0;
    return m;
}

ReductionReport validate_reduction(const PhysicalParams& p, std::size_t N,
                                   double sigma_w, double t_end,
                                   bool nonlinear, double Te_amp) {
    const WindForcing forcing = WindForcing::delta_approx(p.x_w, p.A0, sigma_w);
    PdeState init = initial_state(p, N, Te_amp);
    RunResult rr = run(p, forcing, std::move(init), t_end, {p.x_E}, nonlinear);
    const dde::Trajectory& probe = rr.probes[0];

    const dde::DelayModel model = matched_delay_model(p, nonlinear);
    const double t0 = model.d;
    if (t_end <= t0 + model.d_short)
        throw std::invalid_argument("t_end too short for the long delay");
    // history h(s) = probe(t0 + s) on s in [-d, 0], near the PDE step grid
    const std::size_t n_hist =
        std::size_t(std::llround(std::ceil(t0 / probe.dt())));
    std::vector<double> ht(n_hist + 1), hv(n_hist + 1);
    for (std::size_t i = 0; i <= n_hist; ++i) {
        ht[i] = i == n_hist ? 0.0 : t0 * (double(i) / double(n_hist) - 1.0);
        hv[i] = probe(t0 + ht[i]);
    }
    const dde::History hist = dde::History::sampled(std::move(ht),
                                                    std::move(hv));
    const dde::Trajectory sol =
        dde::integrate(model, hist, t_end - t0, model.d_short / 64.0);

    ReductionReport rep;
    rep.window_lo = t0;
    rep.window_hi = t_end;
    rep.dde_blew_up = sol.blew_up();
    double max_diff = 0.0, max_pde = 0.0;
    for (std::size_t n = 0; n < sol.n_nodes(); ++n) {
        const double t = t0 + sol.node_time(n);
        if (t > t_end + 1e-12) break;
        const double a = probe(t);
        const double b = sol.values()[n];
        max_diff = std::max(max_diff, std::abs(a - b));
        max_pde = std::max(max_pde, std::abs(a));
    }
    rep.max_abs_pde = max_pde;
    rep.rel_linf = max_pde > 0.0 ? max_diff / max_pde : 0.0;
    return rep;
}

}  // namespace enso::pde
