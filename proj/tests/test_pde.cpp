#include <doctest.h>

#include <enso/dde.hpp>
#include <enso/params.hpp>
#include <enso/pde.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace enso;
using pde::WindForcing;

namespace {

// independently derived reference values (high-precision side computation)
constexpr double kCT_E = 1.3272994520157771;      // c_T(0.9) at defaults
constexpr double kCS_true = 2.6252225189574167;   // fast-branch mass
constexpr double kCL_true = 5.8783608159328071;   // slow-branch mass
constexpr double kGrowth = 1.2724515229408765;    // c_S* - c_T(x_E)
constexpr double kSigma0 = -0.39831547935525484;  // mode rate at r_E = 0.5

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("pde: gaussian forcing mass is exact and concentrates A0") {
    const WindForcing f = WindForcing::delta_approx(0.6, 0.2, 0.01);
    CHECK(f.mass(0.0, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
    // half-splitting is additive to rounding
    const double whole = f.mass(0.0, 1.0);
    CHECK(std::abs(f.mass(0.0, 0.5) + f.mass(0.5, 1.0) - whole) < 1e-16);
    // delta_approx integrates to A0 within 1e-6 whenever sigma_w <= 0.02
    for (double sw : {0.02, 0.01, 0.005}) {
        const WindForcing g = WindForcing::delta_approx(0.6, 0.2, sw);
        CHECK(std::abs(g.mass(0.0, 1.0) - 0.2) < 1e-6);
    }
    // peak density and support convention
    CHECK(f(0.6) ==
          doctest::Approx(0.2 / (0.01 * std::sqrt(2.0 * M_PI))).epsilon(1e-14));
    CHECK(f(-0.1) == 0.0);
    CHECK(f(1.1) == 0.0);
    // orientation: reversed bounds flip the sign
    CHECK(f.mass(0.7, 0.5) == doctest::Approx(-f.mass(0.5, 0.7)));
}

TEST_CASE("pde: tabulated forcing interpolates linearly with exact mass") {
    const WindForcing f = WindForcing::tabulated({0.0, 1.0, 0.0});
    CHECK(f(0.25) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.mass(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.mass(0.25, 0.75) == doctest::Approx(0.375).epsilon(1e-14));
    // clipping outside the table domain
    CHECK(f.mass(-1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f(1.5) == 0.0);
    CHECK_THROWS_AS(WindForcing::tabulated({1.0}), std::invalid_argument);
}

TEST_CASE("pde: probe weights are node-exact on nodes") {
    const auto pw = pde::probe_weights(0.9, 10);
    CHECK(pw.j == 9);
    CHECK(pw.w == 0.0);
    std::vector<double> field(11);
    for (std::size_t j = 0; j <= 10; ++j) field[j] = std::sin(double(j));
    // on-node readout returns the stored value bitwise
    CHECK(pde::probe_value(field, pw) == field[9]);
    // interior interpolation
    const auto pw2 = pde::probe_weights(0.45, 10);
    CHECK(pw2.j == 4);
    CHECK(pde::probe_value(field, pw2) ==
          doctest::Approx(0.5 * (field[4] + field[5])).epsilon(1e-15));
    // endpoints and domain errors
    CHECK(pde::probe_value(field, pde::probe_weights(1.0, 10)) == field[10]);
    CHECK_THROWS_AS(pde::probe_weights(-0.01, 10), std::domain_error);
    CHECK_THROWS_AS(pde::probe_weights(1.01, 10), std::domain_error);
    // constant field probes to the same constant anywhere
    std::vector<double> cf(11, 3.25);
    CHECK(pde::probe_value(cf, pde::probe_weights(0.3141, 10)) == 3.25);
}

TEST_CASE("pde: mode rates, spacing, and amplitude consistency") {
    PhysicalParams p;
    p.r_E = 0.5;
    const auto m0 = pde::eigenmode(0, p);
    CHECK(m0.sigma.real() == doctest::Approx(kSigma0).epsilon(1e-14));
    CHECK(m0.sigma.imag() == doctest::Approx(0.0));
    CHECK(m0.H_c.real() == doctest::Approx(0.4).epsilon(1e-14));
    // imaginary spacing between modes is 2 pi k / (1 + y_n^2)
    const auto m3 = pde::eigenmode(3, p);
    CHECK(m3.sigma.imag() - m0.sigma.imag() ==
          doctest::Approx(6.0 * M_PI / 5.0).epsilon(1e-14));
    CHECK(m3.sigma.real() == doctest::Approx(m0.sigma.real()).epsilon(1e-14));
    // unit log argument: the real rate reduces to the pure damping -eps0
    PhysicalParams q;
    q.r_E = 1.0 / q.r_W;
    const auto mq = pde::eigenmode(0, q);
    CHECK(mq.sigma.real() == doctest::Approx(-0.0975).epsilon(1e-12));
    // no mode expansion exists at r_E = 0
    PhysicalParams r;
    CHECK_THROWS_AS(pde::eigenmode(0, r), std::domain_error);
}

TEST_CASE("pde: mode fields decay at the analytic rate under mu = 0") {
    PhysicalParams p;
    p.r_E = 0.5;
    p.mu = 0.0;
    const std::size_t N = 2048;
    const auto mode = pde::eigenmode(0, p);
    pde::PdeState st = pde::eigenmode_state(mode, p, N);
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    pde::Stepper stepper(p, f, N, false);
    for (std::size_t n = 0; n < N; ++n) stepper.step(st);  // one crossing
    const pde::PdeState ref = pde::eigenmode_state(mode, p, N, 1.0);
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j <= N; ++j) {
        err = std::max(err, std::abs(st.h_c[j] - ref.h_c[j]));
        err = std::max(err, std::abs(st.h_n[j] - ref.h_n[j]));
        scale = std::max({scale, std::abs(ref.h_c[j]), std::abs(ref.h_n[j])});
    }
    CHECK(scale > 0.1);
    CHECK(err / scale < 1e-3);
}

TEST_CASE("pde: homogeneous fields vanish in finite time at r_E = 0") {
    PhysicalParams p;
    p.mu = 0.0;  // homogeneous wave dynamics
    const std::size_t N = 512;
    pde::PdeState st = pde::initial_state(p, N, 0.1);
    for (std::size_t j = 0; j <= N; ++j) {
        const double x = st.x_grid[j];
        st.h_c[j] = std::sin(2.0 * M_PI * x) + 0.3;
        st.h_n[j] = std::cos(3.0 * x);
    }
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    pde::Stepper stepper(p, f, N, false);
    const double scale0 = std::max(max_abs(st.h_c), max_abs(st.h_n));
    // Horizon: slow transit y_n^2, reflection, fast transit 1; the last
    // packet sits on the eastern boundary node at t = 5 exactly, so give
    // it one more crossing to drain.
    const std::size_t n_steps = 6 * N;
    for (std::size_t n = 0; n < n_steps; ++n) stepper.step(st);
    CHECK(max_abs(st.h_c) < 1e-8 * scale0);
    CHECK(max_abs(st.h_n) < 1e-8 * scale0);
    // and they stay extinct
    for (std::size_t n = 0; n < N; ++n) stepper.step(st);
    CHECK(max_abs(st.h_c) < 1e-8 * scale0);
}

TEST_CASE("pde: zero data with zero readout stays exactly zero") {
    PhysicalParams p;
    const std::size_t N = 64;
    pde::PdeState st = pde::initial_state(p, N, 0.0);
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    pde::Stepper stepper(p, f, N, true);
    for (int n = 0; n < 200; ++n) stepper.step(st);
    for (std::size_t j = 0; j <= N; ++j) {
        CHECK(st.h_c[j] == 0.0);
        CHECK(st.h_n[j] == 0.0);
        CHECK(st.T_e[j] == 0.0);
    }
}

TEST_CASE("pde: fast-strip advection is exact and damping multiplicative") {
    // undamped, unforced, fully absorbing: a pulse translates bit-exactly
    PhysicalParams p;
    p.a_M = 0.0;  // eps0 = 0
    p.mu = 0.0;
    p.r_W = 0.0;
    p.r_E = 0.0;
    const std::size_t N = 512;
    pde::PdeState st = pde::initial_state(p, N, 0.0);
    st.h_c[100] = 1.5;
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    pde::Stepper stepper(p, f, N, false);
    for (int n = 0; n < 200; ++n) stepper.step(st);
    CHECK(st.h_c[300] == 1.5);
    double total = 0.0;
    for (double v : st.h_c) total += std::abs(v);
    CHECK(total == 1.5);

    // with damping on, the max decays by exactly e^{-eps0 dx} per step
    PhysicalParams q;
    q.mu = 0.0;
    pde::PdeState st2 = pde::initial_state(q, N, 0.0);
    st2.h_c[100] = 1.0;
    pde::Stepper stepper2(q, f, N, false);
    const double damp = stepper2.waves().damp();
    double expect = 1.0;
    for (int n = 0; n < 100; ++n) {
        stepper2.step(st2);
        expect = damp * expect;
        CHECK(max_abs(st2.h_c) == expect);
    }
}

TEST_CASE("pde: western reflection carries the A_rW influence ratio") {
    PhysicalParams p;
    p.mu = 0.0;
    const std::size_t N = 64;
    pde::PdeState st = pde::initial_state(p, N, 0.0);
    st.h_n.assign(N + 1, 1.0);
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    pde::Stepper stepper(p, f, N, false);
    stepper.step(st);
    const double one5 = 1.0 + p.y_n * p.y_n;
    const double A_rW = p.r_W * one5 - 1.0;
    // T_e influence of the reflected fast wave over the slow wave's
    REQUIRE(st.h_n[0] != 0.0);
    CHECK(st.h_c[0] * one5 / st.h_n[0] == doctest::Approx(A_rW).epsilon(1e-14));
}

TEST_CASE("pde: boundary conditions hold after every step") {
    for (double rE : {0.0, 0.5}) {
        PhysicalParams p;
        p.r_E = rE;
        const std::size_t N = 256;
        const double one5 = 1.0 + p.y_n * p.y_n;
        const double bcW = p.r_W - 1.0 / one5;
        pde::PdeState st = pde::initial_state(p, N, 0.1);
        const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
        pde::Stepper stepper(p, f, N, true);
        for (int n = 0; n < 300; ++n) {
            stepper.step(st);
            CHECK(st.h_c[0] == bcW * st.h_n[0]);
            CHECK(rE * st.h_c[N] ==
                  doctest::Approx((1.0 - rE / one5) * st.h_n[N])
                      .epsilon(1e-14));
        }
        stepper.check_finite(st);
    }
}

TEST_CASE("pde: readout growth obeys the matched rate and saturates") {
    PhysicalParams p;
    const std::size_t N = 512;
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    const auto res = pde::run(p, f, pde::initial_state(p, N, 0.1), 15.0,
                              {p.x_E}, true);
    const auto& probe = res.probes[0];
    double peak = 0.0;
    for (std::size_t n = 0; n < probe.n_nodes(); ++n) {
        const double t = probe.node_time(n);
        const double v = std::abs(probe.values()[n]);
        peak = std::max(peak, v);
        // growth envelope at the matched fast rate (5% prefactor slack)
        CHECK(v <= 1.05 * 0.1 * std::exp(kGrowth * t));
    }
    CHECK(peak > 1.0);  // the instability is real, the bound is not vacuous
    CHECK(peak < 8.0);  // gate scale 1/sqrt(beta): saturation holds it under
}

TEST_CASE("pde: divergence raises a diagnostic and the CFL lock is checked") {
    PhysicalParams p;
    p.mu = 5.0;  // strongly supercritical, no saturation in the linear model
    const std::size_t N = 128;
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0);
    CHECK_THROWS_AS(
        pde::run(p, f, pde::initial_state(p, N, 0.1), 50.0, {p.x_E}, false),
        std::runtime_error);

    PhysicalParams q;
    pde::PdeState st = pde::initial_state(q, N, 0.1);
    CHECK_THROWS_AS(pde::step(st, f, q, 0.5 / double(N)),
                    std::invalid_argument);
    // the matching step succeeds and equals the Stepper update bitwise
    pde::PdeState out = pde::step(st, f, q, 1.0 / double(N));
    pde::Stepper stepper(q, f, N, true);
    pde::PdeState ref = st;
    stepper.step(ref);
    for (std::size_t j = 0; j <= N; ++j) {
        CHECK(out.h_c[j] == ref.h_c[j]);
        CHECK(out.h_n[j] == ref.h_n[j]);
        CHECK(out.T_e[j] == ref.T_e[j]);
    }
}

TEST_CASE("pde: matched two-delay coefficients at defaults") {
    PhysicalParams p;
    const dde::DelayModel m = pde::matched_delay_model(p, true);
    CHECK(m.kind == dde::ModelKind::VoCTwoDelay);
    CHECK(m.d_short == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.d == doctest::Approx(3.3).epsilon(1e-15));
    CHECK(m.c_T == doctest::Approx(kCT_E).epsilon(1e-12));
    CHECK(m.c_S == doctest::Approx(kCS_true).epsilon(1e-12));
    CHECK(m.c_L == doctest::Approx(kCL_true).epsilon(1e-12));
    CHECK(m.beta == 0.015625);
    const dde::DelayModel lin = pde::matched_delay_model(p, false);
    CHECK(lin.kind == dde::ModelKind::LinearTwoDelay);
    CHECK(lin.beta == 0.0);
    PhysicalParams q;
    q.r_E = 0.5;
    CHECK_THROWS_AS(pde::matched_delay_model(q, true), std::invalid_argument);
}

TEST_CASE("pde: unforced decay at the probe is exact to rounding") {
    PhysicalParams p;
    p.A0 = 0.0;  // no wind source: every node decays independently
    const std::size_t N = 2000;  // x_E = 0.9 lands on a node
    pde::PdeState st = pde::initial_state(p, N, 0.1);
    const WindForcing f = WindForcing::delta_approx(p.x_w, 0.0);
    const auto res =
        pde::run(p, f, std::move(st), 2.0, {p.x_E}, true);
    const auto& probe = res.probes[0];
    double werr = 0.0;
    for (std::size_t n = 0; n < probe.n_nodes(); ++n) {
        const double t = probe.node_time(n);
        werr = std::max(werr, std::abs(probe.values()[n] -
                                       0.1 * std::exp(-kCT_E * t)));
    }
    CHECK(werr < 1e-8);
}

TEST_CASE("pde: linear small-bump run tracks the matched delay model") {
    PhysicalParams p;
    const auto rep = pde::validate_reduction(p, 512, 0.02, 12.0, false, 0.01);
    CHECK(rep.window_lo == doctest::Approx(3.3));
    CHECK_FALSE(rep.dde_blew_up);
    CHECK(rep.max_abs_pde > 0.0);
    MESSAGE("linear N=512 sigma=0.02 rel_linf = ", rep.rel_linf);
    CHECK(rep.rel_linf < 2e-2);
}

TEST_CASE("pde: nonlinear default run oscillates at the matched period") {
    PhysicalParams p;
    const std::size_t N = 1024;
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0, 0.01);
    const auto res = pde::run(p, f, pde::initial_state(p, N, 0.1), 100.0,
                              {p.x_E}, true);
    const auto pr_pde = dde::measure_period(res.probes[0], 0.4);
    REQUIRE(pr_pde.cls == dde::Classification::Oscillating);

    const dde::DelayModel model = pde::matched_delay_model(p, true);
    const auto sol = dde::integrate(model, dde::History::constant(0.1), 100.0,
                                    model.d_short / 64.0);
    const auto pr_dde = dde::measure_period(sol, 0.4);
    REQUIRE(pr_dde.cls == dde::Classification::Oscillating);
    MESSAGE("PDE period = ", *pr_pde.period, ", DDE period = ",
            *pr_dde.period);
    CHECK(std::abs(*pr_pde.period - *pr_dde.period) / *pr_dde.period < 0.05);
}

TEST_CASE("pde: probe trajectory exposes dense output near nodes") {
    PhysicalParams p;
    const std::size_t N = 256;
    const WindForcing f = WindForcing::delta_approx(p.x_w, p.A0, 0.01);
    const auto res = pde::run(p, f, pde::initial_state(p, N, 0.1), 5.0,
                              {p.x_E, 0.5}, true);
    REQUIRE(res.probes.size() == 2);
    const auto& probe = res.probes[0];
    CHECK(probe.n_nodes() == 5 * N + 1);
    // dense evaluation between nodes stays within the neighbor bracket
    const double tq = 17.5 * probe.dt();
    const double lo = std::min(probe.values()[17], probe.values()[18]);
    const double hi = std::max(probe.values()[17], probe.values()[18]);
    const double width = hi - lo + 1e-12;
    CHECK(probe(tq) > lo - 0.5 * width - 1e-12);
    CHECK(probe(tq) < hi + 0.5 * width + 1e-12);
    // final state time matches the record span
    CHECK(res.final_state.t == doctest::Approx(5.0).epsilon(1e-12));
}
