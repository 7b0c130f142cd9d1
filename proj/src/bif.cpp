#include "enso/bif.hpp"

#include "enso/params.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace enso::bif {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

Equilibria equilibria(double alpha, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("bif: gamma must lie in [0,1)");
    Equilibria e;
    e.alpha = alpha;
    e.gamma = gamma;
    e.pitchfork = (alpha == 1.0);
    const double den = 1.0 - alpha * gamma;
    e.singular = (den == 0.0);
    if (!e.singular) {
        const double radicand = (1.0 - alpha) / den;
        if (radicand > 0.0 && alpha != 1.0) {
            const double T0 = std::sqrt(radicand);
            e.values = {-T0, 0.0, T0};
            return e;
        }
    }
    e.values = {0.0};
    return e;
}

CharCoeffs linearize(dde::ModelKind kind, double alpha, double gamma,
                     double delta, double T0) {
    const double T2 = T0 * T0;
    CharCoeffs c;
    c.delta = delta;
    switch (kind) {
    case dde::ModelKind::SS:
        c.a = 1.0 - 3.0 * T2;
        c.b = -alpha;
        return c;
    case dde::ModelKind::VoC:
        c.a = 1.0 - 3.0 * T2 + 2.0 * alpha * gamma * T2;
        c.b = -alpha * (1.0 - gamma * T2);
        return c;
    case dde::ModelKind::MZ:
        c.a = 1.0 - 3.0 * T2;
        c.b = -alpha * (1.0 - 3.0 * gamma * T2);
        return c;
    default:
        throw std::invalid_argument(
            "bif: linearize expects a scaled single-delay kind");
    }
}

std::complex<double> rightmost_root(const CharCoeffs& c) {
    if (!(c.delta >= 0.0))
        throw std::invalid_argument("bif: delay must be nonnegative");
    if (c.b == 0.0) return {c.a, 0.0};
    if (c.delta == 0.0) return {c.a + c.b, 0.0};

    const double ab = std::abs(c.b);
    const double re_lo = c.a - ab - 1.0, re_hi = c.a + ab + 1.0;
    const double im_hi = 4.0 * kPi / std::max(c.delta, 1e-6);
    const int n_re = 9, n_im = 17;

    auto g = [&](std::complex<double> z) {
        return z - c.a - c.b * std::exp(-z * c.delta);
    };
    auto gp = [&](std::complex<double> z) {
        return 1.0 + c.b * c.delta * std::exp(-z * c.delta);
    };

    bool found = false;
    std::complex<double> best;
    for (int i = 0; i < n_re; ++i) {
        const double re0 = re_lo + (re_hi - re_lo) * double(i) / (n_re - 1);
        for (int j = 0; j < n_im; ++j) {
            std::complex<double> z(re0, im_hi * double(j) / (n_im - 1));
            bool ok = false;
            for (int it = 0; it < 80; ++it) {
                const std::complex<double> gv = g(z), dv = gp(z);
                if (std::abs(dv) < 1e-14) break;
                const std::complex<double> step = gv / dv;
                z -= step;
                if (std::abs(step) < 1e-13 && std::abs(g(z)) < 1e-11) {
                    ok = true;
                    break;
                }
            }
            if (!ok || std::abs(g(z)) > 1e-10) continue;
            if (z.imag() < 0.0) z = std::conj(z);
            if (!found || z.real() > best.real() + 1e-12 ||
                (std::abs(z.real() - best.real()) <= 1e-12 &&
                 z.imag() < best.imag())) {
                best = z;
                found = true;
            }
        }
    }
    if (!found)
        throw std::runtime_error(
            "bif: characteristic-root search failed to converge (a=" +
            std::to_string(c.a) + ", b=" + std::to_string(c.b) +
            ", delta=" + std::to_string(c.delta) + ")");
    return best;
}

namespace {

// Nontrivial-branch Hopf condition at fixed omega: alpha such that
// b(alpha)^2 = a(alpha)^2 + omega^2 on the gated linearization at T0+-.
struct NontrivialCoeffs {
    double a, b;
    bool valid;
};

NontrivialCoeffs nontrivial_ab(double alpha, double gamma) {
    const double den = 1.0 - alpha * gamma;
    if (den == 0.0) return {0.0, 0.0, false};
    const double T2 = (1.0 - alpha) / den;
    if (!(T2 > 0.0)) return {0.0, 0.0, false};
    const double a = 1.0 - 3.0 * T2 + 2.0 * alpha * gamma * T2;
    const double b = -alpha * (1.0 - gamma * T2);
    return {a, b, true};
}

} // namespace

HopfCurve hopf_curve(double gamma, Branch branch, double omega_min,
                     double omega_max, int n_points) {
    if (!(omega_min > 0.0) || !(omega_max >= omega_min) || n_points < 1)
        throw std::invalid_argument("bif: hopf_curve needs positive omegas");
    HopfCurve curve;
    curve.branch = branch;
    curve.gamma = gamma;
    for (int k = 0; k < n_points; ++k) {
        const double w =
            (n_points == 1)
                ? omega_min
                : omega_min + (omega_max - omega_min) * double(k) /
                                  double(n_points - 1);
        if (branch == Branch::Trivial) {
            const double alpha = std::sqrt(1.0 + w * w);
            const double delta = std::acos(1.0 / alpha) / w;
            curve.points.push_back({alpha, delta, w});
            continue;
        }
        // scan alpha in (0,1) for sign changes of b^2 - a^2 - w^2
        auto F = [&](double alpha) -> double {
            const NontrivialCoeffs nc = nontrivial_ab(alpha, gamma);
            if (!nc.valid) return kNaN;
            return nc.b * nc.b - nc.a * nc.a - w * w;
        };
        const int n_scan = 2000;
        bool any = false;
        double prev_a = kNaN, prev_f = kNaN;
        for (int i = 0; i <= n_scan; ++i) {
            const double a_i = 1e-3 + (1.0 - 2e-3) * double(i) / n_scan;
            const double f_i = F(a_i);
            if (std::isfinite(prev_f) && std::isfinite(f_i) &&
                ((prev_f < 0.0 && f_i >= 0.0) || (prev_f >= 0.0 && f_i < 0.0))) {
                double lo = prev_a, hi = a_i, flo = prev_f;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi), fm = F(mid);
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                const double alpha = 0.5 * (lo + hi);
                const NontrivialCoeffs nc = nontrivial_ab(alpha, gamma);
                if (nc.valid && nc.b != 0.0) {
                    double ang = std::atan2(-w / nc.b, -nc.a / nc.b);
                    if (ang <= 0.0) ang += 2.0 * kPi;
                    const double delta = ang / w;
                    // keep only points that satisfy the root condition
                    const std::complex<double> lam(0.0, w);
                    const std::complex<double> res =
                        lam - nc.a - nc.b * std::exp(-lam * delta);
                    if (std::abs(res) < 1e-10) {
                        curve.points.push_back({alpha, delta, w});
                        any = true;
                    }
                }
            }
            prev_a = a_i;
            prev_f = f_i;
        }
        if (!any) ++curve.skipped;
    }
    return curve;
}

namespace {

bool oscillates(dde::ModelKind kind, double gamma, double alpha, double delta) {
    dde::DelayModel m;
    m.kind = kind;
    m.alpha = alpha;
    m.gamma = gamma;
    m.delta = delta;
    const double t_end = std::max(60.0 * delta, 40.0);
    const dde::Trajectory tr = dde::integrate(m, dde::History::constant(1.5),
                                              t_end, dde::default_dt(m));
    return dde::measure_period(tr).cls == dde::Classification::Oscillating;
}

} // namespace

std::vector<BoundaryPoint> oscillation_boundary(
    dde::ModelKind kind, double gamma, const std::vector<double>& alphas,
    double delta_lo, double delta_hi) {
    if (!(delta_lo > 0.0 && delta_hi > delta_lo))
        throw std::invalid_argument("bif: invalid delta bracket");
    std::vector<BoundaryPoint> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("bif: boundary needs alpha in (0,1)");
        double lo = delta_lo, hi = delta_hi;
        bool lo_osc = oscillates(kind, gamma, alpha, lo);
        bool hi_osc = oscillates(kind, gamma, alpha, hi);
        if (lo_osc || !hi_osc) { // widen once, then flag
            lo = 0.5 * delta_lo;
            hi = 2.0 * delta_hi;
            lo_osc = oscillates(kind, gamma, alpha, lo);
            hi_osc = oscillates(kind, gamma, alpha, hi);
        }
        if (lo_osc || !hi_osc) {
            out.push_back({alpha, kNaN, true});
            continue;
        }
        while (hi - lo > 1e-2) {
            const double mid = 0.5 * (lo + hi);
            (oscillates(kind, gamma, alpha, mid) ? hi : lo) = mid;
        }
        out.push_back({alpha, 0.5 * (lo + hi), false});
    }
    return out;
}

namespace {

std::vector<double> arange(double lo, double hi, double step) {
    std::vector<double> v;
    for (int i = 0;; ++i) {
        const double x = lo + step * double(i);
        if (x > hi + 1e-9) break;
        v.push_back(x);
    }
    return v;
}

} // namespace

std::vector<double> default_theta_range() { return arange(1.0, 4.0, 0.2); }
std::vector<double> default_A0_range() { return arange(0.10, 0.60, 0.05); }
std::vector<double> default_yn_range() { return arange(1.4, 3.4, 0.2); }

PeriodGrid period_sweep(const std::vector<double>& thetas,
                        const std::vector<double>& A0s,
                        const std::vector<double>& yns,
                        const std::vector<dde::ModelKind>& kinds,
                        int n_threads) {
    PeriodGrid grid;
    grid.thetas = thetas;
    grid.A0s = A0s;
    grid.yns = yns;
    grid.kinds = kinds;
    const std::size_t n_cells = thetas.size() * A0s.size() * yns.size();
    grid.cells.resize(n_cells);

    auto run_cell = [&](std::size_t idx) {
        const std::size_t it = idx / (A0s.size() * yns.size());
        const std::size_t rest = idx % (A0s.size() * yns.size());
        const std::size_t ia = rest / yns.size();
        const std::size_t iy = rest % yns.size();
        PeriodCell& cell = grid.cells[idx];
        cell.theta = thetas[it];
        cell.A0 = A0s[ia];
        cell.y_n = yns[iy];
        PhysicalParams p;
        p.theta = cell.theta;
        p.A0 = cell.A0;
        p.y_n = cell.y_n;
        ScaledParams s;
        try {
            s = scale(p);
        } catch (const std::exception&) {
            cell.scale_error = true;
            return;
        }
        cell.alpha = s.alpha;
        cell.gamma = s.gamma;
        cell.delta = s.delta;
        cell.beta = s.beta;
        cell.years_per_unit =
            seconds_to_years(dimensionalize_time_seconds(s, 1.0));
        for (dde::ModelKind kind : kinds) {
            dde::DelayModel m;
            m.kind = kind;
            m.alpha = s.alpha;
            m.gamma = s.gamma;
            m.delta = s.delta;
            const dde::Trajectory tr =
                dde::integrate(m, dde::History(), 60.0 * s.delta,
                               dde::default_dt(m));
            const dde::PeriodResult r = dde::measure_period(tr);
            cell.cls.push_back(r.cls);
            cell.period.push_back(r.period.value_or(kNaN));
            cell.period_years.push_back(
                r.period ? *r.period * cell.years_per_unit : kNaN);
            cell.amplitude.push_back(r.amplitude);
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    const unsigned nt =
        (n_threads > 0) ? unsigned(n_threads)
                        : std::min<unsigned>(hw, 8);
    if (nt <= 1 || n_cells < 2) {
        for (std::size_t i = 0; i < n_cells; ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n_cells;
                     i = next.fetch_add(1))
                    run_cell(i);
            });
        for (std::thread& th : pool) th.join();
    }
    return grid;
}

} // namespace enso::bif
