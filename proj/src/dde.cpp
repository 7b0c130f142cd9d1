#include "enso/dde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace enso::dde {

namespace {

bool near_integer(double r) {
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

// Largest dt <= dt_req such that every positive lag is an integer multiple
// of dt (within relative snap tolerance 1e-9). Candidates are lag_min/n.
double adjust_dt(const std::vector<double>& lags, double dt_req) {
    double lag_min = 0.0;
    for (double L : lags)
        if (L > 0.0 && (lag_min == 0.0 || L < lag_min)) lag_min = L;
    if (lag_min == 0.0) return dt_req; // no delayed terms: plain ODE stepping
    const long n0 = std::max<long>(1, (long)std::ceil(lag_min / dt_req - 1e-12));
    for (long n = n0; n < n0 + 1000000; ++n) {
        const double dt = lag_min / double(n);
        bool ok = true;
        for (double L : lags)
            if (L > 0.0 && !near_integer(L / dt)) { ok = false; break; }
        if (ok) return dt;
    }
    throw std::invalid_argument(
        "dde: no common step <= requested dt divides all delays");
}

double hermite(double y0, double f0, double y1, double f1, double dt,
               double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * dt * f0 +
           (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * dt * f1;
}

} // namespace

std::vector<double> DelayModel::lags() const {
    switch (kind) {
    case ModelKind::SS:
    case ModelKind::VoC:
    case ModelKind::MZ: return {delta};
    case ModelKind::LinearTwoDelay:
    case ModelKind::VoCTwoDelay: return {d_short, d};
    }
    return {};
}

double DelayModel::max_delay() const {
    double m = 0.0;
    for (double L : lags()) m = std::max(m, L);
    return m;
}

double DelayModel::rhs(double T, const double* lagged) const {
    switch (kind) {
    case ModelKind::SS: return T - T * T * T - alpha * lagged[0];
    case ModelKind::VoC:
        return T - T * T * T - alpha * lagged[0] * (1.0 - gamma * T * T);
    case ModelKind::MZ:
        return T - T * T * T -
               alpha * lagged[0] * (1.0 - gamma * lagged[0] * lagged[0]);
    case ModelKind::LinearTwoDelay:
        return -c_T * T + (c_S * lagged[0] - c_L * lagged[1]);
    case ModelKind::VoCTwoDelay:
        return -c_T * T +
               (1.0 - beta * T * T) * (c_S * lagged[0] - c_L * lagged[1]);
    }
    return 0.0;
}

void DelayModel::validate() const {
    switch (kind) {
    case ModelKind::SS:
    case ModelKind::VoC:
    case ModelKind::MZ:
        if (!(delta > 0.0))
            throw std::invalid_argument("dde: delta must be positive");
        break;
    case ModelKind::LinearTwoDelay:
    case ModelKind::VoCTwoDelay:
        if (!(d > 0.0))
            throw std::invalid_argument("dde: long lag d must be positive");
        if (!(d_short >= 0.0) || d_short > d)
            throw std::invalid_argument("dde: need 0 <= d_short <= d");
        break;
    }
}

History History::constant(double v) {
    History h;
    h.c_ = v;
    return h;
}

History History::sampled(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("dde: history needs >= 2 samples");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw std::invalid_argument("dde: history times must ascend");
    History h;
    h.t_ = std::move(t);
    h.v_ = std::move(v);
    return h;
}

double History::operator()(double t) const {
    if (t_.empty()) return c_;
    if (t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = std::size_t(it - t_.begin()) - 1;
    const double s = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return v_[i] + s * (v_[i + 1] - v_[i]);
}

Trajectory Trajectory::from_samples(double t0, double dt,
                                    std::vector<double> values,
                                    std::vector<double> derivs,
                                    History history) {
    if (values.empty() || values.size() != derivs.size())
        throw std::invalid_argument("dde: values/derivs size mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("dde: dt must be positive");
    Trajectory tr;
    tr.t0_ = t0;
    tr.dt_ = dt;
    tr.values_ = std::move(values);
    tr.derivs_ = std::move(derivs);
    tr.history_ = std::move(history);
    return tr;
}

double Trajectory::operator()(double t) const {
    const double tl = t - t0_;
    if (tl <= 0.0) return history_(tl);
    if (values_.size() < 2) return values_.empty() ? 0.0 : values_[0];
    const std::size_t nseg = values_.size() - 1;
    const double u = tl / dt_;
    std::size_t k = (u >= double(nseg)) ? nseg - 1 : std::size_t(u);
    if (k > nseg - 1) k = nseg - 1;
    const double s = u - double(k);
    return hermite(values_[k], derivs_[k], values_[k + 1], derivs_[k + 1], dt_,
                   s);
}

Trajectory integrate(const DelayModel& model, const History& history,
                     double t_end, double dt) {
    model.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("dde: t_end must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dde: dt must be > 0");

    const std::vector<double> lag_list = model.lags();
    const std::size_t J = lag_list.size();
    if (J > 2) throw std::invalid_argument("dde: at most two lags supported");
    const double h = adjust_dt(lag_list, dt);
    const std::size_t n_steps =
        std::max<std::size_t>(1, (std::size_t)std::ceil(t_end / h - 1e-9));

    std::array<long, 2> lag_m{0, 0};
    for (std::size_t j = 0; j < J; ++j)
        lag_m[j] = (lag_list[j] > 0.0) ? std::lround(lag_list[j] / h) : 0;

    Trajectory tr;
    tr.t0_ = 0.0;
    tr.dt_ = h;
    tr.history_ = history;
    std::vector<double>& vals = tr.values_;
    std::vector<double>& ders = tr.derivs_;
    vals.assign(n_steps + 1, 0.0);
    ders.assign(n_steps + 1, 0.0);
    vals[0] = history(0.0);

    // Lagged value at node offset `base` plus `half` half-steps before the
    // stage; negative times fall through to the history function.
    auto lag_at_node = [&](long k) {
        return (k >= 0) ? vals[std::size_t(k)] : history(double(k) * h);
    };
    auto lag_at_half = [&](long base) {
        if (base >= 0)
            return hermite(vals[std::size_t(base)], ders[std::size_t(base)],
                           vals[std::size_t(base) + 1],
                           ders[std::size_t(base) + 1], h, 0.5);
        return history((double(base) + 0.5) * h);
    };

    std::array<double, 2> L0{}, LH{}, L1{};
    auto f = [&](std::array<double, 2> L, double Y) {
        for (std::size_t j = 0; j < J; ++j)
            if (lag_m[j] == 0) L[j] = Y;
        return model.rhs(Y, L.data());
    };

    std::size_t n_done = n_steps;
    for (std::size_t n = 0; n < n_steps; ++n) {
        for (std::size_t j = 0; j < J; ++j) {
            if (lag_m[j] == 0) continue;
            const long base = long(n) - lag_m[j];
            L0[j] = lag_at_node(base);
            LH[j] = lag_at_half(base);
            L1[j] = lag_at_node(base + 1);
        }
        const double Tn = vals[n];
        const double k1 = f(L0, Tn);
        ders[n] = k1;
        const double k2 = f(LH, Tn + 0.5 * h * k1);
        const double k3 = f(LH, Tn + 0.5 * h * k2);
        const double k4 = f(L1, Tn + h * k3);
        const double Tn1 = Tn + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(std::abs(Tn1) <= 1e6)) { // also catches NaN
            tr.blew_up_ = true;
            n_done = n;
            break;
        }
        vals[n + 1] = Tn1;
    }

    if (tr.blew_up_) {
        vals.resize(n_done + 1);
        ders.resize(n_done + 1);
    } else {
        // derivative at the final node, for dense output on the last segment
        for (std::size_t j = 0; j < J; ++j) {
            if (lag_m[j] == 0) continue;
            L0[j] = lag_at_node(long(n_steps) - lag_m[j]);
        }
        ders[n_steps] = f(L0, vals[n_steps]);
    }
    return tr;
}

double default_dt(const DelayModel& model) {
    double lag_min = 0.0;
    for (double L : model.lags())
        if (L > 0.0 && (lag_min == 0.0 || L < lag_min)) lag_min = L;
    if (lag_min == 0.0) return 0.02;
    return std::min(lag_min / 64.0, 0.02);
}

namespace {

struct Window {
    std::size_t i0 = 0, i1 = 0; // inclusive node range
};

Window post_transient_window(const Trajectory& tr, double frac) {
    const std::size_t n = tr.n_nodes();
    Window w;
    w.i1 = n - 1;
    const double f = std::clamp(frac, 0.0, 1.0);
    w.i0 = std::min<std::size_t>(w.i1, (std::size_t)std::ceil(f * double(w.i1)));
    return w;
}

double half_peak_to_peak(const std::vector<double>& v, std::size_t i0,
                         std::size_t i1) {
    double lo = v[i0], hi = v[i0];
    for (std::size_t i = i0; i <= i1; ++i) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    return 0.5 * (hi - lo);
}

} // namespace

double amplitude(const Trajectory& traj, double transient_fraction) {
    if (traj.n_nodes() == 0) return 0.0;
    const Window w = post_transient_window(traj, transient_fraction);
    return half_peak_to_peak(traj.values(), w.i0, w.i1);
}

PeriodResult measure_period(const Trajectory& traj,
                            double transient_fraction) {
    PeriodResult r;
    if (traj.n_nodes() == 0) return r;
    const Window w = post_transient_window(traj, transient_fraction);
    const std::vector<double>& v = traj.values();
    r.amplitude = half_peak_to_peak(v, w.i0, w.i1);
    if (traj.blew_up() || w.i1 - w.i0 + 1 < 8) {
        r.cls = Classification::NonPeriodic;
        return r;
    }
    if (r.amplitude < 1e-6) {
        r.cls = Classification::Equilibrium;
        return r;
    }
    // decaying-envelope gate: compare half-window amplitudes
    const std::size_t mid = w.i0 + (w.i1 - w.i0) / 2;
    const double amp1 = half_peak_to_peak(v, w.i0, mid);
    const double amp2 = half_peak_to_peak(v, mid, w.i1);
    if (amp1 > 0.0 && amp2 < 0.2 * amp1) {
        r.cls = Classification::Equilibrium;
        return r;
    }
    double mean = 0.0;
    for (std::size_t i = w.i0; i <= w.i1; ++i) mean += v[i];
    mean /= double(w.i1 - w.i0 + 1);
    std::vector<double> crossings;
    for (std::size_t i = w.i0; i < w.i1; ++i) {
        const double a = v[i] - mean, b = v[i + 1] - mean;
        if (a < 0.0 && b >= 0.0) {
            const double fracstep = (b > a) ? (-a / (b - a)) : 0.0;
            crossings.push_back(traj.node_time(i) + fracstep * traj.dt());
        }
    }
    if (crossings.size() < 3) {
        r.cls = Classification::NonPeriodic;
        return r;
    }
    std::vector<double> gaps(crossings.size() - 1);
    double gmean = 0.0;
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
        gaps[i] = crossings[i + 1] - crossings[i];
        gmean += gaps[i];
    }
    gmean /= double(gaps.size());
    double var = 0.0;
    for (double g : gaps) var += (g - gmean) * (g - gmean);
    var /= double(gaps.size());
    r.spacing_cv = std::sqrt(var) / gmean;
    if (r.spacing_cv > 0.05) {
        r.cls = Classification::NonPeriodic;
        return r;
    }
    r.cls = Classification::Oscillating;
    r.period = gmean;
    return r;
}

} // namespace enso::dde
