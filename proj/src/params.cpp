#include "enso/params.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace enso {

void PhysicalParams::validate() const {
    auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
    if (!(L > 0 && c0 > 0 && H1 > 0 && H > 0 && H_tilde > 0 && H_star > 0))
        fail("depths, basin length and wave speed must be positive");
    if (!(T0 > Ts0)) fail("T0 must exceed Ts0");
    if (!(0.0 < x_w && x_w < x_E && x_E < 1.0))
        fail("require 0 < x_w < x_E < 1");
    if (!(y_n > 1.0)) fail("require y_n > 1");
    if (r_W < 0.0 || r_E < 0.0) fail("boundary measures must be nonnegative");
    if (!(eps_small > 0.0)) fail("tanh switch steepness must be positive");
}

double background_forcing(const PhysicalParams& p, double x) {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("background_forcing: x outside [0,1]");
    const double c = std::cos(M_PI * (x - p.x0_wind) / (2.0 * p.x0_wind));
    return 0.6 * (0.12 - c * c);
}

LocalCoeffs local_coeffs(const PhysicalParams& p, double x) {
    const double Fx = background_forcing(p, x);
    const double eps_w = p.eps_T * p.L / p.c0;
    const double alpha0 = p.H1 / p.H_tilde;
    const double deltaF1 = (p.tau0 * p.L / p.c0) * (p.b_w / p.H1);
    const double sw = std::tanh(deltaF1 * Fx / p.eps_small);
    LocalCoeffs out;
    out.c_T = eps_w + 0.5 * (1.0 - alpha0 + (1.0 + alpha0) * sw) * deltaF1 * Fx;
    out.c_h_star = 0.5 * (sw - 1.0) * alpha0 * deltaF1 * Fx
                 * (p.T0 - p.Ts0) * p.H / p.H_star;
    return out;
}

ScaledParams scale(const PhysicalParams& p) {
    p.validate();
    ScaledParams s{};
    s.eps0 = p.a_M * p.L / p.c0;
    s.eps_w = p.eps_T * p.L / p.c0;
    s.alpha0 = p.H1 / p.H_tilde;
    s.deltaF1 = (p.tau0 * p.L / p.c0) * (p.b_w / p.H1);
    const LocalCoeffs lc = local_coeffs(p, p.x_E);
    s.cT_E = lc.c_T;
    s.chstar_E = lc.c_h_star;
    const double yn2 = p.y_n * p.y_n;
    s.A_rW = p.r_W * (1.0 + yn2) - 1.0;
    s.A_rE = (p.r_E == 0.0) ? 0.0 : 1.0 / ((1.0 + yn2) / p.r_E - 1.0);
    s.cS_star = p.mu * p.A0 * (1.0 - p.theta / (1.0 + yn2)) * s.chstar_E
              * std::exp(-s.eps0 * (1.0 - p.x_w));
    s.cL_star = p.mu * p.A0 * (p.theta / yn2) * (s.A_rW / (1.0 + yn2))
              * s.chstar_E * std::exp(-s.eps0 * (1.0 + yn2 * p.x_w));
    s.d = 1.0 + yn2 * p.x_w;
    s.d_short = 1.0 - p.x_w;
    const double growth = s.cS_star - s.cT_E;
    if (growth < 1e-12)
        throw std::domain_error("scale: non-positive growth rate "
                                "(cS_star - cT_E below 1e-12)");
    s.alpha = s.cL_star / growth;
    s.gamma = growth / s.cS_star;
    s.delta = growth * s.d;
    s.beta = (p.c_se / (p.T0 - p.Ts0)) * (p.c_se / (p.T0 - p.Ts0));
    s.time_scale_seconds = (p.L / p.c0) / growth;
    return s;
}

double dimensionalize_time_seconds(const ScaledParams& s, double t_scaled) {
    return t_scaled * s.time_scale_seconds;
}

double seconds_to_years(double seconds) {
    return seconds / (365.25 * 86400.0);
}

namespace {

// single source of truth for the JSON field list
template <typename P, typename Fn>
void for_each_field(P& p, Fn&& fn) {
    fn("eps_T", p.eps_T);       fn("L", p.L);
    fn("c0", p.c0);             fn("tau0", p.tau0);
    fn("b_w", p.b_w);           fn("H1", p.H1);
    fn("H", p.H);               fn("H_tilde", p.H_tilde);
    fn("H_star", p.H_star);     fn("T0", p.T0);
    fn("Ts0", p.Ts0);           fn("a_M", p.a_M);
    fn("eps_small", p.eps_small); fn("x_E", p.x_E);
    fn("x0_wind", p.x0_wind);   fn("mu", p.mu);
    fn("theta", p.theta);       fn("A0", p.A0);
    fn("y_n", p.y_n);           fn("r_W", p.r_W);
    fn("r_E", p.r_E);           fn("x_w", p.x_w);
    fn("c_se", p.c_se);
}

} // namespace

PhysicalParams params_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object())
        throw std::invalid_argument("parameter document must be a JSON object");
    PhysicalParams p;
    // apply known keys, then reject anything left over
    std::size_t consumed = 0;
    for_each_field(p, [&](const char* key, double& field) {
        if (auto it = j.find(key); it != j.end()) {
            if (!it->is_number())
                throw std::invalid_argument(std::string("parameter '") + key
                                            + "' must be a number");
            field = it->get<double>();
            ++consumed;
        }
    });
    if (consumed != j.size()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool known = false;
            for_each_field(p, [&](const char* key, double&) {
                if (it.key() == key) known = true;
            });
            if (!known)
                throw std::invalid_argument("unknown parameter key '"
                                            + it.key() + "'");
        }
    }
    return p;
}

std::string params_to_json(const PhysicalParams& p) {
    nlohmann::json j = nlohmann::json::object();
    for_each_field(const_cast<PhysicalParams&>(p),
                   [&](const char* key, double& field) { j[key] = field; });
    return j.dump(2);
}

} // namespace enso
