#include <enso/kernel.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace enso::kernel {

namespace {

struct Geometry {
    double eps0;
    double yn2;
    double one5;     // 1 + y_n^2
    double A_rW;     // r_W (1+y_n^2) - 1
    double A_rE;     // r_E / ((1+y_n^2) - r_E)
    double rho;      // signed per-round-trip weight ratio
    double coef_k;   // kelvin_first prefactor (without g)
    double coef_r;   // rossby_first prefactor (without g)
};

Geometry geometry(const PhysicalParams& p) {
    Geometry g;
    g.eps0 = p.a_M * p.L / p.c0;
    g.yn2 = p.y_n * p.y_n;
    g.one5 = 1.0 + g.yn2;
    g.A_rW = p.r_W * g.one5 - 1.0;
    g.A_rE = p.r_E / (g.one5 - p.r_E);
    g.rho = g.A_rE * g.A_rW * std::exp(-g.eps0 * g.one5);
    const double chstar = local_coeffs(p, p.x_E).c_h_star;
    g.coef_k = (1.0 - p.theta / g.one5) * chstar;
    g.coef_r = -(p.theta / g.yn2) * (g.A_rW / g.one5) * chstar;
    return g;
}

}  // namespace

int kmax_at(double t, const PhysicalParams& p) {
    if (t < 1.0) return -1;
    const double one5 = 1.0 + p.y_n * p.y_n;
    return int(std::floor((t - 1.0) / one5));
}

double truncation_bound(int k_max, const PhysicalParams& p) {
    const Geometry g = geometry(p);
    const double r = std::abs(g.rho);
    if (r >= 1.0)
        throw std::domain_error(
            "truncation_bound: reflection ratio >= 1, the sum does not "
            "converge");
    return std::pow(r, double(k_max + 1)) / (1.0 - r);
}

int default_k_max(const PhysicalParams& p) {
    const Geometry g = geometry(p);
    const double r = std::abs(g.rho);
    if (r >= 1.0)
        throw std::domain_error(
            "default_k_max: reflection ratio >= 1, the sum does not "
            "converge");
    if (r == 0.0) return 0;
    int k = 0;
    double bound = r / (1.0 - r);
    while (bound >= 1e-10 && k < 2000) {
        bound *= r;
        ++k;
    }
    return k;
}

double kernel_eval(double tau, const pde::WindForcing& forcing,
                   const PhysicalParams& p, int k_max) {
    if (tau < 0.0) return 0.0;
    if (k_max < 0) k_max = default_k_max(p);
    const Geometry g = geometry(p);
    double value = 0.0;
    double w = p.mu;  // running mu (A_rE A_rW)^k e^{-eps0 k(1+y_n^2)}
    double tau_red = tau;
    for (int k = 0; k <= k_max && tau_red >= 0.0 && w != 0.0; ++k) {
        if (tau_red <= 1.0) {
            const double x = 1.0 - tau_red;
            value += w * (g.coef_k * std::exp(-g.eps0 * (1.0 - x)) *
                          forcing(x));
        }
        if (tau_red >= 1.0 && tau_red <= g.one5) {
            const double x = (tau_red - 1.0) / g.yn2;
            value += w * (g.coef_r * std::exp(-g.eps0 * (1.0 + g.yn2 * x)) *
                          forcing(x));
        }
        w *= g.rho;
        tau_red -= g.one5;
    }
    return value;
}

std::vector<KernelSample> kernel_terms(double tau,
                                       const pde::WindForcing& forcing,
                                       const PhysicalParams& p, int k_max) {
    std::vector<KernelSample> out;
    if (tau < 0.0) return out;
    if (k_max < 0) k_max = default_k_max(p);
    const Geometry g = geometry(p);
    double w = p.mu;
    double tau_red = tau;
    for (int k = 0; k <= k_max && tau_red >= 0.0 && w != 0.0; ++k) {
        if (tau_red <= 1.0) {
            const double x = 1.0 - tau_red;
            const double v =
                w * (g.coef_k * std::exp(-g.eps0 * (1.0 - x)) * forcing(x));
            if (v != 0.0)
                out.push_back({tau, v, Branch::kelvin_first, k});
        }
        if (tau_red >= 1.0 && tau_red <= g.one5) {
            const double x = (tau_red - 1.0) / g.yn2;
            const double v =
                w * (g.coef_r * std::exp(-g.eps0 * (1.0 + g.yn2 * x)) *
                     forcing(x));
            if (v != 0.0)
                out.push_back({tau, v, Branch::rossby_first, k});
        }
        w *= g.rho;
        tau_red -= g.one5;
    }
    return out;
}

DiscreteDelaySpec discrete_delays(const pde::WindForcing& forcing,
                                  const PhysicalParams& p, int k_max) {
    if (forcing.kind != pde::WindForcing::Kind::DeltaApprox)
        throw std::invalid_argument(
            "discrete_delays: point (delta) forcing required");
    if (k_max < 0) k_max = default_k_max(p);
    const Geometry g = geometry(p);
    // Density-convention coefficients: the kernel's slow-branch spike
    // integrates to y_n^2 times this (the characteristic-speed Jacobian),
    // but the discrete model quotes the density at the spike.
    const double cS = forcing.A0 * g.coef_k *
                      std::exp(-g.eps0 * (1.0 - forcing.x_w));
    const double cL = forcing.A0 * g.coef_r *
                      std::exp(-g.eps0 * (1.0 + g.yn2 * forcing.x_w));
    DiscreteDelaySpec spec;
    spec.k_max = k_max;
    double w = p.mu;
    for (int k = 0; k <= k_max && w != 0.0; ++k) {
        const double shift = double(k) * g.one5;
        spec.delays.emplace_back((1.0 - forcing.x_w) + shift, w * cS);
        spec.delays.emplace_back((1.0 + g.yn2 * forcing.x_w) + shift, w * cL);
        w *= g.rho;
    }
    std::sort(spec.delays.begin(), spec.delays.end());
    return spec;
}

}  // namespace enso::kernel
