#include "liaplab/liapunov.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace liaplab {

namespace {

constexpr double kPi = std::numbers::pi;

struct GridFields {
    GridState u, u_x, u_t, u_xx;
    bool have_ux = false;
};

/// Grid values needed by the pointwise a / F terms.
GridFields grid_fields(const SineBasis& basis, const SpectralState& s, bool need_ux)
{
    GridFields g;
    g.u = basis.to_grid(s.u_modes);
    g.u_t = basis.to_grid(s.v_modes);
    g.u_xx = basis.to_grid(dxx_sine_coeffs(s.u_modes));
    if (need_ux) {
        g.u_x = basis.cos_to_grid(dx_cosine_coeffs(s.u_modes));
        g.have_ux = true;
    }
    return g;
}

} // namespace

double eval_W(const SineBasis& basis, const SpectralState& state, const Problem& problem,
              const LiapunovParams& params)
{
    const double t = state.t;
    const double eps = problem.family.eps(t);
    const double eps_dot = problem.family.eps_dot(t);
    const double C = problem.family.C(t);
    const double ap = problem.damping.a_prime;
    const double gamma = params.gamma, theta = params.theta;

    const double P = C * (1.0 + gamma) - eps_dot + eps * (ap + theta);
    double s = 0.0;
    for (int n = 0; n < state.n_modes(); ++n) {
        const double k2 = static_cast<double>(n + 1) * (n + 1);
        const double u = state.u_modes[n];
        const double v = state.v_modes[n];
        const double w = eps * k2 * u + v; // modes of psi - eps phi_xx
        s += gamma * v * v + w * w + P * k2 * u * u + ap * theta * u * u + 2.0 * theta * u * v;
    }
    double W = 0.25 * kPi * s;

    if (!problem.forcing.is_zero) {
        GridState integrand(basis.m_grid());
        const GridState u = basis.to_grid(state.u_modes);
        for (int j = 0; j < basis.m_grid(); ++j)
            integrand[j] = problem.forcing.antiderivative(u[j]);
        W -= (1.0 + gamma) * basis.quad(integrand);
    }
    return W;
}

double eval_W_dot_analytic(const SineBasis& basis, const SpectralState& state,
                           const Problem& problem, const LiapunovParams& params)
{
    const double t = state.t;
    const auto& fam = problem.family;
    const double eps = fam.eps(t);
    const double eps_dot = fam.eps_dot(t);
    const double eps_ddot = fam.eps_ddot(t);
    const double C = fam.C(t);
    const double C_dot = fam.C_dot(t);
    const double ap = problem.damping.a_prime;
    const double gamma = params.gamma, theta = params.theta;

    // coefficient of u_x^2/2
    const double cx = 2.0 * theta * C + eps_ddot - eps_dot * (ap + theta) - (1.0 + gamma) * C_dot;

    double s = 0.0;
    for (int n = 0; n < state.n_modes(); ++n) {
        const double k2 = static_cast<double>(n + 1) * (n + 1);
        const double u = state.u_modes[n];
        const double v = state.v_modes[n];
        s += eps * (C - eps_dot) * k2 * k2 * u * u;
        s += (ap * (1.0 + gamma) - theta) * v * v;
        s += cx * k2 * u * u / 2.0;
        s += eps * gamma * k2 * v * v;
    }
    double dW = -0.5 * kPi * s;

    const bool need_a = !problem.damping.is_zero;
    const bool need_f = !problem.forcing.is_zero;
    if (need_a || need_f) {
        const auto g = grid_fields(basis, state, need_a && problem.damping.needs_gradients);
        const double d =
            problem.damping.needs_norm ? eval_norm_d(state, eps) : 0.0;
        GridState integrand(basis.m_grid());
        for (int j = 0; j < basis.m_grid(); ++j) {
            double a = 0.0;
            if (need_a) {
                DampingArgs args;
                args.x = basis.grid_x()[j];
                args.t = t;
                args.u = g.u[j];
                args.u_x = g.have_ux ? g.u_x[j] : 0.0;
                args.u_t = g.u_t[j];
                args.u_xx = g.u_xx[j];
                args.d = d;
                a = problem.damping.a_eval(args);
            }
            const double F = need_f ? problem.forcing.eval(g.u[j]) : 0.0;
            integrand[j] = a * (1.0 + gamma) * g.u_t[j] * g.u_t[j]
                         + theta * a * g.u[j] * g.u_t[j]
                         - theta * g.u[j] * F
                         + eps * (-a * g.u_t[j] + F) * g.u_xx[j];
        }
        dW -= basis.quad(integrand);
    }
    return dW;
}

double eval_hamiltonian(const SineBasis& basis, const SpectralState& state,
                        const Problem& problem)
{
    const double C = problem.family.C(state.t);
    double s = 0.0;
    for (int n = 0; n < state.n_modes(); ++n) {
        const double k2 = static_cast<double>(n + 1) * (n + 1);
        s += state.v_modes[n] * state.v_modes[n] + C * k2 * state.u_modes[n] * state.u_modes[n];
    }
    double H = 0.25 * kPi * s;
    if (!problem.forcing.is_zero) {
        GridState integrand(basis.m_grid());
        const GridState u = basis.to_grid(state.u_modes);
        for (int j = 0; j < basis.m_grid(); ++j)
            integrand[j] = problem.forcing.antiderivative(u[j]);
        H -= basis.quad(integrand);
    }
    return H;
}

double eval_hamiltonian_dot(const SineBasis& basis, const SpectralState& state,
                            const Problem& problem)
{
    const double t = state.t;
    const double eps = problem.family.eps(t);
    const double C_dot = problem.family.C_dot(t);
    const double ap = problem.damping.a_prime;

    double s_vt = 0.0, s_xt = 0.0, s_x = 0.0;
    for (int n = 0; n < state.n_modes(); ++n) {
        const double k2 = static_cast<double>(n + 1) * (n + 1);
        s_vt += state.v_modes[n] * state.v_modes[n];
        s_xt += k2 * state.v_modes[n] * state.v_modes[n];
        s_x += k2 * state.u_modes[n] * state.u_modes[n];
    }
    double dH = -0.5 * kPi * (ap * s_vt + eps * s_xt) + 0.25 * kPi * C_dot * s_x;

    if (!problem.damping.is_zero) {
        const auto g = grid_fields(basis, state, problem.damping.needs_gradients);
        const double d = problem.damping.needs_norm ? eval_norm_d(state, eps) : 0.0;
        GridState integrand(basis.m_grid());
        for (int j = 0; j < basis.m_grid(); ++j) {
            DampingArgs args;
            args.x = basis.grid_x()[j];
            args.t = t;
            args.u = g.u[j];
            args.u_x = g.have_ux ? g.u_x[j] : 0.0;
            args.u_t = g.u_t[j];
            args.u_xx = g.u_xx[j];
            args.d = d;
            integrand[j] = problem.damping.a_eval(args) * g.u_t[j] * g.u_t[j];
        }
        dH -= basis.quad(integrand);
    }
    return dH;
}

double eval_g(double t, const CoefficientFamily& family)
{
    return family.C(t) - family.eps_dot(t) / 2.0 + 1.0;
}

double eval_m(double r, const ForcingTerm& forcing)
{
    if (r < 0.0)
        throw std::domain_error("eval_m: r must be nonnegative");
    return forcing.slope_envelope(r);
}

double eval_B(double d, const ForcingTerm& forcing)
{
    if (d < 0.0)
        throw std::domain_error("eval_B: d must be nonnegative");
    return d * std::sqrt(1.0 + eval_m(d, forcing));
}

double invert_B(double y, const ForcingTerm& forcing)
{
    if (y < 0.0)
        throw std::domain_error("invert_B: y must be nonnegative");
    if (y == 0.0)
        return 0.0;
    if (forcing.constant_envelope)
        return y / std::sqrt(1.0 + *forcing.constant_envelope);
    // B is increasing with B(x) >= x, so the root lies in [0, y].
    double lo = 0.0, hi = y;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (eval_B(mid, forcing) < y)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, y) * 1e-4)
            break;
    }
    return 0.5 * (lo + hi);
}

} // namespace liaplab
