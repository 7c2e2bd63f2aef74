#ifndef LIAPLAB_LIAPUNOV_HPP
#define LIAPLAB_LIAPUNOV_HPP

#include "liaplab/coefficients.hpp"
#include "liaplab/field.hpp"

namespace liaplab {

/// Parameters of the two-parameter energy functional W(.; gamma, theta).
/// theta = 0 reproduces the older single-parameter functional and is allowed
/// here for the comparison demonstration; the tuned certificates always use
/// theta > 0.
struct LiapunovParams {
    double gamma = 3.0;
    double theta = 0.0;
};

/// W = int 1/2 { gamma psi^2 + (eps phi_xx - psi)^2
///             + [C(1+gamma) - eps' + eps(a'+theta)] phi_x^2
///             + a' theta phi^2 + 2 theta phi psi
///             - 2(1+gamma) int_0^phi F } dx.
/// Quadratic terms are summed in mode space (exact); the F term uses grid
/// quadrature of the antiderivative.
double eval_W(const SineBasis& basis, const SpectralState& state, const Problem& problem,
              const LiapunovParams& params);

/// Exact time derivative of W along solutions:
/// dW/dt = -int { eps(C-eps') u_xx^2 + [(a+a')(1+gamma)-theta] u_t^2
///              + [2 theta C + eps'' - eps'(a'+theta) - (1+gamma)C'] u_x^2/2
///              + eps gamma u_xt^2 + theta a u u_t - theta u F(u)
///              + eps [-a u_t + F(u)] u_xx } dx.
double eval_W_dot_analytic(const SineBasis& basis, const SpectralState& state,
                           const Problem& problem, const LiapunovParams& params);

/// Physical energy H = int [ (u_t^2 + C u_x^2)/2 - int_0^u F ] dx.
double eval_hamiltonian(const SineBasis& basis, const SpectralState& state,
                        const Problem& problem);
/// dH/dt = -int [ (a+a') u_t^2 + eps u_xt^2 ] dx + int C' u_x^2/2 dx.
double eval_hamiltonian_dot(const SineBasis& basis, const SpectralState& state,
                            const Problem& problem);

/// g(t) = C(t) - eps'(t)/2 + 1.
double eval_g(double t, const CoefficientFamily& family);
/// m(r): non-decreasing slope envelope of the forcing.
double eval_m(double r, const ForcingTerm& forcing);
/// B(d) = d sqrt(1 + m(d)); continuous, increasing, B(d) >= d.
double eval_B(double d, const ForcingTerm& forcing);
/// Inverse of B: closed form when m is constant, bisection otherwise.
/// Throws std::domain_error for y < 0.
double invert_B(double y, const ForcingTerm& forcing);

} // namespace liaplab

#endif
