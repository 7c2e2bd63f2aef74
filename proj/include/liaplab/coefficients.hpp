#ifndef LIAPLAB_COEFFICIENTS_HPP
#define LIAPLAB_COEFFICIENTS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liaplab/extreal.hpp"

namespace liaplab {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class HypothesisError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class EvaluationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Conservative force F with the analytic data the stability theory consumes:
/// slope bound k on |z| < rho, the non-decreasing slope envelope m(r), the
/// antiderivative of F, and the two sign flags that authorize the k -> 0
/// replacements. Instances are immutable; the function fields must be pure.
struct ForcingTerm {
    std::function<double(double)> eval;           // z -> F(z)
    std::function<double(double)> slope;          // z -> F_z(z)
    std::function<double(double)> antiderivative; // z -> int_0^z F(s) ds
    double k = 0.0;                               // slope bound: F_z <= k on |z| < rho
    ExtReal rho = ExtReal::pos_inf();             // validity radius
    std::function<double(double)> slope_envelope; // r -> m(r) = max |F_z| on |z| <= r
    bool antiderivative_nonpositive = false;      // int_0^z F <= 0 on |z| < rho
    bool z_times_F_nonpositive = false;           // z F(z)   <= 0 on |z| < rho
    bool is_zero = false;
    std::optional<double> constant_envelope;      // set when m(r) is constant in r

    static ForcingTerm zero();
    /// F(z) = b sin(omega z); k = b*omega, rho = inf, m constant.
    static ForcingTerm sine(double b, double omega);
    /// F(z) = -b |z|^q z; k = 0, rho = inf, both sign flags hold.
    static ForcingTerm restoring_power(double b, double q);
    /// F(z) = +b |z|^q z on |z| < rho; k = b(q+1) rho^q, finite rho required.
    static ForcingTerm repulsive_power(double b, double q, double rho);

    struct Custom {
        std::function<double(double)> eval;
        std::function<double(double)> slope;
        double k = 0.0;
        ExtReal rho = ExtReal::pos_inf();
        std::function<double(double)> antiderivative; // optional: adaptive Simpson fallback
        std::function<double(double)> slope_envelope; // optional: golden-section fallback
        bool antiderivative_nonpositive = false;
        bool z_times_F_nonpositive = false;
    };
    static ForcingTerm custom(Custom spec);
};

/// Arguments handed to a pointwise damping evaluation. The current weighted
/// norm d is passed in because the envelope bound a <= A d^tau depends on the
/// whole state, not on the point values alone.
struct DampingArgs {
    double x = 0.0;
    double t = 0.0;
    double u = 0.0;
    double u_x = 0.0;
    double u_t = 0.0;
    double u_xx = 0.0;
    double d = 0.0;
};

struct DampingTerm {
    double a_prime = 0.0; // constant damping a'
    double A = 0.0;       // envelope constant of a <= A d^tau
    double tau = 0.0;
    std::function<double(const DampingArgs&)> a_eval;
    bool is_zero = true;          // a identically zero
    bool needs_fields = false;    // a reads u, u_x, u_t, u_xx
    bool needs_gradients = false; // a reads u_x or u_xx (extra grid transforms)
    bool needs_norm = false;      // a reads d

    static DampingTerm none(double a_prime);
    static DampingTerm constant(double a_prime, double A);
    /// a = A |u| (tau = 1; valid because |u| <= d).
    static DampingTerm abs_u(double a_prime, double A);
    /// a = A d^tau, x-independent.
    static DampingTerm power_d(double a_prime, double A, double tau);
    static DampingTerm custom(double a_prime, double A, double tau,
                              std::function<double(const DampingArgs&)> fn);
};

enum class CdotClass {
    Nonpositive,         // C' <= 0 for all t
    VanishingAtInfinity, // C' -> 0 as t -> inf
    Neither,
};

/// Time-dependent coefficients eps, C with their derivatives and the declared
/// analytic bounds. Convention: *_inf = inf over t > 0, *_sup = sup over
/// t > 0. Declared bounds are authoritative; sampling only audits them.
struct CoefficientFamily {
    std::function<double(double)> eps, eps_dot, eps_ddot;
    std::function<double(double)> C, C_dot;

    double eps_inf = 0.0; // inf eps (finite since eps >= 0)
    ExtReal eps_sup = ExtReal::pos_inf();
    ExtReal eps_dot_inf = ExtReal::neg_inf();
    ExtReal eps_dot_sup = ExtReal::pos_inf();
    ExtReal eps_ddot_inf = ExtReal::neg_inf();

    double C_inf = std::numeric_limits<double>::quiet_NaN(); // positive lower bound of C
    double mu = std::numeric_limits<double>::quiet_NaN();    // C - eps' >= mu (1 + eps)
    ExtReal g_sup = ExtReal::pos_inf();                      // sup of g = C - eps'/2 + 1
    CdotClass c_dot_class = CdotClass::Neither;
    bool g_reciprocal_integral_diverges = false; // int dt/g = inf
};

struct Problem {
    CoefficientFamily family;
    ForcingTerm forcing;
    DampingTerm damping;
    std::string name = "problem";
};

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    bool skipped = false; // authorized skip counts as passed
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    bool all_passed() const;
    std::vector<std::string> failed_names() const;
};

struct ValidationOptions {
    double t_max = 1e4;
    int n_samples = 1000;
    double sample_tol = 1e-9; // slack on sampled quantities; declared constants are exact
};

/// One pass/fail entry per hypothesis sub-condition. Throws ConfigError when
/// a required declared constant is missing (NaN).
HypothesisReport validate_hypotheses(const CoefficientFamily& family, const ForcingTerm& forcing,
                                     const DampingTerm& damping, const ValidationOptions& opt = {});
HypothesisReport validate_hypotheses(const Problem& problem, const ValidationOptions& opt = {});

struct BoundAudit {
    std::string name;
    ExtReal declared;
    bool is_lower_bound = false; // declared inf vs declared sup
    double sampled_extremum = 0.0;
    bool violated = false;
    int violation_count = 0;
    double worst_t = 0.0;
};

struct AuditReport {
    std::vector<BoundAudit> bounds;
    bool any_violation() const;
};

/// Samples each coefficient on {0} followed by a log-uniform grid up to t_max
/// and compares the sampled extrema against the declared bounds (tolerance
/// 1e-9). Non-finite evaluations raise EvaluationError naming the offending t.
AuditReport audit_bounds(const CoefficientFamily& family, double t_max, int n_samples);

/// Family 1: eps = eps0 (1+t)^-p, C = C0 constant.
Problem make_example1(double eps0, double p, double C0, ForcingTerm forcing, DampingTerm damping);
/// Family 2: eps = eps0 (1+t)^p, C = C0 (1+t)^q with 1 >= q >= p >= 0.
Problem make_example2(double eps0, double p, double C0, double q, ForcingTerm forcing,
                      DampingTerm damping);

/// Family 3 takes an arbitrary eps with finite declared bounds.
struct EpsSpec {
    std::function<double(double)> eps, eps_dot, eps_ddot;
    double eps_inf = 0.0;
    ExtReal eps_sup;     // must be finite
    ExtReal eps_dot_inf; // must be finite
    ExtReal eps_dot_sup; // must be finite
    ExtReal eps_ddot_inf;
};
/// Family 3: C = C0 + C1 (1+t)^-q, arbitrary bounded eps (periodic allowed).
Problem make_example3(const EpsSpec& eps_spec, double C0, double C1, double q,
                      ForcingTerm forcing, DampingTerm damping);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

} // namespace liaplab

#endif
