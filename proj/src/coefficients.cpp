#include "liaplab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace liaplab {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
         + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        }
    }
    return std::max(fc, fd);
}

/// {0} followed by a log-uniform grid on [t_max*1e-12, t_max].
std::vector<double> sample_grid(double t_max, int n)
{
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    g.push_back(0.0);
    if (n < 2)
        return g;
    const double lo = t_max * 1e-12;
    const int m = n - 1;
    for (int i = 0; i < m; ++i) {
        const double f = (m == 1) ? 1.0 : static_cast<double>(i) / (m - 1);
        g.push_back(lo * std::pow(t_max / lo, f));
    }
    return g;
}

void require_finite(double v, const char* field)
{
    if (!std::isfinite(v))
        throw ConfigError(std::string("missing or non-finite declared bound: ") + field);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    if (a == b)
        return 0.0;
    if (b < a)
        return -adaptive_simpson(f, b, a, tol);
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

// ---------------------------------------------------------------------------
// ForcingTerm builders

ForcingTerm ForcingTerm::zero()
{
    ForcingTerm f;
    f.eval = [](double) { return 0.0; };
    f.slope = [](double) { return 0.0; };
    f.antiderivative = [](double) { return 0.0; };
    f.k = 0.0;
    f.rho = ExtReal::pos_inf();
    f.slope_envelope = [](double) { return 0.0; };
    f.antiderivative_nonpositive = true;
    f.z_times_F_nonpositive = true;
    f.is_zero = true;
    f.constant_envelope = 0.0;
    return f;
}

ForcingTerm ForcingTerm::sine(double b, double omega)
{
    if (!(b > 0.0) || !(omega > 0.0))
        throw ConfigError("forcing sine: requires b > 0 and omega > 0");
    ForcingTerm f;
    f.eval = [b, omega](double z) { return b * std::sin(omega * z); };
    f.slope = [b, omega](double z) { return b * omega * std::cos(omega * z); };
    f.antiderivative = [b, omega](double z) { return b * (1.0 - std::cos(omega * z)) / omega; };
    f.k = b * omega;
    f.rho = ExtReal::pos_inf();
    const double m0 = b * omega;
    f.slope_envelope = [m0](double) { return m0; };
    f.constant_envelope = m0;
    return f;
}

ForcingTerm ForcingTerm::restoring_power(double b, double q)
{
    if (!(b > 0.0) || q < 0.0)
        throw ConfigError("forcing restoring_power: requires b > 0 and q >= 0");
    ForcingTerm f;
    f.eval = [b, q](double z) { return -b * std::pow(std::abs(z), q) * z; };
    f.slope = [b, q](double z) { return -b * (q + 1.0) * std::pow(std::abs(z), q); };
    f.antiderivative = [b, q](double z) {
        return -b * std::pow(std::abs(z), q + 2.0) / (q + 2.0);
    };
    f.k = 0.0;
    f.rho = ExtReal::pos_inf();
    f.slope_envelope = [b, q](double r) { return b * (q + 1.0) * std::pow(std::max(r, 0.0), q); };
    f.antiderivative_nonpositive = true;
    f.z_times_F_nonpositive = true;
    if (q == 0.0)
        f.constant_envelope = b;
    return f;
}

ForcingTerm ForcingTerm::repulsive_power(double b, double q, double rho)
{
    if (!(b > 0.0) || q < 0.0)
        throw ConfigError("forcing repulsive_power: requires b > 0 and q >= 0");
    if (!std::isfinite(rho) || !(rho > 0.0))
        throw ConfigError("forcing repulsive_power: finite rho > 0 required");
    ForcingTerm f;
    f.eval = [b, q](double z) { return b * std::pow(std::abs(z), q) * z; };
    f.slope = [b, q](double z) { return b * (q + 1.0) * std::pow(std::abs(z), q); };
    f.antiderivative = [b, q](double z) {
        return b * std::pow(std::abs(z), q + 2.0) / (q + 2.0);
    };
    f.k = b * (q + 1.0) * std::pow(rho, q);
    f.rho = ExtReal::finite(rho);
    f.slope_envelope = [b, q](double r) { return b * (q + 1.0) * std::pow(std::max(r, 0.0), q); };
    if (q == 0.0)
        f.constant_envelope = b;
    return f;
}

ForcingTerm ForcingTerm::custom(Custom spec)
{
    if (!spec.eval || !spec.slope)
        throw ConfigError("forcing custom: eval and slope are required");
    ForcingTerm f;
    f.eval = spec.eval;
    f.slope = spec.slope;
    f.k = spec.k;
    f.rho = spec.rho;
    f.antiderivative_nonpositive = spec.antiderivative_nonpositive;
    f.z_times_F_nonpositive = spec.z_times_F_nonpositive;
    if (spec.antiderivative) {
        f.antiderivative = spec.antiderivative;
    } else {
        f.antiderivative = [eval = spec.eval](double z) {
            return adaptive_simpson(eval, 0.0, z, 1e-12);
        };
    }
    if (spec.slope_envelope) {
        f.slope_envelope = spec.slope_envelope;
    } else {
        // Golden-section maximization of |F_z|, memoized on a log grid of r
        // (quantized upward, which is safe since m is non-decreasing).
        struct Cache {
            std::map<long long, double> memo;
            std::mutex mx;
        };
        auto cache = std::make_shared<Cache>();
        f.slope_envelope = [slope = spec.slope, cache](double r) -> double {
            if (!(r > 0.0))
                return std::abs(slope(0.0));
            const long long key = static_cast<long long>(std::ceil(std::log(r) * 1e6));
            {
                std::lock_guard<std::mutex> lock(cache->mx);
                auto it = cache->memo.find(key);
                if (it != cache->memo.end())
                    return it->second;
            }
            const double rq = std::exp(static_cast<double>(key) * 1e-6);
            auto mag = [&](double z) { return std::abs(slope(z)); };
            double best = 0.0, best_z = 0.0;
            const int coarse = 257;
            for (int i = 0; i < coarse; ++i) {
                const double z = -rq + 2.0 * rq * i / (coarse - 1);
                const double v = mag(z);
                if (v > best) {
                    best = v;
                    best_z = z;
                }
            }
            const double h = 2.0 * rq / (coarse - 1);
            const double lo = std::max(-rq, best_z - h), hi = std::min(rq, best_z + h);
            best = std::max(best, golden_max(mag, lo, hi, 1e-10 * std::max(1.0, rq)));
            {
                std::lock_guard<std::mutex> lock(cache->mx);
                cache->memo[key] = best;
            }
            return best;
        };
    }
    return f;
}

// ---------------------------------------------------------------------------
// DampingTerm builders

DampingTerm DampingTerm::none(double a_prime)
{
    DampingTerm d;
    d.a_prime = a_prime;
    d.A = 0.0;
    d.tau = 0.0;
    d.a_eval = [](const DampingArgs&) { return 0.0; };
    d.is_zero = true;
    return d;
}

DampingTerm DampingTerm::constant(double a_prime, double A)
{
    if (A < 0.0)
        throw ConfigError("damping constant: requires A >= 0");
    DampingTerm d;
    d.a_prime = a_prime;
    d.A = A;
    d.tau = 0.0;
    d.a_eval = [A](const DampingArgs&) { return A; };
    d.is_zero = (A == 0.0);
    return d;
}

DampingTerm DampingTerm::abs_u(double a_prime, double A)
{
    if (A < 0.0)
        throw ConfigError("damping abs_u: requires A >= 0");
    DampingTerm d;
    d.a_prime = a_prime;
    d.A = A;
    d.tau = 1.0;
    d.a_eval = [A](const DampingArgs& a) { return A * std::abs(a.u); };
    d.is_zero = (A == 0.0);
    d.needs_fields = true;
    return d;
}

DampingTerm DampingTerm::power_d(double a_prime, double A, double tau)
{
    if (A < 0.0 || tau < 0.0)
        throw ConfigError("damping power_d: requires A >= 0 and tau >= 0");
    DampingTerm d;
    d.a_prime = a_prime;
    d.A = A;
    d.tau = tau;
    d.a_eval = [A, tau](const DampingArgs& a) { return A * std::pow(a.d, tau); };
    d.is_zero = (A == 0.0);
    d.needs_norm = true;
    return d;
}

DampingTerm DampingTerm::custom(double a_prime, double A, double tau,
                                std::function<double(const DampingArgs&)> fn)
{
    if (!fn)
        throw ConfigError("damping custom: evaluation function required");
    DampingTerm d;
    d.a_prime = a_prime;
    d.A = A;
    d.tau = tau;
    d.a_eval = std::move(fn);
    d.is_zero = false;
    d.needs_fields = true;
    d.needs_gradients = true;
    d.needs_norm = true;
    return d;
}

// ---------------------------------------------------------------------------
// Hypothesis validation

bool HypothesisReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](const HypothesisCheck& c) { return c.passed || c.skipped; });
}

std::vector<std::string> HypothesisReport::failed_names() const
{
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.passed && !c.skipped)
            out.push_back(c.name);
    return out;
}

HypothesisReport validate_hypotheses(const CoefficientFamily& family, const ForcingTerm& forcing,
                                     const DampingTerm& damping, const ValidationOptions& opt)
{
    require_finite(family.mu, "mu");
    require_finite(family.C_inf, "C_inf");
    require_finite(family.eps_inf, "eps_inf");
    require_finite(forcing.k, "forcing.k");
    require_finite(damping.a_prime, "damping.a_prime");
    require_finite(damping.A, "damping.A");
    require_finite(damping.tau, "damping.tau");
    if (!family.eps || !family.eps_dot || !family.eps_ddot || !family.C || !family.C_dot)
        throw ConfigError("missing coefficient function (eps, eps_dot, eps_ddot, C, C_dot)");

    HypothesisReport rep;
    const double tol = opt.sample_tol;

    // C_inf >= k
    {
        HypothesisCheck c;
        c.name = "C_inf >= k";
        c.passed = family.C_inf >= forcing.k;
        c.detail = "C_inf = " + fmt(family.C_inf) + ", k = " + fmt(forcing.k);
        rep.checks.push_back(c);
    }

    // sampled: eps >= 0, C >= C_inf, C - eps_dot >= mu (1 + eps), g > 1
    {
        const auto grid = sample_grid(opt.t_max, opt.n_samples);
        double worst = std::numeric_limits<double>::infinity();
        double worst_t = 0.0;
        bool eps_nonneg = true, c_lower = true, g_above_one = true;
        for (double t : grid) {
            const double e = family.eps(t), ed = family.eps_dot(t), cc = family.C(t);
            if (!std::isfinite(e) || !std::isfinite(ed) || !std::isfinite(cc))
                throw EvaluationError("non-finite coefficient at t = " + fmt(t));
            if (e < -tol)
                eps_nonneg = false;
            if (cc < family.C_inf - tol)
                c_lower = false;
            const double slack = cc - ed - family.mu * (1.0 + e);
            if (slack < worst) {
                worst = slack;
                worst_t = t;
            }
            if (cc - ed / 2.0 + 1.0 <= 1.0 - tol)
                g_above_one = false;
        }
        HypothesisCheck c;
        c.name = "C - eps_dot >= mu(1+eps)";
        c.passed = worst >= -tol;
        c.detail = "min slack = " + fmt(worst) + " at t = " + fmt(worst_t);
        rep.checks.push_back(c);

        HypothesisCheck c2;
        c2.name = "eps >= 0 and C >= C_inf (sampled)";
        c2.passed = eps_nonneg && c_lower;
        rep.checks.push_back(c2);

        HypothesisCheck c3;
        c3.name = "g > 1 (sampled)";
        c3.passed = g_above_one;
        rep.checks.push_back(c3);
    }

    // mu + C_inf/2 - 2k > 0, skippable under z F(z) <= 0
    {
        HypothesisCheck c;
        c.name = "mu + C_inf/2 - 2k > 0";
        const double lhs = family.mu + family.C_inf / 2.0 - 2.0 * forcing.k;
        if (forcing.z_times_F_nonpositive && forcing.k > 0.0) {
            c.skipped = true;
            c.passed = true;
            c.detail = "skipped: z F(z) <= 0 authorizes the k -> 0 replacement";
        } else {
            c.passed = lhs > 0.0;
            c.detail = "value = " + fmt(lhs);
        }
        rep.checks.push_back(c);
    }

    // eps_ddot_inf > -inf
    {
        HypothesisCheck c;
        c.name = "eps_ddot_inf > -inf";
        c.passed = !family.eps_ddot_inf.is_neg_inf();
        c.detail = "eps_ddot_inf = " + family.eps_ddot_inf.str();
        rep.checks.push_back(c);
    }

    // a' + eps_inf/2 > 0
    {
        HypothesisCheck c;
        c.name = "a_prime + eps_inf/2 > 0";
        const double lhs = damping.a_prime + family.eps_inf / 2.0;
        c.passed = lhs > 0.0;
        c.detail = "value = " + fmt(lhs);
        rep.checks.push_back(c);
    }

    // 0 <= a <= A d^tau on sampled arguments
    {
        HypothesisCheck c;
        c.name = "0 <= a <= A d^tau (sampled)";
        bool ok = true;
        double worst = 0.0;
        for (double d : {0.1, 1.0, 10.0}) {
            for (double sgn : {-1.0, 1.0}) {
                for (double t : {0.0, 1.0, 100.0}) {
                    DampingArgs args;
                    args.x = 1.5707963267948966;
                    args.t = t;
                    args.u = sgn * d / 2.0;
                    args.u_x = d / 2.0;
                    args.u_t = sgn * d / 2.0;
                    args.u_xx = d / 4.0;
                    args.d = d;
                    const double a = damping.a_eval(args);
                    const double cap = damping.A * std::pow(d, damping.tau);
                    if (a < -tol || a > cap * (1.0 + tol) + tol) {
                        ok = false;
                        worst = a;
                    }
                }
            }
        }
        c.passed = ok;
        if (!ok)
            c.detail = "violating a = " + fmt(worst);
        rep.checks.push_back(c);
    }

    // F(0) = 0 and F_z <= k on sampled |z| < rho
    {
        HypothesisCheck c;
        c.name = "F(0) = 0";
        c.passed = std::abs(forcing.eval(0.0)) <= 1e-12;
        rep.checks.push_back(c);

        HypothesisCheck c2;
        c2.name = "F_z <= k (sampled)";
        const double r =
            forcing.rho.is_finite() ? forcing.rho.value() * (1.0 - 1e-9) : 10.0;
        bool ok = true;
        double worst = -std::numeric_limits<double>::infinity();
        double worst_z = 0.0;
        const int nz = 401;
        for (int i = 0; i < nz; ++i) {
            const double z = -r + 2.0 * r * i / (nz - 1);
            const double s = forcing.slope(z);
            if (s > worst) {
                worst = s;
                worst_z = z;
            }
            if (s > forcing.k + tol)
                ok = false;
        }
        c2.passed = ok;
        c2.detail = "max F_z = " + fmt(worst) + " at z = " + fmt(worst_z) + ", k = " + fmt(forcing.k);
        rep.checks.push_back(c2);
    }

    return rep;
}

HypothesisReport validate_hypotheses(const Problem& problem, const ValidationOptions& opt)
{
    return validate_hypotheses(problem.family, problem.forcing, problem.damping, opt);
}

// ---------------------------------------------------------------------------
// Bound audit

bool AuditReport::any_violation() const
{
    return std::any_of(bounds.begin(), bounds.end(),
                       [](const BoundAudit& b) { return b.violated; });
}

AuditReport audit_bounds(const CoefficientFamily& family, double t_max, int n_samples)
{
    if (!(t_max > 0.0) || n_samples < 2)
        throw ConfigError("audit_bounds: requires t_max > 0 and n_samples >= 2");
    const auto grid = sample_grid(t_max, n_samples);
    const double tol = 1e-9;

    struct Channel {
        std::string name;
        std::function<double(double)> f;
        ExtReal declared;
        bool lower;
    };
    std::vector<Channel> channels = {
        {"eps_inf", family.eps, ExtReal::finite(family.eps_inf), true},
        {"eps_sup", family.eps, family.eps_sup, false},
        {"eps_dot_inf", family.eps_dot, family.eps_dot_inf, true},
        {"eps_dot_sup", family.eps_dot, family.eps_dot_sup, false},
        {"eps_ddot_inf", family.eps_ddot, family.eps_ddot_inf, true},
        {"C_inf", family.C, ExtReal::finite(family.C_inf), true},
        {"g_sup",
         [&family](double t) { return family.C(t) - family.eps_dot(t) / 2.0 + 1.0; },
         family.g_sup, false},
    };

    AuditReport rep;
    for (const auto& ch : channels) {
        BoundAudit b;
        b.name = ch.name;
        b.declared = ch.declared;
        b.is_lower_bound = ch.lower;
        double extremum = ch.lower ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const double v = ch.f(t);
            if (!std::isfinite(v))
                throw EvaluationError("audit_bounds: non-finite value of " + ch.name +
                                      " at t = " + fmt(t));
            if (ch.lower ? v < extremum : v > extremum)
                extremum = v;
            bool bad = false;
            if (ch.declared.is_finite()) {
                if (ch.lower)
                    bad = v < ch.declared.value() - tol;
                else
                    bad = v > ch.declared.value() + tol;
            } else if (ch.lower && ch.declared.is_pos_inf()) {
                bad = true; // inf declared as +inf can never hold
            } // sup declared +inf or inf declared -inf: vacuously fine
            if (bad) {
                ++b.violation_count;
                if (!b.violated || (ch.lower ? v < b.sampled_extremum : v > b.sampled_extremum))
                    b.worst_t = t;
                b.violated = true;
            }
        }
        b.sampled_extremum = extremum;
        rep.bounds.push_back(std::move(b));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Example families

Problem make_example1(double eps0, double p, double C0, ForcingTerm forcing, DampingTerm damping)
{
    if (eps0 < 0.0 || p < 0.0)
        throw ConfigError("example1: requires eps0 >= 0 and p >= 0");
    const double k = forcing.k;
    const double bound = 4.0 * (1.0 + eps0) * k / (3.0 + eps0);
    if (!(C0 > bound))
        throw ConfigError("example1: requires C0 > 4(1+eps0)k/(3+eps0) = " + fmt(bound) +
                          ", got C0 = " + fmt(C0));

    CoefficientFamily f;
    f.eps = [eps0, p](double t) { return eps0 * std::pow(1.0 + t, -p); };
    f.eps_dot = [eps0, p](double t) { return -p * eps0 * std::pow(1.0 + t, -p - 1.0); };
    f.eps_ddot = [eps0, p](double t) {
        return p * (p + 1.0) * eps0 * std::pow(1.0 + t, -p - 2.0);
    };
    f.C = [C0](double) { return C0; };
    f.C_dot = [](double) { return 0.0; };
    f.eps_inf = (p > 0.0) ? 0.0 : eps0;
    f.eps_sup = ExtReal::finite(eps0);
    f.eps_dot_inf = ExtReal::finite(-p * eps0);
    f.eps_dot_sup = ExtReal::finite(0.0);
    f.eps_ddot_inf = ExtReal::finite(0.0);
    f.C_inf = C0;
    f.mu = C0 / (1.0 + eps0);
    f.g_sup = ExtReal::finite(C0 + p * eps0 + 1.0);
    f.c_dot_class = CdotClass::Nonpositive;
    f.g_reciprocal_integral_diverges = true;
    return Problem{std::move(f), std::move(forcing), std::move(damping), "example1"};
}

Problem make_example2(double eps0, double p, double C0, double q, ForcingTerm forcing,
                      DampingTerm damping)
{
    if (!(1.0 >= q && q >= p && p >= 0.0))
        throw ConfigError("example2: requires 1 >= q >= p >= 0, got p = " + fmt(p) +
                          ", q = " + fmt(q));
    if (eps0 < 0.0)
        throw ConfigError("example2: requires eps0 >= 0");
    if (!(C0 > p * eps0))
        throw ConfigError("example2: requires C0 > p eps0 = " + fmt(p * eps0));
    const double k = forcing.k;
    const double bound = (4.0 * (1.0 + eps0) * k + 2.0 * p * eps0) / (3.0 + eps0);
    if (!(C0 > bound))
        throw ConfigError("example2: requires C0 > [4(1+eps0)k + 2p eps0]/(3+eps0) = " +
                          fmt(bound) + ", got C0 = " + fmt(C0));

    CoefficientFamily f;
    f.eps = [eps0, p](double t) { return eps0 * std::pow(1.0 + t, p); };
    f.eps_dot = [eps0, p](double t) { return p * eps0 * std::pow(1.0 + t, p - 1.0); };
    f.eps_ddot = [eps0, p](double t) {
        return p * (p - 1.0) * eps0 * std::pow(1.0 + t, p - 2.0);
    };
    f.C = [C0, q](double t) { return C0 * std::pow(1.0 + t, q); };
    f.C_dot = [C0, q](double t) { return q * C0 * std::pow(1.0 + t, q - 1.0); };
    f.eps_inf = eps0;
    f.eps_sup = (p > 0.0 && eps0 > 0.0) ? ExtReal::pos_inf() : ExtReal::finite(eps0);
    if (p == 0.0) {
        f.eps_dot_inf = ExtReal::finite(0.0);
        f.eps_dot_sup = ExtReal::finite(0.0);
    } else if (p < 1.0) {
        f.eps_dot_inf = ExtReal::finite(0.0);
        f.eps_dot_sup = ExtReal::finite(p * eps0);
    } else {
        f.eps_dot_inf = ExtReal::finite(p * eps0);
        f.eps_dot_sup = ExtReal::finite(p * eps0);
    }
    f.eps_ddot_inf = ExtReal::finite(p * (p - 1.0) * eps0);
    f.C_inf = C0;
    f.mu = (C0 - p * eps0) / (1.0 + eps0);
    f.g_sup = (q > 0.0) ? ExtReal::pos_inf() : ExtReal::finite(C0 + 1.0);
    if (q == 0.0)
        f.c_dot_class = CdotClass::Nonpositive;
    else if (q < 1.0)
        f.c_dot_class = CdotClass::VanishingAtInfinity;
    else
        f.c_dot_class = CdotClass::Neither; // C_dot constant C0 > 0 at q = 1
    f.g_reciprocal_integral_diverges = true; // g grows at most like t^q, q <= 1
    return Problem{std::move(f), std::move(forcing), std::move(damping), "example2"};
}

Problem make_example3(const EpsSpec& eps_spec, double C0, double C1, double q,
                      ForcingTerm forcing, DampingTerm damping)
{
    if (!(C1 > 0.0) || q < 0.0)
        throw ConfigError("example3: requires C1 > 0 and q >= 0");
    if (!eps_spec.eps_sup.is_finite() || !eps_spec.eps_dot_inf.is_finite() ||
        !eps_spec.eps_dot_sup.is_finite() || !eps_spec.eps_ddot_inf.is_finite())
        throw ConfigError("example3: requires finite eps_sup, eps_dot_inf, eps_dot_sup, "
                          "eps_ddot_inf");
    const double eps_sup = eps_spec.eps_sup.value();
    const double ed_sup = eps_spec.eps_dot_sup.value();
    const double ed_inf = eps_spec.eps_dot_inf.value();
    const double k = forcing.k;
    const double bound =
        std::max({0.0, ed_sup, (4.0 * (1.0 + eps_sup) * k + 2.0 * ed_sup) / (3.0 + eps_sup)});
    if (!(C0 > bound))
        throw ConfigError(
            "example3: requires C0 > max{0, eps_dot_sup, [4(1+eps_sup)k + 2 eps_dot_sup]"
            "/(3+eps_sup)} = " + fmt(bound) + ", got C0 = " + fmt(C0));
    if (!(C0 >= k))
        throw ConfigError("example3: requires C0 >= k = " + fmt(k));

    CoefficientFamily f;
    f.eps = eps_spec.eps;
    f.eps_dot = eps_spec.eps_dot;
    f.eps_ddot = eps_spec.eps_ddot;
    f.C = [C0, C1, q](double t) { return C0 + C1 * std::pow(1.0 + t, -q); };
    f.C_dot = [C1, q](double t) { return -q * C1 * std::pow(1.0 + t, -q - 1.0); };
    f.eps_inf = eps_spec.eps_inf;
    f.eps_sup = eps_spec.eps_sup;
    f.eps_dot_inf = eps_spec.eps_dot_inf;
    f.eps_dot_sup = eps_spec.eps_dot_sup;
    f.eps_ddot_inf = eps_spec.eps_ddot_inf;
    f.C_inf = (q > 0.0) ? C0 : C0 + C1;
    f.mu = (C0 - ed_sup) / (1.0 + eps_sup);
    f.g_sup = ExtReal::finite(C0 + C1 - ed_inf + 1.0);
    f.c_dot_class = CdotClass::Nonpositive;
    f.g_reciprocal_integral_diverges = true;
    return Problem{std::move(f), std::move(forcing), std::move(damping), "example3"};
}

} // namespace liaplab
