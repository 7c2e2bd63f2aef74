#include "liaplab/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
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

double nan_d()
{
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

ThetaResult compute_theta(const Problem& problem, double margin)
{
    if (!(margin > 0.0))
        throw ConfigError("compute_theta: margin > 0 required");
    const auto& fam = problem.family;
    const auto& forcing = problem.forcing;
    const double ap = problem.damping.a_prime;
    const double mu = fam.mu;
    const double Cb = fam.C_inf;
    const double eb = fam.eps_inf;
    if (!fam.eps_ddot_inf.is_finite())
        throw HypothesisError("compute_theta: eps_ddot_inf must be finite");
    const double edd = fam.eps_ddot_inf.value();

    ThetaResult r;
    r.k_decay = forcing.z_times_F_nonpositive ? 0.0 : forcing.k;
    r.k_lower = forcing.antiderivative_nonpositive ? 0.0 : forcing.k;

    const double denom = mu + Cb / 2.0 - 2.0 * r.k_decay;
    if (!(denom > 0.0))
        throw HypothesisError("compute_theta: mu + C_inf/2 - 2k <= 0 and no sign flag of the "
                              "forcing authorizes the k -> 0 replacement");
    const double den2 = ap + eb / 2.0;
    if (!(den2 > 0.0))
        throw HypothesisError("compute_theta: a_prime + eps_inf/2 must be positive");

    r.theta1 = std::max({2.0 * ap, 2.0 * r.k_decay / mu - ap,
                         (5.0 - edd - ap * (mu - Cb)) / denom});
    r.theta2 = std::max(r.theta1, (r.k_lower + 1.25) / den2);
    r.theta = r.theta2 > 0.0 ? (1.0 + margin) * r.theta2 : margin;
    return r;
}

Gamma3Result compute_gamma3(double sigma, double theta, const Problem& problem)
{
    if (sigma < 0.0)
        throw std::domain_error("compute_gamma3: sigma must be nonnegative");
    const auto& fam = problem.family;
    const double ap = problem.damping.a_prime;
    const double ae = ap + fam.eps_inf;
    if (!(ae > 0.0))
        throw HypothesisError("compute_gamma3: a_prime + eps_inf = 0");
    const double A = problem.damping.A;
    const double tau = problem.damping.tau;

    Gamma3Result g;
    g.gamma32 = A * A * (1.0 / fam.mu + theta / fam.C_inf) / ae;
    g.gamma31 = (1.0 + theta) / ae + theta * theta + 2.0 + (ap + theta) / fam.mu
              + (ap + 1.0) * theta;
    const double stau = std::pow(sigma, 2.0 * tau);
    g.gamma1 = (1.0 + theta) / ae + g.gamma32 * stau;
    g.gamma2 = g.gamma1 + theta * theta + 1.0;
    g.gamma3 = g.gamma31 + g.gamma32 * stau;
    return g;
}

ChiEta compute_chi_eta(double theta, double gamma, const Problem& problem)
{
    const auto& fam = problem.family;
    const double ap = problem.damping.a_prime;
    const double k = problem.forcing.antiderivative_nonpositive ? 0.0 : problem.forcing.k;
    ChiEta ce;
    const double second = (fam.C_inf - k) * gamma + fam.mu
                        + (fam.mu + ap + theta / 2.0) * fam.eps_inf;
    ce.chi = 0.5 * std::min(0.5, second);
    ce.eta = std::min(1.0, 0.75 * fam.mu);
    return ce;
}

RadiusMap::RadiusMap(double gamma31, double gamma32, double tau)
    : g31_(gamma31), g32_(gamma32), tau_(tau)
{
    if (!(gamma31 > 0.0) || gamma32 < 0.0 || tau < 0.0)
        throw ConfigError("RadiusMap: requires gamma31 > 0, gamma32 >= 0, tau >= 0");
    if (g32_ == 0.0 || tau_ < 1.0) {
        // tau >= 1 with A = 0 degenerates to the sigma-independent row
        sigma_M_ = ExtReal::pos_inf();
        r_M_ = ExtReal::pos_inf();
    } else if (tau_ == 1.0) {
        sigma_M_ = ExtReal::pos_inf();
        r_M_ = ExtReal::finite(1.0 / std::sqrt(g32_));
    } else {
        sigma_M_ = ExtReal::finite(
            std::pow((1.0 + g31_) / (g32_ * (tau_ - 1.0)), 1.0 / (2.0 * tau_)));
        r_M_ = ExtReal::finite(std::pow((tau_ - 1.0) / (1.0 + g31_),
                                        (tau_ - 1.0) / (2.0 * tau_))
                               / (std::sqrt(tau_) * std::pow(g32_, 1.0 / (2.0 * tau_))));
    }
}

double RadiusMap::gamma3(double sigma) const
{
    return g31_ + g32_ * std::pow(sigma, 2.0 * tau_);
}

double RadiusMap::r(double sigma) const
{
    if (sigma < 0.0)
        throw std::domain_error("RadiusMap::r: sigma must be nonnegative");
    return sigma / std::sqrt(1.0 + gamma3(sigma));
}

double RadiusMap::r_inverse(double y) const
{
    if (y < 0.0)
        throw std::domain_error("RadiusMap::r_inverse: y must be nonnegative");
    if (y == 0.0)
        return 0.0;
    if (r_M_.is_finite() && y >= r_M_.value())
        throw std::domain_error("RadiusMap::r_inverse: y >= r_M = " + fmt(r_M_.value()));
    if (g32_ == 0.0 || tau_ == 0.0)
        return y * std::sqrt(1.0 + g31_ + g32_); // gamma3 constant (tau=0: sigma^0 = 1)

    double hi = std::max(1.0, y);
    while (r(hi) < y) {
        hi *= 2.0;
        if (sigma_M_.is_finite() && hi > sigma_M_.value()) {
            hi = sigma_M_.value();
            break;
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (r(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RadiusMap compute_r_sigmaM(double gamma31, double gamma32, double tau)
{
    return RadiusMap(gamma31, gamma32, tau);
}

double compute_t_bar(double gamma, const CoefficientFamily& family, double horizon)
{
    if (family.c_dot_class == CdotClass::Nonpositive)
        return 0.0;
    if (family.c_dot_class == CdotClass::Neither)
        throw HypothesisError("compute_t_bar: requires C_dot <= 0 or C_dot -> 0");
    if (!(horizon > 0.0))
        throw ConfigError("compute_t_bar: horizon must be positive");

    auto above = [&](double t) { return family.C_dot(t) * (1.0 + gamma) >= 1.0; };

    // Log-spaced scan for the last point at or above the threshold, then
    // bisection against the first sample below it.
    const int n = 4097;
    const double lo0 = horizon * 1e-12;
    std::vector<double> grid;
    grid.reserve(n + 1);
    grid.push_back(0.0);
    for (int i = 0; i < n; ++i)
        grid.push_back(lo0 * std::pow(horizon / lo0, static_cast<double>(i) / (n - 1)));
    int last_above = -1;
    for (int i = 0; i < static_cast<int>(grid.size()); ++i)
        if (above(grid[i]))
            last_above = i;
    if (last_above < 0)
        return 0.0; // C_dot (1+gamma) < 1 everywhere sampled
    if (last_above == static_cast<int>(grid.size()) - 1)
        throw HypothesisError("compute_t_bar: crossing not bracketed within horizon = " +
                              fmt(horizon) + "; increase horizon");

    double a = grid[last_above], b = grid[last_above + 1];
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b)
            break;
        if (above(mid))
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

double TuningParameters::gamma3(double sigma) const
{
    return gamma31 + gamma32 * std::pow(sigma, 2.0 * tau);
}

double TuningParameters::r(double sigma) const
{
    return sigma / std::sqrt(1.0 + gamma3(sigma));
}

double TuningParameters::r_inverse(double y) const
{
    return RadiusMap(gamma31, gamma32, tau).r_inverse(y);
}

TuningParameters derive_tuning(const Problem& problem, const TuningConfig& config)
{
    const auto th = compute_theta(problem, config.margin);
    const auto g3 = compute_gamma3(0.0, th.theta, problem);
    const double tau = problem.damping.tau;
    const RadiusMap rm(g3.gamma31, g3.gamma32, tau);
    // chi at the infimum gamma3(0): conservative and sigma-independent.
    const auto ce = compute_chi_eta(th.theta, g3.gamma3, problem);

    TuningParameters tp;
    tp.theta1 = th.theta1;
    tp.theta2 = th.theta2;
    tp.theta = th.theta;
    tp.gamma31 = g3.gamma31;
    tp.gamma32 = g3.gamma32;
    tp.gamma1 = g3.gamma1;
    tp.gamma2 = g3.gamma2;
    tp.k_decay = th.k_decay;
    tp.k_lower = th.k_lower;
    tp.chi = ce.chi;
    tp.eta = ce.eta;
    tp.tau = tau;
    tp.sigma_M = rm.sigma_M();
    tp.r_M = rm.r_M();
    tp.g_sup = problem.family.g_sup;

    // xi = min{sigma_M, rho} when finite, else configured (default 1).
    ExtReal cap = ExtReal::pos_inf();
    if (rm.sigma_M().is_finite())
        cap = rm.sigma_M();
    if (problem.forcing.rho.is_finite() &&
        (!cap.is_finite() || problem.forcing.rho.value() < cap.value()))
        cap = problem.forcing.rho;
    if (config.xi) {
        if (!(*config.xi > 0.0))
            throw ConfigError("derive_tuning: xi must be positive");
        if (cap.is_finite() && *config.xi > cap.value())
            throw ConfigError("derive_tuning: xi exceeds min{sigma_M, rho} = " +
                              fmt(cap.value()));
        tp.xi = *config.xi;
    } else {
        tp.xi = cap.is_finite() ? cap.value() : 1.0;
    }

    tp.kappa = (problem.family.c_dot_class == CdotClass::Neither)
                   ? nan_d()
                   : compute_t_bar(tp.gamma3(tp.xi), problem.family, config.t_bar_horizon);
    tp.h_xi = (1.0 + tp.gamma3(tp.xi)) * (1.0 + eval_m(tp.xi, problem.forcing));

    if (problem.family.g_sup.is_finite()) {
        const auto dc = compute_decay_constants(tp.xi, tp, problem);
        tp.has_decay_constants = true;
        tp.delta = dc.delta;
        tp.D = dc.D;
        tp.E = dc.E;
    }
    return tp;
}

double compute_delta(double sigma, double t0, const TuningParameters& tuning,
                     const Problem& problem)
{
    if (!(sigma > 0.0) || !(sigma < tuning.xi))
        throw std::domain_error("compute_delta: requires 0 < sigma < xi = " + fmt(tuning.xi));
    if (!(t0 >= tuning.kappa))
        throw std::invalid_argument("compute_delta: t0 = " + fmt(t0) +
                                    " is below kappa = " + fmt(tuning.kappa));
    const double g = eval_g(t0, problem.family);
    return invert_B(tuning.r(sigma) * std::sqrt(tuning.chi) / std::sqrt(g), problem.forcing);
}

double compute_delta_uniform(double sigma, const TuningParameters& tuning,
                             const Problem& problem)
{
    if (!(sigma > 0.0) || !(sigma < tuning.xi))
        throw std::domain_error("compute_delta_uniform: requires 0 < sigma < xi");
    if (!tuning.g_sup.is_finite())
        throw HypothesisError("compute_delta_uniform: sup g is infinite");
    return invert_B(tuning.r(sigma) * std::sqrt(tuning.chi) / std::sqrt(tuning.g_sup.value()),
                    problem.forcing);
}

DecayConstants compute_decay_constants(double xi, const TuningParameters& tuning,
                                       const Problem& problem)
{
    if (!tuning.g_sup.is_finite())
        throw HypothesisError("compute_decay_constants: not applicable, sup g is infinite");
    const double gbar = tuning.g_sup.value();
    DecayConstants dc;
    dc.h = (1.0 + tuning.gamma3(xi)) * (1.0 + eval_m(xi, problem.forcing));
    dc.delta = invert_B(tuning.r(xi) * std::sqrt(tuning.chi) / std::sqrt(gbar), problem.forcing);
    dc.D = std::sqrt(dc.h * gbar / tuning.chi);
    dc.E = tuning.eta / (2.0 * dc.h * gbar);
    return dc;
}

BetaResult compute_beta_s(double delta, const TuningParameters& tuning, const Problem& problem,
                          double t_bar_horizon)
{
    if (!tuning.g_sup.is_finite())
        throw HypothesisError("compute_beta_s: sup g is infinite");
    const double gbar = tuning.g_sup.value();

    BetaResult br;
    br.delta_M = tuning.r_M.is_finite()
                     ? ExtReal::finite(invert_B(
                           tuning.r_M.value() * std::sqrt(tuning.chi) / std::sqrt(gbar),
                           problem.forcing))
                     : ExtReal::pos_inf();
    if (!(delta > 0.0))
        throw std::domain_error("compute_beta_s: delta must be positive");
    if (br.delta_M.is_finite() && delta >= br.delta_M.value())
        throw std::domain_error("compute_beta_s: delta >= delta_M = " +
                                fmt(br.delta_M.value()));

    const double y = std::sqrt(gbar) * eval_B(delta, problem.forcing) / std::sqrt(tuning.chi);
    br.beta = tuning.r_inverse(y);
    br.s = (problem.family.c_dot_class == CdotClass::Nonpositive)
               ? 0.0
               : compute_t_bar(tuning.gamma3(br.beta), problem.family, t_bar_horizon);
    br.h_delta = (1.0 + tuning.gamma3(br.beta)) * (1.0 + eval_m(br.beta, problem.forcing));
    br.D_delta = std::sqrt(br.h_delta * gbar / tuning.chi);
    br.E_delta = tuning.eta / (2.0 * br.h_delta * gbar);
    return br;
}

AttractivityTime compute_T(double alpha, double nu, double t0, const TuningParameters& tuning,
                           const Problem& problem, double horizon)
{
    if (tuning.tau != 0.0)
        throw HypothesisError("compute_T: requires tau = 0");
    if (problem.forcing.rho.is_finite())
        throw HypothesisError("compute_T: requires infinite rho");
    if (!problem.family.g_reciprocal_integral_diverges)
        throw HypothesisError("compute_T: requires the divergence of int dt/g");
    if (!(alpha > 0.0) || !(nu > 0.0))
        throw std::domain_error("compute_T: alpha and nu must be positive");
    if (!(t0 >= tuning.kappa))
        throw std::invalid_argument("compute_T: t0 = " + fmt(t0) + " is below kappa = " +
                                    fmt(tuning.kappa));

    const double gamma = tuning.gamma3(0.0); // sigma-independent at tau = 0
    AttractivityTime at;
    at.beta_tilde = eval_B(alpha, problem.forcing)
                  * std::sqrt(eval_g(t0, problem.family) * (1.0 + gamma))
                  / std::sqrt(tuning.chi);
    at.h_tilde = (1.0 + gamma) * (1.0 + eval_m(at.beta_tilde, problem.forcing));
    at.nu0 = std::min(nu, alpha);
    const double target =
        -(at.h_tilde / tuning.eta)
        * std::log(tuning.chi * at.nu0 * at.nu0 / (at.h_tilde * alpha * alpha));

    auto g_inv = [&](double z) { return 1.0 / eval_g(z, problem.family); };

    // Expand until G(hi) >= target, accumulating the integral segment-wise.
    double lo = t0, G_lo = 0.0;
    double span = 1.0;
    double hi = t0, G_hi = 0.0;
    while (true) {
        hi = lo + span;
        G_hi = G_lo + adaptive_simpson(g_inv, lo, hi, 1e-12);
        if (G_hi >= target)
            break;
        if (hi - t0 > horizon)
            throw HypothesisError("compute_T: G(t) stayed below the target within horizon = " +
                                  fmt(horizon) + " (divergence condition violated numerically)");
        lo = hi;
        G_lo = G_hi;
        span *= 2.0;
    }
    // Bisect on [lo, hi]; keep the left integral incremental.
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        const double G_mid = G_lo + adaptive_simpson(g_inv, lo, mid, 1e-13);
        if (G_mid < target) {
            lo = mid;
            G_lo = G_mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-9 * std::max(1.0, hi))
            break;
    }
    at.T = 0.5 * (lo + hi) - t0;
    return at;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::UniformlyStable: return "uniformly-stable";
    case Verdict::AsymptoticallyStable: return "asymptotically-stable";
    case Verdict::UniformlyExponentialAsymptoticallyStable:
        return "uniformly-exponential-asymptotically-stable";
    case Verdict::UniformlyBounded: return "uniformly-bounded";
    case Verdict::EventuallyUniformlyBounded: return "eventually-uniformly-bounded";
    case Verdict::Bounded: return "bounded";
    case Verdict::ExponentialAsymptoticallyStableInTheLarge:
        return "exponential-asymptotically-stable-in-the-large";
    case Verdict::EventuallyExponentialAsymptoticallyStableInTheLarge:
        return "eventually-exponential-asymptotically-stable-in-the-large";
    case Verdict::AsymptoticallyStableInTheLarge:
        return "asymptotically-stable-in-the-large";
    }
    return "?";
}

std::string to_string(Theorem t)
{
    switch (t) {
    case Theorem::Theorem1: return "theorem1";
    case Theorem::Theorem2: return "theorem2";
    case Theorem::Theorem3: return "theorem3";
    }
    return "?";
}

bool StabilityCertificate::has(Verdict v) const
{
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [v](const CertifiedVerdict& cv) { return cv.verdict == v; });
}

std::vector<std::string> StabilityCertificate::verdict_names() const
{
    std::vector<std::string> out;
    for (const auto& cv : verdicts)
        out.push_back(to_string(cv.verdict));
    return out;
}

StabilityCertificate certify(const Problem& problem, const CertifyConfig& config)
{
    StabilityCertificate cert;
    cert.problem_name = problem.name;
    cert.hypothesis_report = validate_hypotheses(problem, config.validation);
    if (!cert.hypothesis_report.all_passed())
        return cert;
    cert.tuning = derive_tuning(problem, config.tuning);

    const auto& fam = problem.family;
    const bool cdot_ok = fam.c_dot_class != CdotClass::Neither;
    const bool cdot_nonpos = fam.c_dot_class == CdotClass::Nonpositive;
    const std::string cdot_name =
        cdot_nonpos ? "C_dot <= 0" : "C_dot -> 0 at infinity";
    const bool gsup_fin = fam.g_sup.is_finite();
    const bool diverges = fam.g_reciprocal_integral_diverges || gsup_fin;
    const bool rho_inf = !problem.forcing.rho.is_finite();
    const double tau = problem.damping.tau;

    std::vector<std::string> base;
    for (const auto& c : cert.hypothesis_report.checks)
        base.push_back(c.name);

    std::map<Verdict, CertifiedVerdict> out;
    auto add = [&](Verdict v, Theorem th, std::vector<std::string> extra) {
        CertifiedVerdict cv;
        cv.verdict = v;
        cv.theorem = th;
        cv.hypotheses = base;
        cv.hypotheses.insert(cv.hypotheses.end(), extra.begin(), extra.end());
        out.emplace(v, std::move(cv));
    };

    if (cdot_ok) {
        // Local stability and decay.
        if (gsup_fin)
            add(Verdict::UniformlyStable, Theorem::Theorem1, {cdot_name, "sup g finite"});
        else
            add(Verdict::Stable, Theorem::Theorem1, {cdot_name});
        if (diverges) {
            if (gsup_fin)
                add(Verdict::UniformlyExponentialAsymptoticallyStable, Theorem::Theorem1,
                    {cdot_name, "sup g finite"});
            else
                add(Verdict::AsymptoticallyStable, Theorem::Theorem1,
                    {cdot_name, "integral of 1/g diverges"});
        }
        // Boundedness and decay in the large.
        if (rho_inf && tau < 1.0 && gsup_fin) {
            std::vector<std::string> extra = {"rho infinite", "tau < 1", "sup g finite",
                                              cdot_name};
            if (cdot_nonpos) {
                add(Verdict::UniformlyBounded, Theorem::Theorem2, extra);
                add(Verdict::ExponentialAsymptoticallyStableInTheLarge, Theorem::Theorem2,
                    extra);
            } else {
                add(Verdict::EventuallyUniformlyBounded, Theorem::Theorem2, extra);
                add(Verdict::EventuallyExponentialAsymptoticallyStableInTheLarge,
                    Theorem::Theorem2, extra);
            }
        }
        if (rho_inf && tau == 0.0 && diverges) {
            std::vector<std::string> extra = {"rho infinite", "tau = 0",
                                              "integral of 1/g diverges", cdot_name};
            add(Verdict::Bounded, Theorem::Theorem3, extra);
            add(Verdict::AsymptoticallyStableInTheLarge, Theorem::Theorem3, extra);
        }
    }

    // Absorb implied weaker verdicts.
    auto drop = [&out](Verdict v) { out.erase(v); };
    if (out.count(Verdict::UniformlyStable) || out.count(Verdict::AsymptoticallyStable) ||
        out.count(Verdict::UniformlyExponentialAsymptoticallyStable))
        drop(Verdict::Stable);
    if (out.count(Verdict::UniformlyExponentialAsymptoticallyStable))
        drop(Verdict::AsymptoticallyStable);
    if (out.count(Verdict::UniformlyBounded)) {
        drop(Verdict::Bounded);
        drop(Verdict::EventuallyUniformlyBounded);
    }
    if (out.count(Verdict::ExponentialAsymptoticallyStableInTheLarge)) {
        drop(Verdict::AsymptoticallyStableInTheLarge);
        drop(Verdict::EventuallyExponentialAsymptoticallyStableInTheLarge);
    }

    std::vector<CertifiedVerdict> list;
    for (auto& [v, cv] : out)
        list.push_back(std::move(cv));
    std::sort(list.begin(), list.end(), [](const CertifiedVerdict& a, const CertifiedVerdict& b) {
        return to_string(a.verdict) < to_string(b.verdict);
    });
    cert.verdicts = std::move(list);
    return cert;
}

} // namespace liaplab
