#ifndef LIAPLAB_TUNING_HPP
#define LIAPLAB_TUNING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liaplab/coefficients.hpp"
#include "liaplab/liapunov.hpp"

namespace liaplab {

struct ThetaResult {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta = 0.0;
    double k_decay = 0.0; // k after the z F <= 0 replacement (theta1 side)
    double k_lower = 0.0; // k after the int F <= 0 replacement (theta2 / chi side)
};

/// theta1 = max{2a', 2k/mu - a', [5 - eps_ddot_inf - a'(mu - C_inf)]/(mu + C_inf/2 - 2k)};
/// theta2 = max{theta1, (k + 5/4)/(a' + eps_inf/2)}; theta = (1+margin) theta2.
/// The sign flags of the forcing replace k by 0 in their respective formulas.
ThetaResult compute_theta(const Problem& problem, double margin);

struct Gamma3Result {
    double gamma31 = 0.0;
    double gamma32 = 0.0;
    double gamma3 = 0.0; // gamma31 + gamma32 sigma^{2 tau}
    double gamma1 = 0.0; // diagnostics only
    double gamma2 = 0.0;
};

Gamma3Result compute_gamma3(double sigma, double theta, const Problem& problem);

struct ChiEta {
    double chi = 0.0; // <= 1/4
    double eta = 0.0; // min{1, 3 mu/4}
};

ChiEta compute_chi_eta(double theta, double gamma, const Problem& problem);

/// The invertible radius map r(sigma) = sigma / sqrt(1 + gamma31 + gamma32 sigma^{2 tau})
/// on [0, sigma_M) -> [0, r_M), with the three-row case split on tau.
class RadiusMap {
  public:
    RadiusMap(double gamma31, double gamma32, double tau);

    double r(double sigma) const;
    /// Inverse by bisection (closed form when gamma32 = 0 or tau = 0).
    /// Requires 0 <= y < r_M.
    double r_inverse(double y) const;
    ExtReal sigma_M() const { return sigma_M_; }
    ExtReal r_M() const { return r_M_; }
    double gamma31() const { return g31_; }
    double gamma32() const { return g32_; }
    double tau() const { return tau_; }
    double gamma3(double sigma) const;

  private:
    double g31_, g32_, tau_;
    ExtReal sigma_M_, r_M_;
};

RadiusMap compute_r_sigmaM(double gamma31, double gamma32, double tau);

/// Smallest t_bar >= 0 with C'(t)(1+gamma) < 1 for all sampled t > t_bar.
/// Returns 0 immediately for the nonpositive class; otherwise scans then
/// bisects on [0, horizon]. Throws HypothesisError when the crossing is not
/// bracketed within the horizon.
double compute_t_bar(double gamma, const CoefficientFamily& family, double horizon);

struct TuningConfig {
    double margin = 0.01;           // multiplicative margin realizing theta > theta2
    std::optional<double> xi;       // override; default min{sigma_M, rho} if finite else 1
    double t_bar_horizon = 1e6;
};

struct TuningParameters {
    double theta1 = 0.0, theta2 = 0.0, theta = 0.0;
    double gamma31 = 0.0, gamma32 = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0; // diagnostics
    double k_decay = 0.0, k_lower = 0.0;
    double chi = 0.0, eta = 0.0;
    double tau = 0.0;
    ExtReal sigma_M, r_M;
    double xi = 1.0;
    double kappa = 0.0;  // t_bar at gamma3(xi)
    double h_xi = 0.0;   // [1 + gamma3(xi)][1 + m(xi)]
    ExtReal g_sup;

    // Uniform exponential constants, present when g_sup is finite.
    bool has_decay_constants = false;
    double delta = 0.0, D = 0.0, E = 0.0;

    double gamma3(double sigma) const;
    double r(double sigma) const;
    double r_inverse(double y) const;
};

/// Assembles every scalar the certificates need.
TuningParameters derive_tuning(const Problem& problem, const TuningConfig& config = {});

/// delta(sigma, t0) = B^{-1}[ r(sigma) sqrt(chi) / sqrt(g(t0)) ], in (0, sigma).
/// Requires 0 < sigma < xi and t0 >= kappa.
double compute_delta(double sigma, double t0, const TuningParameters& tuning,
                     const Problem& problem);
/// Uniform variant with g(t0) replaced by sup g (requires finite sup g).
double compute_delta_uniform(double sigma, const TuningParameters& tuning,
                             const Problem& problem);

struct DecayConstants {
    double delta = 0.0;
    double D = 0.0;
    double E = 0.0;
    double h = 0.0;
};

/// h = [1+gamma3(xi)][1+m(xi)]; delta = B^{-1}[r(xi) sqrt(chi)/sqrt(sup g)];
/// D = sqrt(h sup_g / chi); E = eta / (2 h sup_g). Requires finite sup g.
DecayConstants compute_decay_constants(double xi, const TuningParameters& tuning,
                                       const Problem& problem);

struct BetaResult {
    double beta = 0.0;    // r^{-1}[ sqrt(sup g) B(delta) / sqrt(chi) ]  > delta
    ExtReal delta_M;      // B^{-1}(r_M sqrt(chi)/sqrt(sup g)); infinite for tau < 1
    double s = 0.0;       // t_bar at gamma3(beta(delta)); 0 for the nonpositive class
    double h_delta = 0.0; // {1+gamma3[beta]} {1+m[beta]}
    double D_delta = 0.0; // in-the-large envelope constants
    double E_delta = 0.0;
};

BetaResult compute_beta_s(double delta, const TuningParameters& tuning, const Problem& problem,
                          double t_bar_horizon = 1e6);

struct AttractivityTime {
    double T = 0.0;
    double beta_tilde = 0.0; // B(alpha) sqrt(g(t0)(1+gamma)) / sqrt(chi)
    double h_tilde = 0.0;    // (1+gamma){1 + m[beta_tilde]}
    double nu0 = 0.0;        // min{nu, alpha}
};

/// Solves G(t0+T) = -(h_tilde/eta) log[chi nu0^2 / (h_tilde alpha^2)] with
/// G(t) = int_{t0}^t dz/g(z) (adaptive quadrature, bisection inversion).
/// Requires tau = 0, infinite rho, the divergence condition, and t0 >= kappa.
AttractivityTime compute_T(double alpha, double nu, double t0, const TuningParameters& tuning,
                           const Problem& problem, double horizon = 1e9);

enum class Verdict {
    Stable,
    UniformlyStable,
    AsymptoticallyStable,
    UniformlyExponentialAsymptoticallyStable,
    UniformlyBounded,
    EventuallyUniformlyBounded,
    Bounded,
    ExponentialAsymptoticallyStableInTheLarge,
    EventuallyExponentialAsymptoticallyStableInTheLarge,
    AsymptoticallyStableInTheLarge,
};

std::string to_string(Verdict v);

enum class Theorem { Theorem1, Theorem2, Theorem3 };
std::string to_string(Theorem t);

struct CertifiedVerdict {
    Verdict verdict;
    Theorem theorem;
    std::vector<std::string> hypotheses; // hypothesis entries it consumed
};

struct StabilityCertificate {
    std::vector<CertifiedVerdict> verdicts; // sorted by verdict name
    HypothesisReport hypothesis_report;
    TuningParameters tuning;
    std::string problem_name;

    bool certified() const { return !verdicts.empty(); }
    bool has(Verdict v) const;
    std::vector<std::string> verdict_names() const;
};

struct CertifyConfig {
    TuningConfig tuning;
    ValidationOptions validation;
};

/// Applies the theorem decision tree and assembles the realizing constants.
/// A failed hypothesis report yields a certificate with empty verdicts.
StabilityCertificate certify(const Problem& problem, const CertifyConfig& config = {});

} // namespace liaplab

#endif
