#ifndef LIAPLAB_HARNESS_HPP
#define LIAPLAB_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liaplab/solver.hpp"
#include "liaplab/toml.hpp"
#include "liaplab/tuning.hpp"

namespace liaplab {

struct ProblemConfig {
    std::string family = "example1"; // example1 | example2 | example3 | constant
    double eps0 = 1.0;
    double p = 2.0;
    double C0 = 4.0;
    double q = 0.5;      // example2/example3 exponent
    double C1 = 1.0;     // example3
    double eps_base = 0.5, eps_amp = 0.5; // example3: eps = eps_base (1 + eps_amp sin t)
    double t0 = 0.0;
};

struct ForcingConfig {
    std::string kind = "zero"; // zero | sine | restoring_power | repulsive_power
    double b = 0.5;
    double omega = 1.0;
    double q = 1.0;
    double rho = std::numeric_limits<double>::infinity();
};

struct DampingConfig {
    std::string kind = "zero"; // zero | constant | abs_u | power_d
    double a_prime = 0.0;
    double A = 0.0;
    double tau = 0.0;
};

struct TuningSection {
    double margin = 0.01;
    double sigma = 0.5;
    std::optional<double> xi;
    double horizon = 1e6;
    double alpha = 0.1; // attractivity query radius
    double nu = 0.01;   // attractivity target
};

struct InitialConfig {
    std::vector<std::pair<int, double>> u{{1, 1.0}}; // (mode, amplitude) pairs
    std::vector<std::pair<int, double>> v;
    std::optional<double> scale_d_fraction_of_delta; // scale so d(t0) = frac * delta(sigma, t0)
    std::optional<double> scale_d_to;                // scale so d(t0) = value
};

struct OutputConfig {
    std::string dir = "out";
    std::uint64_t seed = 42;
    bool plots = false;
};

struct RunConfig {
    ProblemConfig problem;
    ForcingConfig forcing;
    DampingConfig damping;
    SolverConfig solver;
    TuningSection tuning;
    InitialConfig initial;
    OutputConfig output;
};

/// Parses and validates the TOML document; unknown sections or keys are
/// configuration errors.
RunConfig parse_run_config(const toml::Document& doc);
RunConfig load_run_config(const std::string& path);

Problem build_problem(const RunConfig& config);

enum class CheckVerdict { Pass, Fail, Inconclusive };
std::string to_string(CheckVerdict v);

struct EnvelopeCheck {
    std::string name;
    CheckVerdict verdict = CheckVerdict::Inconclusive;
    double worst_margin = 0.0; // signed: negative means violated
    double worst_time = 0.0;
    std::string detail;
};

struct EnvelopeReport {
    std::vector<EnvelopeCheck> checks;
    bool any_fail() const;
    bool any_inconclusive() const;
};

/// d(t0) < delta  =>  d(t) < sigma at every sample. An unmet precondition is
/// inconclusive, not a failure.
EnvelopeCheck check_stability_envelope(const Trajectory& traj, double sigma, double delta);
/// d(t) <= D exp(-E (t - t0)) d(t0) (1 + 1e-9); also requires the fitted
/// decay rate to dominate E.
EnvelopeCheck check_exponential_envelope(const Trajectory& traj, double D, double E,
                                         double delta);
EnvelopeCheck check_boundedness(const Trajectory& traj, double beta);
/// d(t) < nu for all samples t >= t0 + T; inconclusive when the horizon is
/// shorter than T.
EnvelopeCheck check_attractivity(const Trajectory& traj, double nu, double T);
/// dW/dt <= -eta d^2 + 1e-8 at every sample with t >= kappa and 0 < d < sigma,
/// re-evaluated with the given functional parameters.
EnvelopeCheck check_decay_inequality(const Trajectory& traj, const Problem& problem,
                                     const LiapunovParams& params, double eta, double kappa,
                                     double sigma);

struct RunArtifacts {
    StabilityCertificate certificate;
    std::optional<Trajectory> trajectory;
    EnvelopeReport envelopes;
    std::filesystem::path outdir;
    int exit_code = 0; // 0 pass, 1 fail, 2 inconclusive only, 3 config/hypothesis error
    std::optional<bool> legacy_comparison_reproduced; // remark1 bundle only
};

/// Full pipeline: build, certify, integrate, check every certified envelope,
/// write certificate.json / trajectory.csv / envelope_report.json /
/// run_summary.json (and SVG plots when enabled).
RunArtifacts run_experiment(const RunConfig& config);

/// Integrate + CSV only; falls back to gamma = 3, theta = max(a', 1) when the
/// problem fails certification.
RunArtifacts simulate_only(const RunConfig& config);

/// Pinned desk-scale bundles: "example1" (zero and sine forcing variants),
/// "example2", "example3", "remark1" (decay check with the certified
/// two-parameter functional vs. the theta = 0 legacy configuration).
RunArtifacts reproduce_example(const std::string& which);

/// Re-runs the experiment once per value of the dotted config path
/// (e.g. "solver.dt"), each into its own subdirectory. Returns the worst exit
/// code.
int sweep(const RunConfig& base, const std::string& param_path,
          const std::vector<double>& values);

/// Output root override: LIAPLAB_OUT, when set, is prepended to the
/// configured output directory.
std::filesystem::path resolve_outdir(const std::string& configured_dir);

std::string certificate_to_json_string(const StabilityCertificate& cert,
                                        const Problem& problem);
std::string envelope_report_to_json_string(const EnvelopeReport& report, int exit_code,
                                           std::uint64_t seed);
std::string trajectory_to_csv(const Trajectory& traj,
                              const std::function<double(double)>& envelope_bound);

} // namespace liaplab

#endif
