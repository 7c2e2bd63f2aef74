#ifndef LIAPLAB_SOLVER_HPP
#define LIAPLAB_SOLVER_HPP

#include <vector>

#include "liaplab/coefficients.hpp"
#include "liaplab/field.hpp"
#include "liaplab/liapunov.hpp"

namespace liaplab {

class BlowUpError : public std::runtime_error {
  public:
    BlowUpError(const std::string& what, double t) : std::runtime_error(what), last_valid_time(t)
    {
    }
    double last_valid_time;
};

enum class Scheme { Imex2, Erk4 };

struct SolverConfig {
    int n_modes = 64;
    double dt = 1e-3;
    Scheme scheme = Scheme::Imex2;
    double t_end = 10.0;
    int sample_every = 10;
    int grid_factor = 2; // M = grid_factor * N + 1
};

struct TrajectorySample {
    double t = 0.0;
    double d = 0.0;
    double W = 0.0;
    double W_dot_analytic = 0.0;
    double W_dot_fd = 0.0;
    double H = 0.0;
    double sup_abs_u = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<SpectralState> states; // at the sample times
    LiapunovParams params;
    double t0 = 0.0;
    double dt = 0.0;
    int n_modes = 0;
    int grid_factor = 2;
    double max_top_mode_fraction = 0.0; // energy share of the highest retained mode
    bool resolution_flagged = false;    // fraction exceeded 1e-8: N too small

    double d0() const { return samples.front().d; }
    double t_end() const { return samples.back().t; }
};

/// Mode-space right-hand side of the semidiscretized equation:
///   u_n' = v_n,
///   v_n' = -(eps(t) n^2 + a') v_n - C(t) n^2 u_n + f_n(t, u, v),
/// with f = F(u) - a u_t evaluated pointwise on the dealiasing grid and
/// projected back onto the retained modes.
class Semidiscretization {
  public:
    Semidiscretization(const Problem& problem, int n_modes, int grid_factor = 2);

    void eval(double t, const std::vector<double>& u, const std::vector<double>& v,
              std::vector<double>& du, std::vector<double>& dv) const;
    /// Only the nonlinear modes f_n (zero vector when F = 0 and a = 0).
    void nonlinear_modes(double t, const std::vector<double>& u, const std::vector<double>& v,
                         std::vector<double>& f) const;
    const SineBasis& basis() const { return basis_; }
    const Problem& problem() const { return problem_; }

  private:
    const Problem& problem_;
    SineBasis basis_;
    bool trivial_; // no nonlinear work at all
};

/// Exact solution of x'' + (eps0 n^2 + a') x' + C0 n^2 x = 0 by the
/// discriminant case split (under / critically / over-damped).
struct ModePoint {
    double u = 0.0;
    double v = 0.0;
};
ModePoint linear_mode_oracle(int n, double eps0, double a_prime, double C0, double u_init,
                             double v_init, double t);

/// Integrates on [t0, t_end]. imex2 treats the per-mode linear part with the
/// trapezoidal rule (coefficients frozen at the step midpoint) and
/// extrapolates the nonlinear modes to second order; erk4 is the classical
/// explicit scheme with a stability guard dt (sup_eps N^2 + a') <= 2.
/// Initial data are mode vectors (shorter vectors are zero-padded).
Trajectory integrate(const Problem& problem, const std::vector<double>& u0,
                     const std::vector<double>& u1, double t0, const SolverConfig& config,
                     const LiapunovParams& liapunov_params);

} // namespace liaplab

#endif
