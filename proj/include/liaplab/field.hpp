#ifndef LIAPLAB_FIELD_HPP
#define LIAPLAB_FIELD_HPP

#include <vector>

namespace liaplab {

/// Field values on the uniform interior grid x_j = j*pi/(M+1), j = 1..M.
/// Dirichlet fields vanish at the (excluded) endpoints 0 and pi.
struct GridState {
    std::vector<double> values;

    GridState() = default;
    explicit GridState(std::vector<double> v) : values(std::move(v)) {}
    explicit GridState(int m) : values(static_cast<std::size_t>(m), 0.0) {}
    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int j) { return values[static_cast<std::size_t>(j)]; }
    double operator[](int j) const { return values[static_cast<std::size_t>(j)]; }
};

/// Sine-mode coefficients of (u, u_t) at time t:
///   u(x) = sum_{n=1..N} u_modes[n-1] sin(n x).
/// The homogeneous Dirichlet conditions hold identically by construction.
struct SpectralState {
    std::vector<double> u_modes;
    std::vector<double> v_modes;
    double t = 0.0;

    SpectralState() = default;
    SpectralState(std::vector<double> u, std::vector<double> v, double time);
    int n_modes() const { return static_cast<int>(u_modes.size()); }
    bool all_finite() const;
};

/// Transform engine between N sine modes and M interior grid points.
/// Matrices are precomputed; the analysis direction is exact (round trip to
/// machine precision) whenever M >= N.
class SineBasis {
  public:
    SineBasis(int n_modes, int m_grid);

    int n_modes() const { return n_; }
    int m_grid() const { return m_; }
    double grid_spacing() const { return h_; }
    const std::vector<double>& grid_x() const { return x_; }

    /// Sine synthesis: grid_j = sum_n modes[n-1] sin(n x_j).
    GridState to_grid(const std::vector<double>& modes) const;
    /// Sine analysis: modes[n-1] = (2/(M+1)) sum_j grid_j sin(n x_j).
    /// Throws on M < n_target (aliasing).
    std::vector<double> to_modes(const GridState& grid, int n_target = 0) const;
    /// Cosine synthesis, for derivative fields: sum_n coef[n-1] cos(n x_j).
    GridState cos_to_grid(const std::vector<double>& coef) const;
    /// Composite trapezoid over [0, pi] with zero endpoint values.
    double quad(const GridState& g) const;

  private:
    int n_, m_;
    double h_;
    std::vector<double> x_;
    std::vector<double> sin_; // row-major M x N, sin((n+1) x_j)
    std::vector<double> cos_;
};

/// First-derivative cosine coefficients: n * u_modes[n-1].
std::vector<double> dx_cosine_coeffs(const std::vector<double>& u_modes);
/// Second-derivative sine coefficients: -n^2 * u_modes[n-1].
std::vector<double> dxx_sine_coeffs(const std::vector<double>& u_modes);

/// Weighted norm d with d^2 = int [eps^2 u_xx^2 + u_x^2 + u^2 + u_t^2] dx,
/// summed exactly in mode space. eps_t is the weight eps evaluated at state.t.
double eval_norm_d(const SpectralState& state, double eps_t);
double eval_norm_d_squared(const SpectralState& state, double eps_t);

/// int u_x^2 - int u^2 = (pi/2) sum (n^2 - 1) u_n^2  >= 0.
double poincare_gap(const std::vector<double>& u_modes);

/// Composite trapezoid value of int_0^pi f dx for f given on the interior
/// grid, endpoints taken as zero. Error O(M^-2) for smooth f.
double quad_nonlinear(const GridState& integrand_on_grid);

} // namespace liaplab

#endif
