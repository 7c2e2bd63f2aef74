#include "liaplab/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace liaplab {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpectralState::SpectralState(std::vector<double> u, std::vector<double> v, double time)
    : u_modes(std::move(u)), v_modes(std::move(v)), t(time)
{
    if (u_modes.size() != v_modes.size())
        throw std::invalid_argument("SpectralState: u/v mode counts differ");
}

bool SpectralState::all_finite() const
{
    for (double x : u_modes)
        if (!std::isfinite(x))
            return false;
    for (double x : v_modes)
        if (!std::isfinite(x))
            return false;
    return std::isfinite(t);
}

SineBasis::SineBasis(int n_modes, int m_grid) : n_(n_modes), m_(m_grid)
{
    if (n_ < 1)
        throw std::invalid_argument("SineBasis: need at least one mode");
    if (m_ < n_)
        throw std::invalid_argument("SineBasis: grid smaller than mode count (aliasing)");
    h_ = kPi / (m_ + 1);
    x_.resize(m_);
    sin_.resize(static_cast<std::size_t>(m_) * n_);
    cos_.resize(static_cast<std::size_t>(m_) * n_);
    for (int j = 0; j < m_; ++j) {
        x_[j] = (j + 1) * h_;
        for (int n = 0; n < n_; ++n) {
            sin_[static_cast<std::size_t>(j) * n_ + n] = std::sin((n + 1) * x_[j]);
            cos_[static_cast<std::size_t>(j) * n_ + n] = std::cos((n + 1) * x_[j]);
        }
    }
}

GridState SineBasis::to_grid(const std::vector<double>& modes) const
{
    if (static_cast<int>(modes.size()) > m_)
        throw std::invalid_argument("SineBasis::to_grid: more modes than grid points (aliasing)");
    GridState g(m_);
    const int nm = static_cast<int>(modes.size());
    for (int j = 0; j < m_; ++j) {
        const double* row = &sin_[static_cast<std::size_t>(j) * n_];
        double s = 0.0;
        for (int n = 0; n < nm; ++n)
            s += modes[n] * row[n];
        g[j] = s;
    }
    return g;
}

std::vector<double> SineBasis::to_modes(const GridState& grid, int n_target) const
{
    if (grid.size() != m_)
        throw std::invalid_argument("SineBasis::to_modes: grid size mismatch");
    if (n_target <= 0)
        n_target = n_;
    if (m_ < n_target)
        throw std::invalid_argument("SineBasis::to_modes: grid smaller than mode count (aliasing)");
    std::vector<double> modes(static_cast<std::size_t>(n_target), 0.0);
    const double scale = 2.0 / (m_ + 1);
    for (int n = 0; n < n_target; ++n) {
        double s = 0.0;
        for (int j = 0; j < m_; ++j)
            s += grid[j] * sin_[static_cast<std::size_t>(j) * n_ + n];
        modes[n] = scale * s;
    }
    return modes;
}

GridState SineBasis::cos_to_grid(const std::vector<double>& coef) const
{
    if (static_cast<int>(coef.size()) > m_)
        throw std::invalid_argument("SineBasis::cos_to_grid: more modes than grid points");
    GridState g(m_);
    const int nm = static_cast<int>(coef.size());
    for (int j = 0; j < m_; ++j) {
        const double* row = &cos_[static_cast<std::size_t>(j) * n_];
        double s = 0.0;
        for (int n = 0; n < nm; ++n)
            s += coef[n] * row[n];
        g[j] = s;
    }
    return g;
}

double SineBasis::quad(const GridState& g) const
{
    if (g.size() != m_)
        throw std::invalid_argument("SineBasis::quad: grid size mismatch");
    return quad_nonlinear(g);
}

std::vector<double> dx_cosine_coeffs(const std::vector<double>& u_modes)
{
    std::vector<double> c(u_modes.size());
    for (std::size_t n = 0; n < u_modes.size(); ++n)
        c[n] = static_cast<double>(n + 1) * u_modes[n];
    return c;
}

std::vector<double> dxx_sine_coeffs(const std::vector<double>& u_modes)
{
    std::vector<double> c(u_modes.size());
    for (std::size_t n = 0; n < u_modes.size(); ++n)
        c[n] = -static_cast<double>((n + 1) * (n + 1)) * u_modes[n];
    return c;
}

double eval_norm_d_squared(const SpectralState& state, double eps_t)
{
    double s = 0.0;
    const double e2 = eps_t * eps_t;
    for (int n = 0; n < state.n_modes(); ++n) {
        const double k2 = static_cast<double>(n + 1) * (n + 1);
        const double u = state.u_modes[n];
        const double v = state.v_modes[n];
        s += (e2 * k2 * k2 + k2 + 1.0) * u * u + v * v;
    }
    return 0.5 * kPi * s;
}

double eval_norm_d(const SpectralState& state, double eps_t)
{
    return std::sqrt(eval_norm_d_squared(state, eps_t));
}

double poincare_gap(const std::vector<double>& u_modes)
{
    double s = 0.0;
    for (std::size_t n = 0; n < u_modes.size(); ++n) {
        const double k2 = static_cast<double>((n + 1) * (n + 1));
        s += (k2 - 1.0) * u_modes[n] * u_modes[n];
    }
    return 0.5 * kPi * s;
}

double quad_nonlinear(const GridState& g)
{
    // Endpoint values are zero, so the trapezoid reduces to h * sum(interior).
    const double h = kPi / (g.size() + 1);
    double s = 0.0;
    for (double v : g.values)
        s += v;
    return h * s;
}

} // namespace liaplab
