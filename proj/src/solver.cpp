#include "liaplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
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

bool all_finite(const std::vector<double>& a)
{
    for (double x : a)
        if (!std::isfinite(x))
            return false;
    return true;
}

} // namespace

Semidiscretization::Semidiscretization(const Problem& problem, int n_modes, int grid_factor)
    : problem_(problem), basis_(n_modes, grid_factor * n_modes + 1),
      trivial_(problem.forcing.is_zero && problem.damping.is_zero)
{
    if (grid_factor < 1)
        throw ConfigError("Semidiscretization: grid_factor must be >= 1");
}

void Semidiscretization::nonlinear_modes(double t, const std::vector<double>& u,
                                         const std::vector<double>& v,
                                         std::vector<double>& f) const
{
    const int n = basis_.n_modes();
    f.assign(static_cast<std::size_t>(n), 0.0);
    if (trivial_)
        return;

    const GridState u_grid = basis_.to_grid(u);
    const bool need_a = !problem_.damping.is_zero;
    GridState ut_grid, ux_grid, uxx_grid;
    double d = 0.0;
    if (need_a) {
        ut_grid = basis_.to_grid(v);
        if (problem_.damping.needs_gradients) {
            ux_grid = basis_.cos_to_grid(dx_cosine_coeffs(u));
            uxx_grid = basis_.to_grid(dxx_sine_coeffs(u));
        }
        if (problem_.damping.needs_norm) {
            SpectralState st(u, v, t);
            d = eval_norm_d(st, problem_.family.eps(t));
        }
    }

    GridState g(basis_.m_grid());
    for (int j = 0; j < basis_.m_grid(); ++j) {
        double val = problem_.forcing.is_zero ? 0.0 : problem_.forcing.eval(u_grid[j]);
        if (need_a) {
            DampingArgs args;
            args.x = basis_.grid_x()[j];
            args.t = t;
            args.u = u_grid[j];
            args.u_x = problem_.damping.needs_gradients ? ux_grid[j] : 0.0;
            args.u_t = ut_grid[j];
            args.u_xx = problem_.damping.needs_gradients ? uxx_grid[j] : 0.0;
            args.d = d;
            val -= problem_.damping.a_eval(args) * ut_grid[j];
        }
        g[j] = val;
    }
    f = basis_.to_modes(g, n);
}

void Semidiscretization::eval(double t, const std::vector<double>& u,
                              const std::vector<double>& v, std::vector<double>& du,
                              std::vector<double>& dv) const
{
    const int n = basis_.n_modes();
    std::vector<double> f;
    nonlinear_modes(t, u, v, f);
    du.resize(static_cast<std::size_t>(n));
    dv.resize(static_cast<std::size_t>(n));
    const double eps = problem_.family.eps(t);
    const double C = problem_.family.C(t);
    const double ap = problem_.damping.a_prime;
    for (int i = 0; i < n; ++i) {
        const double k2 = static_cast<double>(i + 1) * (i + 1);
        du[i] = v[i];
        dv[i] = -(eps * k2 + ap) * v[i] - C * k2 * u[i] + f[i];
    }
}

ModePoint linear_mode_oracle(int n, double eps0, double a_prime, double C0, double u_init,
                             double v_init, double t)
{
    const double k2 = static_cast<double>(n) * n;
    const double b = eps0 * k2 + a_prime;
    const double c = C0 * k2;
    const double disc = b * b - 4.0 * c;
    const double scale = std::max({b * b, 4.0 * std::abs(c), 1e-300});

    ModePoint p;
    if (std::abs(disc) <= 1e-12 * scale) {
        // critically damped
        const double r = -b / 2.0;
        const double c1 = u_init, c2 = v_init - r * u_init;
        const double e = std::exp(r * t);
        p.u = e * (c1 + c2 * t);
        p.v = e * (r * (c1 + c2 * t) + c2);
    } else if (disc < 0.0) {
        const double om = std::sqrt(-disc) / 2.0;
        const double s = -b / 2.0;
        const double c1 = u_init, c2 = (v_init - s * u_init) / om;
        const double e = std::exp(s * t);
        const double co = std::cos(om * t), si = std::sin(om * t);
        p.u = e * (c1 * co + c2 * si);
        p.v = e * (s * (c1 * co + c2 * si) + om * (-c1 * si + c2 * co));
    } else {
        const double rt = std::sqrt(disc);
        const double rp = (-b + rt) / 2.0, rm = (-b - rt) / 2.0;
        const double alpha = (v_init - rm * u_init) / (rp - rm);
        const double beta = u_init - alpha;
        p.u = alpha * std::exp(rp * t) + beta * std::exp(rm * t);
        p.v = alpha * rp * std::exp(rp * t) + beta * rm * std::exp(rm * t);
    }
    return p;
}

Trajectory integrate(const Problem& problem, const std::vector<double>& u0,
                     const std::vector<double>& u1, double t0, const SolverConfig& config,
                     const LiapunovParams& liapunov_params)
{
    if (!(config.dt > 0.0))
        throw ConfigError("integrate: dt must be positive");
    if (config.n_modes < 1)
        throw ConfigError("integrate: n_modes must be >= 1");
    if (config.sample_every < 1)
        throw ConfigError("integrate: sample_every must be >= 1");
    if (!(config.t_end > t0))
        throw ConfigError("integrate: t_end must exceed t0");
    const int N = config.n_modes;
    if (static_cast<int>(u0.size()) > N || static_cast<int>(u1.size()) > N)
        throw ConfigError("integrate: initial data carries more modes than n_modes");

    if (config.scheme == Scheme::Erk4) {
        if (!problem.family.eps_sup.is_finite())
            throw ConfigError("integrate: erk4 requires a finite declared sup of eps");
        const double guard =
            config.dt * (problem.family.eps_sup.value() * N * N + problem.damping.a_prime);
        if (guard > 2.0)
            throw ConfigError("integrate: erk4 stability guard violated, dt (sup_eps N^2 + a') = " +
                              fmt(guard) + " > 2");
    }

    Semidiscretization rhs(problem, N, config.grid_factor);
    const SineBasis& basis = rhs.basis();
    const double dt = config.dt;
    const long n_steps = std::lround((config.t_end - t0) / dt);
    if (n_steps < 1)
        throw ConfigError("integrate: fewer than one step on [t0, t_end]");
    const long SE = config.sample_every;

    std::vector<double> u(static_cast<std::size_t>(N), 0.0), v(static_cast<std::size_t>(N), 0.0);
    std::copy(u0.begin(), u0.end(), u.begin());
    std::copy(u1.begin(), u1.end(), v.begin());

    Trajectory traj;
    traj.params = liapunov_params;
    traj.t0 = t0;
    traj.dt = dt;
    traj.n_modes = N;
    traj.grid_factor = config.grid_factor;

    std::vector<double> Wbuf(static_cast<std::size_t>(n_steps) + 1,
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<long> sample_steps;

    auto needs_W = [&](long i) {
        const long r = i % SE;
        return r == 0 || r == 1 || r == SE - 1 || i <= 2 || i >= n_steps - 2;
    };

    std::vector<double> f_cur, f_prev, du, dv, k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v, tu, tv;
    const double ap = problem.damping.a_prime;

    for (long i = 0; i <= n_steps; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        if (needs_W(i)) {
            SpectralState st(u, v, t);
            Wbuf[static_cast<std::size_t>(i)] = eval_W(basis, st, problem, liapunov_params);
        }
        if (i % SE == 0 || i == n_steps) {
            SpectralState st(u, v, t);
            const double eps_t = problem.family.eps(t);
            TrajectorySample s;
            s.t = t;
            const double d2 = eval_norm_d_squared(st, eps_t);
            s.d = std::sqrt(d2);
            s.W = Wbuf[static_cast<std::size_t>(i)];
            s.W_dot_analytic = eval_W_dot_analytic(basis, st, problem, liapunov_params);
            s.H = eval_hamiltonian(basis, st, problem);
            const GridState ug = basis.to_grid(u);
            double sup = 0.0;
            for (double x : ug.values)
                sup = std::max(sup, std::abs(x));
            s.sup_abs_u = sup;
            if (d2 > 0.0) {
                const double kN = static_cast<double>(N) * N;
                const double e2 = eps_t * eps_t;
                const double top = 0.5 * std::numbers::pi *
                                   ((e2 * kN * kN + kN + 1.0) * u[N - 1] * u[N - 1] +
                                    v[N - 1] * v[N - 1]);
                traj.max_top_mode_fraction = std::max(traj.max_top_mode_fraction, top / d2);
            }
            traj.samples.push_back(s);
            traj.states.emplace_back(u, v, t);
            sample_steps.push_back(i);
        }
        if (i == n_steps)
            break;

        if (config.scheme == Scheme::Imex2) {
            rhs.nonlinear_modes(t, u, v, f_cur);
            if (i == 0)
                f_prev = f_cur;
            const double tm = t + dt / 2.0;
            const double em = problem.family.eps(tm);
            const double cm = problem.family.C(tm);
            const double h = dt / 2.0;
            for (int m = 0; m < N; ++m) {
                const double k2 = static_cast<double>(m + 1) * (m + 1);
                const double e = em * k2 + ap;
                const double c = cm * k2;
                const double fstar = 1.5 * f_cur[m] - 0.5 * f_prev[m];
                const double ru = u[m] + h * v[m];
                const double rv = v[m] + h * (-c * u[m] - e * v[m]) + dt * fstar;
                const double det = 1.0 + h * e + h * h * c;
                const double un = ((1.0 + h * e) * ru + h * rv) / det;
                const double vn = (-h * c * ru + rv) / det;
                u[m] = un;
                v[m] = vn;
            }
            f_prev.swap(f_cur);
        } else {
            rhs.eval(t, u, v, k1u, k1v);
            tu.resize(u.size());
            tv.resize(v.size());
            for (int m = 0; m < N; ++m) {
                tu[m] = u[m] + dt / 2.0 * k1u[m];
                tv[m] = v[m] + dt / 2.0 * k1v[m];
            }
            rhs.eval(t + dt / 2.0, tu, tv, k2u, k2v);
            for (int m = 0; m < N; ++m) {
                tu[m] = u[m] + dt / 2.0 * k2u[m];
                tv[m] = v[m] + dt / 2.0 * k2v[m];
            }
            rhs.eval(t + dt / 2.0, tu, tv, k3u, k3v);
            for (int m = 0; m < N; ++m) {
                tu[m] = u[m] + dt * k3u[m];
                tv[m] = v[m] + dt * k3v[m];
            }
            rhs.eval(t + dt, tu, tv, k4u, k4v);
            for (int m = 0; m < N; ++m) {
                u[m] += dt / 6.0 * (k1u[m] + 2.0 * k2u[m] + 2.0 * k3u[m] + k4u[m]);
                v[m] += dt / 6.0 * (k1v[m] + 2.0 * k2v[m] + 2.0 * k3v[m] + k4v[m]);
            }
        }

        if (!all_finite(u) || !all_finite(v))
            throw BlowUpError("integrate: solution blew up (non-finite state) after t = " +
                                  fmt(t) + "; last valid time = " + fmt(t),
                              t);
    }

    // Finite-difference derivative of the sampled W (centered where possible,
    // second-order one-sided at the ends).
    for (std::size_t s = 0; s < sample_steps.size(); ++s) {
        const long i = sample_steps[s];
        double fd;
        if (n_steps == 1) {
            fd = (Wbuf[1] - Wbuf[0]) / dt;
        } else if (i == 0) {
            fd = (-3.0 * Wbuf[0] + 4.0 * Wbuf[1] - Wbuf[2]) / (2.0 * dt);
        } else if (i == n_steps) {
            fd = (3.0 * Wbuf[static_cast<std::size_t>(i)] -
                  4.0 * Wbuf[static_cast<std::size_t>(i - 1)] +
                  Wbuf[static_cast<std::size_t>(i - 2)]) /
                 (2.0 * dt);
        } else {
            fd = (Wbuf[static_cast<std::size_t>(i + 1)] - Wbuf[static_cast<std::size_t>(i - 1)]) /
                 (2.0 * dt);
        }
        traj.samples[s].W_dot_fd = fd;
    }

    traj.resolution_flagged = traj.max_top_mode_fraction > 1e-8;
    return traj;
}

} // namespace liaplab
