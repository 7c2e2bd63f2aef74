#include "liaplab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace liaplab {

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json ext_to_json(const ExtReal& e)
{
    if (e.is_pos_inf())
        return "inf";
    if (e.is_neg_inf())
        return "-inf";
    return e.value();
}

void write_text_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << content;
}

void check_keys(const toml::Table& table, const std::string& section,
                const std::set<std::string>& allowed)
{
    for (const auto& [key, value] : table)
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in [" + section + "]");
}

double get_num(const toml::Table& t, const std::string& key, double fallback)
{
    auto it = t.find(key);
    return it == t.end() ? fallback : it->second.as_number();
}

std::string get_str(const toml::Table& t, const std::string& key, const std::string& fallback)
{
    auto it = t.find(key);
    return it == t.end() ? fallback : it->second.as_string();
}

std::vector<std::pair<int, double>> get_mode_list(const toml::Table& t, const std::string& key,
                                                  std::vector<std::pair<int, double>> fallback)
{
    auto it = t.find(key);
    if (it == t.end())
        return fallback;
    std::vector<std::pair<int, double>> out;
    for (const auto& entry : it->second.as_array()) {
        const auto& pair = entry.as_array();
        if (pair.size() != 2)
            throw ConfigError("initial." + key + ": entries must be [mode, amplitude] pairs");
        const long long mode = pair[0].as_integer();
        if (mode < 1)
            throw ConfigError("initial." + key + ": mode indices start at 1");
        out.emplace_back(static_cast<int>(mode), pair[1].as_number());
    }
    return out;
}

int exit_from_checks(const EnvelopeReport& report)
{
    if (report.any_fail())
        return 1;
    if (report.any_inconclusive())
        return 2;
    return 0;
}

int combine_exit(int a, int b)
{
    for (int code : {1, 3, 2})
        if (a == code || b == code)
            return code;
    return 0;
}

/// Least-squares decay rate of ln d(t); NaN when fewer than two usable points.
double fitted_decay_rate(const Trajectory& traj)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (const auto& s : traj.samples) {
        if (!(s.d > 1e-300))
            continue;
        const double x = s.t, y = std::log(s.d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return -(n * sxy - sx * sy) / denom;
}

void write_svg_plot(const fs::path& path, const std::string& title,
                    const std::vector<double>& t,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series)
{
    const int W = 860, H = 520, ML = 70, MR = 20, MT = 40, MB = 50;
    double tmin = t.front(), tmax = t.back();
    double ymin = 0.0, ymax = 1e-300;
    for (const auto& [name, ys] : series)
        for (double y : ys)
            if (std::isfinite(y)) {
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
    if (ymax <= ymin)
        ymax = ymin + 1.0;
    auto X = [&](double x) { return ML + (x - tmin) / (tmax - tmin) * (W - ML - MR); };
    auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    svg << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    int ci = 0;
    for (const auto& [name, ys] : series) {
        svg << "<polyline fill='none' stroke='" << colors[ci % 4] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < t.size() && i < ys.size(); ++i)
            if (std::isfinite(ys[i]))
                svg << X(t[i]) << "," << Y(ys[i]) << " ";
        svg << "'/>\n";
        svg << "<text x='" << W - MR - 160 << "' y='" << MT + 18 * (ci + 1) << "' fill='"
            << colors[ci % 4] << "' font-size='13'>" << name << "</text>\n";
        ++ci;
    }
    svg << "<text x='" << W / 2 << "' y='" << H - 14 << "' text-anchor='middle' font-size='13'>t</text>\n";
    svg << "</svg>\n";
    write_text_file(path, svg.str());
}

} // namespace

// ---------------------------------------------------------------------------
// Configuration

RunConfig parse_run_config(const toml::Document& doc)
{
    static const std::set<std::string> sections = {"problem", "forcing", "damping", "solver",
                                                   "tuning", "initial", "output"};
    if (!doc.root.empty())
        throw ConfigError("unknown top-level key '" + doc.root.begin()->first +
                          "' (expected sections [problem] [forcing] [damping] [solver] "
                          "[tuning] [initial] [output])");
    for (const auto& [name, table] : doc.tables)
        if (!sections.count(name))
            throw ConfigError("unknown section [" + name + "]");

    RunConfig cfg;
    if (doc.has_table("problem")) {
        const auto& t = doc.tables.at("problem");
        check_keys(t, "problem",
                   {"family", "eps0", "p", "C0", "q", "C1", "eps_base", "eps_amp", "t0"});
        cfg.problem.family = get_str(t, "family", cfg.problem.family);
        cfg.problem.eps0 = get_num(t, "eps0", cfg.problem.eps0);
        cfg.problem.p = get_num(t, "p", cfg.problem.p);
        cfg.problem.C0 = get_num(t, "C0", cfg.problem.C0);
        cfg.problem.q = get_num(t, "q", cfg.problem.q);
        cfg.problem.C1 = get_num(t, "C1", cfg.problem.C1);
        cfg.problem.eps_base = get_num(t, "eps_base", cfg.problem.eps_base);
        cfg.problem.eps_amp = get_num(t, "eps_amp", cfg.problem.eps_amp);
        cfg.problem.t0 = get_num(t, "t0", cfg.problem.t0);
    }
    if (doc.has_table("forcing")) {
        const auto& t = doc.tables.at("forcing");
        check_keys(t, "forcing", {"kind", "b", "omega", "q", "rho"});
        cfg.forcing.kind = get_str(t, "kind", cfg.forcing.kind);
        cfg.forcing.b = get_num(t, "b", cfg.forcing.b);
        cfg.forcing.omega = get_num(t, "omega", cfg.forcing.omega);
        cfg.forcing.q = get_num(t, "q", cfg.forcing.q);
        cfg.forcing.rho = get_num(t, "rho", cfg.forcing.rho);
    }
    if (doc.has_table("damping")) {
        const auto& t = doc.tables.at("damping");
        check_keys(t, "damping", {"kind", "a_prime", "A", "tau"});
        cfg.damping.kind = get_str(t, "kind", cfg.damping.kind);
        cfg.damping.a_prime = get_num(t, "a_prime", cfg.damping.a_prime);
        cfg.damping.A = get_num(t, "A", cfg.damping.A);
        cfg.damping.tau = get_num(t, "tau", cfg.damping.tau);
    }
    if (doc.has_table("solver")) {
        const auto& t = doc.tables.at("solver");
        check_keys(t, "solver",
                   {"n_modes", "dt", "scheme", "t_end", "sample_every", "grid_factor"});
        cfg.solver.n_modes = static_cast<int>(
            t.count("n_modes") ? t.at("n_modes").as_integer() : cfg.solver.n_modes);
        cfg.solver.dt = get_num(t, "dt", cfg.solver.dt);
        const std::string scheme = get_str(t, "scheme", "imex2");
        if (scheme == "imex2")
            cfg.solver.scheme = Scheme::Imex2;
        else if (scheme == "erk4")
            cfg.solver.scheme = Scheme::Erk4;
        else
            throw ConfigError("solver.scheme must be 'imex2' or 'erk4', got '" + scheme + "'");
        cfg.solver.t_end = get_num(t, "t_end", cfg.solver.t_end);
        cfg.solver.sample_every = static_cast<int>(
            t.count("sample_every") ? t.at("sample_every").as_integer()
                                    : cfg.solver.sample_every);
        cfg.solver.grid_factor = static_cast<int>(
            t.count("grid_factor") ? t.at("grid_factor").as_integer() : cfg.solver.grid_factor);
    }
    if (doc.has_table("tuning")) {
        const auto& t = doc.tables.at("tuning");
        check_keys(t, "tuning", {"margin", "sigma", "xi", "horizon", "alpha", "nu"});
        cfg.tuning.margin = get_num(t, "margin", cfg.tuning.margin);
        cfg.tuning.sigma = get_num(t, "sigma", cfg.tuning.sigma);
        if (t.count("xi"))
            cfg.tuning.xi = t.at("xi").as_number();
        cfg.tuning.horizon = get_num(t, "horizon", cfg.tuning.horizon);
        cfg.tuning.alpha = get_num(t, "alpha", cfg.tuning.alpha);
        cfg.tuning.nu = get_num(t, "nu", cfg.tuning.nu);
    }
    if (doc.has_table("initial")) {
        const auto& t = doc.tables.at("initial");
        check_keys(t, "initial", {"u", "v", "scale_d_fraction_of_delta", "scale_d_to"});
        cfg.initial.u = get_mode_list(t, "u", cfg.initial.u);
        cfg.initial.v = get_mode_list(t, "v", cfg.initial.v);
        if (t.count("scale_d_fraction_of_delta"))
            cfg.initial.scale_d_fraction_of_delta =
                t.at("scale_d_fraction_of_delta").as_number();
        if (t.count("scale_d_to"))
            cfg.initial.scale_d_to = t.at("scale_d_to").as_number();
        if (cfg.initial.scale_d_fraction_of_delta && cfg.initial.scale_d_to)
            throw ConfigError("initial: scale_d_fraction_of_delta and scale_d_to are "
                              "mutually exclusive");
    }
    if (doc.has_table("output")) {
        const auto& t = doc.tables.at("output");
        check_keys(t, "output", {"dir", "seed", "plots"});
        cfg.output.dir = get_str(t, "dir", cfg.output.dir);
        if (t.count("seed"))
            cfg.output.seed = static_cast<std::uint64_t>(t.at("seed").as_integer());
        if (t.count("plots"))
            cfg.output.plots = t.at("plots").as_bool();
    }

    if (cfg.tuning.xi && !(cfg.tuning.sigma < *cfg.tuning.xi))
        throw ConfigError("tuning: requires sigma < xi");
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    return parse_run_config(toml::parse_file(path));
}

Problem build_problem(const RunConfig& config)
{
    ForcingTerm forcing = ForcingTerm::zero();
    const auto& fc = config.forcing;
    if (fc.kind == "zero")
        forcing = ForcingTerm::zero();
    else if (fc.kind == "sine")
        forcing = ForcingTerm::sine(fc.b, fc.omega);
    else if (fc.kind == "restoring_power")
        forcing = ForcingTerm::restoring_power(fc.b, fc.q);
    else if (fc.kind == "repulsive_power")
        forcing = ForcingTerm::repulsive_power(fc.b, fc.q, fc.rho);
    else
        throw ConfigError("forcing.kind must be zero|sine|restoring_power|repulsive_power, "
                          "got '" + fc.kind + "'");

    DampingTerm damping = DampingTerm::none(0.0);
    const auto& dc = config.damping;
    if (dc.kind == "zero")
        damping = DampingTerm::none(dc.a_prime);
    else if (dc.kind == "constant")
        damping = DampingTerm::constant(dc.a_prime, dc.A);
    else if (dc.kind == "abs_u")
        damping = DampingTerm::abs_u(dc.a_prime, dc.A);
    else if (dc.kind == "power_d")
        damping = DampingTerm::power_d(dc.a_prime, dc.A, dc.tau);
    else
        throw ConfigError("damping.kind must be zero|constant|abs_u|power_d, got '" + dc.kind +
                          "'");

    const auto& pc = config.problem;
    if (pc.family == "example1")
        return make_example1(pc.eps0, pc.p, pc.C0, std::move(forcing), std::move(damping));
    if (pc.family == "constant")
        return make_example1(pc.eps0, 0.0, pc.C0, std::move(forcing), std::move(damping));
    if (pc.family == "example2")
        return make_example2(pc.eps0, pc.p, pc.C0, pc.q, std::move(forcing), std::move(damping));
    if (pc.family == "example3") {
        if (!(pc.eps_base >= 0.0) || pc.eps_amp < 0.0 || pc.eps_amp > 1.0)
            throw ConfigError("example3: requires eps_base >= 0 and 0 <= eps_amp <= 1");
        const double b = pc.eps_base, a = pc.eps_amp;
        EpsSpec es;
        es.eps = [b, a](double t) { return b * (1.0 + a * std::sin(t)); };
        es.eps_dot = [b, a](double t) { return b * a * std::cos(t); };
        es.eps_ddot = [b, a](double t) { return -b * a * std::sin(t); };
        es.eps_inf = b * (1.0 - a);
        es.eps_sup = ExtReal::finite(b * (1.0 + a));
        es.eps_dot_inf = ExtReal::finite(-b * a);
        es.eps_dot_sup = ExtReal::finite(b * a);
        es.eps_ddot_inf = ExtReal::finite(-b * a);
        return make_example3(es, pc.C0, pc.C1, pc.q, std::move(forcing), std::move(damping));
    }
    throw ConfigError("problem.family must be example1|example2|example3|constant, got '" +
                      pc.family + "'");
}

// ---------------------------------------------------------------------------
// Envelope checks

std::string to_string(CheckVerdict v)
{
    switch (v) {
    case CheckVerdict::Pass: return "pass";
    case CheckVerdict::Fail: return "fail";
    case CheckVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

bool EnvelopeReport::any_fail() const
{
    return std::any_of(checks.begin(), checks.end(),
                       [](const EnvelopeCheck& c) { return c.verdict == CheckVerdict::Fail; });
}

bool EnvelopeReport::any_inconclusive() const
{
    return std::any_of(checks.begin(), checks.end(), [](const EnvelopeCheck& c) {
        return c.verdict == CheckVerdict::Inconclusive;
    });
}

EnvelopeCheck check_stability_envelope(const Trajectory& traj, double sigma, double delta)
{
    EnvelopeCheck c;
    c.name = "stability_envelope";
    if (!(traj.d0() < delta)) {
        c.verdict = CheckVerdict::Inconclusive;
        c.detail = "precondition d(t0) < delta unmet: d(t0) = " + fmt17(traj.d0()) +
                   ", delta = " + fmt17(delta);
        return c;
    }
    double max_d = -1.0, max_t = traj.t0;
    for (const auto& s : traj.samples)
        if (s.d > max_d) {
            max_d = s.d;
            max_t = s.t;
        }
    c.worst_margin = sigma - max_d;
    c.worst_time = max_t;
    c.verdict = (max_d < sigma) ? CheckVerdict::Pass : CheckVerdict::Fail;
    c.detail = "max d = " + fmt17(max_d) + " at t = " + fmt17(max_t) + " against sigma = " +
               fmt17(sigma);
    return c;
}

EnvelopeCheck check_exponential_envelope(const Trajectory& traj, double D, double E, double delta)
{
    EnvelopeCheck c;
    c.name = "exponential_envelope";
    const double d0 = traj.d0();
    if (!(d0 < delta)) {
        c.verdict = CheckVerdict::Inconclusive;
        c.detail = "precondition d(t0) < delta unmet: d(t0) = " + fmt17(d0) + ", delta = " +
                   fmt17(delta);
        return c;
    }
    double worst = std::numeric_limits<double>::infinity();
    double worst_t = traj.t0;
    bool ok = true;
    for (const auto& s : traj.samples) {
        const double bound = D * std::exp(-E * (s.t - traj.t0)) * d0 * (1.0 + 1e-9);
        const double margin = bound - s.d;
        if (margin < worst) {
            worst = margin;
            worst_t = s.t;
        }
        if (s.d > bound)
            ok = false;
    }
    const double rate = fitted_decay_rate(traj);
    const bool rate_ok = std::isnan(rate) || rate >= E;
    c.worst_margin = worst;
    c.worst_time = worst_t;
    c.verdict = (ok && rate_ok) ? CheckVerdict::Pass : CheckVerdict::Fail;
    c.detail = "fitted decay rate = " + fmt17(rate) + ", certified E = " + fmt17(E) +
               "; min envelope margin = " + fmt17(worst);
    return c;
}

EnvelopeCheck check_boundedness(const Trajectory& traj, double beta)
{
    EnvelopeCheck c;
    c.name = "boundedness";
    double max_d = -1.0, max_t = traj.t0;
    for (const auto& s : traj.samples)
        if (s.d > max_d) {
            max_d = s.d;
            max_t = s.t;
        }
    c.worst_margin = beta - max_d;
    c.worst_time = max_t;
    c.verdict = (max_d < beta) ? CheckVerdict::Pass : CheckVerdict::Fail;
    c.detail = "max d = " + fmt17(max_d) + " against beta = " + fmt17(beta);
    return c;
}

EnvelopeCheck check_attractivity(const Trajectory& traj, double nu, double T)
{
    EnvelopeCheck c;
    c.name = "attractivity";
    const double cutoff = traj.t0 + T;
    if (traj.samples.back().t < cutoff) {
        c.verdict = CheckVerdict::Inconclusive;
        c.detail = "horizon shorter than T: need t_end >= " + fmt17(cutoff) + ", have " +
                   fmt17(traj.samples.back().t);
        return c;
    }
    double max_d = -1.0, max_t = cutoff;
    for (const auto& s : traj.samples) {
        if (s.t < cutoff)
            continue;
        if (s.d > max_d) {
            max_d = s.d;
            max_t = s.t;
        }
    }
    c.worst_margin = nu - max_d;
    c.worst_time = max_t;
    c.verdict = (max_d < nu) ? CheckVerdict::Pass : CheckVerdict::Fail;
    c.detail = "max d = " + fmt17(max_d) + " on t >= t0 + T = " + fmt17(cutoff) +
               " against nu = " + fmt17(nu);
    return c;
}

EnvelopeCheck check_decay_inequality(const Trajectory& traj, const Problem& problem,
                                     const LiapunovParams& params, double eta, double kappa,
                                     double sigma)
{
    EnvelopeCheck c;
    c.name = "decay_inequality";
    SineBasis basis(traj.n_modes, traj.grid_factor * traj.n_modes + 1);
    double worst = -std::numeric_limits<double>::infinity();
    double worst_t = traj.t0;
    long applicable = 0;
    for (const auto& st : traj.states) {
        if (st.t < kappa)
            continue;
        const double d2 = eval_norm_d_squared(st, problem.family.eps(st.t));
        if (!(d2 > 0.0) || !(d2 < sigma * sigma))
            continue;
        const double wdot = eval_W_dot_analytic(basis, st, problem, params);
        const double slack = wdot + eta * d2; // must stay <= 1e-8
        ++applicable;
        if (slack > worst) {
            worst = slack;
            worst_t = st.t;
        }
    }
    if (applicable == 0) {
        c.verdict = CheckVerdict::Inconclusive;
        c.detail = "no samples with t >= kappa and 0 < d < sigma";
        return c;
    }
    c.worst_margin = -worst; // positive when the inequality holds
    c.worst_time = worst_t;
    c.verdict = (worst <= 1e-8) ? CheckVerdict::Pass : CheckVerdict::Fail;
    c.detail = "max (dW/dt + eta d^2) = " + fmt17(worst) + " at t = " + fmt17(worst_t) +
               " over " + std::to_string(applicable) + " samples";
    return c;
}

// ---------------------------------------------------------------------------
// Serialization

std::string certificate_to_json_string(const StabilityCertificate& cert, const Problem& problem)
{
    json j;
    j["problem"] = cert.problem_name;
    j["certified"] = cert.certified();
    j["verdicts"] = cert.verdict_names();
    json theorems = json::object();
    json used = json::object();
    for (const auto& cv : cert.verdicts) {
        theorems[to_string(cv.verdict)] = to_string(cv.theorem);
        used[to_string(cv.verdict)] = cv.hypotheses;
    }
    j["theorems"] = theorems;
    j["hypotheses_used"] = used;

    json checks = json::array();
    for (const auto& hc : cert.hypothesis_report.checks) {
        json e;
        e["name"] = hc.name;
        e["passed"] = hc.passed;
        e["skipped"] = hc.skipped;
        e["detail"] = hc.detail;
        checks.push_back(e);
    }
    j["hypothesis_report"] = checks;
    j["failed_hypotheses"] = cert.hypothesis_report.failed_names();

    if (cert.certified()) {
        const auto& tp = cert.tuning;
        json k;
        k["theta1"] = tp.theta1;
        k["theta2"] = tp.theta2;
        k["theta"] = tp.theta;
        k["gamma31"] = tp.gamma31;
        k["gamma32"] = tp.gamma32;
        k["gamma1"] = tp.gamma1;
        k["gamma2"] = tp.gamma2;
        k["k_decay"] = tp.k_decay;
        k["k_lower"] = tp.k_lower;
        k["chi"] = tp.chi;
        k["eta"] = tp.eta;
        k["tau"] = tp.tau;
        k["sigma_M"] = ext_to_json(tp.sigma_M);
        k["r_M"] = ext_to_json(tp.r_M);
        k["xi"] = tp.xi;
        k["kappa"] = tp.kappa;
        k["h_xi"] = tp.h_xi;
        k["g_sup"] = ext_to_json(tp.g_sup);
        if (tp.has_decay_constants) {
            json d;
            d["delta"] = tp.delta;
            d["D"] = tp.D;
            d["E"] = tp.E;
            k["decay"] = d;
        }
        if (std::isfinite(tp.kappa)) {
            json table;
            std::vector<double> sigmas = {0.25 * tp.xi, 0.5 * tp.xi, 0.75 * tp.xi};
            std::vector<double> t0s = {tp.kappa, tp.kappa + 1.0, tp.kappa + 10.0};
            table["sigma"] = sigmas;
            table["t0"] = t0s;
            json rows = json::array();
            for (double s : sigmas) {
                json row = json::array();
                for (double t0 : t0s)
                    row.push_back(compute_delta(s, t0, tp, problem));
                rows.push_back(row);
            }
            table["delta"] = rows;
            k["delta_table"] = table;
            if (tp.g_sup.is_finite()) {
                json u = json::array();
                for (double s : sigmas)
                    u.push_back(compute_delta_uniform(s, tp, problem));
                k["delta_uniform"] = u;
            }
        }
        if (cert.has(Verdict::UniformlyBounded) || cert.has(Verdict::EventuallyUniformlyBounded)) {
            json table;
            std::vector<double> deltas;
            const double cap = cert.tuning.r_M.is_finite()
                                   ? 0.99 * invert_B(cert.tuning.r_M.value() *
                                                         std::sqrt(tp.chi) /
                                                         std::sqrt(tp.g_sup.value()),
                                                     problem.forcing)
                                   : 1.0;
            deltas = {0.25 * cap, 0.5 * cap, 0.75 * cap};
            json betas = json::array(), ss = json::array();
            for (double d : deltas) {
                const auto br = compute_beta_s(d, tp, problem);
                betas.push_back(br.beta);
                ss.push_back(br.s);
            }
            table["delta"] = deltas;
            table["beta"] = betas;
            table["s"] = ss;
            k["beta_table"] = table;
        }
        j["constants"] = k;
    }
    return j.dump(2) + "\n";
}

std::string envelope_report_to_json_string(const EnvelopeReport& report, int exit_code,
                                           std::uint64_t seed)
{
    json j;
    json checks = json::array();
    for (const auto& c : report.checks) {
        json e;
        e["name"] = c.name;
        e["verdict"] = to_string(c.verdict);
        e["worst_margin"] = c.worst_margin;
        e["worst_time"] = c.worst_time;
        e["detail"] = c.detail;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["exit_code"] = exit_code;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

std::string trajectory_to_csv(const Trajectory& traj,
                              const std::function<double(double)>& envelope_bound)
{
    std::ostringstream out;
    out << "t,d,W,W_dot_analytic,W_dot_fd,H,sup_abs_u,envelope_bound\n";
    for (const auto& s : traj.samples) {
        const double bound =
            envelope_bound ? envelope_bound(s.t) : std::numeric_limits<double>::quiet_NaN();
        out << fmt17(s.t) << ',' << fmt17(s.d) << ',' << fmt17(s.W) << ','
            << fmt17(s.W_dot_analytic) << ',' << fmt17(s.W_dot_fd) << ',' << fmt17(s.H) << ','
            << fmt17(s.sup_abs_u) << ',' << fmt17(bound) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Experiment pipeline

std::filesystem::path resolve_outdir(const std::string& configured_dir)
{
    const char* env = std::getenv("LIAPLAB_OUT");
    if (env != nullptr && *env != '\0')
        return fs::path(env) / configured_dir;
    return fs::path(configured_dir);
}

namespace {

std::vector<double> modes_from_pairs(const std::vector<std::pair<int, double>>& pairs, int n)
{
    std::vector<double> modes(static_cast<std::size_t>(n), 0.0);
    for (const auto& [mode, amp] : pairs) {
        if (mode > n)
            throw ConfigError("initial data references mode " + std::to_string(mode) +
                              " beyond n_modes = " + std::to_string(n));
        modes[static_cast<std::size_t>(mode - 1)] = amp;
    }
    return modes;
}

void write_run_summary(const fs::path& dir, const RunConfig& config, const RunArtifacts& art)
{
    json j;
    j["seed"] = config.output.seed;
    j["exit_code"] = art.exit_code;
    j["certified"] = art.certificate.certified();
    if (art.trajectory) {
        j["d0"] = art.trajectory->d0();
        j["t0"] = art.trajectory->t0;
        j["t_end"] = art.trajectory->t_end();
        j["n_samples"] = art.trajectory->samples.size();
        j["max_top_mode_fraction"] = art.trajectory->max_top_mode_fraction;
        j["resolution_flagged"] = art.trajectory->resolution_flagged;
    }
    if (art.legacy_comparison_reproduced)
        j["legacy_comparison_reproduced"] = *art.legacy_comparison_reproduced;
    write_text_file(dir / "run_summary.json", j.dump(2) + "\n");
}

} // namespace

RunArtifacts run_experiment(const RunConfig& config)
{
    RunArtifacts art;
    art.outdir = resolve_outdir(config.output.dir);
    fs::create_directories(art.outdir);

    Problem problem = build_problem(config);
    CertifyConfig cc;
    cc.tuning.margin = config.tuning.margin;
    cc.tuning.xi = config.tuning.xi;
    cc.tuning.t_bar_horizon = config.tuning.horizon;
    art.certificate = certify(problem, cc);
    write_text_file(art.outdir / "certificate.json",
                    certificate_to_json_string(art.certificate, problem));

    if (!art.certificate.certified()) {
        art.exit_code = 3;
        write_text_file(art.outdir / "envelope_report.json",
                        envelope_report_to_json_string(art.envelopes, art.exit_code,
                                                       config.output.seed));
        write_run_summary(art.outdir, config, art);
        return art;
    }

    const TuningParameters& tp = art.certificate.tuning;
    const double sigma = config.tuning.sigma;
    if (!(sigma > 0.0) || !(sigma < tp.xi))
        throw ConfigError("tuning.sigma must lie in (0, xi); xi = " + fmt17(tp.xi));
    const double t0 = config.problem.t0;
    const LiapunovParams params{tp.gamma3(sigma), tp.theta};

    double delta_local = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(tp.kappa) && t0 >= tp.kappa)
        delta_local = compute_delta(sigma, t0, tp, problem);

    std::vector<double> u0 = modes_from_pairs(config.initial.u, config.solver.n_modes);
    std::vector<double> v0 = modes_from_pairs(config.initial.v, config.solver.n_modes);
    if (config.initial.scale_d_fraction_of_delta || config.initial.scale_d_to) {
        double target;
        if (config.initial.scale_d_to) {
            target = *config.initial.scale_d_to;
        } else {
            if (!std::isfinite(delta_local))
                throw ConfigError("initial.scale_d_fraction_of_delta requires t0 >= kappa = " +
                                  fmt17(tp.kappa));
            target = *config.initial.scale_d_fraction_of_delta * delta_local;
        }
        SpectralState st(u0, v0, t0);
        const double current = eval_norm_d(st, problem.family.eps(t0));
        if (!(current > 0.0))
            throw ConfigError("initial data is identically zero; cannot scale to d(t0) = " +
                              fmt17(target));
        const double factor = target / current;
        for (auto& x : u0)
            x *= factor;
        for (auto& x : v0)
            x *= factor;
    }

    art.trajectory = integrate(problem, u0, v0, t0, config.solver, params);
    const Trajectory& traj = *art.trajectory;
    auto& checks = art.envelopes.checks;

    auto push_inconclusive = [&checks](const std::string& name, const std::string& why) {
        EnvelopeCheck c;
        c.name = name;
        c.verdict = CheckVerdict::Inconclusive;
        c.detail = why;
        checks.push_back(c);
    };

    const bool unif_stable = art.certificate.has(Verdict::UniformlyStable);
    if (art.certificate.has(Verdict::Stable) || unif_stable ||
        art.certificate.has(Verdict::AsymptoticallyStable) ||
        art.certificate.has(Verdict::UniformlyExponentialAsymptoticallyStable)) {
        if (std::isfinite(tp.kappa) && t0 >= tp.kappa) {
            const double delta =
                unif_stable ? compute_delta_uniform(sigma, tp, problem) : delta_local;
            checks.push_back(check_stability_envelope(traj, sigma, delta));
        } else {
            push_inconclusive("stability_envelope",
                              "t0 = " + fmt17(t0) + " below kappa = " + fmt17(tp.kappa));
        }
    }

    if (art.certificate.has(Verdict::UniformlyExponentialAsymptoticallyStable)) {
        checks.push_back(check_exponential_envelope(traj, tp.D, tp.E, tp.delta));
    }

    const bool thm2 = art.certificate.has(Verdict::UniformlyBounded) ||
                      art.certificate.has(Verdict::EventuallyUniformlyBounded);
    if (thm2) {
        const double delta_b = std::max(traj.d0() * (1.0 + 1e-9), 1e-12);
        const auto br = compute_beta_s(delta_b, tp, problem, config.tuning.horizon);
        EnvelopeCheck c = check_boundedness(traj, br.beta);
        c.name = "uniform_boundedness";
        if (art.certificate.has(Verdict::EventuallyUniformlyBounded) && t0 < br.s) {
            c.verdict = CheckVerdict::Inconclusive;
            c.detail = "precondition t0 >= s(delta) unmet: s = " + fmt17(br.s);
        }
        checks.push_back(c);

        EnvelopeCheck e = check_exponential_envelope(traj, br.D_delta, br.E_delta, delta_b);
        e.name = "exponential_envelope_in_the_large";
        if (art.certificate.has(Verdict::EventuallyExponentialAsymptoticallyStableInTheLarge) &&
            t0 < br.s) {
            e.verdict = CheckVerdict::Inconclusive;
            e.detail = "precondition t0 >= s(delta) unmet: s = " + fmt17(br.s);
        }
        checks.push_back(e);
    }

    const bool thm3 = art.certificate.has(Verdict::Bounded) ||
                      art.certificate.has(Verdict::AsymptoticallyStableInTheLarge);
    if (thm3) {
        const double alpha = config.tuning.alpha;
        if (!(traj.d0() < alpha)) {
            push_inconclusive("boundedness_in_the_large",
                              "precondition d(t0) < alpha unmet: d(t0) = " + fmt17(traj.d0()));
            push_inconclusive("attractivity",
                              "precondition d(t0) < alpha unmet: d(t0) = " + fmt17(traj.d0()));
        } else {
            try {
                const auto at =
                    compute_T(alpha, config.tuning.nu, t0, tp, problem, config.tuning.horizon);
                EnvelopeCheck b = check_boundedness(traj, at.beta_tilde);
                b.name = "boundedness_in_the_large";
                checks.push_back(b);
                checks.push_back(check_attractivity(traj, config.tuning.nu, at.T));
            } catch (const std::exception& e) {
                push_inconclusive("boundedness_in_the_large", e.what());
                push_inconclusive("attractivity", e.what());
            }
        }
    } else if (art.certificate.has(Verdict::AsymptoticallyStable)) {
        push_inconclusive("attractivity",
                          "attractivity certified via divergence of the 1/g integral; no "
                          "constructive T outside the tau = 0 theory");
    }

    if (std::isfinite(tp.kappa))
        checks.push_back(check_decay_inequality(traj, problem, params, tp.eta, tp.kappa, sigma));

    art.exit_code = exit_from_checks(art.envelopes);

    std::function<double(double)> bound_fn;
    if (tp.has_decay_constants && traj.d0() < tp.delta && traj.d0() > 0.0) {
        const double D = tp.D, E = tp.E, d0 = traj.d0(), tt0 = traj.t0;
        bound_fn = [D, E, d0, tt0](double t) { return D * std::exp(-E * (t - tt0)) * d0; };
    } else {
        bound_fn = [sigma](double) { return sigma; };
    }
    write_text_file(art.outdir / "trajectory.csv", trajectory_to_csv(traj, bound_fn));
    write_text_file(art.outdir / "envelope_report.json",
                    envelope_report_to_json_string(art.envelopes, art.exit_code,
                                                   config.output.seed));
    write_run_summary(art.outdir, config, art);

    if (config.output.plots) {
        std::vector<double> ts, ds, bounds, Ws;
        for (const auto& s : traj.samples) {
            ts.push_back(s.t);
            ds.push_back(s.d);
            bounds.push_back(bound_fn(s.t));
            Ws.push_back(s.W);
        }
        write_svg_plot(art.outdir / "d_envelope.svg", "weighted norm d(t) and envelope", ts,
                       {{"d(t)", ds}, {"envelope", bounds}});
        write_svg_plot(art.outdir / "W.svg", "energy functional W(t)", ts, {{"W(t)", Ws}});
    }
    return art;
}

RunArtifacts simulate_only(const RunConfig& config)
{
    RunArtifacts art;
    art.outdir = resolve_outdir(config.output.dir);
    fs::create_directories(art.outdir);

    Problem problem = build_problem(config);
    CertifyConfig cc;
    cc.tuning.margin = config.tuning.margin;
    cc.tuning.xi = config.tuning.xi;
    cc.tuning.t_bar_horizon = config.tuning.horizon;
    art.certificate = certify(problem, cc);

    LiapunovParams params{3.0, std::max(problem.damping.a_prime, 1.0)};
    if (art.certificate.certified())
        params = LiapunovParams{art.certificate.tuning.gamma3(config.tuning.sigma),
                                art.certificate.tuning.theta};

    std::vector<double> u0 = modes_from_pairs(config.initial.u, config.solver.n_modes);
    std::vector<double> v0 = modes_from_pairs(config.initial.v, config.solver.n_modes);
    if (config.initial.scale_d_to) {
        SpectralState st(u0, v0, config.problem.t0);
        const double current = eval_norm_d(st, problem.family.eps(config.problem.t0));
        if (!(current > 0.0))
            throw ConfigError("initial data is identically zero; cannot scale");
        const double factor = *config.initial.scale_d_to / current;
        for (auto& x : u0)
            x *= factor;
        for (auto& x : v0)
            x *= factor;
    } else if (config.initial.scale_d_fraction_of_delta) {
        throw ConfigError("simulate: scale_d_fraction_of_delta requires a certified problem; "
                          "use scale_d_to");
    }

    art.trajectory =
        integrate(problem, u0, v0, config.problem.t0, config.solver, params);
    write_text_file(art.outdir / "trajectory.csv",
                    trajectory_to_csv(*art.trajectory, nullptr));
    write_text_file(art.outdir / "certificate.json",
                    certificate_to_json_string(art.certificate, problem));
    art.exit_code = 0;
    write_run_summary(art.outdir, config, art);
    return art;
}

namespace {

RunConfig example1_config()
{
    RunConfig cfg;
    cfg.problem.family = "example1";
    cfg.problem.eps0 = 1.0;
    cfg.problem.p = 2.0;
    cfg.problem.C0 = 4.0;
    cfg.problem.t0 = 0.0;
    cfg.forcing.kind = "zero";
    cfg.damping.kind = "zero";
    cfg.damping.a_prime = 1.0;
    cfg.solver.n_modes = 64;
    cfg.solver.dt = 1e-3;
    cfg.solver.t_end = 50.0;
    cfg.solver.sample_every = 10;
    cfg.tuning.sigma = 0.5;
    cfg.initial.u = {{1, 1.0}};
    cfg.initial.scale_d_fraction_of_delta = 0.9;
    cfg.output.dir = "out/example1/f_zero";
    return cfg;
}

RunConfig example2_config()
{
    RunConfig cfg;
    cfg.problem.family = "example2";
    cfg.problem.eps0 = 1.0;
    cfg.problem.p = 0.25;
    cfg.problem.q = 0.5;
    cfg.problem.C0 = 4.0;
    cfg.problem.t0 = 1126.0; // above kappa = t_bar(gamma3) for this family
    cfg.forcing.kind = "zero";
    cfg.damping.kind = "zero";
    cfg.damping.a_prime = 0.0;
    cfg.solver.n_modes = 64;
    cfg.solver.dt = 1e-3;
    cfg.solver.t_end = 1226.0;
    cfg.solver.sample_every = 10;
    cfg.tuning.sigma = 0.5;
    cfg.tuning.alpha = 0.1;
    cfg.tuning.nu = 0.01;
    cfg.initial.u = {{1, 1.0}};
    cfg.initial.scale_d_fraction_of_delta = 0.9;
    cfg.output.dir = "out/example2";
    return cfg;
}

RunConfig example3_config()
{
    RunConfig cfg;
    cfg.problem.family = "example3";
    cfg.problem.eps_base = 0.5;
    cfg.problem.eps_amp = 0.5;
    cfg.problem.C0 = 4.0;
    cfg.problem.C1 = 1.0;
    cfg.problem.q = 1.0;
    cfg.problem.t0 = 0.0;
    cfg.forcing.kind = "zero";
    cfg.damping.kind = "zero";
    cfg.damping.a_prime = 1.0;
    cfg.solver.n_modes = 64;
    cfg.solver.dt = 1e-3;
    cfg.solver.t_end = 50.0;
    cfg.solver.sample_every = 10;
    cfg.tuning.sigma = 0.5;
    cfg.initial.u = {{1, 1.0}};
    cfg.initial.scale_d_fraction_of_delta = 0.9;
    cfg.output.dir = "out/example3";
    return cfg;
}

} // namespace

RunArtifacts reproduce_example(const std::string& which)
{
    if (which == "example1") {
        RunConfig a = example1_config();
        RunConfig b = example1_config();
        b.forcing.kind = "sine";
        b.forcing.b = 0.5;
        b.forcing.omega = 1.0;
        b.output.dir = "out/example1/f_sine";
        RunArtifacts ra = run_experiment(a);
        RunArtifacts rb = run_experiment(b);
        ra.exit_code = combine_exit(ra.exit_code, rb.exit_code);
        return ra;
    }
    if (which == "example2")
        return run_experiment(example2_config());
    if (which == "example3")
        return run_experiment(example3_config());
    if (which == "remark1") {
        RunConfig cfg = example1_config();
        cfg.output.dir = "out/remark1";
        RunArtifacts art;
        art.outdir = resolve_outdir(cfg.output.dir);
        fs::create_directories(art.outdir);

        Problem problem = build_problem(cfg);
        CertifyConfig cc;
        cc.tuning.margin = cfg.tuning.margin;
        art.certificate = certify(problem, cc);
        if (!art.certificate.certified())
            throw HypothesisError("remark1: the baseline problem failed certification");
        const TuningParameters& tp = art.certificate.tuning;
        const double sigma = cfg.tuning.sigma;
        const LiapunovParams certified{tp.gamma3(sigma), tp.theta};
        const LiapunovParams legacy{tp.gamma3(sigma), 0.0};

        const double delta = compute_delta(sigma, cfg.problem.t0, tp, problem);
        std::vector<double> u0 = modes_from_pairs(cfg.initial.u, cfg.solver.n_modes);
        std::vector<double> v0 = modes_from_pairs(cfg.initial.v, cfg.solver.n_modes);
        SpectralState st(u0, v0, cfg.problem.t0);
        const double factor =
            0.9 * delta / eval_norm_d(st, problem.family.eps(cfg.problem.t0));
        for (auto& x : u0)
            x *= factor;

        art.trajectory = integrate(problem, u0, v0, cfg.problem.t0, cfg.solver, certified);
        EnvelopeCheck pass_check = check_decay_inequality(*art.trajectory, problem, certified,
                                                          tp.eta, tp.kappa, sigma);
        pass_check.name = "decay_certified";
        EnvelopeCheck fail_check = check_decay_inequality(*art.trajectory, problem, legacy,
                                                          tp.eta, tp.kappa, sigma);
        fail_check.name = "decay_legacy_theta0";
        art.envelopes.checks = {pass_check, fail_check};
        const bool reproduced = pass_check.verdict == CheckVerdict::Pass &&
                                fail_check.verdict == CheckVerdict::Fail;
        art.legacy_comparison_reproduced = reproduced;
        art.exit_code = reproduced ? 0 : 1;

        write_text_file(art.outdir / "certificate.json",
                        certificate_to_json_string(art.certificate, problem));
        write_text_file(art.outdir / "trajectory.csv",
                        trajectory_to_csv(*art.trajectory, nullptr));
        write_text_file(art.outdir / "envelope_report.json",
                        envelope_report_to_json_string(art.envelopes, art.exit_code,
                                                       cfg.output.seed));
        write_run_summary(art.outdir, cfg, art);
        return art;
    }
    throw ConfigError("reproduce: expected example1|example2|example3|remark1, got '" + which +
                      "'");
}

int sweep(const RunConfig& base, const std::string& param_path,
          const std::vector<double>& values)
{
    if (values.empty())
        throw ConfigError("sweep: at least one value required");
    int worst = 0;
    for (double v : values) {
        RunConfig cfg = base;
        if (param_path == "solver.dt")
            cfg.solver.dt = v;
        else if (param_path == "solver.n_modes")
            cfg.solver.n_modes = static_cast<int>(v);
        else if (param_path == "solver.t_end")
            cfg.solver.t_end = v;
        else if (param_path == "solver.sample_every")
            cfg.solver.sample_every = static_cast<int>(v);
        else if (param_path == "solver.grid_factor")
            cfg.solver.grid_factor = static_cast<int>(v);
        else if (param_path == "tuning.sigma")
            cfg.tuning.sigma = v;
        else if (param_path == "tuning.margin")
            cfg.tuning.margin = v;
        else if (param_path == "tuning.xi")
            cfg.tuning.xi = v;
        else if (param_path == "tuning.alpha")
            cfg.tuning.alpha = v;
        else if (param_path == "tuning.nu")
            cfg.tuning.nu = v;
        else if (param_path == "problem.eps0")
            cfg.problem.eps0 = v;
        else if (param_path == "problem.p")
            cfg.problem.p = v;
        else if (param_path == "problem.C0")
            cfg.problem.C0 = v;
        else if (param_path == "problem.q")
            cfg.problem.q = v;
        else if (param_path == "problem.C1")
            cfg.problem.C1 = v;
        else if (param_path == "problem.t0")
            cfg.problem.t0 = v;
        else if (param_path == "forcing.b")
            cfg.forcing.b = v;
        else if (param_path == "forcing.omega")
            cfg.forcing.omega = v;
        else if (param_path == "forcing.q")
            cfg.forcing.q = v;
        else if (param_path == "damping.a_prime")
            cfg.damping.a_prime = v;
        else if (param_path == "damping.A")
            cfg.damping.A = v;
        else if (param_path == "damping.tau")
            cfg.damping.tau = v;
        else if (param_path == "initial.scale_d_fraction_of_delta")
            cfg.initial.scale_d_fraction_of_delta = v;
        else if (param_path == "output.seed")
            cfg.output.seed = static_cast<std::uint64_t>(v);
        else
            throw ConfigError("sweep: unsupported parameter path '" + param_path + "'");
        char val[40];
        std::snprintf(val, sizeof(val), "%.12g", v);
        cfg.output.dir = base.output.dir + "/" + param_path + "=" + val;
        const RunArtifacts art = run_experiment(cfg);
        worst = combine_exit(worst, art.exit_code);
    }
    return worst;
}

} // namespace liaplab
