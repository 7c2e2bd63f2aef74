#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "liaplab/harness.hpp"

using namespace liaplab;

namespace {

void print_checks(const EnvelopeReport& report)
{
    for (const auto& c : report.checks)
        std::cout << "  [" << to_string(c.verdict) << "] " << c.name << ": " << c.detail << "\n";
}

void print_verdicts(const StabilityCertificate& cert)
{
    if (!cert.certified()) {
        std::cout << "not certified; failed hypotheses:\n";
        for (const auto& name : cert.hypothesis_report.failed_names())
            std::cout << "  " << name << "\n";
        return;
    }
    std::cout << "certified verdicts:\n";
    for (const auto& cv : cert.verdicts)
        std::cout << "  " << to_string(cv.verdict) << "  (" << to_string(cv.theorem) << ")\n";
}

std::vector<double> parse_values(const std::string& csv)
{
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"liaplab: stability certificates and envelope checks for a non-autonomous "
                 "dissipative wave equation on ]0,pi["};
    app.require_subcommand(1);

    std::string config_path, which, param, values_csv, out_override;

    auto* c_cert = app.add_subcommand("certify", "derive and print the stability certificate");
    c_cert->add_option("config", config_path, "TOML run configuration")->required();

    auto* c_sim = app.add_subcommand("simulate", "integrate and write trajectory.csv");
    c_sim->add_option("config", config_path, "TOML run configuration")->required();

    auto* c_ver =
        app.add_subcommand("verify", "simulate and check every certified envelope");
    c_ver->add_option("config", config_path, "TOML run configuration")->required();

    auto* c_rep = app.add_subcommand("reproduce", "run a pinned desk-scale bundle");
    c_rep->add_option("which", which, "example1|example2|example3|remark1")
        ->required()
        ->check(CLI::IsMember({"example1", "example2", "example3", "remark1"}));

    auto* c_swp = app.add_subcommand("sweep", "re-run verify over a list of parameter values");
    c_swp->add_option("config", config_path, "TOML run configuration")->required();
    c_swp->add_option("--param", param, "dotted config path, e.g. solver.dt")->required();
    c_swp->add_option("--values", values_csv, "comma-separated numeric values")->required();

    for (auto* cmd : {c_cert, c_sim, c_ver, c_rep, c_swp})
        cmd->add_option("--out", out_override, "output root (overrides LIAPLAB_OUT)");

    CLI11_PARSE(app, argc, argv);

    if (!out_override.empty())
        setenv("LIAPLAB_OUT", out_override.c_str(), 1);

    try {
        if (c_cert->parsed()) {
            const RunConfig cfg = load_run_config(config_path);
            const Problem problem = build_problem(cfg);
            CertifyConfig cc;
            cc.tuning.margin = cfg.tuning.margin;
            cc.tuning.xi = cfg.tuning.xi;
            cc.tuning.t_bar_horizon = cfg.tuning.horizon;
            const StabilityCertificate cert = certify(problem, cc);
            const auto outdir = resolve_outdir(cfg.output.dir);
            std::filesystem::create_directories(outdir);
            const auto path = outdir / "certificate.json";
            std::ofstream(path) << certificate_to_json_string(cert, problem);
            print_verdicts(cert);
            std::cout << "wrote " << path.string() << "\n";
            return cert.certified() ? 0 : 3;
        }
        if (c_sim->parsed()) {
            const RunArtifacts art = simulate_only(load_run_config(config_path));
            std::cout << "wrote " << (art.outdir / "trajectory.csv").string() << "\n";
            return art.exit_code;
        }
        if (c_ver->parsed()) {
            const RunArtifacts art = run_experiment(load_run_config(config_path));
            print_verdicts(art.certificate);
            print_checks(art.envelopes);
            std::cout << "bundle in " << art.outdir.string() << " (exit " << art.exit_code
                      << ")\n";
            return art.exit_code;
        }
        if (c_rep->parsed()) {
            const RunArtifacts art = reproduce_example(which);
            print_verdicts(art.certificate);
            print_checks(art.envelopes);
            if (art.legacy_comparison_reproduced)
                std::cout << "legacy-functional comparison reproduced: "
                          << (*art.legacy_comparison_reproduced ? "yes" : "no") << "\n";
            std::cout << "bundle in " << art.outdir.string() << " (exit " << art.exit_code
                      << ")\n";
            return art.exit_code;
        }
        if (c_swp->parsed()) {
            const int code = sweep(load_run_config(config_path), param, parse_values(values_csv));
            std::cout << "sweep finished (exit " << code << ")\n";
            return code;
        }
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
