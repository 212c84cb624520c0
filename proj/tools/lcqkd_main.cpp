#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcqkd/protocol.hpp"
#include "lcqkd/security.hpp"
#include "lcqkd/sweep.hpp"

namespace {

struct LineFlags {
    double dab = 100.0;
    double dae = -1.0;  // negative means "midpoint of dab"
    double d = 50.0;
    double mu = 1.0 / 50.0;
    double re = 0.0;
};

// Shared geometry flags. The tap defaults to the midpoint of the line.
void add_line_flags(CLI::App* cmd, LineFlags& f) {
    cmd->add_option("--dab", f.dab, "Alice-Bob distance, km")->capture_default_str();
    cmd->add_option("--dae", f.dae, "Alice-tap distance, km (default dab/2)");
    cmd->add_option("--d", f.d, "amplifier spacing, km")->capture_default_str();
    cmd->add_option("--mu", f.mu, "fibre attenuation, km^-1")->capture_default_str();
    cmd->add_option("--re", f.re, "tap reflectivity r_E")->capture_default_str();
}

lcqkd::LineGeometry to_geometry(const LineFlags& f) {
    lcqkd::LineGeometry line;
    line.dist_ab = f.dab;
    line.dist_ae = f.dae < 0.0 ? f.dab / 2.0 : f.dae;
    line.spacing = f.d;
    line.attenuation = f.mu;
    line.r_e = f.re;
    return line;
}

std::ostream& value_fmt(std::ostream& out) {
    out.precision(12);
    return out;
}

// CLI11 2.4 ignores set_config on subcommands, so the key=value file behind
// --config is expanded into ordinary flags ahead of the real parse. Keys that
// were already given on the command line are skipped: flags win.
std::vector<std::string> with_config_expanded(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) return args;  // the option's ExistingFile check reports this

    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));

    const auto strip = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::string line;
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: '" + line + "'");
        const std::string key = strip(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line has an empty key: '" + line + "'");
        if (given.count("--" + key)) continue;
        args.push_back("--" + key);
        args.push_back(strip(line.substr(eq + 1)));
    }
    return args;
}

int cmd_rate(const LineFlags& flags, std::optional<double> gamma,
             std::optional<double> theta) {
    const auto link = lcqkd::link_model(to_geometry(flags));
    const auto rep = lcqkd::optimize_key_fraction(link, gamma, theta);
    value_fmt(std::cout);
    std::cout << "gamma_opt " << rep.gamma_opt << "\n"
              << "theta_opt " << rep.theta_opt << "\n"
              << "p_ok " << rep.p_ok << "\n"
              << "eve_bound " << rep.eve_bound << "\n"
              << "bob_entropy " << rep.bob_entropy << "\n"
              << "rate " << rep.fraction << "\n";
    return 0;
}

int cmd_sweep(const lcqkd::SweepSpec& spec, const std::string& out_path) {
    const auto points = lcqkd::run_sweep(spec);
    if (out_path.empty()) {
        lcqkd::write_csv(std::cout, spec, points);
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    lcqkd::write_csv(out, spec, points);
    if (!out.good()) throw std::runtime_error("write failed: " + out_path);
    return 0;
}

int cmd_simulate(const lcqkd::SimConfig& config, const std::string& out_path) {
    const auto result = lcqkd::run_session(config);

    value_fmt(std::cout);
    std::cout << "gamma " << result.gamma << "\n"
              << "theta " << result.theta << "\n"
              << "rounds " << result.config.rounds << "\n"
              << "sifted_len " << result.sifted_len << "\n"
              << "error_count " << result.error_count << "\n"
              << "disclosed_bits " << result.disclosed_bits << "\n"
              << "syndrome_bits " << result.syndrome_bits << "\n"
              << "chunks_total " << result.chunks_total << "\n"
              << "chunks_failed " << result.chunks_failed << "\n"
              << "removed_bits " << result.removed_bits << "\n"
              << "final_len " << result.final_len << "\n"
              << "keys_match " << (result.keys_match ? 1 : 0) << "\n"
              << "empirical_fraction " << result.empirical_fraction << "\n"
              << "analytic_fraction " << result.analytic_rate.fraction << "\n";

    std::cout << "quantity analytic empirical std_error z\n";
    for (const auto& row : lcqkd::empirical_vs_analytic(result)) {
        std::cout << row.quantity << ' ' << row.analytic << ' ' << row.empirical << ' '
                  << row.std_error << ' ' << row.z << "\n";
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        lcqkd::write_snapshot(out, result);
        if (!out.good()) throw std::runtime_error("write failed: " + out_path);
    }
    return result.keys_match ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Key-rate analysis and session simulation for an amplified "
                 "QKD line with physical loss control"};
    app.require_subcommand(1);

    LineFlags rate_flags;
    double rate_gamma = -1.0, rate_theta = -1.0;
    auto* rate = app.add_subcommand("rate", "Optimized key fraction at one point");
    add_line_flags(rate, rate_flags);
    auto* rate_gamma_opt =
        rate->add_option("--gamma", rate_gamma, "fix the signal amplitude");
    auto* rate_theta_opt =
        rate->add_option("--theta", rate_theta, "fix the decision threshold");
    std::string rate_config;
    rate->add_option("--config", rate_config, "config file, key=value lines; flags win")
        ->check(CLI::ExistingFile);

    LineFlags sweep_flags;
    std::string sweep_var_name;
    std::string sweep_values_raw;
    double sweep_from = 0.0, sweep_to = 0.0;
    std::size_t sweep_steps = 0;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Optimized rate along one variable, CSV");
    add_line_flags(sweep, sweep_flags);
    sweep->add_option("--var", sweep_var_name,
                      "swept variable: r_e|spacing|dist_ab|dist_ae|gamma|theta")
        ->required();
    auto* sweep_values_opt = sweep->add_option("--values", sweep_values_raw,
                                               "comma-separated list of values");
    auto* sweep_from_opt = sweep->add_option("--from", sweep_from, "grid start");
    sweep->add_option("--to", sweep_to, "grid end");
    auto* sweep_steps_opt =
        sweep->add_option("--steps", sweep_steps, "grid point count");
    sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");
    std::string sweep_config;
    sweep->add_option("--config", sweep_config, "config file, key=value lines; flags win")
        ->check(CLI::ExistingFile);
    auto* sweep_dae_opt = sweep->get_option("--dae");

    LineFlags sim_flags;
    double sim_gamma = -1.0, sim_theta = -1.0, sim_rounds = 1e6;
    std::uint64_t sim_seed = 42;
    std::size_t sim_chunk = 1000, sim_disclose = 1000;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo session end to end");
    add_line_flags(sim, sim_flags);
    auto* sim_gamma_opt = sim->add_option("--gamma", sim_gamma, "signal amplitude");
    auto* sim_theta_opt = sim->add_option("--theta", sim_theta, "decision threshold");
    sim->add_option("--L", sim_rounds, "number of rounds")
        ->check(CLI::Range(1.0, 1e12))
        ->capture_default_str();
    sim->add_option("--seed", sim_seed, "session seed")->capture_default_str();
    sim->add_option("--chunk", sim_chunk, "reconciliation block length")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
        ->capture_default_str();
    sim->add_option("--disclose", sim_disclose, "bits sacrificed to estimate the BER")
        ->capture_default_str();
    sim->add_option("--out", sim_out, "session snapshot path");
    std::string sim_config;
    sim->add_option("--config", sim_config, "config file, key=value lines; flags win")
        ->check(CLI::ExistingFile);

    std::vector<std::string> args;
    try {
        args = with_config_expanded({argv + 1, argv + argc});
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(rate)) {
            std::optional<double> g, t;
            if (rate_gamma_opt->count()) g = rate_gamma;
            if (rate_theta_opt->count()) t = rate_theta;
            return cmd_rate(rate_flags, g, t);
        }
        if (app.got_subcommand(sweep)) {
            const auto var = lcqkd::sweep_variable_from_string(sweep_var_name);
            if (!var) throw std::invalid_argument("unknown sweep variable: " + sweep_var_name);
            lcqkd::SweepSpec spec;
            spec.variable = *var;
            spec.base = to_geometry(sweep_flags);
            spec.dae_tracks_midpoint =
                *var == lcqkd::SweepVariable::dist_ab && sweep_dae_opt->count() == 0;
            if (sweep_values_opt->count()) {
                std::stringstream ss(sweep_values_raw);
                std::string token;
                while (std::getline(ss, token, ',')) {
                    std::size_t used = 0;
                    double v = 0.0;
                    try {
                        v = std::stod(token, &used);
                    } catch (const std::exception&) {
                        used = 0;
                    }
                    if (used == 0 || token.find_first_not_of(" \t", used) != std::string::npos)
                        throw std::invalid_argument("bad sweep value: '" + token + "'");
                    spec.values.push_back(v);
                }
                if (spec.values.empty())
                    throw std::invalid_argument("empty sweep value list");
            } else if (sweep_from_opt->count() && sweep_steps_opt->count()) {
                if (sweep_steps < 1) throw std::invalid_argument("--steps must be >= 1");
                for (std::size_t i = 0; i < sweep_steps; ++i) {
                    const double frac =
                        sweep_steps == 1
                            ? 0.0
                            : static_cast<double>(i) / static_cast<double>(sweep_steps - 1);
                    spec.values.push_back(sweep_from + frac * (sweep_to - sweep_from));
                }
            } else {
                throw std::invalid_argument(
                    "sweep needs --values or --from/--to/--steps");
            }
            return cmd_sweep(spec, sweep_out);
        }

        lcqkd::SimConfig config;
        config.line = to_geometry(sim_flags);
        config.rounds = static_cast<std::uint64_t>(sim_rounds);
        config.seed = sim_seed;
        config.chunk = sim_chunk;
        config.disclose = sim_disclose;
        if (sim_gamma_opt->count() && sim_theta_opt->count()) {
            config.gamma = sim_gamma;
            config.theta = sim_theta;
        } else if (!sim_gamma_opt->count() && !sim_theta_opt->count()) {
            config.auto_optimize = true;
        } else {
            // One side fixed: resolve the other before the session starts.
            std::optional<double> g, t;
            if (sim_gamma_opt->count()) g = sim_gamma;
            if (sim_theta_opt->count()) t = sim_theta;
            const auto rep = lcqkd::optimize_key_fraction(lcqkd::link_model(config.line), g, t);
            config.gamma = rep.gamma_opt;
            config.theta = rep.theta_opt;
        }
        return cmd_simulate(config, sim_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
