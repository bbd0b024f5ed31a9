// Command-line front end: simulate, indicators, converge, compare.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 solver failure.

#include <CLI11.hpp>

#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aoi/aoi.hpp"

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot open output file '" + path + "'");
    }
    return out;
}

std::vector<double> parse_h_list(const std::string& text) {
    std::vector<double> values;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const auto comma = text.find(',', begin);
        const std::string item =
            text.substr(begin, comma == std::string::npos ? comma : comma - begin);
        if (item.empty()) {
            throw std::invalid_argument("empty entry in --h-list");
        }
        values.push_back(aoi::detail::parse_double("--h-list", item));
        if (comma == std::string::npos) {
            break;
        }
        begin = comma + 1;
    }
    return values;
}

std::string fmt(std::optional<double> v) {
    return v ? aoi::csv::num(*v) : "nan";
}

int run_simulate(const std::string& config_path, double h, double t_max,
                 const std::string& scheme, const std::string& out_path) {
    aoi::ProblemConfig cfg = aoi::parse_config(config_path);
    cfg.solver.h = h;
    cfg.solver.t_max = t_max;
    const aoi::Trajectory traj = scheme == "trapz"
                                     ? aoi::trapz_dq_run(cfg.model, cfg.solver)
                                     : aoi::nsfd_run(cfg.model, cfg.solver);
    auto out = open_output(out_path);
    aoi::csv::write_trajectory(out, traj);
    return 0;
}

int run_indicators(const std::string& config_path, double h) {
    aoi::ProblemConfig cfg = aoi::parse_config(config_path);
    const auto rep = aoi::compute_report(cfg.model, h, cfg.solver.tail_tol);
    std::cout << "R0=" << aoi::csv::num(rep.R0) << '\n'
              << "R0_h=" << aoi::csv::num(rep.R0_h) << '\n'
              << "tau_h=" << aoi::csv::num(rep.tau_h) << '\n'
              << "r_continuous=" << fmt(rep.r_continuous) << '\n'
              << "r_discrete=" << fmt(rep.r_discrete) << '\n'
              << "S_inf_relation=" << fmt(rep.S_inf_relation) << '\n';
    return 0;
}

int run_converge(const std::string& config_path, const std::string& h_list,
                 double h_ref, double t_max, const std::string& out_path) {
    aoi::ProblemConfig cfg = aoi::parse_config(config_path);
    const std::vector<double> hs = parse_h_list(h_list);
    const auto rows = aoi::studies::convergence_table(cfg.model, hs, h_ref, t_max);
    auto out = open_output(out_path);
    aoi::csv::write_convergence(out, rows);
    return 0;
}

int run_compare(const std::string& config_path, double h, double t_max,
                const std::string& prefix) {
    aoi::ProblemConfig cfg = aoi::parse_config(config_path);
    cfg.solver.h = h;
    cfg.solver.t_max = t_max;
    const auto cmp = aoi::studies::scheme_comparison(cfg.model, cfg.solver);
    {
        auto out = open_output(prefix + "_nsfd.csv");
        aoi::csv::write_trajectory(out, cmp.nsfd);
    }
    {
        auto out = open_output(prefix + "_trapz.csv");
        aoi::csv::write_trajectory(out, cmp.trapezoidal);
    }
    std::cout << "nsfd_violations=" << cmp.nsfd_violations.violations.size() << '\n'
              << "trapz_violations=" << cmp.trapezoidal_violations.violations.size()
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-standard finite-difference solver for the "
                 "Kermack-McKendrick age-of-infection epidemic model"};
    app.require_subcommand(1);
    // --h is a documented option, so the help flag must not own -h
    app.set_help_flag("--help", "print help");

    std::string config_path;
    std::string out_path;
    std::string scheme = "nsfd";
    std::string h_list;
    std::string prefix;
    double h = 0.0;
    double h_ref = 0.0;
    double t_max = 40.0;

    auto* simulate = app.add_subcommand("simulate", "Run one scheme and write t,S,phi CSV");
    simulate->set_help_flag("--help", "print help");
    simulate->add_option("config", config_path, "problem config file")->required();
    simulate->add_option("--h", h, "step size")->required();
    simulate->add_option("--tmax", t_max, "horizon")->required();
    simulate->add_option("--scheme", scheme, "nsfd or trapz")
        ->check(CLI::IsMember({"nsfd", "trapz"}));
    simulate->add_option("--out", out_path, "output CSV path")->required();

    auto* indicators = app.add_subcommand("indicators", "Print the epidemic indicators");
    indicators->set_help_flag("--help", "print help");
    indicators->add_option("config", config_path, "problem config file")->required();
    indicators->add_option("--h", h, "step size")->required();

    auto* converge = app.add_subcommand("converge", "Convergence table against a nested reference");
    converge->set_help_flag("--help", "print help");
    converge->add_option("config", config_path, "problem config file")->required();
    converge->add_option("--h-list", h_list, "comma-separated step sizes")->required();
    converge->add_option("--h-ref", h_ref, "reference step size")->required();
    converge->add_option("--tmax", t_max, "horizon")->required();
    converge->add_option("--out", out_path, "output CSV path")->required();

    auto* compare = app.add_subcommand("compare", "Run both schemes and report violations");
    compare->set_help_flag("--help", "print help");
    compare->add_option("config", config_path, "problem config file")->required();
    compare->add_option("--h", h, "step size")->required();
    compare->add_option("--tmax", t_max, "horizon (default 40)");
    compare->add_option("--out-prefix", prefix, "output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(config_path, h, t_max, scheme, out_path);
        }
        if (indicators->parsed()) {
            return run_indicators(config_path, h);
        }
        if (converge->parsed()) {
            return run_converge(config_path, h_list, h_ref, t_max, out_path);
        }
        if (compare->parsed()) {
            return run_compare(config_path, h, t_max, prefix);
        }
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
