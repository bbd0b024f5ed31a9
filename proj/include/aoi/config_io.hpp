#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/nsfd.hpp"

namespace aoi {

/// A fully parsed problem description: model plus solver defaults. The
/// step size and horizon are not config keys; they come from the command
/// line and are filled into `solver` by the caller.
struct ProblemConfig {
    EpidemicModel model;
    SolverConfig solver;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("config key '" + key + "' has invalid number '" +
                                    value + "'");
    }
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    throw std::invalid_argument("config key '" + key + "' expects true/false");
}

/// Two-column CSV of (time, value) rows; a single non-numeric header line
/// is tolerated.
inline std::pair<std::vector<double>, std::vector<double>>
read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open kernel table '" + path.string() + "'");
    }
    std::vector<double> times;
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') {
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("kernel table line " + std::to_string(lineno) +
                                        " is not two comma-separated columns");
        }
        const std::string left = trim(text.substr(0, comma));
        const std::string right = trim(text.substr(comma + 1));
        try {
            times.push_back(parse_double("kernel.table t", left));
            values.push_back(parse_double("kernel.table value", right));
        } catch (const std::invalid_argument&) {
            if (lineno == 1 && times.empty()) {
                continue; // header line
            }
            throw;
        }
    }
    return {std::move(times), std::move(values)};
}

} // namespace detail

/// Parses the flat `key = value` config format. Comments start with '#'.
/// Unknown or duplicate keys are hard errors.
inline ProblemConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path.string() + "'");
    }

    static const std::set<std::string> known_keys{
        "kernel.family", "kernel.p",      "kernel.mu",     "kernel.sigma",
        "kernel.lambda", "kernel.normalized", "kernel.table",
        "model.N",       "model.S0",      "model.beta",
        "solver.eps_phi", "solver.eps_s", "solver.window", "solver.tail_tol",
    };

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string text = detail::trim(line);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not of the form key = value");
        }
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (!known_keys.count(key)) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
        if (kv.count(key)) {
            throw std::invalid_argument("duplicate config key '" + key + "'");
        }
        if (value.empty()) {
            throw std::invalid_argument("config key '" + key + "' has empty value");
        }
        kv[key] = value;
    }

    const auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            return std::nullopt;
        }
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    const auto require = [&take](const std::string& key) {
        auto v = take(key);
        if (!v) {
            throw std::invalid_argument("missing required config key '" + key + "'");
        }
        return *v;
    };

    const std::string family = require("kernel.family");
    std::optional<Kernel> kernel;
    if (family == "powerlaw") {
        kernel = Kernel::power_law(detail::parse_double("kernel.p", require("kernel.p")));
    } else if (family == "gaussian") {
        kernel = Kernel::gaussian(
            detail::parse_double("kernel.mu", require("kernel.mu")),
            detail::parse_double("kernel.sigma", require("kernel.sigma")));
    } else if (family == "exponential") {
        const double lambda =
            detail::parse_double("kernel.lambda", require("kernel.lambda"));
        bool normalized = true;
        if (auto flag = take("kernel.normalized")) {
            normalized = detail::parse_bool("kernel.normalized", *flag);
        }
        kernel = Kernel::exponential(lambda, normalized);
    } else if (family == "tabulated") {
        std::filesystem::path table = require("kernel.table");
        if (table.is_relative()) {
            table = path.parent_path() / table;
        }
        auto [times, values] = detail::read_table(table);
        kernel = Kernel::tabulated(std::move(times), std::move(values));
    } else {
        throw std::invalid_argument(
            "kernel.family must be one of powerlaw, gaussian, exponential, tabulated");
    }

    EpidemicModel model{*kernel,
                        detail::parse_double("model.N", require("model.N")),
                        detail::parse_double("model.S0", require("model.S0")),
                        detail::parse_double("model.beta", require("model.beta"))};
    model.validated();

    SolverConfig solver;
    if (auto v = take("solver.eps_phi")) {
        solver.eps_phi = detail::parse_double("solver.eps_phi", *v);
    }
    if (auto v = take("solver.eps_s")) {
        solver.eps_s = detail::parse_double("solver.eps_s", *v);
    }
    if (auto v = take("solver.window")) {
        const double w = detail::parse_double("solver.window", *v);
        solver.window = static_cast<int>(w);
        if (solver.window != w || solver.window < 1) {
            throw std::invalid_argument("solver.window must be a positive integer");
        }
    }
    if (auto v = take("solver.tail_tol")) {
        solver.tail_tol = detail::parse_double("solver.tail_tol", *v);
    }

    // leftovers are family parameters that do not belong to the chosen family
    if (!kv.empty()) {
        throw std::invalid_argument("config key '" + kv.begin()->first +
                                    "' is not valid for kernel.family = " + family);
    }
    return {std::move(model), solver};
}

} // namespace aoi
