#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aoi/indicators.hpp"
#include "aoi/nsfd.hpp"
#include "aoi/trapezoidal.hpp"

namespace aoi::studies {

struct ErrorPair {
    double err_s;
    double err_phi;
};

struct ConvergenceRow {
    double h;
    double err_s_abs;
    double err_phi_abs;
    double err_s_rel;
    double err_phi_rel;
    std::optional<double> ord_s;   // order against the previous row
    std::optional<double> ord_phi;
};

namespace detail {

inline std::size_t nesting_ratio(double h, double h_ref) {
    if (!(h_ref > 0.0) || !(h > h_ref)) {
        throw std::invalid_argument("reference step must be positive and below h");
    }
    const double ratio = h / h_ref;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio || rounded < 1.0) {
        throw std::invalid_argument("meshes are not nested: h must be a multiple of h_ref");
    }
    return static_cast<std::size_t>(rounded);
}

inline SolverConfig study_config(double h, double t_max) {
    SolverConfig cfg;
    cfg.h = h;
    cfg.t_max = t_max;
    cfg.detect_steady_state = false; // full horizon, errors compared pointwise
    return cfg;
}

struct ErrorNorms {
    double s_abs, phi_abs, s_rel, phi_rel;
};

inline ErrorNorms compare_on_coarse(const Trajectory& coarse, const Trajectory& fine,
                                    std::size_t ratio) {
    double s_abs = 0.0, phi_abs = 0.0, s_rel = 0.0, phi_rel = 0.0;
    const std::size_t n_coarse = coarse.times.size();
    for (std::size_t i = 0; i < n_coarse; ++i) {
        const std::size_t j = i * ratio;
        if (j >= fine.times.size()) {
            break;
        }
        const double ds = std::abs(coarse.S[i] - fine.S[j]);
        const double dphi = std::abs(coarse.phi[i] - fine.phi[j]);
        s_abs = std::max(s_abs, ds);
        phi_abs = std::max(phi_abs, dphi);
        if (fine.S[j] != 0.0) {
            s_rel = std::max(s_rel, ds / std::abs(fine.S[j]));
        }
        if (fine.phi[j] != 0.0) {
            phi_rel = std::max(phi_rel, dphi / std::abs(fine.phi[j]));
        }
    }
    return {s_abs, phi_abs, s_rel, phi_rel};
}

} // namespace detail

/// Max absolute differences over the coarse mesh points between the run at
/// step h and the nested reference run at h_ref, separately for S and phi.
inline ErrorPair error_vs_reference(const EpidemicModel& model, double h,
                                    double h_ref, double t_max) {
    const std::size_t ratio = detail::nesting_ratio(h, h_ref);
    const Trajectory fine = nsfd_run(model, detail::study_config(h_ref, t_max));
    const Trajectory coarse = nsfd_run(model, detail::study_config(h, t_max));
    const auto norms = detail::compare_on_coarse(coarse, fine, ratio);
    return {norms.s_abs, norms.phi_abs};
}

/// Experimental order between consecutive (h, err) pairs with h strictly
/// decreasing: log(err_i / err_{i+1}) / log(h_i / h_{i+1}). Zero errors
/// leave the order undefined for that pair.
inline std::vector<std::optional<double>>
experimental_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 2) {
        throw std::invalid_argument("experimental_order needs at least two pairs");
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (!(errors[i].first < errors[i - 1].first)) {
            throw std::invalid_argument("experimental_order needs strictly decreasing h");
        }
    }
    std::vector<std::optional<double>> orders;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double e0 = errors[i - 1].second;
        const double e1 = errors[i].second;
        if (e0 == 0.0 || e1 == 0.0) {
            orders.push_back(std::nullopt);
        } else {
            orders.push_back(std::log(e0 / e1) /
                             std::log(errors[i - 1].first / errors[i].first));
        }
    }
    return orders;
}

/// Full convergence study: one reference run at h_ref, coarse runs per h,
/// both error norms per row and experimental orders (from the absolute
/// errors) between consecutive rows.
inline std::vector<ConvergenceRow>
convergence_table(const EpidemicModel& model, const std::vector<double>& h_list,
                  double h_ref, double t_max) {
    if (h_list.empty()) {
        throw std::invalid_argument("convergence_table needs at least one h");
    }
    std::vector<double> hs = h_list;
    std::sort(hs.begin(), hs.end(), std::greater<>());
    std::vector<std::size_t> ratios;
    ratios.reserve(hs.size());
    for (const double h : hs) {
        ratios.push_back(detail::nesting_ratio(h, h_ref));
    }

    const Trajectory fine = nsfd_run(model, detail::study_config(h_ref, t_max));
    std::vector<ConvergenceRow> rows;
    rows.reserve(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Trajectory coarse = nsfd_run(model, detail::study_config(hs[i], t_max));
        const auto norms = detail::compare_on_coarse(coarse, fine, ratios[i]);
        rows.push_back({hs[i], norms.s_abs, norms.phi_abs, norms.s_rel, norms.phi_rel,
                        std::nullopt, std::nullopt});
    }
    if (rows.size() >= 2) {
        std::vector<std::pair<double, double>> s_pairs;
        std::vector<std::pair<double, double>> phi_pairs;
        for (const auto& row : rows) {
            s_pairs.emplace_back(row.h, row.err_s_abs);
            phi_pairs.emplace_back(row.h, row.err_phi_abs);
        }
        const auto ord_s = experimental_order(s_pairs);
        const auto ord_phi = experimental_order(phi_pairs);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            rows[i].ord_s = ord_s[i - 1];
            rows[i].ord_phi = ord_phi[i - 1];
        }
    }
    return rows;
}

struct SweepRow {
    double h;
    std::optional<double> s_inf_h; // empty when detection never fired
    double t_max_used;
};

struct FinalSizeSweep {
    std::vector<SweepRow> rows;
    std::optional<double> s_inf_relation;
};

/// Steady-state final sizes across step sizes, doubling the horizon up to
/// four times when detection fails, with the relation-based final size
/// attached for comparison.
inline FinalSizeSweep final_size_sweep(const EpidemicModel& model,
                                       const std::vector<double>& h_list,
                                       const SolverConfig& base) {
    FinalSizeSweep sweep;
    for (const double h : h_list) {
        SolverConfig cfg = base;
        cfg.h = h;
        cfg.detect_steady_state = true;
        std::optional<double> value;
        double t_max_used = cfg.t_max;
        for (int attempt = 0; attempt < 4; ++attempt) {
            t_max_used = cfg.t_max;
            const Trajectory traj = nsfd_run(model, cfg);
            if (traj.steady_state_reached) {
                value = traj.S_inf_h;
                break;
            }
            cfg.t_max *= 2.0;
        }
        sweep.rows.push_back({h, value, t_max_used});
    }
    if (model.S0 > 0.0) {
        const double r0 = r0_continuous(model, base.tail_tol);
        if (r0 > 0.0) {
            sweep.s_inf_relation = final_size_from_relation(r0, model.N, model.S0);
        }
    }
    return sweep;
}

struct SchemeComparison {
    Trajectory nsfd;
    Trajectory trapezoidal;
    ViolationReport nsfd_violations;
    ViolationReport trapezoidal_violations;
};

/// Runs both schemes on the identical mesh and attaches their violation
/// reports.
inline SchemeComparison scheme_comparison(const EpidemicModel& model,
                                          const SolverConfig& config) {
    SchemeComparison cmp{nsfd_run(model, config), trapz_dq_run(model, config), {}, {}};
    cmp.nsfd_violations = property_violations(cmp.nsfd);
    cmp.trapezoidal_violations = property_violations(cmp.trapezoidal);
    return cmp;
}

} // namespace aoi::studies
