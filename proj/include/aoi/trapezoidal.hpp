#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/nsfd.hpp"

namespace aoi {

/// Classical fully-implicit trapezoidal direct-quadrature scheme for the
/// coupled S/phi system:
///
///   phi_{n+1} = phi0(t_{n+1}) + beta sum_{j=0..n+1} w_j A(t_{n+1} - t_j) S_j phi_j
///   S_{n+1}   = S_n - (h beta / 2) (S_n phi_n + S_{n+1} phi_{n+1})
///
/// with trapezoidal weights (h/2 at the endpoints, h inside). The two
/// unknowns per step are resolved by a fixed-point iteration that solves
/// each sub-equation linearly in turn:
///
///   S   <- S_n (1 - a phi_n) / (1 + a phi)
///   phi <- P / (1 - a A(0) S)
///
/// with a = h beta / 2 and P the explicitly known part of the convolution.
/// Relative tolerance 1e-12, at most 100 sweeps. When h beta phi is large
/// the per-step system can lose real solvability entirely (the reduced
/// quadratic in S_{n+1} has negative discriminant); the capped iterate is
/// committed in that regime and the trajectory shows the characteristic
/// positivity and monotonicity violations of the method. A non-finite
/// state raises SolverError with the step index.
inline Trajectory trapz_dq_run(const EpidemicModel& model, const SolverConfig& config) {
    model.validated();
    config.validate();
    const std::size_t total_steps = config.step_count();
    if (total_steps > config.max_steps) {
        throw std::invalid_argument(
            "requested mesh has " + std::to_string(total_steps) +
            " steps, above the configured max_steps cap");
    }

    Trajectory traj;
    traj.scheme = Scheme::TrapezoidalDq;
    traj.h = config.h;
    traj.population = model.N;
    traj.times.reserve(total_steps + 1);
    traj.S.reserve(total_steps + 1);
    traj.phi.reserve(total_steps + 1);

    traj.times.push_back(0.0);
    traj.S.push_back(model.S0);
    traj.phi.push_back(model.phi0(0.0));

    const double h = config.h;
    const double half = 0.5 * h * model.beta;
    const double a0 = model.kernel.eval(0.0);

    std::vector<double> kernel_mesh{a0}; // kernel_mesh[k] = A(k h)
    std::vector<double> products{model.S0 * traj.phi[0]}; // S_j phi_j

    constexpr int max_sweeps = 100;
    constexpr double rel_tol = 1e-12;

    int consecutive = 0;
    for (std::size_t n = 0; n < total_steps; ++n) {
        const double t_next = static_cast<double>(n + 1) * h;
        kernel_mesh.push_back(model.kernel.eval(t_next));

        // known part of the phi-equation: endpoint j=0 at half weight,
        // interior j=1..n at full weight
        KahanSum known;
        known.add(0.5 * kernel_mesh[n + 1] * products[0]);
        for (std::size_t j = 1; j <= n; ++j) {
            known.add(kernel_mesh[n + 1 - j] * products[j]);
        }
        const double p_known = model.phi0(t_next) + 2.0 * half * known.value();

        const double s_n = traj.S[n];
        const double phi_n = traj.phi[n];
        const double s_explicit = s_n * (1.0 - half * phi_n);

        double s_new = s_n;
        double phi_new = phi_n;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            const double s_upd = s_explicit / (1.0 + half * phi_new);
            const double denom = 1.0 - half * a0 * s_upd;
            if (denom == 0.0) {
                break;
            }
            const double phi_upd = p_known / denom;
            const bool s_ok = std::abs(s_upd - s_new) <= rel_tol * std::abs(s_upd) + 1e-300;
            const bool phi_ok =
                std::abs(phi_upd - phi_new) <= rel_tol * std::abs(phi_upd) + 1e-300;
            s_new = s_upd;
            phi_new = phi_upd;
            if (s_ok && phi_ok) {
                break;
            }
        }
        if (!std::isfinite(s_new) || !std::isfinite(phi_new)) {
            throw SolverError("trapezoidal DQ step diverged", n + 1, h);
        }

        products.push_back(s_new * phi_new);
        traj.times.push_back(t_next);
        traj.S.push_back(s_new);
        traj.phi.push_back(phi_new);

        if (config.detect_steady_state) {
            if (detail::steady_step(s_new, s_n, phi_new, model.N, config)) {
                if (++consecutive >= config.window) {
                    traj.steady_state_reached = true;
                    traj.S_inf_h = s_new;
                    break;
                }
            } else {
                consecutive = 0;
            }
        }
    }
    return traj;
}

enum class ViolationKind { NegativeS, NegativePhi, IncreasingS };

struct Violation {
    std::size_t index;
    ViolationKind kind;
    double value;
};

struct ViolationReport {
    std::vector<Violation> violations;

    bool empty() const { return violations.empty(); }
    std::size_t count(ViolationKind kind) const {
        std::size_t c = 0;
        for (const auto& v : violations) {
            if (v.kind == kind) {
                ++c;
            }
        }
        return c;
    }
};

/// Scans a trajectory for negative states and susceptible increases, with
/// rounding slack 1e-12 N.
inline ViolationReport property_violations(const Trajectory& traj) {
    ViolationReport report;
    const double slack = 1e-12 * traj.population;
    for (std::size_t i = 0; i < traj.S.size(); ++i) {
        if (traj.S[i] < -slack) {
            report.violations.push_back({i, ViolationKind::NegativeS, traj.S[i]});
        }
        if (traj.phi[i] < -slack) {
            report.violations.push_back({i, ViolationKind::NegativePhi, traj.phi[i]});
        }
        if (i > 0 && traj.S[i] > traj.S[i - 1] + slack) {
            report.violations.push_back({i, ViolationKind::IncreasingS, traj.S[i]});
        }
    }
    return report;
}

} // namespace aoi
