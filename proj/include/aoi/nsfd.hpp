#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/numerics.hpp"

namespace aoi {

enum class Scheme { Nsfd, TrapezoidalDq };

struct SolverConfig {
    double h = 0.0;
    double t_max = 0.0;
    double eps_phi = 1e-12;       // steady state: phi_n < eps_phi * N
    double eps_s = 1e-12;         // steady state: |S_n - S_{n-1}| < eps_s * max(S_n, 1)
    int window = 10;              // consecutive steps before declaring steady state
    double tail_tol = 1e-12;      // series truncation tolerance for indicators
    std::size_t max_steps = 5'000'000;
    bool detect_steady_state = true;

    void validate() const {
        if (!(h > 0.0)) {
            throw std::invalid_argument("solver step size h must be positive");
        }
        if (!(t_max >= h)) {
            throw std::invalid_argument("solver horizon t_max must be >= h");
        }
        if (!(eps_phi > 0.0) || !(eps_s > 0.0)) {
            throw std::invalid_argument("steady-state tolerances must be positive");
        }
        if (window < 1) {
            throw std::invalid_argument("steady-state window must be >= 1");
        }
        if (!(tail_tol > 0.0)) {
            throw std::invalid_argument("tail tolerance must be positive");
        }
        if (max_steps < 1) {
            throw std::invalid_argument("max_steps must be >= 1");
        }
    }

    std::size_t step_count() const {
        const double steps = std::floor(t_max / h + 1e-9);
        return static_cast<std::size_t>(steps < 1.0 ? 1.0 : steps);
    }
};

/// A computed mesh solution: times t_n = n h with susceptibles S_n and
/// total infectivity phi_n, plus steady-state metadata. Immutable once
/// returned by a run.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> S;
    std::vector<double> phi;
    Scheme scheme = Scheme::Nsfd;
    double h = 0.0;
    double population = 0.0; // N of the originating model
    bool steady_state_reached = false;
    std::optional<double> S_inf_h;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

struct StepValues {
    double S_next;
    double phi_next;
};

/// One step of the non-standard scheme, from committed histories
/// S_0..S_n and phi_0..phi_n:
///
///   S_{n+1}   = S_n / (1 + h beta phi_n)
///   phi_{n+1} = phi0(t_{n+1}) + h beta sum_{j=0..n} A(t_{n+1-j}) S_{j+1} phi_j
///
/// The implicit S-update is solved in closed form; the convolution uses the
/// already committed S values and the freshly computed S_{n+1} for j = n.
/// Reference implementation; nsfd_run keeps cached kernel values instead.
inline StepValues nsfd_step(std::span<const double> s_history,
                            std::span<const double> phi_history,
                            const EpidemicModel& model, double h) {
    if (s_history.size() != phi_history.size() || s_history.empty()) {
        throw std::invalid_argument("nsfd_step needs equal, non-empty histories");
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("nsfd_step needs h > 0");
    }
    const std::size_t n = s_history.size() - 1;
    const double hb = h * model.beta;
    const double s_next = s_history[n] / (1.0 + hb * phi_history[n]);

    KahanSum conv;
    for (std::size_t j = 0; j <= n; ++j) {
        const double t_lag = static_cast<double>(n + 1 - j) * h;
        const double s_committed = (j < n) ? s_history[j + 1] : s_next;
        conv.add(model.kernel.eval(t_lag) * s_committed * phi_history[j]);
    }
    const double t_next = static_cast<double>(n + 1) * h;
    return {s_next, model.phi0(t_next) + hb * conv.value()};
}

namespace detail {

/// Per-step steady-state predicate shared by the runners.
inline bool steady_step(double s_curr, double s_prev, double phi_curr, double N,
                        const SolverConfig& config) {
    return phi_curr < config.eps_phi * N &&
           std::abs(s_curr - s_prev) < config.eps_s * std::max(s_curr, 1.0);
}

} // namespace detail

/// Runs the non-standard scheme on the uniform mesh up to t_max, stopping
/// earlier when `window` consecutive steps satisfy the steady-state
/// criterion. Cost is O(M^2) in the number of steps (full-history
/// convolution, no cutoff).
inline Trajectory nsfd_run(const EpidemicModel& model, const SolverConfig& config) {
    model.validated();
    config.validate();
    const std::size_t total_steps = config.step_count();
    if (total_steps > config.max_steps) {
        throw std::invalid_argument(
            "requested mesh has " + std::to_string(total_steps) +
            " steps, above the configured max_steps cap");
    }

    Trajectory traj;
    traj.scheme = Scheme::Nsfd;
    traj.h = config.h;
    traj.population = model.N;
    traj.times.reserve(total_steps + 1);
    traj.S.reserve(total_steps + 1);
    traj.phi.reserve(total_steps + 1);

    traj.times.push_back(0.0);
    traj.S.push_back(model.S0);
    traj.phi.push_back(model.phi0(0.0));

    const double h = config.h;
    const double hb = h * model.beta;
    std::vector<double> kernel_mesh;   // kernel_mesh[k] = A((k+1) h)
    std::vector<double> committed;     // committed[j] = S_{j+1} phi_j
    kernel_mesh.reserve(total_steps);
    committed.reserve(total_steps);

    int consecutive = 0;
    for (std::size_t n = 0; n < total_steps; ++n) {
        const double t_next = static_cast<double>(n + 1) * h;
        kernel_mesh.push_back(model.kernel.eval(t_next));

        const double s_n = traj.S[n];
        const double phi_n = traj.phi[n];
        const double s_next = s_n / (1.0 + hb * phi_n);
        committed.push_back(s_next * phi_n);

        KahanSum conv;
        const double* a = kernel_mesh.data();
        const double* c = committed.data();
        for (std::size_t j = 0; j <= n; ++j) {
            conv.add(a[n - j] * c[j]);
        }
        const double phi_next = model.phi0(t_next) + hb * conv.value();

        traj.times.push_back(t_next);
        traj.S.push_back(s_next);
        traj.phi.push_back(phi_next);

        if (config.detect_steady_state) {
            if (detail::steady_step(s_next, s_n, phi_next, model.N, config)) {
                if (++consecutive >= config.window) {
                    traj.steady_state_reached = true;
                    traj.S_inf_h = s_next;
                    break;
                }
            } else {
                consecutive = 0;
            }
        }
    }
    return traj;
}

/// The limiting susceptible value S_inf(h) of a finished trajectory, when
/// its trailing `window` steps satisfy the steady-state criterion; empty
/// otherwise (detection must not fire mid-epidemic).
inline std::optional<double> steady_state(const Trajectory& traj,
                                          const SolverConfig& config) {
    const std::size_t steps = traj.steps();
    if (steps < static_cast<std::size_t>(config.window)) {
        return std::nullopt;
    }
    for (std::size_t n = steps + 1 - static_cast<std::size_t>(config.window);
         n <= steps; ++n) {
        if (!detail::steady_step(traj.S[n], traj.S[n - 1], traj.phi[n],
                                 traj.population, config)) {
            return std::nullopt;
        }
    }
    return traj.S.back();
}

} // namespace aoi
