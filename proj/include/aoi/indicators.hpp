#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/kernel.hpp"
#include "aoi/model.hpp"
#include "aoi/nsfd.hpp"
#include "aoi/root_finding.hpp"

namespace aoi {

/// Basic reproduction number R0 = beta N integral of A over [0, inf).
inline double r0_continuous(const EpidemicModel& model, double tol = default_tail_tol) {
    return model.beta * model.N * model.kernel.integral_tail(0.0, tol);
}

/// Discrete reproduction number R0(h) = beta N h sum_{n>=0} A(t_{n+1}).
inline double r0_discrete(const EpidemicModel& model, double h,
                          double tol = default_tail_tol,
                          std::size_t cap = default_series_cap) {
    return model.beta * model.N * model.kernel.discrete_series(h, tol, cap);
}

/// Quadrature error tau(h) of the right-point series against the integral;
/// satisfies R0(h) = R0 - beta N tau(h) exactly by construction.
inline double tau(const Kernel& kernel, double h, double tol = default_tail_tol,
                  std::size_t cap = default_series_cap) {
    return kernel.integral_tail(0.0, tol) - kernel.discrete_series(h, tol, cap);
}

namespace detail {

/// Expands a bracket for a decreasing residual g and bisects to |g| <= tol.
/// g(0) is evaluated first; positive means the root lies to the right,
/// negative to the left, with the admissible left edge given by `domain`.
template <typename G>
double solve_decreasing_residual(const G& g, const LaplaceDomain& domain, double tol) {
    const double g0 = g(0.0);
    if (g0 == 0.0) {
        return 0.0;
    }
    if (std::abs(g0) <= tol) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 0.0;
    if (g0 > 0.0) {
        double step = 1.0;
        for (int i = 0; i < 80; ++i) {
            hi = step;
            if (g(hi) < 0.0) {
                return bisect_decreasing(g, lo, hi, tol);
            }
            lo = hi;
            step *= 2.0;
        }
        throw BracketError("growth-rate bracket expansion failed on the right");
    }
    hi = 0.0;
    if (domain.min_rate == 0.0 && !domain.open) {
        throw BracketError(
            "no real growth rate: the transform is only defined for r >= 0 and "
            "the reproduction number is at most 1");
    }
    if (std::isinf(domain.min_rate)) {
        double step = 1.0;
        for (int i = 0; i < 80; ++i) {
            lo = -step;
            if (g(lo) > 0.0) {
                return bisect_decreasing(g, lo, hi, tol);
            }
            hi = lo;
            step *= 2.0;
        }
    } else {
        // approach the open left edge geometrically
        double frac = 0.5;
        for (int i = 0; i < 80; ++i) {
            lo = domain.min_rate * (1.0 - frac);
            if (g(lo) > 0.0) {
                return bisect_decreasing(g, lo, hi, tol);
            }
            hi = lo;
            frac *= 0.5;
        }
    }
    throw BracketError("growth-rate bracket expansion failed on the left");
}

} // namespace detail

/// The initial exponential growth rate r solving
/// beta N integral A(s) e^{-r s} ds = 1, by expanding bracket plus
/// bisection to residual |g| <= tol. Throws BracketError when no real
/// root exists (e.g. sub-threshold heavy-tailed kernels).
inline double growth_rate_continuous(const EpidemicModel& model, double tol = 1e-12) {
    const double quad_tol = std::max(1e-15, 0.01 * tol);
    const double bn = model.beta * model.N;
    const auto g = [&model, bn, quad_tol](double r) {
        return bn * model.kernel.laplace(r, quad_tol) - 1.0;
    };
    return detail::solve_decreasing_residual(g, model.kernel.laplace_domain(), tol);
}

/// Discrete growth rate: the root r in (-1/h, inf) of
/// 1 = h beta N sum_{n>=0} A(t_{n+1}) (1 + r h)^{-(n+1)}, the series being
/// truncated exactly as in r0_discrete so that the root is positive if and
/// only if R0(h) > 1.
inline double growth_rate_discrete(const EpidemicModel& model, double h,
                                   double tol = 1e-12,
                                   double series_tol = default_tail_tol,
                                   std::size_t cap = default_series_cap) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("growth_rate_discrete needs h > 0");
    }
    const std::vector<double> terms = model.kernel.series_values(h, series_tol, cap);
    const double hbn = h * model.beta * model.N;
    const auto g = [&terms, hbn, h](double r) {
        const double log_q = std::log1p(r * h);
        const double inv = 1.0 / (1.0 + r * h);
        KahanSum acc;
        double factor = 1.0;
        for (std::size_t n = 0; n < terms.size(); ++n) {
            // periodic exact re-anchoring keeps the power recurrence from
            // drifting on long series
            if (n % 512 == 0) {
                factor = std::exp(-static_cast<double>(n + 1) * log_q);
            } else {
                factor *= inv;
            }
            if (!std::isfinite(factor) || factor > 1e280) {
                return std::numeric_limits<double>::infinity();
            }
            if (factor < 1e-280) {
                break;
            }
            acc.add(terms[n] * factor);
        }
        return hbn * acc.value() - 1.0;
    };

    const double g0 = g(0.0);
    if (std::abs(g0) <= tol) {
        return 0.0;
    }
    double lo;
    double hi;
    if (g0 > 0.0) {
        lo = 0.0;
        double step = 1.0;
        for (int i = 0;; ++i) {
            if (i >= 80) {
                throw BracketError("discrete growth-rate bracket failed on the right");
            }
            hi = step;
            if (g(hi) < 0.0) {
                break;
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        hi = 0.0;
        double frac = 0.5;
        for (int i = 0;; ++i) {
            if (i >= 80) {
                throw BracketError(
                    "discrete growth-rate bracket failed on the left; the kernel "
                    "series is identically zero");
            }
            lo = -(1.0 - frac) / h;
            if (g(lo) > 0.0) {
                break;
            }
            hi = lo;
            frac *= 0.5;
        }
    }
    return bisect_decreasing(g, lo, hi, tol);
}

/// Unique solution S_inf in (0, S0] of log(S0/S_inf) = R0 (1 - S_inf/N),
/// located by bisection to absolute tolerance tol * N.
inline double final_size_from_relation(double r0, double N, double S0,
                                       double tol = 1e-12) {
    if (!(r0 > 0.0)) {
        throw std::invalid_argument("final size relation needs R0 > 0");
    }
    if (!(N > 0.0) || !(S0 > 0.0) || S0 > N) {
        throw std::invalid_argument("final size relation needs 0 < S0 <= N");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("final size tolerance must be positive");
    }
    const auto f = [r0, N, S0](double s) {
        return std::log(S0 / s) - r0 * (1.0 - s / N);
    };
    double lo = S0 * std::exp(-r0 - 2.0); // f(lo) = 2 + R0 lo / N > 0
    double hi;
    if (S0 < N) {
        hi = S0;
    } else if (r0 <= 1.0) {
        return N; // no epidemic: the boundary solution
    } else {
        hi = N / r0; // minimum of f, strictly negative for R0 > 1
    }
    while (hi - lo > tol * N) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Residual of the discrete final-size identity
/// h beta sum phi_{n+1} = R0(h) (1 - S_inf(h)/N), normalized by
/// max(1, R0(h)). Both sides are evaluated on the trajectory's own mesh:
/// the kernel series is truncated at the earlier of the tolerance
/// criterion and the trajectory horizon, so both sums share one
/// truncation.
inline double discrete_final_size_check(const Trajectory& traj,
                                        const EpidemicModel& model,
                                        double tol = default_tail_tol) {
    if (!traj.steady_state_reached || !traj.S_inf_h) {
        throw std::invalid_argument(
            "discrete_final_size_check needs a steady-state trajectory");
    }
    const double h = traj.h;
    const double hb = h * model.beta;

    KahanSum phi_sum;
    for (std::size_t n = 1; n < traj.phi.size(); ++n) {
        phi_sum.add(traj.phi[n]);
    }
    const double lhs = hb * phi_sum.value();

    KahanSum series;
    const std::size_t mesh_terms = traj.steps();
    for (std::size_t n = 0; n < mesh_terms; ++n) {
        const double t = static_cast<double>(n + 1) * h;
        const double a = model.kernel.eval(t);
        series.add(a);
        if (a <= tol && model.kernel.integral_tail(t, tol) <= tol) {
            break;
        }
    }
    const double r0_h = model.beta * model.N * h * series.value();
    const double rhs = r0_h * (1.0 - *traj.S_inf_h / model.N);
    return std::abs(lhs - rhs) / std::max(1.0, r0_h);
}

/// Spurious factor U(h) = sum log(1 + h beta phi_n) / (h beta sum phi_n)
/// of the discrete final-size relation; returns exactly 1 for a zero
/// denominator (the disease-free limit).
inline double u_factor(const Trajectory& traj, const EpidemicModel& model) {
    const double hb = traj.h * model.beta;
    KahanSum log_sum;
    KahanSum phi_sum;
    for (const double p : traj.phi) {
        log_sum.add(std::log1p(hb * p));
        phi_sum.add(p);
    }
    const double den = hb * phi_sum.value();
    if (den == 0.0) {
        return 1.0;
    }
    return log_sum.value() / den;
}

struct IndicatorReport {
    double R0 = 0.0;
    double R0_h = 0.0;
    double tau_h = 0.0;
    std::optional<double> r_continuous;
    std::optional<double> r_discrete;
    std::optional<double> S_inf_relation;
    std::optional<double> S_inf_h;
    std::optional<double> U_h;
    std::optional<double> final_size_residual;
};

/// Assembles the full indicator set for a model at step size h. Growth
/// rates without a real root and an undefined final-size relation are left
/// empty rather than failing the whole report. When a steady-state
/// trajectory is supplied, the trajectory-derived diagnostics are filled
/// in as well.
inline IndicatorReport compute_report(const EpidemicModel& model, double h,
                                      double tol = default_tail_tol,
                                      std::size_t cap = default_series_cap,
                                      const Trajectory* traj = nullptr) {
    IndicatorReport rep;
    rep.R0 = r0_continuous(model, tol);
    rep.R0_h = r0_discrete(model, h, tol, cap);
    rep.tau_h = tau(model.kernel, h, tol, cap);
    try {
        rep.r_continuous = growth_rate_continuous(model, 1e-12);
    } catch (const BracketError&) {
    }
    try {
        rep.r_discrete = growth_rate_discrete(model, h, 1e-12, tol, cap);
    } catch (const BracketError&) {
    }
    if (rep.R0 > 0.0 && model.S0 > 0.0) {
        rep.S_inf_relation = final_size_from_relation(rep.R0, model.N, model.S0);
    }
    if (traj != nullptr && traj->steady_state_reached && traj->S_inf_h) {
        rep.S_inf_h = traj->S_inf_h;
        rep.U_h = u_factor(*traj, model);
        rep.final_size_residual = discrete_final_size_check(*traj, model, tol);
    }
    return rep;
}

} // namespace aoi
