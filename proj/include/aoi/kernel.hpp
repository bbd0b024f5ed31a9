#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aoi/numerics.hpp"
#include "aoi/quadrature.hpp"

namespace aoi {

inline constexpr double default_tail_tol = 1e-12;
inline constexpr std::size_t default_series_cap = 100'000'000;

/// A(t) = (1+t)^(-p), p > 1.
struct PowerLaw {
    double p;
};

/// A(t) = exp(-(t-mu)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)).
struct Gaussian {
    double mu;
    double sigma;
};

/// A(t) = lambda exp(-lambda t) when normalized, exp(-lambda t) otherwise.
struct Exponential {
    double lambda;
    bool normalized = true;
};

/// Piecewise-linear table on [t.front(), t.back()], zero outside.
struct Tabulated {
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> cumulative; // integral from t.front() to t[i]
};

/// Admissible domain of the Laplace transform integral of A.
struct LaplaceDomain {
    double min_rate;
    bool open; // min_rate itself excluded when true
};

/// Mean-infectivity kernel A(t): non-negative on [0, inf) with finite
/// integral and finite total variation. Immutable after construction;
/// every operation is const and safe to call concurrently.
class Kernel {
public:
    static Kernel power_law(double p) {
        if (!(p > 1.0)) {
            throw std::invalid_argument("kernel.p must be > 1");
        }
        return Kernel(PowerLaw{p});
    }

    static Kernel gaussian(double mu, double sigma) {
        if (!(sigma > 0.0)) {
            throw std::invalid_argument("kernel.sigma must be positive");
        }
        return Kernel(Gaussian{mu, sigma});
    }

    static Kernel exponential(double lambda, bool normalized = true) {
        if (!(lambda > 0.0)) {
            throw std::invalid_argument("kernel.lambda must be positive");
        }
        return Kernel(Exponential{lambda, normalized});
    }

    static Kernel tabulated(std::vector<double> times, std::vector<double> values) {
        if (times.size() != values.size() || times.empty()) {
            throw std::invalid_argument(
                "tabulated kernel needs matching, non-empty time/value columns");
        }
        if (!(times.front() >= 0.0)) {
            throw std::invalid_argument("tabulated kernel times must be >= 0");
        }
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i] > times[i - 1])) {
                throw std::invalid_argument("tabulated kernel times must be ascending");
            }
        }
        for (double v : values) {
            if (!(v >= 0.0)) {
                throw std::invalid_argument("tabulated kernel values must be >= 0");
            }
        }
        Tabulated tab{std::move(times), std::move(values), {}};
        tab.cumulative.resize(tab.t.size(), 0.0);
        for (std::size_t i = 1; i < tab.t.size(); ++i) {
            tab.cumulative[i] = tab.cumulative[i - 1] +
                                0.5 * (tab.v[i] + tab.v[i - 1]) * (tab.t[i] - tab.t[i - 1]);
        }
        return Kernel(std::move(tab));
    }

    /// A(t) for t >= 0.
    double eval(double t) const {
        if (!(t >= 0.0)) {
            throw std::domain_error("kernel evaluated at negative time");
        }
        return std::visit([t](const auto& k) { return eval_impl(k, t); }, family_);
    }

    /// Integral of A over [t0, inf). Closed form for the analytic families,
    /// exact trapezoid on the table for tabulated kernels; tol bounds the
    /// absolute error where no closed form exists.
    double integral_tail(double t0, double tol = default_tail_tol) const {
        if (!(t0 >= 0.0)) {
            throw std::domain_error("integral_tail needs t0 >= 0");
        }
        if (!(tol > 0.0)) {
            throw std::invalid_argument("integral_tail tolerance must be positive");
        }
        return std::visit([t0](const auto& k) { return tail_impl(k, t0); }, family_);
    }

    /// Total variation of A on [0, inf), i.e. the L1 norm of A'.
    double deriv_l1() const {
        return std::visit([](const auto& k) { return deriv_l1_impl(k); }, family_);
    }

    /// sup over t >= 0 of A(t).
    double sup_value() const {
        return std::visit([](const auto& k) { return sup_impl(k); }, family_);
    }

    /// Truncated series h * sum_{n=0..N*} A(t_{n+1}) on the mesh t_n = n h.
    /// The truncation index N* is the first n for which both the term
    /// A(t_{n+1}) and the remaining integral mass fall below tol.
    double discrete_series(double h, double tol = default_tail_tol,
                           std::size_t cap = default_series_cap) const {
        KahanSum acc;
        for_each_series_term(h, tol, cap, [&acc](double a) { acc.add(a); });
        return h * acc.value();
    }

    /// The series terms A(t_1), A(t_2), ..., A(t_{N*+1}) with the same
    /// truncation rule as discrete_series.
    std::vector<double> series_values(double h, double tol = default_tail_tol,
                                      std::size_t cap = default_series_cap) const {
        std::vector<double> out;
        for_each_series_term(h, tol, cap, [&out](double a) { out.push_back(a); });
        return out;
    }

    /// Laplace transform integral of A at rate r. Throws std::domain_error
    /// when the integral diverges for the family at r.
    double laplace(double r, double tol = default_tail_tol) const {
        if (!(tol > 0.0)) {
            throw std::invalid_argument("laplace tolerance must be positive");
        }
        return std::visit([r, tol](const auto& k) { return laplace_impl(k, r, tol); },
                          family_);
    }

    LaplaceDomain laplace_domain() const {
        return std::visit([](const auto& k) { return domain_impl(k); }, family_);
    }

    const std::variant<PowerLaw, Gaussian, Exponential, Tabulated>& family() const {
        return family_;
    }

private:
    template <typename T>
    explicit Kernel(T family) : family_(std::move(family)) {}

    template <typename Fn>
    void for_each_series_term(double h, double tol, std::size_t cap, Fn&& visit_term) const {
        if (!(h > 0.0)) {
            throw std::invalid_argument("discrete series needs h > 0");
        }
        if (!(tol > 0.0)) {
            throw std::invalid_argument("discrete series tolerance must be positive");
        }
        for (std::size_t n = 0;; ++n) {
            if (n > cap) {
                throw std::runtime_error(
                    "discrete series exceeded " + std::to_string(cap) +
                    " terms without meeting the tail criterion; kernel may not "
                    "be integrable");
            }
            const double t = static_cast<double>(n + 1) * h;
            const double a = eval(t);
            visit_term(a);
            if (a <= tol && integral_tail(t, tol) <= tol) {
                return;
            }
        }
    }

    // --- per-family evaluation ---

    static double eval_impl(const PowerLaw& k, double t) {
        return std::pow(1.0 + t, -k.p);
    }
    static double eval_impl(const Gaussian& k, double t) {
        const double z = (t - k.mu) / k.sigma;
        return std::exp(-0.5 * z * z) / (k.sigma * std::sqrt(2.0 * M_PI));
    }
    static double eval_impl(const Exponential& k, double t) {
        const double e = std::exp(-k.lambda * t);
        return k.normalized ? k.lambda * e : e;
    }
    static double eval_impl(const Tabulated& k, double t) {
        if (t < k.t.front() || t > k.t.back()) {
            return 0.0;
        }
        const auto it = std::upper_bound(k.t.begin(), k.t.end(), t);
        if (it == k.t.begin()) {
            return k.v.front();
        }
        if (it == k.t.end()) {
            return k.v.back();
        }
        const std::size_t i = static_cast<std::size_t>(it - k.t.begin());
        const double w = (t - k.t[i - 1]) / (k.t[i] - k.t[i - 1]);
        return k.v[i - 1] + w * (k.v[i] - k.v[i - 1]);
    }

    // --- tail integrals ---

    static double tail_impl(const PowerLaw& k, double t0) {
        return std::pow(1.0 + t0, 1.0 - k.p) / (k.p - 1.0);
    }
    static double tail_impl(const Gaussian& k, double t0) {
        return normal_tail((t0 - k.mu) / k.sigma);
    }
    static double tail_impl(const Exponential& k, double t0) {
        const double e = std::exp(-k.lambda * t0);
        return k.normalized ? e : e / k.lambda;
    }
    static double tail_impl(const Tabulated& k, double t0) {
        if (t0 >= k.t.back()) {
            return 0.0;
        }
        const double total = k.cumulative.back();
        if (t0 <= k.t.front()) {
            return total;
        }
        const auto it = std::upper_bound(k.t.begin(), k.t.end(), t0);
        const std::size_t i = static_cast<std::size_t>(it - k.t.begin());
        const double w = (t0 - k.t[i - 1]) / (k.t[i] - k.t[i - 1]);
        const double v_at = k.v[i - 1] + w * (k.v[i] - k.v[i - 1]);
        const double upto = k.cumulative[i - 1] +
                            0.5 * (k.v[i - 1] + v_at) * (t0 - k.t[i - 1]);
        return total - upto;
    }

    // --- total variation ---

    static double deriv_l1_impl(const PowerLaw&) {
        // monotone decreasing from A(0) = 1 to 0
        return 1.0;
    }
    static double deriv_l1_impl(const Gaussian& k) {
        const double at_mode = eval_impl(k, std::max(k.mu, 0.0));
        if (k.mu <= 0.0) {
            return eval_impl(k, 0.0); // monotone decreasing on [0, inf)
        }
        // rise from A(0) to the mode, then full decay to 0
        return 2.0 * at_mode - eval_impl(k, 0.0);
    }
    static double deriv_l1_impl(const Exponential& k) {
        return eval_impl(k, 0.0);
    }
    static double deriv_l1_impl(const Tabulated& k) {
        double tv = 0.0;
        for (std::size_t i = 1; i < k.v.size(); ++i) {
            tv += std::abs(k.v[i] - k.v[i - 1]);
        }
        return tv;
    }

    // --- suprema ---

    static double sup_impl(const PowerLaw&) { return 1.0; }
    static double sup_impl(const Gaussian& k) {
        return eval_impl(k, std::max(k.mu, 0.0));
    }
    static double sup_impl(const Exponential& k) { return eval_impl(k, 0.0); }
    static double sup_impl(const Tabulated& k) {
        return *std::max_element(k.v.begin(), k.v.end());
    }

    // --- Laplace transforms ---

    static double laplace_impl(const PowerLaw& k, double r, double tol) {
        if (r < 0.0) {
            throw std::domain_error(
                "power-law kernel has no Laplace transform for negative rates");
        }
        if (r == 0.0) {
            return tail_impl(k, 0.0);
        }
        // geometric panels until the analytic remainder is negligible
        const auto f = [&k, r](double s) { return eval_impl(k, s) * std::exp(-r * s); };
        double a = 0.0;
        double width = 1.0 / r;
        KahanSum acc;
        for (int panel = 0; panel < 200; ++panel) {
            const double b = a + width;
            acc.add(adaptive_simpson(f, a, b, 0.25 * tol / (panel + 1.0) / (panel + 1.0)));
            const double remainder = std::exp(-r * b) * tail_impl(k, b);
            if (remainder <= 0.5 * tol) {
                return acc.value();
            }
            a = b;
            width *= 2.0;
        }
        return acc.value();
    }
    static double laplace_impl(const Gaussian& k, double r, double /*tol*/) {
        const double exponent = 0.5 * r * r * k.sigma * k.sigma - r * k.mu;
        const double z = (k.mu - r * k.sigma * k.sigma) / k.sigma;
        if (z < -25.0) {
            // Phi(z) ~ phi(z)/(-z) (1 - 1/z^2 + 3/z^4); exponent - z^2/2
            // collapses to -mu^2/(2 sigma^2)
            const double z2 = z * z;
            const double head =
                std::exp(-0.5 * k.mu * k.mu / (k.sigma * k.sigma)) /
                std::sqrt(2.0 * M_PI);
            return head / (-z) * (1.0 - 1.0 / z2 + 3.0 / (z2 * z2));
        }
        return std::exp(exponent) * normal_cdf(z);
    }
    static double laplace_impl(const Exponential& k, double r, double /*tol*/) {
        if (r <= -k.lambda) {
            throw std::domain_error(
                "exponential kernel Laplace transform diverges for r <= -lambda");
        }
        return (k.normalized ? k.lambda : 1.0) / (k.lambda + r);
    }
    static double laplace_impl(const Tabulated& k, double r, double tol) {
        const auto f = [&k, r](double s) { return eval_impl(k, s) * std::exp(-r * s); };
        const double per_segment = tol / static_cast<double>(k.t.size());
        KahanSum acc;
        for (std::size_t i = 1; i < k.t.size(); ++i) {
            acc.add(adaptive_simpson(f, k.t[i - 1], k.t[i], per_segment));
        }
        return acc.value();
    }

    // --- Laplace domains ---

    static LaplaceDomain domain_impl(const PowerLaw&) { return {0.0, false}; }
    static LaplaceDomain domain_impl(const Gaussian&) {
        return {-std::numeric_limits<double>::infinity(), true};
    }
    static LaplaceDomain domain_impl(const Exponential& k) { return {-k.lambda, true}; }
    static LaplaceDomain domain_impl(const Tabulated&) {
        return {-std::numeric_limits<double>::infinity(), true};
    }

    std::variant<PowerLaw, Gaussian, Exponential, Tabulated> family_;
};

} // namespace aoi
