#pragma once

#include <cmath>
#include <cstddef>

namespace aoi {

/// Compensated (Neumaier) accumulator. Summation order is fixed by the
/// caller, so results are reproducible across platforms that round
/// double arithmetic identically.
class KahanSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            comp_ += (sum_ - t) + value;
        } else {
            comp_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Standard normal CDF.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Upper tail of the standard normal, 1 - Phi(x).
inline double normal_tail(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

} // namespace aoi
