#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aoi {

/// A per-step failure of an iterative scheme (e.g. the trapezoidal
/// direct-quadrature fixed point not converging). Carries the step index
/// and step size that failed.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t step, double h)
        : std::runtime_error(what + " (step " + std::to_string(step) +
                             ", h=" + std::to_string(h) + ")"),
          step_(step),
          h_(h) {}

    std::size_t step() const { return step_; }
    double step_size() const { return h_; }

private:
    std::size_t step_;
    double h_;
};

/// Root bracketing failed: the residual has no sign change on the
/// admissible domain (e.g. sub-threshold heavy-tailed kernels have no
/// real growth rate).
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace aoi
