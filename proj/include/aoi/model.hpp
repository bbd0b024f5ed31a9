#pragma once

#include <stdexcept>

#include "aoi/kernel.hpp"

namespace aoi {

/// Epidemic problem data: infectivity kernel, total population N, initial
/// susceptibles S0 and effective contact rate beta. The initial infectivity
/// is fixed to phi0(t) = (N - S0) A(t): all initial infectives carry
/// infection age zero. Immutable value type.
struct EpidemicModel {
    Kernel kernel;
    double N;
    double S0;
    double beta;

    const EpidemicModel& validated() const {
        if (!(N > 0.0)) {
            throw std::invalid_argument("N must be positive");
        }
        if (!(S0 >= 0.0)) {
            throw std::invalid_argument("S0 must be non-negative");
        }
        if (S0 > N) {
            throw std::invalid_argument("S0 exceeds N");
        }
        if (!(beta > 0.0)) {
            throw std::invalid_argument("beta must be positive");
        }
        return *this;
    }

    /// phi0(t) = (N - S0) A(t), the infectivity at time t of the members
    /// infected at t = 0.
    double phi0(double t) const { return (N - S0) * kernel.eval(t); }
};

} // namespace aoi
