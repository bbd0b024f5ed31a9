#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "aoi/nsfd.hpp"
#include "aoi/studies.hpp"

namespace aoi::csv {

/// Locale-independent decimal formatting with 15 significant digits.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
    out << "t,S,phi\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << num(traj.times[i]) << ',' << num(traj.S[i]) << ',' << num(traj.phi[i])
            << '\n';
    }
}

inline void write_convergence(std::ostream& out,
                              const std::vector<studies::ConvergenceRow>& rows) {
    out << "h,errS_abs,errPhi_abs,errS_rel,errPhi_rel,ordS,ordPhi\n";
    for (const auto& row : rows) {
        out << num(row.h) << ',' << num(row.err_s_abs) << ',' << num(row.err_phi_abs)
            << ',' << num(row.err_s_rel) << ',' << num(row.err_phi_rel) << ',';
        if (row.ord_s) {
            out << num(*row.ord_s);
        }
        out << ',';
        if (row.ord_phi) {
            out << num(*row.ord_phi);
        }
        out << '\n';
    }
}

} // namespace aoi::csv
