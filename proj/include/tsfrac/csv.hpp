#pragma once

#include <ostream>
#include <string>

#include "tsfrac/config.hpp"
#include "tsfrac/solver.hpp"

namespace tsfrac {

/// Solution CSV: one row per node in ascending order; each impulse time
/// contributes a left/right row pair carrying the two limits.
inline void emit_solution_csv(std::ostream& os, const Solution& sol) {
    os << "theta,segment_index,p,h,is_impulse_left,is_impulse_right\n";
    std::size_t next_jump = 0;
    for (std::size_t i = 0; i < sol.grid->size(); ++i) {
        const double theta = sol.grid->node(i);
        if (next_jump < sol.jumps.size() && sol.jumps[next_jump].node == i) {
            const auto& j = sol.jumps[next_jump];
            os << format_double(theta) << ',' << sol.segment_of_node[i] << ','
               << format_double(j.p_minus) << ',' << format_double(j.h_minus)
               << ",1,0\n";
            os << format_double(theta) << ',' << sol.segment_of_node[i] + 1
               << ',' << format_double(j.p_plus) << ','
               << format_double(j.h_plus) << ",0,1\n";
            ++next_jump;
        } else {
            os << format_double(theta) << ',' << sol.segment_of_node[i] << ','
               << format_double(sol.p[i]) << ',' << format_double(sol.h[i])
               << ",0,0\n";
        }
    }
}

struct CompareRow {
    double theta;
    double caputo;
    double rl;
    double caputo_via_rl;
};

inline void emit_compare_csv(std::ostream& os,
                             const std::vector<CompareRow>& rows) {
    os << "theta,caputo,rl,caputo_via_rl,abs_diff\n";
    for (const auto& r : rows) {
        os << format_double(r.theta) << ',' << format_double(r.caputo) << ','
           << format_double(r.rl) << ',' << format_double(r.caputo_via_rl)
           << ',' << format_double(std::abs(r.caputo - r.caputo_via_rl))
           << '\n';
    }
}

} // namespace tsfrac
