#pragma once

// Internal engine shared by trajectory() and the power study: computes the
// fluctuation path h_t = sqrt(t) (D_t - D_T) and its maximum without the
// critical-value machinery. Not installed; not part of the public API.

#include <string>
#include <vector>

#include "corrbreak/panel.hpp"
#include "corrbreak/trajectory.hpp"

namespace corrbreak::detail {

struct FluctStats {
    double max_abs_h = 0.0;
    int argmax_t = 0;
    int t_min = 0;
    double lambda = 0.0;  // full-sample selected eigenvalue
    int q = 1;            // coincident-cluster size around the selection
    int selector_index = 0;
    const char* selector_name = "";
    const char* basis_name = "";
    const char* path_name = "";
};

// `points` may be null when only the maximum is needed (power study).
FluctStats run_fluctuation(const StandardizedPanel& panel, const TrajectoryConfig& config,
                           std::vector<TrajectoryPoint>* points);

}  // namespace corrbreak::detail
