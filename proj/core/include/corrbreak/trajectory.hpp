#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrbreak/null_law.hpp"
#include "corrbreak/panel.hpp"

namespace corrbreak {

// Which prefix matrix the fluctuation statistic is built from.
//
//   second_moment — A_t = (1/t) sum_{s<=t} x_s x_s' of the full-sample
//                   standardized panel. Its diagonal fluctuates around 1 and
//                   only equals 1 exactly at t = T, where A_T is the sample
//                   correlation matrix. The asymptotic null law with
//                   variance 2 lambda^2 describes exactly this statistic, so
//                   this is the default.
//   correlation   — unit-diagonal prefix correlation matrix (each window
//                   re-centered and re-scaled). Offered for comparison; its
//                   fluctuations are much smaller than the null law assumes,
//                   making the test strongly conservative.
enum class PrefixBasis { second_moment, correlation };

// How the tracked eigenvalue D_t is followed across t.
//
//   branch — Rayleigh quotient u' A_t u of the full-sample eigenvector u for
//            the selected eigenvalue. Keeps the same spectral branch even
//            when eigenvalue order changes along the prefix; this is the
//            statistic whose single- and double-change laws are available in
//            closed form, and the default for p = 2.
//   sorted — the selected index of the spectrum re-sorted at every t
//            (the cubic-root procedure for p = 3). Default for p >= 3.
enum class EigenPath { auto_path, branch, sorted };

// Which full-sample eigenvalue is tracked. auto_rule: largest for p = 2,
// smallest for p = 3, largest for p > 3.
enum class SelectorRule { auto_rule, largest, smallest };

struct TrajectoryConfig {
    double alpha = 0.05;
    int t_min = 0;  // 0 -> max(30, ceil(0.1 * T)); must be >= 10 otherwise
    SelectorRule selector = SelectorRule::auto_rule;
    PrefixBasis basis = PrefixBasis::second_moment;
    EigenPath path = EigenPath::auto_path;
    MeanConvention means = MeanConvention::prefix;  // correlation basis only
    bool force_general_solver = false;  // replace closed forms with Jacobi
    double gap_tol = 1e-3;  // eigenvalue-coincidence tolerance for q > 1
    long critical_mc_reps = 200000;      // q > 1 critical value only
    std::uint64_t critical_seed = 20240817ULL;
};

struct TrajectoryPoint {
    int t;
    double h;
};

struct TestTrajectory {
    std::vector<TrajectoryPoint> points;  // t = t_min .. T; h_T == 0
    int t_min = 0;
    double alpha = 0.0;
    double critical = 0.0;
    double max_abs_h = 0.0;
    int argmax_t = 0;      // earliest t attaining max |h|
    bool reject = false;   // max_abs_h > critical
    int selector_index = 0;
    double lambda = 0.0;   // full-sample selected eigenvalue
    int q = 1;             // multiplicity used for the critical value
    int p = 0;
    std::string selector;  // "largest" or "smallest"
    std::string basis;     // "second-moment" or "correlation"
    std::string path;      // "branch" or "sorted"
};

// Fluctuation trajectory h_t = sqrt(t) (D_t - D_T) for t in [t_min, T],
// with the critical value from the asymptotic null law at
// lambda = full-sample selected eigenvalue. Multiplicity q stays 1 unless
// full-sample eigenvalues coincide within gap_tol, in which case q is the
// size of the coincident cluster and the Monte Carlo critical value is used.
TestTrajectory trajectory(const StandardizedPanel& panel,
                          const TrajectoryConfig& config = {});

struct Decision {
    bool reject;
    int argmax_t;
    double max_abs_h;
    double critical;
};

// Recomputes the decision record from the stored points: reject iff
// max_t |h_t| > critical, argmax at the earliest attaining t.
Decision decide(const TestTrajectory& traj);

// CSV with columns (t, h, critical).
std::string trajectory_csv(const TestTrajectory& traj);

// Versioned JSON document (schema "corrbreak/1"):
// {schema, meta:{alpha, lambda, q, selector, t_min, basis, path},
//  points:[[t,h],...], critical, reject, argmax_t}.
std::string trajectory_json(const TestTrajectory& traj);

}  // namespace corrbreak
