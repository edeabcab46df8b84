#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrbreak/panel.hpp"

namespace corrbreak {

// Piecewise-constant correlation regime: ordered segments of the sample,
// each a (fraction of T, correlation) pair. Fractions are positive and sum
// to 1; |rho| < 1 is required for sampling.
struct Segment {
    double fraction;
    double rho;
};

struct AlternativeSpec {
    std::vector<Segment> segments;
};

void validate(const AlternativeSpec& spec);

// The five standard alternatives of the power study, in order:
//   1: rho 0.5 -> 0.7 at T/2          2: rho 0.5 -> 0.7 at T/4
//   3: rho 0.5 -> -0.5 at T/2         4: rho 0.5 -> -0.5 at T/4
//   5: rho 0.5 -> 0.7 -> 0.5 at T/2 and 3T/4
std::vector<AlternativeSpec> presets();

// Bivariate Gaussian panel under the regime: X ~ iid N(0,1) and, within
// each segment, Y = rho X + sqrt(1-rho^2) Z with independent Z. Segment
// boundaries fall at cumulative floor(fraction * T). Deterministic given
// seed. Requires T >= 20.
ReturnPanel sample_panel(const AlternativeSpec& spec, int T, std::uint64_t seed);

struct PowerConfig {
    // Burn-in of the max-statistic inside the power study; both phases use
    // the same value. 10 is the smallest admissible prefix of the test.
    int t_min = 10;
    // 0 -> min(hardware threads, CORRBREAK_THREADS when set). Results are
    // identical for any thread count.
    int threads = 0;
};

struct PowerResult {
    double frequency = 0.0;   // size-adjusted rejection frequency
    double mc_stderr = 0.0;   // binomial standard error of `frequency`
    double critical = 0.0;    // empirical (1-alpha) null quantile used
    int T = 0;
    double alpha = 0.0;
    int n_null = 0;
    int n_alt = 0;
    std::uint64_t seed = 0;
};

// Size-adjusted rejection frequency of the fluctuation test against `spec`:
// (i) n_null panels under the constant-rho null matched to the first
// segment give the empirical (1-alpha) quantile of max_t |h_t|;
// (ii) the returned frequency is the fraction of n_alt panels under `spec`
// whose max_t |h_t| exceeds that quantile. Replication r of each phase uses
// an independent stream derived from (seed, phase, r), so the result is
// bit-identical regardless of parallelism. Requires n_null, n_alt >= 500.
PowerResult size_adjusted_power(const AlternativeSpec& spec, int T, double alpha,
                                int n_null, int n_alt, std::uint64_t seed,
                                const PowerConfig& config = {});

// Normal law of the fluctuation statistic evaluated at the change point.
struct AnalyticLaw {
    double mean;
    double sd;
};

// Single change: correlation rho1 for t1 observations, then rho2 for t2.
//   mean = sqrt(t1) t2/(t1+t2) (rho1 - rho2)
//   sd   = sqrt(t1) t2/(t1+t2) sqrt((1+rho1)^2/(0.5 t1) + (1+rho2)^2/(0.5 t2))
AnalyticLaw analytic_single_change(long t1, long t2, double rho1, double rho2);

// Double change (t1, t2, t3 segment lengths). The two displayed normal
// terms share the segment-1 eigenvalue draw; `paper_literal` nonetheless
// sums them as independent, `exact_variance` accounts for the shared term:
//   Var = t1/(t1+t2+t3)^2 * ((t2+t3)^2 2(1+rho1)^2/t1
//         + t2^2 2(1+rho2)^2/t2 + t3^2 2(1+rho3)^2/t3).
enum class DoubleChangeMode { paper_literal, exact_variance };
AnalyticLaw analytic_double_change(long t1, long t2, long t3, double rho1,
                                   double rho2, double rho3,
                                   DoubleChangeMode mode = DoubleChangeMode::exact_variance);

// Power-table CSV row: T,alternative,alpha,n_null,n_alt,frequency,mc_stderr,seed
std::string power_csv_header();
std::string power_csv_row(const PowerResult& result, const std::string& alternative);

}  // namespace corrbreak
