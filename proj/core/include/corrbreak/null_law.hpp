#pragma once

#include <cstdint>
#include <span>

namespace corrbreak {

// Parameters of the asymptotic null law of the eigenvalue fluctuation
// statistic: reference eigenvalue lambda > 0 with multiplicity q out of a
// p-dimensional matrix (1 <= q <= p).
struct NullLaw {
    double lambda = 1.0;
    int q = 1;
    int p = 2;
};

void validate(const NullLaw& law);

// Joint density of the q ordered fluctuation coordinates h_1 > ... > h_q:
//
//   f(h) = K(q) / lambda^{q(q+1)/2} * exp(-sum h_i^2 / (4 lambda^2))
//          * prod_{i<j} (h_i - h_j),
//   1/K(q) = 2^{q(q+3)/4} * prod_{i=1..q} Gamma((q+1-i)/2).
//
// For q = 1 this is a centered normal with variance 2 lambda^2. Ties give
// density 0; an unsorted vector is a domain error.
double null_pdf(std::span<const double> h, const NullLaw& law);

// Two-sided critical value at level alpha: the (1-alpha) quantile of
// max_i |h_i| under the law. q = 1 has the closed form
// sqrt(2) * lambda * z_{1-alpha/2}; q > 1 is estimated by transform
// sampling from the joint density (mc_reps >= 1e5 draws, deterministic
// given seed) and is exactly linear in lambda by construction.
double critical_value(double alpha, const NullLaw& law, long mc_reps = 200000,
                      std::uint64_t seed = 0x5EEDC0DEULL);

// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double prob);

// Empirical (1-alpha)-style quantile: smallest element with at least
// `prob` fraction of the sample at or below it. Sorts in place.
double empirical_quantile(std::span<double> sample, double prob);

}  // namespace corrbreak
