#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "corrbreak/matrix.hpp"

namespace corrbreak {

// A multivariate return panel: T observations of p series, with optional
// ISO-8601 time labels. Invariants (enforced by load_panel / validate_panel):
// T >= 2, p >= 2, every entry finite, no constant column, labels (when
// present) have length T and are strictly increasing.
struct ReturnPanel {
    Matrix observations;              // T x p
    std::vector<std::string> labels;  // empty, or exactly T entries
    std::vector<std::string> names;   // p column identifiers

    int rows() const { return observations.rows(); }
    int cols() const { return observations.cols(); }
};

// Panel after column-wise standardization with full-sample mean and
// denominator-T standard deviation. Each column has mean 0 and sd 1.
// The scales used are kept for provenance.
struct StandardizedPanel {
    Matrix observations;       // T x p
    std::vector<double> means; // full-sample column means
    std::vector<double> sds;   // full-sample denominator-T sds

    int rows() const { return observations.rows(); }
    int cols() const { return observations.cols(); }
};

// Which centering the prefix correlation uses. `prefix` recenters each
// window 1..k by its own means (the literal estimator definition);
// `full_sample` keeps the full-sample means, which for a standardized
// panel are exactly zero. Both estimators agree asymptotically.
enum class MeanConvention { prefix, full_sample };

// Sample correlation matrix of the first `window_end` observations:
// symmetric, unit diagonal, off-diagonal entries in [-1, 1].
struct CorrelationMatrix {
    Matrix entries;  // p x p
    int window_end;  // k, 1-based prefix length
};

// CSV loading. Expected layout: UTF-8, comma separated, one header row,
// optional leading label column whose header is "date" (case-insensitive)
// holding ISO-8601 dates, remaining columns decimal floating point.
// Malformed rows, non-numeric cells, constant columns and panels with
// fewer than two numeric columns are rejected with an error naming the
// offending line and column.
ReturnPanel load_panel(std::istream& in);
ReturnPanel load_panel_file(const std::string& path);

// Re-checks the ReturnPanel invariants on an already-built panel.
void validate_panel(const ReturnPanel& panel);

void write_panel_csv(const ReturnPanel& panel, std::ostream& out);

// Price-to-return convenience transforms (drop the first row).
enum class ReturnsMode { as_is, log_diff, pct_diff };
ReturnPanel to_returns(const ReturnPanel& prices, ReturnsMode mode);

StandardizedPanel standardize(const ReturnPanel& panel);

// Correlation matrix of observations 1..k (2 <= k <= T). A column that is
// constant on the prefix raises an error naming the column and k.
CorrelationMatrix prefix_correlation(const StandardizedPanel& panel, int k,
                                     MeanConvention means = MeanConvention::prefix);

// Prefix second-moment matrix (1/k) sum_{s<=k} x_s x_s' of the standardized
// panel. Uncentered and not re-normalized; at k = T it coincides with the
// full-sample correlation matrix because of the full-sample standardization.
Matrix prefix_second_moment(const StandardizedPanel& panel, int k);

CorrelationMatrix full_correlation(const StandardizedPanel& panel,
                                   MeanConvention means = MeanConvention::prefix);

}  // namespace corrbreak
