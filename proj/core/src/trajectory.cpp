#include "corrbreak/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrbreak/eigen.hpp"
#include "corrbreak/error.hpp"
#include "fluct_engine.hpp"

namespace corrbreak {

namespace detail {

namespace {

int resolve_t_min(int requested, int T) {
    int t_min = requested;
    if (t_min == 0) t_min = std::max(30, static_cast<int>(std::ceil(0.1 * T)));
    if (t_min < 10) {
        throw Error(ErrorKind::config,
                    "burn-in t_min must be at least 10, got " + std::to_string(t_min));
    }
    if (t_min > T) {
        throw Error(ErrorKind::config, "burn-in t_min=" + std::to_string(t_min) +
                                           " exceeds the sample length T=" + std::to_string(T));
    }
    return t_min;
}

int resolve_selector(SelectorRule rule, int p) {
    switch (rule) {
        case SelectorRule::largest: return 0;
        case SelectorRule::smallest: return p - 1;
        case SelectorRule::auto_rule: return p == 3 ? p - 1 : 0;
    }
    return 0;
}

// Size of the eigenvalue cluster containing `idx`: adjacent (descending)
// values chained while the gap stays below gap_tol.
int cluster_size(const std::vector<double>& values, int idx, double gap_tol) {
    int lo = idx;
    int hi = idx;
    while (lo > 0 && values[static_cast<std::size_t>(lo - 1)] -
                         values[static_cast<std::size_t>(lo)] < gap_tol) --lo;
    while (hi + 1 < static_cast<int>(values.size()) &&
           values[static_cast<std::size_t>(hi)] -
               values[static_cast<std::size_t>(hi + 1)] < gap_tol) ++hi;
    return hi - lo + 1;
}

// Selected eigenvalue of a symmetric 2x2 [[a, b], [b, c]] without forming
// the full spectrum.
double eig2x2_sorted(double a, double b, double c, int idx) {
    const double mid = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    return idx == 0 ? mid + rad : mid - rad;
}

struct PrefixSums {
    int p = 0;
    std::vector<double> sum;       // per-column running sums
    std::vector<double> cross;     // packed upper triangle of sum x x'

    explicit PrefixSums(int cols)
        : p(cols), sum(static_cast<std::size_t>(cols), 0.0),
          cross(static_cast<std::size_t>(cols) * (cols + 1) / 2, 0.0) {}

    double& at(int a, int b) {  // a <= b
        return cross[static_cast<std::size_t>(a) * p - static_cast<std::size_t>(a) * (a - 1) / 2 +
                     (b - a)];
    }
    double at(int a, int b) const {
        return cross[static_cast<std::size_t>(a) * p - static_cast<std::size_t>(a) * (a - 1) / 2 +
                     (b - a)];
    }

    void add_row(const double* row) {
        for (int a = 0; a < p; ++a) {
            sum[static_cast<std::size_t>(a)] += row[a];
            for (int b = a; b < p; ++b) at(a, b) += row[a] * row[b];
        }
    }
};

// Unit-diagonal prefix correlation matrix at window length t from running
// sums; throws on a degenerate prefix.
void correlation_from_sums(const PrefixSums& s, int t, MeanConvention means, Matrix& out) {
    const int p = s.p;
    std::vector<double> var(static_cast<std::size_t>(p));
    for (int a = 0; a < p; ++a) {
        double v = s.at(a, a);
        if (means == MeanConvention::prefix) {
            v -= s.sum[static_cast<std::size_t>(a)] * s.sum[static_cast<std::size_t>(a)] / t;
        }
        if (!(v > 0.0)) {
            throw Error(ErrorKind::validation, "column " + std::to_string(a + 1) +
                                                   " is constant on the prefix 1.." +
                                                   std::to_string(t));
        }
        var[static_cast<std::size_t>(a)] = v;
    }
    for (int a = 0; a < p; ++a) {
        out(a, a) = 1.0;
        for (int b = a + 1; b < p; ++b) {
            double cov = s.at(a, b);
            if (means == MeanConvention::prefix) {
                cov -= s.sum[static_cast<std::size_t>(a)] * s.sum[static_cast<std::size_t>(b)] / t;
            }
            double rho = cov / std::sqrt(var[static_cast<std::size_t>(a)] *
                                         var[static_cast<std::size_t>(b)]);
            rho = std::clamp(rho, -1.0, 1.0);
            out(a, b) = rho;
            out(b, a) = rho;
        }
    }
}

void second_moment_from_sums(const PrefixSums& s, int t, Matrix& out) {
    for (int a = 0; a < s.p; ++a)
        for (int b = a; b < s.p; ++b) {
            const double v = s.at(a, b) / t;
            out(a, b) = v;
            out(b, a) = v;
        }
}

}  // namespace

FluctStats run_fluctuation(const StandardizedPanel& panel, const TrajectoryConfig& cfg,
                           std::vector<TrajectoryPoint>* points) {
    const int T = panel.rows();
    const int p = panel.cols();
    if (p < 2) {
        throw Error(ErrorKind::domain, "panel must hold at least 2 columns");
    }

    FluctStats st;
    st.t_min = resolve_t_min(cfg.t_min, T);
    st.selector_index = resolve_selector(cfg.selector, p);
    st.basis_name = cfg.basis == PrefixBasis::second_moment ? "second-moment" : "correlation";

    const EigenPath path = cfg.path == EigenPath::auto_path
                               ? (p == 2 ? EigenPath::branch : EigenPath::sorted)
                               : cfg.path;
    st.path_name = path == EigenPath::branch ? "branch" : "sorted";
    st.selector_name = st.selector_index == 0
                           ? "largest"
                           : (st.selector_index == p - 1 ? "smallest" : "middle");

    // Full-sample spectrum (the full-window matrix is the sample correlation
    // matrix in either basis) for lambda, the multiplicity cluster, and the
    // branch direction.
    const CorrelationMatrix full = full_correlation(panel, cfg.means);
    std::vector<double> full_values;
    if (cfg.force_general_solver || p > 3) {
        full_values = eig_sym(full.entries).values;
    } else if (p == 2) {
        full_values = eig2(full.entries(0, 1)).values;
    } else {
        full_values = eig3(full.entries(0, 1), full.entries(0, 2), full.entries(1, 2)).values;
    }
    st.lambda = full_values[static_cast<std::size_t>(st.selector_index)];
    st.q = cluster_size(full_values, st.selector_index, cfg.gap_tol);

    // D_t for t in [t_min, T].
    const int n_points = T - st.t_min + 1;
    std::vector<double> d(static_cast<std::size_t>(n_points));

    if (path == EigenPath::branch) {
        // Projection onto the full-sample eigenvector of the selected value.
        std::vector<double> u(static_cast<std::size_t>(p));
        if (p == 2 && !cfg.force_general_solver) {
            // Eigenvectors of a 2x2 with equal diagonal are (1, +-1)/sqrt(2)
            // for any off-diagonal entry; the largest pairs with the sign of
            // rho.
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            const double sign = full.entries(0, 1) >= 0.0 ? 1.0 : -1.0;
            u[0] = inv_sqrt2;
            u[1] = (st.selector_index == 0 ? sign : -sign) * inv_sqrt2;
        } else {
            const EigenDecomposition full_dec = eig_sym_vectors(full.entries);
            for (int i = 0; i < p; ++i)
                u[static_cast<std::size_t>(i)] = full_dec.vectors(i, st.selector_index);
        }

        if (cfg.basis == PrefixBasis::second_moment) {
            // D_t = (1/t) sum (u'x)^2: a single running sum.
            double acc = 0.0;
            for (int i = 0; i < T; ++i) {
                const double* row = panel.observations.row_ptr(i);
                double proj = 0.0;
                for (int a = 0; a < p; ++a) proj += u[static_cast<std::size_t>(a)] * row[a];
                acc += proj * proj;
                const int t = i + 1;
                if (t >= st.t_min) d[static_cast<std::size_t>(t - st.t_min)] = acc / t;
            }
        } else {
            PrefixSums sums(p);
            Matrix corr(p, p);
            for (int i = 0; i < T; ++i) {
                sums.add_row(panel.observations.row_ptr(i));
                const int t = i + 1;
                if (t < st.t_min) continue;
                correlation_from_sums(sums, t, cfg.means, corr);
                double quad = 0.0;
                for (int a = 0; a < p; ++a)
                    for (int b = 0; b < p; ++b)
                        quad += u[static_cast<std::size_t>(a)] * corr(a, b) *
                                u[static_cast<std::size_t>(b)];
                d[static_cast<std::size_t>(t - st.t_min)] = quad;
            }
        }
    } else {
        // Sorted tracking: re-rank the spectrum at every t.
        PrefixSums sums(p);
        Matrix m(p, p);
        for (int i = 0; i < T; ++i) {
            sums.add_row(panel.observations.row_ptr(i));
            const int t = i + 1;
            if (t < st.t_min) continue;

            double value = 0.0;
            if (cfg.basis == PrefixBasis::second_moment) {
                if (p == 2 && !cfg.force_general_solver) {
                    const double a = sums.at(0, 0) / t;
                    const double b = sums.at(0, 1) / t;
                    const double c = sums.at(1, 1) / t;
                    value = eig2x2_sorted(a, b, c, st.selector_index);
                } else {
                    second_moment_from_sums(sums, t, m);
                    value = eig_sym(m).values[static_cast<std::size_t>(st.selector_index)];
                }
            } else {
                correlation_from_sums(sums, t, cfg.means, m);
                if (cfg.force_general_solver || p > 3) {
                    value = eig_sym(m).values[static_cast<std::size_t>(st.selector_index)];
                } else if (p == 2) {
                    value = eig2(m(0, 1)).values[static_cast<std::size_t>(st.selector_index)];
                } else {
                    value = eig3(m(0, 1), m(0, 2), m(1, 2))
                                .values[static_cast<std::size_t>(st.selector_index)];
                }
            }
            d[static_cast<std::size_t>(t - st.t_min)] = value;
        }
    }

    // h_t = sqrt(t) (D_t - D_T); the final point is exactly zero.
    const double d_full = d.back();
    if (points) {
        points->clear();
        points->reserve(static_cast<std::size_t>(n_points));
    }
    double max_abs = -1.0;
    int argmax = st.t_min;
    for (int k = 0; k < n_points; ++k) {
        const int t = st.t_min + k;
        const double h = std::sqrt(static_cast<double>(t)) * (d[static_cast<std::size_t>(k)] - d_full);
        if (points) points->push_back({t, h});
        const double a = std::abs(h);
        if (a > max_abs) {
            max_abs = a;
            argmax = t;
        }
    }
    st.max_abs_h = max_abs;
    st.argmax_t = argmax;
    return st;
}

}  // namespace detail

TestTrajectory trajectory(const StandardizedPanel& panel, const TrajectoryConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw Error(ErrorKind::domain,
                    "alpha must lie in (0, 1), got " + std::to_string(config.alpha));
    }

    TestTrajectory traj;
    const detail::FluctStats st = detail::run_fluctuation(panel, config, &traj.points);

    if (!(st.lambda > 0.0)) {
        throw Error(ErrorKind::validation,
                    "full-sample selected eigenvalue is not positive (collinear panel?)");
    }
    const NullLaw law{st.lambda, st.q, panel.cols()};
    traj.critical = critical_value(config.alpha, law, config.critical_mc_reps,
                                   config.critical_seed);

    traj.t_min = st.t_min;
    traj.alpha = config.alpha;
    traj.max_abs_h = st.max_abs_h;
    traj.argmax_t = st.argmax_t;
    traj.reject = st.max_abs_h > traj.critical;
    traj.selector_index = st.selector_index;
    traj.lambda = st.lambda;
    traj.q = st.q;
    traj.p = panel.cols();
    traj.selector = st.selector_name;
    traj.basis = st.basis_name;
    traj.path = st.path_name;
    return traj;
}

Decision decide(const TestTrajectory& traj) {
    if (traj.points.empty()) {
        throw Error(ErrorKind::domain, "trajectory holds no points");
    }
    double max_abs = -1.0;
    int argmax = traj.points.front().t;
    for (const TrajectoryPoint& pt : traj.points) {
        const double a = std::abs(pt.h);
        if (a > max_abs) {
            max_abs = a;
            argmax = pt.t;
        }
    }
    return Decision{max_abs > traj.critical, argmax, max_abs, traj.critical};
}

std::string trajectory_csv(const TestTrajectory& traj) {
    std::string out = "t,h,critical\n";
    char buf[96];
    for (const TrajectoryPoint& pt : traj.points) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g\n", pt.t, pt.h, traj.critical);
        out += buf;
    }
    return out;
}

std::string trajectory_json(const TestTrajectory& traj) {
    nlohmann::json doc;
    doc["schema"] = "corrbreak/1";
    doc["meta"] = {{"alpha", traj.alpha},   {"lambda", traj.lambda},
                   {"q", traj.q},           {"selector", traj.selector},
                   {"t_min", traj.t_min},   {"basis", traj.basis},
                   {"path", traj.path}};
    nlohmann::json points = nlohmann::json::array();
    for (const TrajectoryPoint& pt : traj.points) {
        points.push_back(nlohmann::json::array({pt.t, pt.h}));
    }
    doc["points"] = std::move(points);
    doc["critical"] = traj.critical;
    doc["reject"] = traj.reject;
    doc["argmax_t"] = traj.argmax_t;
    return doc.dump(2);
}

}  // namespace corrbreak
