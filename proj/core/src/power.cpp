#include "corrbreak/power.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "corrbreak/error.hpp"
#include "corrbreak/null_law.hpp"
#include "corrbreak/rng.hpp"
#include "fluct_engine.hpp"

namespace corrbreak {

void validate(const AlternativeSpec& spec) {
    if (spec.segments.empty()) {
        throw Error(ErrorKind::validation, "alternative needs at least one segment");
    }
    double total = 0.0;
    for (const Segment& seg : spec.segments) {
        if (!(seg.fraction > 0.0)) {
            throw Error(ErrorKind::validation, "segment fractions must be positive");
        }
        if (!(std::abs(seg.rho) <= 1.0)) {
            throw Error(ErrorKind::validation,
                        "segment correlation must lie in [-1, 1], got " +
                            std::to_string(seg.rho));
        }
        total += seg.fraction;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorKind::validation,
                    "segment fractions must sum to 1, got " + std::to_string(total));
    }
}

std::vector<AlternativeSpec> presets() {
    return {
        AlternativeSpec{{{0.5, 0.5}, {0.5, 0.7}}},
        AlternativeSpec{{{0.25, 0.5}, {0.75, 0.7}}},
        AlternativeSpec{{{0.5, 0.5}, {0.5, -0.5}}},
        AlternativeSpec{{{0.25, 0.5}, {0.75, -0.5}}},
        // The two-change alternative: the middle regime runs from T/2 to
        // 3T/4, the outer regimes stay at 0.5.
        AlternativeSpec{{{0.5, 0.5}, {0.25, 0.7}, {0.25, 0.5}}},
    };
}

namespace {

void check_samplable(const AlternativeSpec& spec) {
    for (const Segment& seg : spec.segments) {
        if (std::abs(seg.rho) >= 1.0) {
            throw Error(ErrorKind::domain,
                        "cannot sample a degenerate segment with |rho| = 1");
        }
    }
}

// Fills a T x 2 matrix with one panel draw; boundaries at cumulative
// floor(fraction * T), the last segment always closing at T.
void sample_into(const AlternativeSpec& spec, int T, Xoshiro256pp& rng, Matrix& obs) {
    int row = 0;
    double cum = 0.0;
    const std::size_t n_seg = spec.segments.size();
    for (std::size_t s = 0; s < n_seg; ++s) {
        cum += spec.segments[s].fraction;
        int end = s + 1 == n_seg ? T : static_cast<int>(std::floor(cum * T));
        end = std::min(end, T);
        const double rho = spec.segments[s].rho;
        const double noise_scale = std::sqrt(1.0 - rho * rho);
        for (; row < end; ++row) {
            const double x = rng.normal();
            const double z = rng.normal();
            obs(row, 0) = x;
            obs(row, 1) = rho * x + noise_scale * z;
        }
    }
}

int resolve_threads(int requested, int work_items) {
    int threads = requested;
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (const char* env = std::getenv("CORRBREAK_THREADS")) {
            const long cap = std::strtol(env, nullptr, 10);
            if (cap >= 1) threads = std::min<long>(threads, cap);
        }
    }
    threads = std::max(threads, 1);
    return std::min(threads, std::max(work_items, 1));
}

// max_t |h_t| for every replication of one phase; results are indexed by
// replication, so the outcome is independent of the thread count.
std::vector<double> phase_statistics(const AlternativeSpec& spec, int T,
                                     std::uint64_t seed, std::uint64_t phase, int reps,
                                     const TrajectoryConfig& engine_cfg, int threads) {
    std::vector<double> stats(static_cast<std::size_t>(reps));
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    const int n_threads = resolve_threads(threads, reps);

    auto worker = [&](int first, int last) {
        try {
            StandardizedPanel std_panel;
            ReturnPanel panel;
            panel.names = {"x", "y"};
            panel.observations = Matrix(T, 2);
            for (int r = first; r < last; ++r) {
                Xoshiro256pp rng(stream_seed(seed, phase, static_cast<std::uint64_t>(r)));
                sample_into(spec, T, rng, panel.observations);
                std_panel = standardize(panel);
                stats[static_cast<std::size_t>(r)] =
                    detail::run_fluctuation(std_panel, engine_cfg, nullptr).max_abs_h;
            }
        } catch (...) {
            failure = std::current_exception();
        }
    };

    if (n_threads == 1) {
        worker(0, reps);
    } else {
        const int chunk = (reps + n_threads - 1) / n_threads;
        for (int i = 0; i < n_threads; ++i) {
            const int first = i * chunk;
            const int last = std::min(reps, first + chunk);
            if (first >= last) break;
            pool.emplace_back(worker, first, last);
        }
        for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return stats;
}

}  // namespace

ReturnPanel sample_panel(const AlternativeSpec& spec, int T, std::uint64_t seed) {
    validate(spec);
    check_samplable(spec);
    if (T < 20) {
        throw Error(ErrorKind::domain, "sample length must be at least 20, got " +
                                           std::to_string(T));
    }
    ReturnPanel panel;
    panel.names = {"x", "y"};
    panel.observations = Matrix(T, 2);
    Xoshiro256pp rng(stream_seed(seed, kPhaseSample, 0));
    sample_into(spec, T, rng, panel.observations);
    return panel;
}

PowerResult size_adjusted_power(const AlternativeSpec& spec, int T, double alpha,
                                int n_null, int n_alt, std::uint64_t seed,
                                const PowerConfig& config) {
    validate(spec);
    check_samplable(spec);
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::domain, "alpha must lie in (0, 1)");
    }
    if (n_null < 500 || n_alt < 500) {
        throw Error(ErrorKind::config, "need at least 500 replications per phase");
    }
    if (T < 20) {
        throw Error(ErrorKind::domain, "sample length must be at least 20");
    }

    // Both phases run the identical statistic; only the regime differs.
    TrajectoryConfig engine_cfg;
    engine_cfg.t_min = config.t_min;
    engine_cfg.basis = PrefixBasis::second_moment;
    engine_cfg.path = EigenPath::auto_path;
    engine_cfg.selector = SelectorRule::auto_rule;

    const AlternativeSpec null_spec{{{1.0, spec.segments.front().rho}}};
    std::vector<double> null_stats =
        phase_statistics(null_spec, T, seed, kPhaseNull, n_null, engine_cfg, config.threads);
    const double critical = empirical_quantile(null_stats, 1.0 - alpha);

    const std::vector<double> alt_stats =
        phase_statistics(spec, T, seed, kPhaseAlt, n_alt, engine_cfg, config.threads);
    long exceed = 0;
    for (double s : alt_stats) {
        if (s > critical) ++exceed;
    }

    PowerResult result;
    result.frequency = static_cast<double>(exceed) / n_alt;
    result.mc_stderr = std::sqrt(result.frequency * (1.0 - result.frequency) / n_alt);
    result.critical = critical;
    result.T = T;
    result.alpha = alpha;
    result.n_null = n_null;
    result.n_alt = n_alt;
    result.seed = seed;
    return result;
}

AnalyticLaw analytic_single_change(long t1, long t2, double rho1, double rho2) {
    if (t1 < 1 || t2 < 1) {
        throw Error(ErrorKind::domain, "segment lengths must be at least 1");
    }
    if (!(std::abs(rho1) <= 1.0 && std::abs(rho2) <= 1.0)) {
        throw Error(ErrorKind::domain, "correlations must lie in [-1, 1]");
    }
    const double factor = std::sqrt(static_cast<double>(t1)) * static_cast<double>(t2) /
                          static_cast<double>(t1 + t2);
    const double v1 = (1.0 + rho1) * (1.0 + rho1) / (0.5 * static_cast<double>(t1));
    const double v2 = (1.0 + rho2) * (1.0 + rho2) / (0.5 * static_cast<double>(t2));
    return AnalyticLaw{factor * (rho1 - rho2), factor * std::sqrt(v1 + v2)};
}

AnalyticLaw analytic_double_change(long t1, long t2, long t3, double rho1, double rho2,
                                   double rho3, DoubleChangeMode mode) {
    if (t1 < 1 || t2 < 1 || t3 < 0) {
        throw Error(ErrorKind::domain,
                    "segment lengths must satisfy t1, t2 >= 1 and t3 >= 0");
    }
    for (double r : {rho1, rho2, rho3}) {
        if (!(std::abs(r) <= 1.0)) {
            throw Error(ErrorKind::domain, "correlations must lie in [-1, 1]");
        }
    }
    const double total = static_cast<double>(t1 + t2 + t3);
    const double scale = std::sqrt(static_cast<double>(t1)) / total;
    const double mean = scale * (static_cast<double>(t2) * (rho1 - rho2) +
                                 static_cast<double>(t3) * (rho1 - rho3));

    const double s1 = 2.0 * (1.0 + rho1) * (1.0 + rho1);
    const double s2 = 2.0 * (1.0 + rho2) * (1.0 + rho2);
    const double s3 = 2.0 * (1.0 + rho3) * (1.0 + rho3);
    const double d1 = static_cast<double>(t1);
    const double d2 = static_cast<double>(t2);
    const double d3 = static_cast<double>(t3);

    double variance;
    if (mode == DoubleChangeMode::exact_variance) {
        // Shared segment-1 term collected once: h is a linear combination
        // (t2+t3) d1 - t2 d2 - t3 d3 of independent segment eigenvalues.
        variance = (d1 / (total * total)) *
                   ((d2 + d3) * (d2 + d3) * s1 / d1 + d2 * s2 + d3 * s3);
    } else {
        // The displayed form: two normal terms summed as if independent.
        // Written so empty third segments (t3 = 0) stay finite.
        variance = (d1 / (total * total)) *
                   ((d2 * d2 * (s1 / d1 + s2 / d2)) + (d3 * d3 * s1 / d1 + d3 * s3));
    }
    return AnalyticLaw{mean, std::sqrt(variance)};
}

std::string power_csv_header() {
    return "T,alternative,alpha,n_null,n_alt,frequency,mc_stderr,seed\n";
}

std::string power_csv_row(const PowerResult& result, const std::string& alternative) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%d,%s,%.6g,%d,%d,%.6g,%.6g,%llu\n", result.T,
                  alternative.c_str(), result.alpha, result.n_null, result.n_alt,
                  result.frequency, result.mc_stderr,
                  static_cast<unsigned long long>(result.seed));
    return buf;
}

}  // namespace corrbreak
