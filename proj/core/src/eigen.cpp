#include "corrbreak/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corrbreak/error.hpp"

namespace corrbreak {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Clamp window for the acos argument: rounding may push |R/sqrt(-Q^3)|
// past 1 by a few ulp; anything beyond this is treated as invalid input.
constexpr double kAcosSlack = 1e-12;

void sort_descending(std::vector<double>& v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
}

}  // namespace

EigenSpectrum eig2(double rho) {
    if (!(std::abs(rho) <= 1.0)) {
        throw Error(ErrorKind::domain,
                    "correlation must lie in [-1, 1], got " + std::to_string(rho));
    }
    EigenSpectrum s;
    s.values = {1.0 + std::abs(rho), 1.0 - std::abs(rho)};
    s.selector_index = 0;
    return s;
}

CubicIntermediates cubic_intermediates(double rho12, double rho13, double rho23) {
    CubicIntermediates c{};
    c.p_coef = -(rho12 * rho12 + rho13 * rho13 + rho23 * rho23);
    c.q_coef = -2.0 * rho12 * rho13 * rho23;
    c.Q = c.p_coef / 3.0;
    c.R = c.q_coef / 2.0;
    c.D = c.Q * c.Q * c.Q + c.R * c.R;
    if (c.Q < 0.0) {
        double arg = c.R / std::sqrt(-c.Q * c.Q * c.Q);
        arg = std::clamp(arg, -1.0, 1.0);
        c.theta = std::acos(arg);
    } else {
        c.theta = 0.0;  // Q = 0: all correlations zero, roots degenerate
    }
    return c;
}

EigenSpectrum eig3(double rho12, double rho13, double rho23) {
    for (double r : {rho12, rho13, rho23}) {
        if (!(std::abs(r) <= 1.0)) {
            throw Error(ErrorKind::domain,
                        "correlation must lie in [-1, 1], got " + std::to_string(r));
        }
    }

    const CubicIntermediates c = cubic_intermediates(rho12, rho13, rho23);
    // Admissibility: D <= 0 for real roots, det >= 0 for positive
    // semidefiniteness (with trace 3 and nonnegative second invariant, a
    // nonnegative determinant is equivalent to all eigenvalues >= 0).
    const double det = 1.0 + c.p_coef - c.q_coef;
    if (c.D > kPsdTol || det < -kPsdTol) {
        throw Error(ErrorKind::validation,
                    "correlations (" + std::to_string(rho12) + ", " + std::to_string(rho13) +
                        ", " + std::to_string(rho23) +
                        ") do not form a positive semidefinite matrix");
    }

    EigenSpectrum s;
    s.selector_index = 2;  // the test tracks the smallest root for p = 3
    if (c.Q == 0.0) {
        // Identity matrix; theta is 0/0 and the roots collapse to 1.
        s.values = {1.0, 1.0, 1.0};
        return s;
    }

    const double arg = c.R / std::sqrt(-c.Q * c.Q * c.Q);
    if (std::abs(arg) > 1.0 + kAcosSlack) {
        throw Error(ErrorKind::numeric, "cubic root argument " + std::to_string(arg) +
                                            " lies outside [-1, 1] beyond rounding slack");
    }
    const double two_sqrt = 2.0 * std::sqrt(-c.Q);
    s.values.resize(3);
    for (int k = 0; k < 3; ++k) {
        const double root = two_sqrt * std::cos((c.theta + 2.0 * kPi * k) / 3.0);
        s.values[static_cast<std::size_t>(k)] = 1.0 - root;
    }
    sort_descending(s.values);
    return s;
}

namespace {

// Cyclic Jacobi on a working copy; optionally accumulates rotations.
// Convergence: off-diagonal Frobenius norm < 1e-12 * p within 50 sweeps.
void jacobi(Matrix a, Matrix* vectors, std::vector<double>& values) {
    const int n = a.rows();
    if (vectors) *vectors = Matrix::identity(n);

    const double tol = 1e-12 * n;
    const int max_sweeps = 50;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() >= tol) {
        if (++sweep > max_sweeps) {
            throw Error(ErrorKind::numeric,
                        "Jacobi eigensolver did not converge within " +
                            std::to_string(max_sweeps) + " sweeps");
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cos = 1.0 / std::sqrt(1.0 + t * t);
                const double sin = t * cos;

                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = cos * akp - sin * akq;
                    a(k, q) = sin * akp + cos * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = cos * apk - sin * aqk;
                    a(q, k) = sin * apk + cos * aqk;
                }
                if (vectors) {
                    for (int k = 0; k < n; ++k) {
                        const double vkp = (*vectors)(k, p);
                        const double vkq = (*vectors)(k, q);
                        (*vectors)(k, p) = cos * vkp - sin * vkq;
                        (*vectors)(k, q) = sin * vkp + cos * vkq;
                    }
                }
            }
        }
    }

    values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
}

void check_square_symmetric(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorKind::domain, "matrix must be square and non-empty");
    }
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-10) {
                throw Error(ErrorKind::domain,
                            "matrix is not symmetric at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
            }
}

}  // namespace

EigenSpectrum eig_sym(const Matrix& m) {
    check_square_symmetric(m);
    EigenSpectrum s;
    jacobi(m, nullptr, s.values);
    sort_descending(s.values);
    s.selector_index = 0;
    return s;
}

EigenDecomposition eig_sym_vectors(const Matrix& m) {
    check_square_symmetric(m);
    EigenDecomposition d;
    Matrix vectors;
    jacobi(m, &vectors, d.values);

    const int n = m.rows();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return d.values[static_cast<std::size_t>(a)] > d.values[static_cast<std::size_t>(b)];
    });

    std::vector<double> sorted(static_cast<std::size_t>(n));
    d.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        sorted[static_cast<std::size_t>(j)] = d.values[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        for (int i = 0; i < n; ++i)
            d.vectors(i, j) = vectors(i, order[static_cast<std::size_t>(j)]);
    }
    d.values = std::move(sorted);
    return d;
}

}  // namespace corrbreak
