#pragma once

#include <vector>

#include "corrbreak/matrix.hpp"

namespace corrbreak {

// Eigenvalues of a symmetric matrix, sorted descending. `selector_index`
// marks the eigenvalue the fluctuation test tracks (0 = largest,
// p-1 = smallest).
struct EigenSpectrum {
    std::vector<double> values;
    int selector_index = 0;

    double selected() const { return values[static_cast<std::size_t>(selector_index)]; }
    int size() const { return static_cast<int>(values.size()); }
};

// Intermediates of the depressed-cubic characteristic equation of a 3x3
// correlation matrix:
//   lam*^3 + p_coef * lam* = q_coef,   lam* = 1 - lam,
//   Q = p_coef/3, R = q_coef/2, D = Q^3 + R^2, theta = acos(R / sqrt(-Q^3)).
// For an admissible correlation matrix D <= 0, giving three real roots.
struct CubicIntermediates {
    double p_coef;
    double q_coef;
    double Q;
    double R;
    double D;
    double theta;  // radians; 0 in the degenerate Q = 0 branch
};

// Admissibility tolerance on the determinant and the cubic discriminant of
// a 3x3 correlation matrix. Single documented constant.
inline constexpr double kPsdTol = 1e-10;

// Closed form for p = 2: eigenvalues (1+rho, 1-rho), sorted descending.
EigenSpectrum eig2(double rho);

CubicIntermediates cubic_intermediates(double rho12, double rho13, double rho23);

// Closed form for p = 3 via the trigonometric roots of the characteristic
// cubic. The matrix is [[1, rho12, rho13], [rho12, 1, rho23],
// [rho13, rho23, 1]]; it must be positive semidefinite within kPsdTol.
// selector_index defaults to the smallest root.
EigenSpectrum eig3(double rho12, double rho13, double rho23);

// General symmetric solver: cyclic Jacobi rotations, iterated until the
// off-diagonal Frobenius norm drops below 1e-12 * p, capped at 50 sweeps.
// Input must be symmetric within 1e-10.
EigenSpectrum eig_sym(const Matrix& m);

// Jacobi with accumulated rotations; vectors are returned as columns in
// the same (descending) order as the values.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;  // p x p, column j pairs with values[j]
};
EigenDecomposition eig_sym_vectors(const Matrix& m);

}  // namespace corrbreak
