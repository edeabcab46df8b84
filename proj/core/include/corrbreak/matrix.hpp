#pragma once

#include <cstddef>
#include <vector>

namespace corrbreak {

// Minimal dense row-major matrix. The library only ever handles small
// matrices (T x p panels with p up to a few dozen), so this stays simple:
// value semantics, no expression templates, bounds unchecked in release.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const double* row_ptr(int i) const {
        return data_.data() + static_cast<std::size_t>(i) * cols_;
    }

    double trace() const {
        double s = 0.0;
        const int n = rows_ < cols_ ? rows_ : cols_;
        for (int i = 0; i < n; ++i) s += (*this)(i, i);
        return s;
    }

    const std::vector<double>& data() const { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace corrbreak
