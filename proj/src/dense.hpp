#pragma once
#include <span>
#include <vector>

namespace episeir {

// Small row-major dense matrix for the calibration-side linear algebra
// (normal equations, weight systems); never large.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
std::vector<double> matvec_transposed(const DenseMatrix& a, std::span<const double> y);

// AtA (cols x cols).
DenseMatrix normal_matrix(const DenseMatrix& a);

// Square solve by LU with partial pivoting; throws on singular matrices.
std::vector<double> solve_lu(DenseMatrix a, std::vector<double> b);

// SPD solve by Cholesky; throws when the factorization breaks down.
std::vector<double> solve_cholesky(DenseMatrix a, std::vector<double> b);

// min ||A x - b||_2 via normal equations (well suited to the small,
// well-conditioned systems used here).
std::vector<double> solve_least_squares(const DenseMatrix& a, std::span<const double> b);

double norm2(std::span<const double> v);

} // namespace episeir
