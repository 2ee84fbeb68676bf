#include "dense.hpp"

#include <cmath>

#include "errors.hpp"

namespace episeir {

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
    if (static_cast<int>(x.size()) != a.cols()) throw InvalidArgument("matvec size mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

std::vector<double> matvec_transposed(const DenseMatrix& a, std::span<const double> y) {
    if (static_cast<int>(y.size()) != a.rows()) throw InvalidArgument("matvec size mismatch");
    std::vector<double> x(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) x[j] += a(i, j) * y[i];
    return x;
}

DenseMatrix normal_matrix(const DenseMatrix& a) {
    DenseMatrix n(a.cols(), a.cols());
    for (int j = 0; j < a.cols(); ++j)
        for (int k = j; k < a.cols(); ++k) {
            double sum = 0.0;
            for (int i = 0; i < a.rows(); ++i) sum += a(i, j) * a(i, k);
            n(j, k) = sum;
            n(k, j) = sum;
        }
    return n;
}

std::vector<double> solve_lu(DenseMatrix a, std::vector<double> b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n)
        throw InvalidArgument("solve_lu expects a square system");
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
        if (a(pivot, col) == 0.0) throw SolverError("singular matrix in solve_lu", 0.0);
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (int row = col + 1; row < n; ++row) {
            const double f = a(row, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(row, j) -= f * a(col, j);
            b[row] -= f * b[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double sum = b[row];
        for (int j = row + 1; j < n; ++j) sum -= a(row, j) * b[j];
        b[row] = sum / a(row, row);
    }
    return b;
}

std::vector<double> solve_cholesky(DenseMatrix a, std::vector<double> b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n)
        throw InvalidArgument("solve_cholesky expects a square system");
    // In-place lower factor.
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0)) throw SolverError("matrix is not positive definite in solve_cholesky", d);
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= a(i, k) * b[k];
        b[i] = s / a(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
        b[i] = s / a(i, i);
    }
    return b;
}

std::vector<double> solve_least_squares(const DenseMatrix& a, std::span<const double> b) {
    return solve_cholesky(normal_matrix(a), matvec_transposed(a, b));
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace episeir
