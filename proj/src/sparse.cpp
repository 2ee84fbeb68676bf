#include "sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace episeir {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets)
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw InvalidArgument("sparse triplet index out of range");

    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.n_ = n;
    m.row_offsets_.assign(n + 1, 0);
    std::size_t i = 0;
    while (i < triplets.size()) {
        const int row = triplets[i].row;
        const int col = triplets[i].col;
        double sum = 0.0;
        while (i < triplets.size() && triplets[i].row == row && triplets[i].col == col)
            sum += triplets[i++].value;
        if (sum != 0.0) {
            m.columns_.push_back(col);
            m.values_.push_back(sum);
            ++m.row_offsets_[row + 1];
        }
    }
    for (int r = 0; r < n; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
    return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < n_; ++r) {
        double sum = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            sum += values_[k] * x[columns_[k]];
        y[r] = sum;
    }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

void SparseMatrix::add_to_diagonal(int i, double value) {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        if (columns_[k] == i) {
            values_[k] += value;
            return;
        }
    }
    throw InvalidArgument("matrix has no stored diagonal at row " + std::to_string(i));
}

double SparseMatrix::diagonal(int i) const { return entry(i, i); }

double SparseMatrix::entry(int i, int j) const {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
        if (columns_[k] == j) return values_[k];
    return 0.0;
}

SparseMatrix SparseMatrix::add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta) {
    if (a.n_ != b.n_) throw InvalidArgument("matrix size mismatch in add");
    std::vector<Triplet> triplets;
    triplets.reserve(a.values_.size() + b.values_.size());
    for (int r = 0; r < a.n_; ++r)
        for (int k = a.row_offsets_[r]; k < a.row_offsets_[r + 1]; ++k)
            triplets.push_back({r, a.columns_[k], alpha * a.values_[k]});
    for (int r = 0; r < b.n_; ++r)
        for (int k = b.row_offsets_[r]; k < b.row_offsets_[r + 1]; ++k)
            triplets.push_back({r, b.columns_[k], beta * b.values_[k]});
    return from_triplets(a.n_, std::move(triplets));
}

bool SparseMatrix::is_symmetric(double tol) const {
    for (int r = 0; r < n_; ++r)
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            if (std::abs(values_[k] - entry(columns_[k], r)) > tol) return false;
    return true;
}

std::vector<double> solve_cg(const SparseMatrix& a, std::span<const double> rhs,
                             const CgOptions& options, std::span<const double> initial_guess) {
    const int n = a.size();
    if (static_cast<int>(rhs.size()) != n) throw InvalidArgument("rhs size mismatch in solve_cg");
    if (!initial_guess.empty() && static_cast<int>(initial_guess.size()) != n)
        throw InvalidArgument("initial guess size mismatch in solve_cg");

    double rhs_norm = 0.0;
    for (double v : rhs) rhs_norm += v * v;
    rhs_norm = std::sqrt(rhs_norm);

    std::vector<double> x(n, 0.0);
    if (!initial_guess.empty()) x.assign(initial_guess.begin(), initial_guess.end());
    if (rhs_norm == 0.0 && initial_guess.empty()) return x;

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = a.diagonal(i);
        if (!(d > 0.0)) throw SolverError("matrix is not positive definite (nonpositive diagonal)", 0.0);
        inv_diag[i] = 1.0 / d;
    }

    std::vector<double> r(n), z(n), p(n), ap(n);
    a.multiply(x, r);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    double res_norm = 0.0;
    for (double v : r) res_norm += v * v;
    res_norm = std::sqrt(res_norm);

    const int max_iter = options.max_iterations > 0 ? options.max_iterations : 10 * n;
    const double target = options.relative_tolerance * rhs_norm;

    for (int it = 0; it < max_iter; ++it) {
        if (res_norm <= target) return x;
        a.multiply(p, ap);
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0)) throw SolverError("matrix is not positive definite (curvature <= 0)", res_norm);
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr = 0.0;
        for (int i = 0; i < n; ++i) rr += r[i] * r[i];
        res_norm = std::sqrt(rr);
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (res_norm <= target) return x;
    throw SolverError("conjugate gradients hit the iteration cap, residual " + std::to_string(res_norm) +
                          " of target " + std::to_string(target),
                      res_norm);
}

} // namespace episeir
