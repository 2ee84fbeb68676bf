#pragma once
#include <span>
#include <vector>

namespace episeir {

// Square sparse matrix in compressed-row storage. Built from triplets;
// duplicate entries are summed and exact zeros dropped.
class SparseMatrix {
public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SparseMatrix() = default;
    static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);

    int size() const { return n_; }
    std::size_t nonzero_count() const { return values_.size(); }

    // y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    void add_to_diagonal(int i, double value);
    double diagonal(int i) const;

    // alpha*A + beta*B with a merged sparsity pattern.
    static SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta);

    bool is_symmetric(double tol) const;
    double entry(int i, int j) const; // 0 when not stored

    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& column_indices() const { return columns_; }
    const std::vector<double>& values() const { return values_; }

private:
    int n_ = 0;
    std::vector<int> row_offsets_;
    std::vector<int> columns_;
    std::vector<double> values_;
};

struct CgOptions {
    double relative_tolerance = 1e-10;
    int max_iterations = 0; // 0 -> 10 * dimension
};

// Jacobi-preconditioned conjugate gradients for SPD systems; the residual
// target is relative to ||rhs||. An initial guess may be supplied (time
// steppers pass the explicit predictor). Throws SolverError (with the
// achieved residual) when the iteration cap is hit.
std::vector<double> solve_cg(const SparseMatrix& a, std::span<const double> rhs,
                             const CgOptions& options = {},
                             std::span<const double> initial_guess = {});

} // namespace episeir
