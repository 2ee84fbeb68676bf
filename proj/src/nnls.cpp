#include "nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace episeir {

namespace {

std::vector<double> residual_vector(const DenseMatrix& a, std::span<const double> b,
                                    std::span<const double> w) {
    std::vector<double> r = matvec(a, w);
    for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

// Least-squares solve restricted to the passive columns; zeros elsewhere.
std::vector<double> passive_solution(const DenseMatrix& a, std::span<const double> b,
                                     const std::vector<int>& passive) {
    const int np = static_cast<int>(passive.size());
    DenseMatrix sub(a.rows(), np);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < np; ++j) sub(i, j) = a(i, passive[j]);
    const std::vector<double> z = solve_least_squares(sub, b);
    std::vector<double> full(a.cols(), 0.0);
    for (int j = 0; j < np; ++j) full[passive[j]] = z[j];
    return full;
}

} // namespace

NnlsResult nnls(const DenseMatrix& a, std::span<const double> b) {
    if (static_cast<int>(b.size()) != a.rows()) throw InvalidArgument("nnls size mismatch");
    const int n = a.cols();
    std::vector<double> w(n, 0.0);
    std::vector<char> in_passive(n, 0);
    std::vector<int> passive;

    const std::vector<double> atb = matvec_transposed(a, b);
    double scale = 0.0;
    for (double v : atb) scale = std::max(scale, std::abs(v));
    const double grad_tol = 1e-12 * std::max(scale, 1.0);

    const int max_outer = 3 * n + 10;
    for (int outer = 0; outer < max_outer; ++outer) {
        const std::vector<double> grad = matvec_transposed(a, residual_vector(a, b, w));
        int best = -1;
        double best_grad = grad_tol;
        for (int j = 0; j < n; ++j)
            if (!in_passive[j] && grad[j] > best_grad) {
                best_grad = grad[j];
                best = j;
            }
        if (best < 0) break; // KKT satisfied
        in_passive[best] = 1;
        passive.push_back(best);

        for (int inner = 0; inner < max_outer; ++inner) {
            std::vector<double> z;
            try {
                z = passive_solution(a, b, passive);
            } catch (const SolverError&) {
                // Rank-deficient passive set: drop the newest column again.
                in_passive[passive.back()] = 0;
                passive.pop_back();
                z = w;
                break;
            }
            bool feasible = true;
            for (int j : passive)
                if (z[j] <= 0.0) feasible = false;
            if (feasible) {
                w = z;
                break;
            }
            double alpha = std::numeric_limits<double>::infinity();
            for (int j : passive)
                if (z[j] <= 0.0) alpha = std::min(alpha, w[j] / (w[j] - z[j]));
            for (int j = 0; j < n; ++j) w[j] += alpha * (z[j] - w[j]);
            std::vector<int> kept;
            for (int j : passive) {
                if (w[j] <= 1e-14 * std::max(1.0, std::abs(z[j]))) {
                    w[j] = 0.0;
                    in_passive[j] = 0;
                } else {
                    kept.push_back(j);
                }
            }
            passive = std::move(kept);
            if (passive.empty()) break;
        }
    }

    NnlsResult result;
    result.weights = std::move(w);
    result.residual_norm = norm2(residual_vector(a, b, result.weights));
    return result;
}

FitWeightsResult fit_weights(const DenseMatrix& integrals, std::span<const double> targets,
                             bool nonneg) {
    if (static_cast<int>(targets.size()) != integrals.rows())
        throw InvalidArgument("fit_weights: target length does not match matrix rows");

    // A basis function invisible to every subdomain carries no information.
    std::vector<int> active_cols;
    FitWeightsResult result;
    for (int j = 0; j < integrals.cols(); ++j) {
        bool all_zero = true;
        for (int i = 0; i < integrals.rows(); ++i)
            if (integrals(i, j) != 0.0) all_zero = false;
        if (all_zero)
            result.warnings.push_back("basis function " + std::to_string(j) +
                                      " integrates to zero on every subdomain; weight pinned to 0");
        else
            active_cols.push_back(j);
    }

    DenseMatrix sub(integrals.rows(), static_cast<int>(active_cols.size()));
    for (int i = 0; i < integrals.rows(); ++i)
        for (size_t j = 0; j < active_cols.size(); ++j) sub(i, static_cast<int>(j)) = integrals(i, active_cols[j]);

    std::vector<double> reduced;
    if (nonneg) {
        NnlsResult nn = nnls(sub, targets);
        reduced = std::move(nn.weights);
        result.residual_norm = nn.residual_norm;
    } else if (sub.rows() == sub.cols()) {
        reduced = solve_lu(sub, std::vector<double>(targets.begin(), targets.end()));
        result.residual_norm = 0.0;
    } else {
        reduced = solve_least_squares(sub, targets);
        std::vector<double> r = matvec(sub, reduced);
        for (size_t i = 0; i < r.size(); ++i) r[i] = targets[i] - r[i];
        result.residual_norm = norm2(r);
    }

    result.weights.assign(integrals.cols(), 0.0);
    for (size_t j = 0; j < active_cols.size(); ++j) result.weights[active_cols[j]] = reduced[j];
    if (!nonneg) {
        std::vector<double> r = matvec(integrals, result.weights);
        for (size_t i = 0; i < r.size(); ++i) r[i] = targets[i] - r[i];
        result.residual_norm = norm2(r);
    }
    return result;
}

} // namespace episeir
