// Independent reference implementations used only by tests. These stay
// deliberately naive (dense factorizations, explicit enumerations, scalar
// recurrences) so they cannot share a failure mode with the library code
// they check.
#pragma once
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "seir.hpp"

namespace oracle {

// Dense Cholesky solve of an SPD system given as a full matrix.
inline std::vector<double> dense_cholesky_solve(std::vector<std::vector<double>> a,
                                                std::vector<double> b) {
    const size_t n = a.size();
    for (size_t j = 0; j < n; ++j) {
        double d = a[j][j];
        for (size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
        if (!(d > 0.0)) throw std::runtime_error("oracle: matrix not SPD");
        a[j][j] = std::sqrt(d);
        for (size_t i = j + 1; i < n; ++i) {
            double s = a[i][j];
            for (size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            a[i][j] = s / a[j][j];
        }
    }
    for (size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
        b[i] = s / a[i][i];
    }
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= a[k][i] * b[k];
        b[i] = s / a[i][i];
    }
    return b;
}

// Forward-Euler step of the well-mixed SEIR recurrence at one point.
struct ScalarSeir {
    double s, e, i, r;
};

inline ScalarSeir scalar_seir_euler_step(const ScalarSeir& y, double n,
                                         const episeir::EpidemicParams& p, double dt) {
    double factor = 1.0;
    if (p.allee_a > 0.0) factor = 1.0 - p.allee_a / (n + p.allee_n0);
    const double infection = factor * y.s * (p.beta_e * y.e + p.beta_i * y.i);
    ScalarSeir out;
    out.s = y.s + dt * (-infection);
    out.e = y.e + dt * (infection - p.sigma * y.e - p.phi_e * y.e);
    out.i = y.i + dt * (p.sigma * y.e - p.phi_i * y.i);
    out.r = y.r + dt * (p.phi_i * y.i + p.phi_e * y.e);
    return out;
}

// Exhaustive active-set search for min ||A w - b||, w >= 0 with small n:
// tries every support set and keeps the feasible minimizer.
inline std::vector<double> nnls_by_enumeration(const std::vector<std::vector<double>>& a,
                                               const std::vector<double>& b) {
    const size_t rows = a.size();
    const size_t cols = a[0].size();
    std::vector<double> best(cols, 0.0);
    double best_res = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << cols); ++mask) {
        std::vector<size_t> support;
        for (size_t j = 0; j < cols; ++j)
            if (mask & (1u << j)) support.push_back(j);
        std::vector<double> w(cols, 0.0);
        if (!support.empty()) {
            // normal equations on the support columns
            const size_t m = support.size();
            std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
            std::vector<double> atb(m, 0.0);
            for (size_t p = 0; p < m; ++p) {
                for (size_t q = 0; q < m; ++q)
                    for (size_t i = 0; i < rows; ++i) ata[p][q] += a[i][support[p]] * a[i][support[q]];
                for (size_t i = 0; i < rows; ++i) atb[p] += a[i][support[p]] * b[i];
            }
            std::vector<double> z;
            try {
                z = dense_cholesky_solve(ata, atb);
            } catch (const std::runtime_error&) {
                continue; // singular support
            }
            bool feasible = true;
            for (double v : z)
                if (v < 0.0) feasible = false;
            if (!feasible) continue;
            for (size_t p = 0; p < m; ++p) w[support[p]] = z[p];
        }
        double res = 0.0;
        for (size_t i = 0; i < rows; ++i) {
            double ri = b[i];
            for (size_t j = 0; j < cols; ++j) ri -= a[i][j] * w[j];
            res += ri * ri;
        }
        if (res < best_res - 1e-15) {
            best_res = res;
            best = w;
        }
    }
    return best;
}

// Deterministic xorshift generator so test data never depends on libstdc++
// distribution details.
struct Rng {
    unsigned long long state;
    explicit Rng(unsigned long long seed) : state(seed ? seed : 1) {}
    double uniform() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state % 1000000007ull) / 1000000007.0;
    }
};

} // namespace oracle
