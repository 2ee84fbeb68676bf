#pragma once
#include <span>
#include <string>
#include <vector>

#include "dense.hpp"

namespace episeir {

struct NnlsResult {
    std::vector<double> weights;
    double residual_norm = 0.0;
};

// Lawson-Hanson active-set solve of min ||A w - b||_2 subject to w >= 0.
// Deterministic: ties in the gradient pick the lowest column index.
NnlsResult nnls(const DenseMatrix& a, std::span<const double> b);

struct FitWeightsResult {
    std::vector<double> weights;
    double residual_norm = 0.0;
    std::vector<std::string> warnings;
};

// Weight determination for basis-integral systems. With nonneg the problem
// is solved by nnls; otherwise a square system is solved exactly and a
// rectangular one in the least-squares sense. Columns that vanish on every
// subdomain get weight 0 and a warning.
FitWeightsResult fit_weights(const DenseMatrix& integrals, std::span<const double> targets,
                             bool nonneg);

} // namespace episeir
