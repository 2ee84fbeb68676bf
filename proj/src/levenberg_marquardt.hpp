#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "dense.hpp"

namespace episeir {

struct ModelEval {
    std::vector<double> residual;
    DenseMatrix jacobian; // residual.size() x parameter count
};

using ResidualModel = std::function<ModelEval(const std::vector<double>&)>;

// Smallest shift making JtJ + lambda1 I strictly diagonally dominant (hence
// SPD for symmetric JtJ), plus a trace-scaled epsilon.
double choose_lambda1(const DenseMatrix& jtj);

struct LmOptions {
    int max_iterations = 50;          // accepted iterations
    double residual_tolerance = 1e-10; // stop when ||F||_2 drops below
    std::optional<double> lambda1_override;
    int halvings_before_reset = 8;
};

struct LmTraceEntry {
    std::vector<double> params;
    double residual_norm = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool accepted = false;
};

struct LmResult {
    std::vector<double> params;
    double residual_norm = 0.0;
    std::vector<LmTraceEntry> trace;
    bool converged = false;
    bool stagnated = false;
    int accepted_iterations = 0;
};

// Damped Gauss-Newton iteration: solve (JtJ + lambda1 I) dp = -Jt F, scale the
// step by lambda2, halve lambda2 on non-decreasing residuals and retry from
// the same iterate, reset lambda2 to 1 after an accepted step or after
// `halvings_before_reset` consecutive rejections (a second fruitless reset
// terminates with the stagnation flag). Steps are shortened further until all
// parameters stay strictly positive. Accepted residuals decrease strictly.
LmResult levenberg_marquardt(const ResidualModel& model, std::vector<double> initial,
                             const LmOptions& options = {});

} // namespace episeir
