#include "levenberg_marquardt.hpp"

#include <cmath>

#include "errors.hpp"

namespace episeir {

double choose_lambda1(const DenseMatrix& jtj) {
    if (jtj.rows() != jtj.cols()) throw InvalidArgument("choose_lambda1 expects a square matrix");
    double worst_deficit = 0.0;
    double trace = 0.0;
    for (int i = 0; i < jtj.rows(); ++i) {
        trace += jtj(i, i);
        double off = 0.0;
        for (int j = 0; j < jtj.cols(); ++j)
            if (j != i) off += std::abs(jtj(i, j));
        worst_deficit = std::max(worst_deficit, off - jtj(i, i));
    }
    return std::max(0.0, worst_deficit) + 1e-12 * trace;
}

LmResult levenberg_marquardt(const ResidualModel& model, std::vector<double> initial,
                             const LmOptions& options) {
    const int np = static_cast<int>(initial.size());
    if (np == 0) throw InvalidArgument("no parameters to fit");
    for (double p : initial)
        if (!(p > 0.0)) throw InvalidArgument("initial parameters must be strictly positive");

    LmResult result;
    std::vector<double> p = std::move(initial);
    ModelEval eval = model(p);
    double res_norm = norm2(eval.residual);
    result.trace.push_back({p, res_norm, 0.0, 1.0, true});

    double lambda2 = 1.0;
    int consecutive_halvings = 0;
    bool reset_without_progress = false;

    while (result.accepted_iterations < options.max_iterations &&
           res_norm > options.residual_tolerance && !result.stagnated) {
        const int nr = static_cast<int>(eval.residual.size());
        if (eval.jacobian.rows() != nr || eval.jacobian.cols() != np)
            throw InvalidArgument("model Jacobian has inconsistent shape");

        DenseMatrix jtj = normal_matrix(eval.jacobian);
        const double lambda1 =
            options.lambda1_override ? *options.lambda1_override : choose_lambda1(jtj);
        for (int i = 0; i < np; ++i) jtj(i, i) += lambda1;
        std::vector<double> g = matvec_transposed(eval.jacobian, eval.residual);
        for (double& v : g) v = -v;
        const std::vector<double> dp = solve_cholesky(jtj, g);

        bool accepted = false;
        while (!accepted && !result.stagnated) {
            // Shorten the step until the trial point is strictly positive.
            double lambda2_positive = lambda2;
            auto trial_point = [&]() {
                std::vector<double> trial(p);
                for (int i = 0; i < np; ++i) trial[i] += lambda2_positive * dp[i];
                return trial;
            };
            std::vector<double> trial = trial_point();
            for (int guard = 0; guard < 600; ++guard) {
                bool positive = true;
                for (double v : trial)
                    if (!(v > 0.0)) positive = false;
                if (positive) break;
                lambda2_positive *= 0.5;
                trial = trial_point();
            }

            ModelEval trial_eval = model(trial);
            double trial_norm = norm2(trial_eval.residual);
            if (!std::isfinite(trial_norm)) trial_norm = std::numeric_limits<double>::infinity();

            if (trial_norm < res_norm) {
                p = std::move(trial);
                eval = std::move(trial_eval);
                res_norm = trial_norm;
                lambda2 = 1.0;
                consecutive_halvings = 0;
                reset_without_progress = false;
                ++result.accepted_iterations;
                result.trace.push_back({p, res_norm, lambda1, lambda2_positive, true});
                accepted = true;
            } else {
                result.trace.push_back({trial, trial_norm, lambda1, lambda2_positive, false});
                lambda2 = 0.5 * lambda2_positive;
                if (++consecutive_halvings >= options.halvings_before_reset) {
                    if (reset_without_progress) {
                        result.stagnated = true;
                    } else {
                        lambda2 = 1.0;
                        consecutive_halvings = 0;
                        reset_without_progress = true;
                    }
                }
            }
        }
    }

    result.params = p;
    result.residual_norm = res_norm;
    result.converged = res_norm <= options.residual_tolerance;
    return result;
}

} // namespace episeir
