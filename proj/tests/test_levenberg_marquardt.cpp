#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "levenberg_marquardt.hpp"

using namespace episeir;

namespace {

// Linear least-squares surrogate F(p) = A p - b.
ResidualModel linear_model(const DenseMatrix& a, const std::vector<double>& b) {
    return [a, b](const std::vector<double>& p) {
        ModelEval eval;
        eval.residual = matvec(a, p);
        for (size_t k = 0; k < b.size(); ++k) eval.residual[k] -= b[k];
        eval.jacobian = a;
        return eval;
    };
}

} // namespace

TEST_CASE("diagonal dominance shift") {
    DenseMatrix diag(4, 4);
    for (int i = 0; i < 4; ++i) diag(i, i) = i + 1.0;
    const double eps = 1e-12 * 10.0; // trace = 10
    CHECK(choose_lambda1(diag) == doctest::Approx(eps).epsilon(1e-6));

    DenseMatrix tight(2, 2);
    tight(0, 0) = 1.0;
    tight(0, 1) = 2.0;
    tight(1, 0) = 2.0;
    tight(1, 1) = 1.0;
    CHECK(choose_lambda1(tight) == doctest::Approx(1.0).epsilon(1e-9));

    // the shifted matrix really is strictly diagonally dominant
    const double shift = choose_lambda1(tight);
    CHECK(tight(0, 0) + shift > std::abs(tight(0, 1)));
}

TEST_CASE("one gauss-newton step solves a linear residual") {
    DenseMatrix a(1, 1);
    a(0, 0) = 1.0;
    const LmResult result = levenberg_marquardt(linear_model(a, {2.0}), {5.0});
    CHECK(result.converged);
    CHECK(result.accepted_iterations == 1);
    // the dominance epsilon (1e-12 * trace) keeps the step off exact by hairs
    CHECK(result.params[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("forced zero damping reproduces the exact least-squares minimizer") {
    // overdetermined 3x2 system with a known minimizer
    DenseMatrix a(3, 2);
    a(0, 0) = 1.0; a(0, 1) = 0.0;
    a(1, 0) = 0.0; a(1, 1) = 1.0;
    a(2, 0) = 1.0; a(2, 1) = 1.0;
    const std::vector<double> b = {1.0, 2.0, 2.5};
    // normal equations: [[2,1],[1,2]] p = (3.5, 4.5) -> p = (5/6, 11/6)
    LmOptions options;
    options.lambda1_override = 0.0;
    const LmResult result = levenberg_marquardt(linear_model(a, b), {4.0, 4.0}, options);
    CHECK(result.params[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-10));
    CHECK(result.params[1] == doctest::Approx(11.0 / 6.0).epsilon(1e-10));
}

TEST_CASE("huge damping turns the step into gradient descent") {
    DenseMatrix a(3, 2);
    a(0, 0) = 2.0; a(0, 1) = 0.3;
    a(1, 0) = 0.1; a(1, 1) = 1.4;
    a(2, 0) = 0.7; a(2, 1) = 0.9;
    const std::vector<double> b = {1.0, -1.0, 0.5};
    const std::vector<double> p0 = {1.0, 1.5};

    // direction of -J^T F at p0
    const ResidualModel model = linear_model(a, b);
    const ModelEval eval = model(p0);
    std::vector<double> gradient = matvec_transposed(eval.jacobian, eval.residual);
    for (double& g : gradient) g = -g;

    double trace = 0.0;
    const DenseMatrix jtj = normal_matrix(a);
    for (int i = 0; i < 2; ++i) trace += jtj(i, i);
    LmOptions options;
    options.lambda1_override = 1e8 * trace;
    options.max_iterations = 1;
    const LmResult result = levenberg_marquardt(model, p0, options);

    std::vector<double> step = {result.params[0] - p0[0], result.params[1] - p0[1]};
    const double cosine = (step[0] * gradient[0] + step[1] * gradient[1]) /
                          (norm2(step) * norm2(gradient));
    CHECK(cosine > 0.999);
}

TEST_CASE("iterates stay strictly positive") {
    // the unconstrained minimizer sits at p = -1
    DenseMatrix a(1, 1);
    a(0, 0) = 1.0;
    LmOptions options;
    options.max_iterations = 8;
    const LmResult result = levenberg_marquardt(linear_model(a, {-1.0}), {2.0}, options);
    for (const LmTraceEntry& entry : result.trace) CHECK(entry.params[0] > 0.0);
    CHECK(result.params[0] > 0.0);
    CHECK(result.params[0] < 0.05); // wedged against the constraint
}

TEST_CASE("accepted residuals decrease strictly on a nonlinear problem") {
    // two-parameter exponential fit with positive ground truth
    const std::vector<double> ts = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
    const std::vector<double> truth = {2.0, 0.7};
    auto model = [&](const std::vector<double>& p) {
        ModelEval eval;
        eval.residual.resize(ts.size());
        eval.jacobian = DenseMatrix(static_cast<int>(ts.size()), 2);
        for (size_t k = 0; k < ts.size(); ++k) {
            const double target = truth[0] * std::exp(-truth[1] * ts[k]);
            const double value = p[0] * std::exp(-p[1] * ts[k]);
            eval.residual[k] = value - target;
            eval.jacobian(static_cast<int>(k), 0) = std::exp(-p[1] * ts[k]);
            eval.jacobian(static_cast<int>(k), 1) = -ts[k] * value;
        }
        return eval;
    };
    LmOptions options;
    options.max_iterations = 40;
    options.residual_tolerance = 1e-12;
    const LmResult result = levenberg_marquardt(model, {0.5, 2.5}, options);
    CHECK(result.converged);
    CHECK(result.params[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(result.params[1] == doctest::Approx(0.7).epsilon(1e-6));

    double previous = std::numeric_limits<double>::infinity();
    for (const LmTraceEntry& entry : result.trace) {
        if (!entry.accepted) continue;
        CHECK(entry.residual_norm < previous);
        previous = entry.residual_norm;
    }

    // every solved system passed the dominance construction: recheck the trace
    for (const LmTraceEntry& entry : result.trace) CHECK(entry.lambda1 >= 0.0);
}

TEST_CASE("a flat residual stagnates instead of looping forever") {
    auto model = [](const std::vector<double>& p) {
        ModelEval eval;
        eval.residual = {1.0, 1.0};
        eval.jacobian = DenseMatrix(2, 1);
        eval.jacobian(0, 0) = 1.0;
        eval.jacobian(1, 0) = 0.5;
        (void)p;
        return eval;
    };
    LmOptions options;
    options.max_iterations = 50;
    const LmResult result = levenberg_marquardt(model, {1.0}, options);
    CHECK(result.stagnated);
    CHECK(result.accepted_iterations == 0);
}

TEST_CASE("non-finite residuals are treated as rejections") {
    // the model blows up for p > 3; the damping must back off into the
    // finite region and still make progress
    auto model = [](const std::vector<double>& p) {
        ModelEval eval;
        eval.jacobian = DenseMatrix(1, 1);
        if (p[0] > 3.0) {
            eval.residual = {std::numeric_limits<double>::quiet_NaN()};
            eval.jacobian(0, 0) = 1.0;
            return eval;
        }
        // minimum at p = 2.5 with a gradient pushing far past the pole
        eval.residual = {10.0 * (p[0] - 2.5)};
        eval.jacobian(0, 0) = 1.0; // deliberately understated slope -> overshoot
        return eval;
    };
    LmOptions options;
    options.max_iterations = 30;
    options.residual_tolerance = 1e-6;
    const LmResult result = levenberg_marquardt(model, {0.4}, options);
    CHECK(result.params[0] == doctest::Approx(2.5).epsilon(1e-4));
}

TEST_CASE("initial parameters must be strictly positive") {
    DenseMatrix a(1, 1);
    a(0, 0) = 1.0;
    CHECK_THROWS_AS(levenberg_marquardt(linear_model(a, {1.0}), {0.0}), InvalidArgument);
    CHECK_THROWS_AS(levenberg_marquardt(linear_model(a, {1.0}), {-1.0}), InvalidArgument);
}
