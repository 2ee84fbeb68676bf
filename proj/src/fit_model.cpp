#include "fit_model.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace episeir {

void FitProblem::validate() const {
    const int nk = targets.rows();
    const int nl = targets.cols();
    if (nk < 1 || nl < 1) throw InvalidArgument("fit problem has no targets");
    if (nk * nl < 4)
        throw InvalidArgument("fit problem is underdetermined: need at least 4 samples");
    if (static_cast<int>(sample_times.size()) != nk)
        throw InvalidArgument("sample time count does not match target rows");
    for (size_t k = 1; k < sample_times.size(); ++k)
        if (!(sample_times[k] > sample_times[k - 1]))
            throw InvalidArgument("sample times must be strictly increasing");
    if (static_cast<int>(vid.size()) != nl)
        throw InvalidArgument("vid flag count does not match subdomain count");
    for (int k = 0; k < nk; ++k)
        for (int l = 0; l < nl; ++l)
            if (targets(k, l) < 0.0) throw InvalidArgument("targets must be non-negative");
    for (double p : initial_params)
        if (!(p > 0.0)) throw InvalidArgument("initial parameters must be strictly positive");
}

namespace {

EpidemicParams with_fit_params(EpidemicParams base, const std::vector<double>& p) {
    base.sigma = p[0];
    base.phi_e = p[1];
    base.phi_i = p[2];
    base.beta_i = p[3];
    base.beta_e = p[3];
    return base;
}

} // namespace

ResidualModel make_pde_residual_model(PdeFitContext context, FitProblem problem) {
    problem.validate();
    if (!context.mesh) throw InvalidArgument("fit context has no mesh");
    if (context.mesh->label_count() != problem.targets.cols())
        throw InvalidArgument("target columns do not match mesh subdomains");

    return [context = std::move(context), problem = std::move(problem)](const std::vector<double>& p) {
        if (p.size() != 4) throw InvalidArgument("expected 4 fit parameters");
        const EpidemicParams params = with_fit_params(context.base, p);
        const ForwardSensitivityResult forward = run_with_sensitivities(
            *context.mesh, context.initial, params, problem.sample_times, context.dt);

        const int nk = problem.targets.rows();
        const int nl = problem.targets.cols();
        ModelEval eval;
        eval.residual.resize(static_cast<size_t>(nk) * nl);
        eval.jacobian = DenseMatrix(nk * nl, 4);
        for (int k = 0; k < nk; ++k) {
            for (int l = 0; l < nl; ++l) {
                const double w = problem.weight(l);
                const int row = k * nl + l;
                eval.residual[row] = w * (forward.values(k, l) - problem.targets(k, l));
                for (int m = 0; m < 4; ++m) eval.jacobian(row, m) = w * forward.jacobian(row, m);
            }
        }
        return eval;
    };
}

namespace {

// Hybrid observable at the sample times: per-subdomain infectious counts of
// the PDE region plus the averaged-region count as the last column.
std::vector<double> hybrid_observable(const HybridFitContext& ctx, const EpidemicParams& params,
                                      std::span<const double> sample_times) {
    RunOptions options;
    options.dt = ctx.dt;
    options.t_end = sample_times.back() - ctx.initial.time;
    options.record_every = 1;
    const ParamSchedule schedule({{0.0, params}});
    const Trajectory traj =
        run_hybrid(*ctx.pde_mesh, ctx.initial, ctx.ode, ctx.interface_edges, schedule, options,
                   ctx.options);

    const int nl = ctx.pde_mesh->label_count();
    std::vector<double> values;
    values.reserve(sample_times.size() * (nl + 1));
    for (double t : sample_times) {
        const long step = std::llround((t - ctx.initial.time) / ctx.dt);
        if (step < 1 || step >= static_cast<long>(traj.records.size()) ||
            std::abs(step * ctx.dt - (t - ctx.initial.time)) > 1e-9)
            throw InvalidArgument("sample times must be positive multiples of dt");
        const TrajectoryRecord& rec = traj.records[step];
        for (int l = 0; l < nl; ++l) values.push_back(rec.i[l]);
        values.push_back(rec.ode_i);
    }
    return values;
}

} // namespace

ResidualModel make_hybrid_residual_model(HybridFitContext context, FitProblem problem) {
    problem.validate();
    if (!context.pde_mesh) throw InvalidArgument("fit context has no mesh");
    if (context.pde_mesh->label_count() + 1 != problem.targets.cols())
        throw InvalidArgument("hybrid targets need one column per PDE subdomain plus the ODE region");

    return [context = std::move(context), problem = std::move(problem)](const std::vector<double>& p) {
        if (p.size() != 4) throw InvalidArgument("expected 4 fit parameters");
        const int nk = problem.targets.rows();
        const int nl = problem.targets.cols();

        auto weighted_misfit = [&](const std::vector<double>& values) {
            std::vector<double> out(values.size());
            for (int k = 0; k < nk; ++k)
                for (int l = 0; l < nl; ++l)
                    out[k * nl + l] =
                        problem.weight(l) * (values[k * nl + l] - problem.targets(k, l));
            return out;
        };

        ModelEval eval;
        eval.residual = weighted_misfit(
            hybrid_observable(context, with_fit_params(context.base, p), problem.sample_times));
        eval.jacobian = DenseMatrix(nk * nl, 4);
        for (int m = 0; m < 4; ++m) {
            const double delta = context.fd_relative_step * p[m];
            std::vector<double> plus(p), minus(p);
            plus[m] += delta;
            minus[m] = std::max(minus[m] - delta, 1e-300);
            const std::vector<double> f_plus = weighted_misfit(
                hybrid_observable(context, with_fit_params(context.base, plus), problem.sample_times));
            const std::vector<double> f_minus = weighted_misfit(
                hybrid_observable(context, with_fit_params(context.base, minus), problem.sample_times));
            const double span = plus[m] - minus[m];
            for (int row = 0; row < nk * nl; ++row)
                eval.jacobian(row, m) = (f_plus[row] - f_minus[row]) / span;
        }
        return eval;
    };
}

LmResult solve_fit_problem(const ResidualModel& model, const FitProblem& problem,
                           const LmOptions& extra) {
    problem.validate();
    LmOptions options = extra;
    options.max_iterations = problem.max_iterations;
    options.residual_tolerance = problem.residual_tolerance;
    return levenberg_marquardt(
        model, {problem.initial_params[0], problem.initial_params[1], problem.initial_params[2],
                problem.initial_params[3]},
        options);
}

std::vector<SegmentFit> fit_schedule_segments(const Mesh& mesh, SeirState state,
                                              const ParamSchedule& schedule, double t_end,
                                              std::span<const double> target_times,
                                              const DenseMatrix& target_values,
                                              const std::vector<bool>& vid, double dt,
                                              int max_iterations, double residual_tolerance) {
    if (static_cast<long>(target_times.size()) != target_values.rows())
        throw InvalidArgument("target time count does not match target rows");
    const int nl = mesh.label_count();
    if (target_values.cols() != nl)
        throw InvalidArgument("target columns do not match mesh subdomains");

    std::vector<SegmentFit> fits;
    const auto& entries = schedule.entries();
    for (size_t seg = 0; seg < entries.size(); ++seg) {
        const double start = entries[seg].start_day;
        const double end = seg + 1 < entries.size() ? entries[seg + 1].start_day : t_end;
        if (!(end > start)) continue;

        FitProblem problem;
        problem.vid = vid;
        problem.max_iterations = max_iterations;
        problem.residual_tolerance = residual_tolerance;
        const EpidemicParams& guess = entries[seg].params;
        problem.initial_params = {guess.sigma, guess.phi_e, guess.phi_i, guess.beta_i};

        std::vector<int> rows;
        for (size_t k = 0; k < target_times.size(); ++k)
            if (target_times[k] > start + 1e-9 && target_times[k] <= end + 1e-9)
                rows.push_back(static_cast<int>(k));
        if (static_cast<int>(rows.size()) * nl < 4)
            throw InvalidArgument("segment starting at day " + std::to_string(start) +
                                  " has too few target samples");
        problem.sample_times.resize(rows.size());
        problem.targets = DenseMatrix(static_cast<int>(rows.size()), nl);
        for (size_t k = 0; k < rows.size(); ++k) {
            problem.sample_times[k] = target_times[rows[k]];
            for (int l = 0; l < nl; ++l) problem.targets(static_cast<int>(k), l) = target_values(rows[k], l);
        }

        PdeFitContext context;
        context.mesh = &mesh;
        context.initial = state;
        context.initial.time = start;
        context.base = guess;
        context.dt = dt;

        SegmentFit fit;
        fit.schedule_index = seg;
        fit.start_day = start;
        fit.end_day = end;
        fit.lm = solve_fit_problem(make_pde_residual_model(context, problem), problem);
        fit.fitted_params = {fit.lm.params[0], fit.lm.params[1], fit.lm.params[2], fit.lm.params[3]};
        fits.push_back(fit);

        // Carry the end state of this segment into the next.
        const EpidemicParams fitted = with_fit_params(guess, fit.lm.params);
        PdeStepper stepper(mesh);
        const long steps = std::llround((end - start) / dt);
        for (long k = 0; k < steps; ++k) stepper.step(state, fitted, dt);
        state.time = end;
    }
    return fits;
}

std::vector<SegmentFit> fit_schedule_segments_hybrid(
    const Mesh& pde_mesh, SeirState pde_state, OdeCompartment ode,
    std::span<const int> interface_edges, const HybridOptions& hybrid_options,
    const ParamSchedule& schedule, double t_end, std::span<const double> target_times,
    const DenseMatrix& target_values, const std::vector<bool>& vid, double dt, int max_iterations,
    double residual_tolerance) {
    if (static_cast<long>(target_times.size()) != target_values.rows())
        throw InvalidArgument("target time count does not match target rows");
    const int nl = pde_mesh.label_count() + 1;
    if (target_values.cols() != nl)
        throw InvalidArgument("hybrid targets need one column per PDE subdomain plus the ODE region");

    PenaltyOperator penalty;
    if (!hybrid_options.zero_boundary)
        penalty = make_interface_penalty(pde_mesh, interface_edges, hybrid_options.penalty_scale);

    std::vector<SegmentFit> fits;
    const auto& entries = schedule.entries();
    for (size_t seg = 0; seg < entries.size(); ++seg) {
        const double start = entries[seg].start_day;
        const double end = seg + 1 < entries.size() ? entries[seg + 1].start_day : t_end;
        if (!(end > start)) continue;

        FitProblem problem;
        problem.vid = vid;
        problem.max_iterations = max_iterations;
        problem.residual_tolerance = residual_tolerance;
        const EpidemicParams& guess = entries[seg].params;
        problem.initial_params = {guess.sigma, guess.phi_e, guess.phi_i, guess.beta_i};

        std::vector<int> rows;
        for (size_t k = 0; k < target_times.size(); ++k)
            if (target_times[k] > start + 1e-9 && target_times[k] <= end + 1e-9)
                rows.push_back(static_cast<int>(k));
        if (static_cast<int>(rows.size()) * nl < 4)
            throw InvalidArgument("segment starting at day " + std::to_string(start) +
                                  " has too few target samples");
        problem.sample_times.resize(rows.size());
        problem.targets = DenseMatrix(static_cast<int>(rows.size()), nl);
        for (size_t k = 0; k < rows.size(); ++k) {
            problem.sample_times[k] = target_times[rows[k]];
            for (int l = 0; l < nl; ++l)
                problem.targets(static_cast<int>(k), l) = target_values(rows[k], l);
        }

        HybridFitContext context;
        context.pde_mesh = &pde_mesh;
        context.initial = pde_state;
        context.initial.time = start;
        context.ode = ode;
        context.interface_edges.assign(interface_edges.begin(), interface_edges.end());
        context.options = hybrid_options;
        context.base = guess;
        context.dt = dt;

        SegmentFit fit;
        fit.schedule_index = seg;
        fit.start_day = start;
        fit.end_day = end;
        fit.lm = solve_fit_problem(make_hybrid_residual_model(context, problem), problem);
        fit.fitted_params = {fit.lm.params[0], fit.lm.params[1], fit.lm.params[2], fit.lm.params[3]};
        fits.push_back(fit);

        const EpidemicParams fitted = with_fit_params(guess, fit.lm.params);
        PdeStepper stepper(pde_mesh);
        const long steps = std::llround((end - start) / dt);
        for (long k = 0; k < steps; ++k)
            step_hybrid(stepper, pde_state, ode, fitted, dt,
                        hybrid_options.zero_boundary ? nullptr : &penalty, interface_edges,
                        hybrid_options.zero_boundary);
        pde_state.time = end;
    }
    return fits;
}

} // namespace episeir
