#pragma once
#include <array>

#include "hybrid.hpp"
#include "levenberg_marquardt.hpp"
#include "sensitivity.hpp"

namespace episeir {

// Calibration target: subdomain infectious counts at sample times, with an
// emphasis weight of 2 on very-important subdomains and 1 elsewhere.
struct FitProblem {
    DenseMatrix targets;              // K x L, persons
    std::vector<double> sample_times; // absolute days, strictly increasing
    std::vector<bool> vid;            // per subdomain
    std::array<double, 4> initial_params{}; // (sigma, phi_e, phi_i, beta)
    int max_iterations = 50;
    double residual_tolerance = 1e-9;

    void validate() const;
    double weight(int label_index) const { return vid[label_index] ? 2.0 : 1.0; }
};

// Residual model backed by the full-PDE forward run with analytic parameter
// sensitivities. The returned residual is the weighted misfit flattened
// sample-major: row k*L + l.
struct PdeFitContext {
    const Mesh* mesh = nullptr;
    SeirState initial;   // segment start state; initial.time anchors sample times
    EpidemicParams base; // supplies diffusion and Allee constants
    double dt = 0.1;
};

ResidualModel make_pde_residual_model(PdeFitContext context, FitProblem problem);

// Residual model backed by the hybrid forward run, with a central
// finite-difference Jacobian. The observable has one column per PDE
// subdomain followed by one column for the averaged region.
struct HybridFitContext {
    const Mesh* pde_mesh = nullptr;
    SeirState initial;
    OdeCompartment ode;
    std::vector<int> interface_edges;
    HybridOptions options;
    EpidemicParams base;
    double dt = 0.1;
    double fd_relative_step = 1e-4;
};

ResidualModel make_hybrid_residual_model(HybridFitContext context, FitProblem problem);

LmResult solve_fit_problem(const ResidualModel& model, const FitProblem& problem,
                           const LmOptions& extra = {});

// Sequential per-interval calibration: each schedule interval is fitted
// against the target samples falling inside it, starting from the state the
// previous interval left behind.
struct SegmentFit {
    std::size_t schedule_index = 0;
    double start_day = 0.0;
    double end_day = 0.0;
    std::array<double, 4> fitted_params{};
    LmResult lm;
};

std::vector<SegmentFit> fit_schedule_segments(const Mesh& mesh, SeirState state,
                                              const ParamSchedule& schedule, double t_end,
                                              std::span<const double> target_times,
                                              const DenseMatrix& target_values,
                                              const std::vector<bool>& vid, double dt,
                                              int max_iterations, double residual_tolerance);

// Same sequential calibration against the hybrid forward model
// (finite-difference Jacobians). Target columns: one per PDE subdomain, then
// the averaged region.
std::vector<SegmentFit> fit_schedule_segments_hybrid(
    const Mesh& pde_mesh, SeirState pde_state, OdeCompartment ode,
    std::span<const int> interface_edges, const HybridOptions& hybrid_options,
    const ParamSchedule& schedule, double t_end, std::span<const double> target_times,
    const DenseMatrix& target_values, const std::vector<bool>& vid, double dt, int max_iterations,
    double residual_tolerance);

} // namespace episeir
