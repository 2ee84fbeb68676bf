#pragma once
#include <array>

#include "dense.hpp"
#include "seir.hpp"

namespace episeir {

// Forward sensitivities of the reaction-diffusion SEIR fields with respect to
// the calibrated parameter vector p = (sigma, phi_e, phi_i, beta), assuming
// beta_e = beta_i. Index m is 0-based throughout. The removed compartment
// never feeds back into the infectious observable and carries no sensitivity.

struct SensitivityFields {
    std::vector<double> s, e, i;
};

struct SensitivityState {
    SeirState base;
    std::array<SensitivityFields, 4> sens;

    // Zero sensitivities at the initial time (the initial fields do not
    // depend on the parameters).
    static SensitivityState from_base(SeirState base);
};

struct SensitivityRates {
    double ds, de, di;
};

// Reaction part of the variational equations for parameter m; the diffusion
// part is handled by the shared stiffness operator.
SensitivityRates sensitivity_reaction_rates(double s, double e, double i, double n,
                                            double sens_s, double sens_e, double sens_i,
                                            const EpidemicParams& params, int m);

// Advances the base fields one IMEX step and each of the twelve sensitivity
// fields with the same implicit operator, forcing evaluated at the pre-step
// base (consistent with the explicit reaction treatment).
void step_with_sensitivities(PdeStepper& stepper, SensitivityState& state,
                             const EpidemicParams& params, double dt,
                             StepMonitor* monitor = nullptr);

// d/dp_m of the subdomain infectious count: \int_l n * (d i / d p_m) dx.
double jacobian_entry(const Mesh& mesh, const SensitivityState& state, int label, int m);

// Forward run recording the observable and its parameter Jacobian at the
// sample times (which must be multiples of dt). Row k*L + l of the Jacobian
// corresponds to sample k and subdomain label l+1.
struct ForwardSensitivityResult {
    DenseMatrix values;   // K x L subdomain infectious counts
    DenseMatrix jacobian; // (K*L) x 4
};

ForwardSensitivityResult run_with_sensitivities(const Mesh& mesh, const SeirState& initial,
                                                const EpidemicParams& params,
                                                std::span<const double> sample_times, double dt);

} // namespace episeir
