#include "sensitivity.hpp"

#include <cmath>

#include "errors.hpp"

namespace episeir {

SensitivityState SensitivityState::from_base(SeirState base) {
    SensitivityState state;
    const size_t nv = base.s.size();
    state.base = std::move(base);
    for (auto& f : state.sens) {
        f.s.assign(nv, 0.0);
        f.e.assign(nv, 0.0);
        f.i.assign(nv, 0.0);
    }
    return state;
}

SensitivityRates sensitivity_reaction_rates(double s, double e, double i, double n,
                                            double sens_s, double sens_e, double sens_i,
                                            const EpidemicParams& params, int m) {
    if (m < 0 || m > 3) throw InvalidArgument("sensitivity parameter index must be 0..3");
    if (params.beta_e != params.beta_i)
        throw InvalidArgument("sensitivities assume beta_e = beta_i");

    const double factor = allee_factor(n, params.allee_a, params.allee_n0);
    const double beta = params.beta_i;
    const double q = e + i;
    // Differentiated infection bracket: direct beta dependence plus the chain
    // through s, e, i.
    const double bracket = (m == 3 ? s * q : 0.0) + beta * q * sens_s + beta * s * (sens_e + sens_i);

    const double ds = -factor * bracket;
    const double de = factor * bracket - (params.sigma + params.phi_e) * sens_e -
                      (m == 0 ? e : 0.0) - (m == 1 ? e : 0.0);
    const double di = params.sigma * sens_e - params.phi_i * sens_i + (m == 0 ? e : 0.0) -
                      (m == 2 ? i : 0.0);
    return {ds, de, di};
}

void step_with_sensitivities(PdeStepper& stepper, SensitivityState& state,
                             const EpidemicParams& params, double dt, StepMonitor* monitor) {
    const int nv = state.base.vertex_count();

    // Forcing uses the pre-step base fields; keep a copy before advancing.
    const std::vector<double> s0 = state.base.s;
    const std::vector<double> e0 = state.base.e;
    const std::vector<double> i0 = state.base.i;

    stepper.step(state.base, params, dt, nullptr, nullptr, monitor);

    std::vector<double> rs(nv), re(nv), ri(nv);
    for (int m = 0; m < 4; ++m) {
        SensitivityFields& f = state.sens[m];
        for (int v = 0; v < nv; ++v) {
            const SensitivityRates rates = sensitivity_reaction_rates(
                s0[v], e0[v], i0[v], state.base.n[v], f.s[v], f.e[v], f.i[v], params, m);
            rs[v] = rates.ds;
            re[v] = rates.de;
            ri[v] = rates.di;
        }
        f.s = stepper.implicit_field_step(f.s, rs, params, dt);
        f.e = stepper.implicit_field_step(f.e, re, params, dt);
        f.i = stepper.implicit_field_step(f.i, ri, params, dt);
    }
}

double jacobian_entry(const Mesh& mesh, const SensitivityState& state, int label, int m) {
    if (m < 0 || m > 3) throw InvalidArgument("sensitivity parameter index must be 0..3");
    const std::array<int, 1> labels = {label};
    return integrate_weighted(mesh, state.sens[m].i, state.base.n, labels);
}

ForwardSensitivityResult run_with_sensitivities(const Mesh& mesh, const SeirState& initial,
                                                const EpidemicParams& params,
                                                std::span<const double> sample_times, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (sample_times.empty()) throw InvalidArgument("no sample times given");
    params.validate();
    initial.validate(mesh);

    std::vector<long> sample_steps(sample_times.size());
    for (size_t k = 0; k < sample_times.size(); ++k) {
        const double local = sample_times[k] - initial.time;
        const long step = std::llround(local / dt);
        if (step < 1 || std::abs(step * dt - local) > 1e-9)
            throw InvalidArgument("sample times must be positive multiples of dt");
        if (k > 0 && step <= sample_steps[k - 1])
            throw InvalidArgument("sample times must be strictly increasing");
        sample_steps[k] = step;
    }

    const int nl = mesh.label_count();
    const int nk = static_cast<int>(sample_times.size());
    ForwardSensitivityResult result;
    result.values = DenseMatrix(nk, nl);
    result.jacobian = DenseMatrix(nk * nl, 4);

    PdeStepper stepper(mesh);
    SensitivityState state = SensitivityState::from_base(initial);

    size_t next = 0;
    const long last_step = sample_steps.back();
    for (long step = 1; step <= last_step; ++step) {
        step_with_sensitivities(stepper, state, params, dt);
        if (step == sample_steps[next]) {
            const std::vector<double> counts = per_label_populations(mesh, state.base.i, state.base.n);
            for (int l = 0; l < nl; ++l) {
                result.values(static_cast<int>(next), l) = counts[l];
                for (int m = 0; m < 4; ++m)
                    result.jacobian(static_cast<int>(next) * nl + l, m) =
                        jacobian_entry(mesh, state, l + 1, m);
            }
            ++next;
        }
    }
    return result;
}

} // namespace episeir
