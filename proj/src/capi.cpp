#include "episeir.h"

#include <string>

#include "csv_io.hpp"
#include "errors.hpp"
#include "scenario.hpp"
#include "triangle_io.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Maps engine exceptions onto the C status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return EPISEIR_OK;
    } catch (const episeir::ParseError& e) {
        return fail(EPISEIR_ERR_PARSE, e.what());
    } catch (const episeir::ConfigError& e) {
        return fail(EPISEIR_ERR_CONFIG, e.what());
    } catch (const episeir::SolverError& e) {
        return fail(EPISEIR_ERR_NUMERIC, e.what());
    } catch (const episeir::InvalidArgument& e) {
        return fail(EPISEIR_ERR_INVALID, e.what());
    } catch (const episeir::Error& e) {
        return fail(EPISEIR_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(EPISEIR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(EPISEIR_ERR_INTERNAL, "unknown error");
    }
}

const episeir::Scenario& unwrap(const episeir_scenario* scenario) {
    if (!scenario) throw episeir::InvalidArgument("scenario handle is null");
    return *reinterpret_cast<const episeir::Scenario*>(scenario);
}

std::string require_cstr(const char* s, const char* name) {
    if (!s) throw episeir::InvalidArgument(std::string(name) + " is null");
    return s;
}

} // namespace

extern "C" {

const char* episeir_version(void) { return "0.1.0"; }

const char* episeir_last_error(void) { return g_last_error.c_str(); }

int episeir_scenario_open(const char* path, episeir_scenario** out) {
    return guarded([&] {
        if (!out) throw episeir::InvalidArgument("output handle is null");
        *out = nullptr;
        auto* scenario = new episeir::Scenario(episeir::Scenario::load(require_cstr(path, "path")));
        *out = reinterpret_cast<episeir_scenario*>(scenario);
    });
}

void episeir_scenario_close(episeir_scenario* scenario) {
    delete reinterpret_cast<episeir::Scenario*>(scenario);
}

const char* episeir_scenario_output_dir(const episeir_scenario* scenario) {
    if (!scenario) return "";
    return reinterpret_cast<const episeir::Scenario*>(scenario)->output_dir.c_str();
}

int episeir_run_pde(const episeir_scenario* scenario, const char* output_dir) {
    return guarded([&] {
        episeir::run_scenario_pde(unwrap(scenario), require_cstr(output_dir, "output_dir"));
    });
}

int episeir_run_hybrid(const episeir_scenario* scenario, const char* output_dir) {
    return guarded([&] {
        episeir::run_scenario_hybrid(unwrap(scenario), require_cstr(output_dir, "output_dir"));
    });
}

int episeir_run_ode(const episeir_scenario* scenario, const char* output_dir) {
    return guarded([&] {
        episeir::run_scenario_ode(unwrap(scenario), require_cstr(output_dir, "output_dir"));
    });
}

int episeir_fit_initial(const episeir_scenario* scenario, const char* output_dir) {
    return guarded([&] {
        episeir::scenario_fit_initial(unwrap(scenario), require_cstr(output_dir, "output_dir"));
    });
}

int episeir_fit_parameters(const episeir_scenario* scenario, const char* targets_csv,
                           const char* output_dir) {
    return guarded([&] {
        episeir::scenario_fit_parameters(unwrap(scenario), require_cstr(targets_csv, "targets_csv"),
                                         require_cstr(output_dir, "output_dir"));
    });
}

int episeir_sweep(const episeir_scenario* scenario, const double* fractions, int fraction_count,
                  const char* output_dir) {
    return guarded([&] {
        if (!fractions || fraction_count < 1)
            throw episeir::InvalidArgument("sweep needs at least one fraction");
        episeir::scenario_sweep(unwrap(scenario),
                                std::vector<double>(fractions, fractions + fraction_count),
                                require_cstr(output_dir, "output_dir"));
    });
}

int episeir_generate_mesh(double width, double height, double edge_length, double split_x,
                          const char* node_path, const char* ele_path) {
    return guarded([&] {
        std::optional<double> split;
        if (split_x >= 0.0) split = split_x;
        const episeir::Mesh mesh = episeir::generate_rectangle_mesh(width, height, edge_length, split);
        episeir::write_triangle_mesh_files(mesh, require_cstr(node_path, "node_path"),
                                           require_cstr(ele_path, "ele_path"));
    });
}

int episeir_compare(const char* reference_csv, const char* candidate_csv, const char* baseline_csv,
                    const char* report_path) {
    return guarded([&] {
        const std::string report = episeir::compare_report(
            require_cstr(reference_csv, "reference_csv"), require_cstr(candidate_csv, "candidate_csv"),
            require_cstr(baseline_csv, "baseline_csv"));
        episeir::write_text_file(require_cstr(report_path, "report_path"), report);
    });
}

} // extern "C"
