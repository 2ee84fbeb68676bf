/* episeir — spatial SEIR simulation and calibration engine.
 *
 * C interface of the shared library. All functions return EPISEIR_OK (0) on
 * success or a nonzero error code; episeir_last_error() describes the most
 * recent failure on the calling thread. Scenario handles are opaque and must
 * be released with episeir_scenario_close().
 */
#ifndef EPISEIR_H
#define EPISEIR_H

#ifdef __cplusplus
extern "C" {
#endif

#define EPISEIR_API __attribute__((visibility("default")))

enum episeir_status {
    EPISEIR_OK = 0,
    EPISEIR_ERR_IO = 1,      /* file not readable/writable */
    EPISEIR_ERR_PARSE = 2,   /* malformed input file */
    EPISEIR_ERR_CONFIG = 3,  /* scenario schema violation */
    EPISEIR_ERR_INVALID = 4, /* invalid argument or state */
    EPISEIR_ERR_NUMERIC = 5, /* solver failure */
    EPISEIR_ERR_INTERNAL = 6
};

typedef struct episeir_scenario episeir_scenario;

EPISEIR_API const char* episeir_version(void);

/* Message of the last failure on this thread; empty string when none. */
EPISEIR_API const char* episeir_last_error(void);

EPISEIR_API int episeir_scenario_open(const char* path, episeir_scenario** out);
EPISEIR_API void episeir_scenario_close(episeir_scenario* scenario);

/* Output directory configured in the scenario file; the returned pointer
 * stays valid while the handle is open. */
EPISEIR_API const char* episeir_scenario_output_dir(const episeir_scenario* scenario);

/* Simulation runners; outputs (trajectory.csv, optional VTK snapshots) are
 * written into output_dir, which is created when missing. */
EPISEIR_API int episeir_run_pde(const episeir_scenario* scenario, const char* output_dir);
EPISEIR_API int episeir_run_hybrid(const episeir_scenario* scenario, const char* output_dir);
EPISEIR_API int episeir_run_ode(const episeir_scenario* scenario, const char* output_dir);

/* Initial-condition construction: writes initial_fields.vtk and
 * initial_report.csv. */
EPISEIR_API int episeir_fit_initial(const episeir_scenario* scenario, const char* output_dir);

/* Parameter calibration against a target CSV (columns: time, i_1, ..., i_L);
 * writes fit_report.txt, fit_summary.csv and fitted_scenario.json. */
EPISEIR_API int episeir_fit_parameters(const episeir_scenario* scenario, const char* targets_csv,
                                       const char* output_dir);

/* Varies the averaged-region share of a rectangle scenario; writes sweep.csv,
 * sweep_runtime.csv and the per-fraction trajectories. Fractions are in
 * [0, 1]. */
EPISEIR_API int episeir_sweep(const episeir_scenario* scenario, const double* fractions,
                              int fraction_count, const char* output_dir);

/* Structured rectangle mesh writer (Triangle .node/.ele). Pass split_x < 0
 * for an unsplit mesh. */
EPISEIR_API int episeir_generate_mesh(double width, double height, double edge_length,
                                      double split_x, const char* node_path, const char* ele_path);

/* Accuracy/deviation report of a candidate trajectory against a reference
 * and an averaged baseline; written to report_path. */
EPISEIR_API int episeir_compare(const char* reference_csv, const char* candidate_csv,
                                const char* baseline_csv, const char* report_path);

#ifdef __cplusplus
}
#endif

#endif /* EPISEIR_H */
