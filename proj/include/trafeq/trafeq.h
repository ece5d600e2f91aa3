/* C interface to the traffic equilibrium solvers. Every function returns a
 * trafeq_status; on failure trafeq_last_error() describes the problem for
 * the calling thread. Handles are opaque and released with the matching
 * *_free function (NULL is accepted). */
#ifndef TRAFEQ_H
#define TRAFEQ_H

#include <stddef.h>

#if defined(TRAFEQ_BUILDING)
#define TRAFEQ_API __attribute__((visibility("default")))
#else
#define TRAFEQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trafeq_status {
  TRAFEQ_OK = 0,
  TRAFEQ_ERR_IO = 1,
  TRAFEQ_ERR_PARSE = 2,
  TRAFEQ_ERR_INVALID_ARGUMENT = 3,
  TRAFEQ_ERR_UNREACHABLE = 4,
  TRAFEQ_ERR_NUMERICAL = 5,
  TRAFEQ_ERR_INTERNAL = 6
} trafeq_status;

typedef enum trafeq_model {
  TRAFEQ_MODEL_BECKMANN = 0,
  TRAFEQ_MODEL_STABLE = 1
} trafeq_model;

typedef struct trafeq_network trafeq_network;
typedef struct trafeq_demand trafeq_demand;
typedef struct trafeq_solution trafeq_solution;
typedef struct trafeq_comparison trafeq_comparison;

typedef struct trafeq_options {
  trafeq_model model;
  double gamma;       /* ignored when gamma_auto != 0 */
  int gamma_auto;     /* nonzero: γ* from eps_rel */
  int walk_cap;       /* 0: node count - 1 */
  double eps_rel;
  int max_iters;
  double time_limit_s; /* 0: unlimited */
  int threads;
  double r_hat;        /* 0: estimated from the iterate */
} trafeq_options;

TRAFEQ_API const char* trafeq_last_error(void);
TRAFEQ_API void trafeq_options_init(trafeq_options* options);

TRAFEQ_API trafeq_status trafeq_network_load(const char* path,
                                             trafeq_network** out);
TRAFEQ_API void trafeq_network_free(trafeq_network* net);
TRAFEQ_API int trafeq_network_node_count(const trafeq_network* net);
TRAFEQ_API int trafeq_network_edge_count(const trafeq_network* net);

TRAFEQ_API trafeq_status trafeq_demand_load(const char* path,
                                            trafeq_demand** out);
TRAFEQ_API void trafeq_demand_free(trafeq_demand* dm);
TRAFEQ_API double trafeq_demand_total(const trafeq_demand* dm);

TRAFEQ_API trafeq_status trafeq_solve(const trafeq_network* net,
                                      const trafeq_demand* dm,
                                      const trafeq_options* options,
                                      trafeq_solution** out);
TRAFEQ_API void trafeq_solution_free(trafeq_solution* sol);
TRAFEQ_API int trafeq_solution_converged(const trafeq_solution* sol);
TRAFEQ_API int trafeq_solution_iterations(const trafeq_solution* sol);
TRAFEQ_API double trafeq_solution_gap(const trafeq_solution* sol);
TRAFEQ_API double trafeq_solution_gap0(const trafeq_solution* sol);
TRAFEQ_API double trafeq_solution_gamma(const trafeq_solution* sol);
TRAFEQ_API double trafeq_solution_violation(const trafeq_solution* sol);
TRAFEQ_API double trafeq_solution_primal_objective(const trafeq_solution* sol);
/* Copies min(n, edge count) values; returns the edge count. */
TRAFEQ_API size_t trafeq_solution_flows(const trafeq_solution* sol,
                                        double* buffer, size_t n);
TRAFEQ_API size_t trafeq_solution_times(const trafeq_solution* sol,
                                        double* buffer, size_t n);

TRAFEQ_API trafeq_status trafeq_solution_write_flows(
    const trafeq_solution* sol, const trafeq_network* net, const char* path);
TRAFEQ_API trafeq_status trafeq_solution_write_log(const trafeq_solution* sol,
                                                   const char* path);
/* net_path and trips_path are echoed into the summary. */
TRAFEQ_API trafeq_status trafeq_solution_write_summary(
    const trafeq_solution* sol, const char* net_path, const char* trips_path,
    const char* path);

/* Beckmann, γ = 0 only: the dual method against Frank-Wolfe. */
TRAFEQ_API trafeq_status trafeq_compare(const trafeq_network* net,
                                        const trafeq_demand* dm,
                                        const trafeq_options* options,
                                        trafeq_comparison** out);
TRAFEQ_API void trafeq_comparison_free(trafeq_comparison* cmp);
TRAFEQ_API int trafeq_comparison_agree(const trafeq_comparison* cmp);
TRAFEQ_API int trafeq_comparison_converged(const trafeq_comparison* cmp);
TRAFEQ_API double trafeq_comparison_umst_objective(const trafeq_comparison* cmp);
TRAFEQ_API double trafeq_comparison_fw_objective(const trafeq_comparison* cmp);
TRAFEQ_API double trafeq_comparison_tolerance(const trafeq_comparison* cmp);
/* Borrowed view of the dual-method run; valid while cmp lives. */
TRAFEQ_API const trafeq_solution* trafeq_comparison_umst(
    const trafeq_comparison* cmp);
TRAFEQ_API trafeq_status trafeq_comparison_write_csv(
    const trafeq_comparison* cmp, const char* path);
TRAFEQ_API trafeq_status trafeq_comparison_write_summary(
    const trafeq_comparison* cmp, const char* net_path,
    const char* trips_path, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* TRAFEQ_H */
