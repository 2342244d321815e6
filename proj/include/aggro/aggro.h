#ifndef AGGRO_AGGRO_H
#define AGGRO_AGGRO_H

#include <stddef.h>

#if defined(_WIN32)
#define AGGRO_API __declspec(dllexport)
#else
#define AGGRO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aggro_status {
    AGGRO_OK = 0,
    AGGRO_E_INVALID = 1,
    AGGRO_E_DOMAIN = 2,
    AGGRO_E_CFL = 3,
    AGGRO_E_BOUNDARY = 4,
    AGGRO_E_NONFINITE = 5,
    AGGRO_E_MASS = 6,
    AGGRO_E_CAP = 7,
    AGGRO_E_IO = 8,
    AGGRO_E_INTERNAL = 9
} aggro_status;

typedef struct aggro_config aggro_config;
typedef struct aggro_measure aggro_measure;

AGGRO_API const char* aggro_version(void);
AGGRO_API const char* aggro_status_name(aggro_status s);
/* message of the last failure on the calling thread; empty after success */
AGGRO_API const char* aggro_last_error(void);
/* frees strings returned through char** out-parameters */
AGGRO_API void aggro_string_free(char* s);

AGGRO_API aggro_status aggro_config_parse(const char* json, aggro_config** out);
AGGRO_API aggro_status aggro_config_load(const char* path, aggro_config** out);
/* merges a JSON object into the config, e.g. {"n_cells": 512} */
AGGRO_API aggro_status aggro_config_update(aggro_config* cfg, const char* json_patch);
AGGRO_API aggro_status aggro_config_json(const aggro_config* cfg, char** out);
AGGRO_API int aggro_config_dimension(const aggro_config* cfg);
AGGRO_API void aggro_config_free(aggro_config* cfg);

/* full run with artifacts; *summary receives the summary JSON */
AGGRO_API aggro_status aggro_run(const aggro_config* cfg, char** summary);
/* refinement ladder n_cells * 2^k; writes csv_path when non-NULL; *rows receives a JSON array */
AGGRO_API aggro_status aggro_converge(const aggro_config* cfg, int levels, const char* csv_path, char** rows);
AGGRO_API aggro_status aggro_steady(const aggro_config* cfg, double* d1);
AGGRO_API aggro_status aggro_energy(const aggro_config* cfg, int levels, char** rows);
/* Burgers-based reference on 2^level cells, returned as a density measure */
AGGRO_API aggro_status aggro_burgers(const aggro_config* cfg, int level, aggro_measure** out);

AGGRO_API aggro_status aggro_initial(const aggro_config* cfg, int n, aggro_measure** out);
/* evolves the initial datum on n cells per axis to t (the configured final time when t < 0) */
AGGRO_API aggro_status aggro_simulate(const aggro_config* cfg, int n, double t, aggro_measure** out);
AGGRO_API int aggro_measure_dimension(const aggro_measure* m);
/* cells per axis; ny is 1 in 1D */
AGGRO_API void aggro_measure_shape(const aggro_measure* m, int* nx, int* ny);
AGGRO_API const double* aggro_measure_density(const aggro_measure* m, size_t* count);
AGGRO_API double aggro_measure_mass(const aggro_measure* m);
AGGRO_API aggro_status aggro_measure_write_csv(const aggro_measure* m, const char* path);
/* exact d1; the coarser grid must divide the finer one */
AGGRO_API aggro_status aggro_distance(const aggro_measure* a, const aggro_measure* b, double* d1);
AGGRO_API void aggro_measure_free(aggro_measure* m);

#ifdef __cplusplus
}
#endif

#endif
