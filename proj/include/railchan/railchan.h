// SPDX-License-Identifier: Apache-2.0
//
// railchan - dynamic ray-tracing channel simulator for train-to-infrastructure links
// Copyright (C) 2026 The railchan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RAILCHAN_H
#define RAILCHAN_H

#include <stddef.h>

#if defined(RAILCHAN_BUILDING_LIBRARY)
#define RC_API __attribute__((visibility("default")))
#else
#define RC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rc_status
{
    RC_OK = 0,
    RC_ERR_INVALID_ARGUMENT = 1, /* null handle, bad option value */
    RC_ERR_CONFIG = 2,           /* scenario configuration rejected */
    RC_ERR_SCENE = 3,            /* scene file missing or malformed */
    RC_ERR_DOMAIN = 4,           /* geometric query outside the valid domain */
    RC_ERR_IO = 5,               /* output could not be written */
    RC_ERR_RUNTIME = 6           /* any other failure */
} rc_status;

typedef struct rc_scene rc_scene;
typedef struct rc_scenario rc_scenario;
typedef struct rc_pathset rc_pathset;
typedef struct rc_report rc_report;

RC_API const char *rc_version(void);

/* Message of the last failed call on the calling thread ("" when none). */
RC_API const char *rc_last_error(void);

/* ---- scenes ---------------------------------------------------------- */

RC_API rc_status rc_scene_load_file(const char *path, rc_scene **out);
RC_API rc_status rc_scene_load_text(const char *json_text, rc_scene **out);
RC_API void rc_scene_free(rc_scene *scene);

typedef struct rc_scene_stats
{
    size_t buildings;
    size_t facades;
    size_t vertical_edges;
    size_t convex_edges;
    size_t scatterers;
    size_t grid_cells;
} rc_scene_stats;

RC_API rc_status rc_scene_get_stats(const rc_scene *scene, rc_scene_stats *out);

/* *out = 1 when the segment p-q is unobstructed. */
RC_API rc_status rc_scene_is_los(const rc_scene *scene, const double p[3], const double q[3], int *out);

/* ---- single-position tracing ----------------------------------------- */

typedef enum rc_scatter_policy
{
    RC_SCATTER_OFF = 0,
    RC_SCATTER_DIRECT = 1,
    RC_SCATTER_DIRECT_AND_REFLECTION = 2
} rc_scatter_policy;

typedef struct rc_trace_options
{
    double carrier_hz;
    int max_reflections;           /* 0..2 */
    int max_vertical_diffractions; /* 0..1 */
    int rooftop;                   /* 0 or 1 */
    double loss_floor_db;
    rc_scatter_policy scatter;
    double tx_gain_dbi;
    double rx_gain_dbi;
} rc_trace_options;

RC_API void rc_trace_options_init(rc_trace_options *options);

/* Specular paths followed by scatter paths between tx and rx; NULL options select the defaults. */
RC_API rc_status rc_trace(const rc_scene *scene, const double tx[3], const double rx[3], const rc_trace_options *options,
                          rc_pathset **out);

typedef enum rc_path_tag
{
    RC_TAG_SPECULAR = 0,
    RC_TAG_SCATTER = 1
} rc_path_tag;

typedef struct rc_path
{
    double length_m;
    double delay_s;
    double aod_az_rad, aod_el_rad;
    double aoa_az_rad, aoa_el_rad;
    double doppler_hz;
    double t_re[4]; /* VV, VH, HV, HH (receive, transmit) */
    double t_im[4];
    size_t interactions;
    rc_path_tag tag;
} rc_path;

RC_API size_t rc_pathset_size(const rc_pathset *set);
RC_API rc_status rc_pathset_get(const rc_pathset *set, size_t index, rc_path *out);

/* Writes the NUL-terminated signature into buf (truncated to buflen); *needed receives the full
   size including the terminator. */
RC_API rc_status rc_pathset_signature(const rc_pathset *set, size_t index, char *buf, size_t buflen, size_t *needed);

/* Vertex k (0 = tx, last = rx) of a path; *count receives the number of vertices. */
RC_API rc_status rc_pathset_vertex(const rc_pathset *set, size_t index, size_t k, double out[3], size_t *count);

RC_API void rc_pathset_free(rc_pathset *set);

/* ---- scenarios ------------------------------------------------------- */

RC_API rc_status rc_scenario_load_file(const char *path, rc_scenario **out);

/* base_dir resolves a relative scene path; NULL means the working directory. */
RC_API rc_status rc_scenario_load_text(const char *json_text, const char *base_dir, rc_scenario **out);

/* Overrides a dotted key ("trajectory.duration_s"); the value is parsed as JSON when possible
   and taken as a plain string otherwise. The result is validated immediately. */
RC_API rc_status rc_scenario_set(rc_scenario *scenario, const char *key, const char *value);

/* Applies n overrides in order and validates once at the end; on failure the scenario is left
   unchanged. */
RC_API rc_status rc_scenario_apply(rc_scenario *scenario, const char *const *keys, const char *const *values, size_t n);

/* Canonical JSON of the effective configuration. */
RC_API rc_status rc_scenario_echo(const rc_scenario *scenario, char *buf, size_t buflen, size_t *needed);

RC_API void rc_scenario_free(rc_scenario *scenario);

/* ---- commands -------------------------------------------------------- */

/* Commands write their files into the configured output directory and return a report with a
   human-readable summary plus named numeric values. */
RC_API rc_status rc_cmd_run(const rc_scenario *scenario, int exact, rc_report **out);
RC_API rc_status rc_cmd_sweep(const rc_scenario *scenario, rc_report **out);
RC_API rc_status rc_cmd_scatter_study(const rc_scenario *scenario, rc_report **out);
RC_API rc_status rc_cmd_bench(const rc_scenario *scenario, rc_report **out);
RC_API rc_status rc_validate_scene_file(const char *path, rc_report **out);

RC_API const char *rc_report_text(const rc_report *report);
RC_API rc_status rc_report_value(const rc_report *report, const char *name, double *out);
RC_API void rc_report_free(rc_report *report);

#ifdef __cplusplus
}
#endif

#endif
