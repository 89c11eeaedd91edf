#ifndef MAOEA_H
#define MAOEA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. The first three match the command-line exit codes.
 */
typedef enum MaoeaStatus {
  MAOEA_STATUS_OK = 0,
  MAOEA_STATUS_CONFIG_ERROR = 1,
  MAOEA_STATUS_RUNTIME_ERROR = 2,
  MAOEA_STATUS_NULL_POINTER = 3,
  MAOEA_STATUS_INVALID_UTF8 = 4,
  MAOEA_STATUS_BUFFER_TOO_SMALL = 5,
  MAOEA_STATUS_PANIC = 6,
} MaoeaStatus;

/*
 Outcome of one adaptation call.
 */
typedef enum MaoeaAdaptation {
  MAOEA_ADAPTATION_NONE = 0,
  MAOEA_ADAPTATION_SHRINK = 1,
  MAOEA_ADAPTATION_EXPAND = 2,
} MaoeaAdaptation;

/*
 Opaque layered reference archive.
 */
typedef struct MaoeaArchive MaoeaArchive;

/*
 Opaque benchmark problem.
 */
typedef struct MaoeaProblem MaoeaProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *maoea_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void maoea_string_free(char *s);

/*
 Creates a registered problem. `d = 0` selects the conventional size.

 # Safety
 `name` must be a nul-terminated string and `out` writable.
 */
enum MaoeaStatus maoea_problem_new(const char *name, size_t m, size_t d, struct MaoeaProblem **out);

/*
 # Safety
 `p` must come from [`maoea_problem_new`] and not have been freed already.
 */
void maoea_problem_free(struct MaoeaProblem *p);

/*
 Objective and decision-variable counts.

 # Safety
 `p` must be a live problem handle; `m` and `d` writable.
 */
enum MaoeaStatus maoea_problem_dims(const struct MaoeaProblem *p, size_t *m, size_t *d);

/*
 Evaluates `x` (length `d`) into `out` (length `m`).

 # Safety
 `x` must hold `d` doubles and `out` room for `m`.
 */
enum MaoeaStatus maoea_problem_evaluate(const struct MaoeaProblem *p,
                                        const double *x,
                                        size_t d,
                                        double *out,
                                        size_t m);

/*
 Writes `n` row-major true-front samples into `out` (room for `n·m`).

 # Safety
 `out` must have room for `n·m` doubles.
 */
enum MaoeaStatus maoea_problem_sample_front(const struct MaoeaProblem *p,
                                            size_t n,
                                            double *out,
                                            size_t out_len);

/*
 Base-density archive sized for a population of `n` in `m` objectives.

 # Safety
 `out` must be writable.
 */
enum MaoeaStatus maoea_archive_new(size_t m, size_t n, struct MaoeaArchive **out);

/*
 # Safety
 `a` must come from [`maoea_archive_new`] and not have been freed already.
 */
void maoea_archive_free(struct MaoeaArchive *a);

/*
 Number of participating reference vectors.

 # Safety
 `a` must be a live archive handle and `out` writable.
 */
enum MaoeaStatus maoea_archive_participating_count(const struct MaoeaArchive *a, size_t *out);

/*
 Writes the participating directions row-major into `out`
 (`count·m` doubles, each row summing to one).

 # Safety
 `out` must have room for `out_len` doubles.
 */
enum MaoeaStatus maoea_archive_participating(const struct MaoeaArchive *a,
                                             double *out,
                                             size_t out_len);

/*
 One adaptation step given the active participating indices.

 # Safety
 `active` must hold `active_len` indices and `kind` be writable.
 */
enum MaoeaStatus maoea_archive_adapt(struct MaoeaArchive *a,
                                     const size_t *active,
                                     size_t active_len,
                                     size_t n,
                                     double theta,
                                     enum MaoeaAdaptation *kind);

/*
 IGD of `pop` against `pf`, both row-major with `m` columns.

 # Safety
 `pf` must hold `pf_rows·m` doubles and `pop` `pop_rows·m`.
 */
enum MaoeaStatus maoea_igd(const double *pf,
                           size_t pf_rows,
                           const double *pop,
                           size_t pop_rows,
                           size_t m,
                           double *out);

/*
 Runs an experiment described by a JSON configuration and returns its
 summary as JSON. Output files are written when the configuration names
 an output directory.

 # Safety
 `config_json` must be a nul-terminated string and `out` writable.
 */
enum MaoeaStatus maoea_run_json(const char *config_json, char **out);

/*
 JSON dump of the base layer for `m` objectives at density `h`.

 # Safety
 `out` must be writable.
 */
enum MaoeaStatus maoea_lattice_json(size_t m, uint32_t h, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAOEA_H */
