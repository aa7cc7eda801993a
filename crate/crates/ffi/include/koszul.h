#ifndef KOSZUL_H
#define KOSZUL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KoszulStatus {
  KOSZUL_STATUS_OK = 0,
  /*
   The computation ran and a check failed; any report is still written.
   */
  KOSZUL_STATUS_MATH_FAILURE = 1,
  KOSZUL_STATUS_INVALID_INPUT = 2,
  KOSZUL_STATUS_NULL_POINTER = 3,
  KOSZUL_STATUS_INVALID_UTF8 = 4,
  KOSZUL_STATUS_PANIC = 5,
} KoszulStatus;

/*
 A Lie algebra certified reductive.
 */
typedef struct KoszulAlgebra KoszulAlgebra;

/*
 A differential g-module over some [`KoszulAlgebra`].
 */
typedef struct KoszulModule KoszulModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version, a static string.
 */
const char *koszul_version(void);

/*
 Message for the most recent failure on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *koszul_last_error(void);

/*
 # Safety
 `s` is null or a string returned by this library, not yet freed.
 */
void koszul_string_free(char *s);

/*
 Loads a builtin (`su2`, `sl2`, `su2xsu2`, `abelian:n`) or a JSON file and
 certifies it reductive.

 # Safety
 `spec` is a nul-terminated string and `out` is writable.
 */
enum KoszulStatus koszul_algebra_load(const char *spec, struct KoszulAlgebra **out);

/*
 Dimension of the algebra, 0 for a null handle.

 # Safety
 `g` is null or a live handle.
 */
size_t koszul_algebra_dim(const struct KoszulAlgebra *g);

/*
 # Safety
 `g` is null or a live handle; it is invalid afterwards.
 */
void koszul_algebra_free(struct KoszulAlgebra *g);

/*
 Builds a module from the same specs the command line accepts. The module
 keeps its own reference to the algebra.

 # Safety
 `g` is a live handle, `spec` is nul-terminated and `out` is writable.
 */
enum KoszulStatus koszul_module_load(const struct KoszulAlgebra *g,
                                     const char *spec,
                                     struct KoszulModule **out);

/*
 Total dimension of the module's graded space.

 # Safety
 `m` is null or a live handle.
 */
size_t koszul_module_total_dim(const struct KoszulModule *m);

/*
 # Safety
 `m` is null or a live handle; it is invalid afterwards.
 */
void koszul_module_free(struct KoszulModule *m);

/*
 Checks the K(g) identities. Returns `KOSZUL_STATUS_MATH_FAILURE` if any fails.

 # Safety
 `m` is a live handle.
 */
enum KoszulStatus koszul_module_validate(const struct KoszulModule *m);

/*
 Runs the duality check through `max_degree - 1` and writes the JSON report
 to `out_json` whether or not the check passes.

 # Safety
 `m` is a live handle and `out_json` is writable.
 */
enum KoszulStatus koszul_duality(const struct KoszulModule *m,
                                 int32_t max_degree,
                                 bool corrupt_transgression,
                                 char **out_json);

/*
 Runs one command from a JSON run configuration, the same object the
 command line echoes under `config`, and writes the full envelope.

 # Safety
 `config_json` is nul-terminated and `out_json` is writable.
 */
enum KoszulStatus koszul_run(const char *config_json, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOSZUL_H */
