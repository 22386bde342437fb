#ifndef FONTAINE_H
#define FONTAINE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum FontaineStatus {
  FontaineStatus_Ok = 0,
  FontaineStatus_ParseError = 1,
  FontaineStatus_ValidationError = 2,
  FontaineStatus_ComputeError = 3,
  FontaineStatus_NullArgument = 4,
} FontaineStatus;

/**
 * Opaque validated field handle.
 */
typedef struct FontaineField FontaineField;

/**
 * Opaque root-discriminant table handle.
 */
typedef struct FontaineTable FontaineTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; valid until the next failing call.
 */
const char *fontaine_last_error(void);

/**
 * Library version string (static storage).
 */
const char *fontaine_version(void);

/**
 * Free a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `fontaine_*` function
 * and not yet freed.
 */
void fontaine_string_free(char *s);

/**
 * Parse and validate a base-field record from JSON.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum FontaineStatus fontaine_field_parse(const char *json, struct FontaineField **out);

/**
 * # Safety
 * `f` must come from `fontaine_field_parse` and not be freed twice.
 */
void fontaine_field_free(struct FontaineField *f);

/**
 * Load a root-discriminant table from CSV, or pass NULL for the
 * compiled-in conservative table.
 *
 * # Safety
 * `csv` must be NULL or a valid NUL-terminated string; `out` valid.
 */
enum FontaineStatus fontaine_table_load(const char *csv, struct FontaineTable **out);

/**
 * # Safety
 * `t` must come from `fontaine_table_load` and not be freed twice.
 */
void fontaine_table_free(struct FontaineTable *t);

/**
 * Classify a validated field. `pack_json` may be NULL. The verdict is
 * returned as a JSON document (see the verdict schema in the README);
 * free it with `fontaine_string_free`.
 *
 * # Safety
 * Handles must be live; `out_json` must be a valid pointer.
 */
enum FontaineStatus fontaine_classify(const struct FontaineField *field,
                                      const char *pack_json,
                                      const struct FontaineTable *table,
                                      uint32_t tower_cap,
                                      char **out_json);

/**
 * Sort a filtration word (comma-separated tokens, e.g. "Z2,mu2") into
 * canonical block order. `dichotomy` is 1 or 2; qe flags apply to the
 * three-prime case. The sorted word is returned as a string.
 *
 * # Safety
 * `word` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum FontaineStatus fontaine_sort_word(const char *word,
                                       uint32_t nprimes,
                                       uint32_t dichotomy,
                                       bool qe1,
                                       bool qe2,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FONTAINE_H */
