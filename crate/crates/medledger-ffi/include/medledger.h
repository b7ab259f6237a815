#ifndef MEDLEDGER_H
#define MEDLEDGER_H

/* Generated by cbindgen from medledger-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirrored into the generated header.
 */
typedef enum MedStatus {
  MED_STATUS_OK = 0,
  MED_STATUS_CONTRACT_ERROR = 1,
  MED_STATUS_AUTH_FAILED = 2,
  MED_STATUS_NOT_FOUND = 3,
  MED_STATUS_EXISTS = 4,
  MED_STATUS_NO_POLICY = 5,
  MED_STATUS_DENIED = 6,
  MED_STATUS_EXPIRED = 7,
  MED_STATUS_BAD_REQUEST = 8,
  MED_STATUS_CONFIG_ERROR = 9,
  MED_STATUS_IO_ERROR = 10,
  MED_STATUS_INTERNAL = 11,
  MED_STATUS_NULL_ARGUMENT = 12,
} MedStatus;

/**
 * Opaque node handle.
 */
typedef struct MedNode MedNode;

/**
 * A heap buffer handed across the boundary; free with `med_buffer_free`.
 */
typedef struct MedBuffer {
  uint8_t *data;
  uintptr_t len;
} MedBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread. Never NULL; the
 * pointer stays valid until the next medledger call on the same thread.
 */
const char *med_last_error(void);

/**
 * Initialize (or resume) a node in `data_dir` with default configuration.
 * Returns NULL on failure; see `med_last_error`.
 *
 * # Safety
 * `data_dir` must be a valid NUL-terminated string.
 */
struct MedNode *med_node_bootstrap(const char *data_dir);

/**
 * Open an already-initialized node directory. Returns NULL on failure.
 *
 * # Safety
 * `data_dir` must be a valid NUL-terminated string.
 */
struct MedNode *med_node_open(const char *data_dir);

/**
 * Shut the node down and release the handle. NULL is a no-op.
 *
 * # Safety
 * `handle` must come from `med_node_bootstrap`/`med_node_open` and must not
 * be used afterwards.
 */
void med_node_close(struct MedNode *handle);

/**
 * Release a buffer returned by a query. Zeroed/NULL buffers are no-ops.
 *
 * # Safety
 * `buffer` must be exactly as returned, and released at most once.
 */
void med_buffer_free(struct MedBuffer buffer);

/**
 * Register an identity. `role` is "admin", "doctor" or "patient".
 *
 * # Safety
 * Pointer arguments as documented at module level.
 */
enum MedStatus med_register_identity(struct MedNode *handle,
                                     const char *user_id,
                                     const char *role,
                                     const char *department);

/**
 * Add an access policy (admin signer required). `allow` is 1 or 0.
 *
 * # Safety
 * Pointer arguments as documented at module level.
 */
enum MedStatus med_policy_add(struct MedNode *handle,
                              const char *signer,
                              const char *user,
                              const char *role,
                              const char *department,
                              const char *record_id,
                              int allow,
                              uint64_t create_time,
                              uint64_t end_time);

/**
 * Update the permission/environment of an existing policy.
 *
 * # Safety
 * Pointer arguments as documented at module level.
 */
enum MedStatus med_policy_update(struct MedNode *handle,
                                 const char *signer,
                                 const char *user,
                                 const char *role,
                                 const char *department,
                                 const char *record_id,
                                 int allow,
                                 uint64_t create_time,
                                 uint64_t end_time);

/**
 * Delete the policy for a subject/object pair.
 *
 * # Safety
 * Pointer arguments as documented at module level.
 */
enum MedStatus med_policy_delete(struct MedNode *handle,
                                 const char *signer,
                                 const char *user,
                                 const char *role,
                                 const char *department,
                                 const char *record_id);

/**
 * Query a policy; on success `out` receives its canonical text form.
 *
 * # Safety
 * Pointer arguments as documented at module level; `out` must be writable.
 */
enum MedStatus med_policy_query(struct MedNode *handle,
                                const char *user,
                                const char *role,
                                const char *department,
                                const char *record_id,
                                struct MedBuffer *out);

/**
 * Store record content off chain and commit its address on chain.
 *
 * # Safety
 * `content` must point to `content_len` readable bytes.
 */
enum MedStatus med_record_add(struct MedNode *handle,
                              const char *signer,
                              const char *record_id,
                              const uint8_t *content,
                              uintptr_t content_len);

/**
 * Replace a record's content (new blob stored, pointer rewritten).
 *
 * # Safety
 * `content` must point to `content_len` readable bytes.
 */
enum MedStatus med_record_update(struct MedNode *handle,
                                 const char *signer,
                                 const char *record_id,
                                 const uint8_t *content,
                                 uintptr_t content_len);

/**
 * Delete a record pointer and its blob.
 *
 * # Safety
 * Pointer arguments as documented at module level.
 */
enum MedStatus med_record_delete(struct MedNode *handle, const char *signer, const char *record_id);

/**
 * Fetch a record's full content into `out`.
 *
 * # Safety
 * Pointer arguments as documented at module level; `out` must be writable.
 */
enum MedStatus med_record_query(struct MedNode *handle,
                                const char *record_id,
                                struct MedBuffer *out);

/**
 * Evaluate an access request as (user, role, department) on `record_id`.
 * A grant returns MED_STATUS_OK and, when `out` is non-NULL, the record
 * bytes; denials report MED_STATUS_DENIED / _EXPIRED / _NO_POLICY.
 *
 * # Safety
 * Pointer arguments as documented at module level; `out` may be NULL.
 */
enum MedStatus med_access_check(struct MedNode *handle,
                                const char *user,
                                const char *role,
                                const char *department,
                                const char *record_id,
                                struct MedBuffer *out);

/**
 * Verify the persisted chain (hashes, links, signatures). Returns 1 when
 * valid, 0 when corrupt, -1 on a null handle.
 *
 * # Safety
 * `handle` as documented at module level.
 */
int med_ledger_verify(struct MedNode *handle);

/**
 * Height of the committed tip, or -1 for an empty chain / null handle.
 *
 * # Safety
 * `handle` as documented at module level.
 */
int64_t med_ledger_height(struct MedNode *handle);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MEDLEDGER_H */
