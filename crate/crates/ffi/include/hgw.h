#ifndef HGW_H
#define HGW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum HgwStatus {
  HGW_STATUS_OK = 0,
  HGW_STATUS_NULL_POINTER = 1,
  HGW_STATUS_INVALID_UTF8 = 2,
  HGW_STATUS_PARSE_ERROR = 3,
  HGW_STATUS_INVALID_ARGUMENT = 4,
  HGW_STATUS_DISCONNECTED = 5,
  HGW_STATUS_NUMERICAL_ERROR = 6,
  HGW_STATUS_BUFFER_TOO_SMALL = 7,
  HGW_STATUS_PANIC = 8,
} HgwStatus;

// Opaque graph handle.
typedef struct HgwGraph HgwGraph;

// Opaque Laplacian eigendecomposition handle.
typedef struct HgwSpectrum HgwSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a whitespace-separated `u v w` edge list.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum HgwStatus hgw_graph_from_edge_list(const char *text, struct HgwGraph **out);

// Parses a Matrix Market coordinate matrix.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum HgwStatus hgw_graph_from_matrix_market(const char *text, struct HgwGraph **out);

// # Safety
// `graph` must come from `hgw_graph_from_*` and not be used afterwards.
void hgw_graph_free(struct HgwGraph *graph);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t hgw_graph_num_vertices(const struct HgwGraph *graph);

// Label of vertex `index` as a newly allocated string; release it with
// [`hgw_string_free`].
//
// # Safety
// `graph` must be a live handle and `out` a valid pointer.
enum HgwStatus hgw_graph_label(const struct HgwGraph *graph, size_t index, char **out);

// Index of the vertex labelled `label`.
//
// # Safety
// `graph` must be a live handle, `label` NUL-terminated, `out` valid.
enum HgwStatus hgw_graph_index_of(const struct HgwGraph *graph, const char *label, size_t *out);

// # Safety
// `s` must be null or come from this library and not be used afterwards.
void hgw_string_free(char *s);

// Eigendecomposition of the graph Laplacian.
//
// # Safety
// `graph` must be a live handle and `out` a valid pointer.
enum HgwStatus hgw_spectrum_new(const struct HgwGraph *graph, struct HgwSpectrum **out);

// # Safety
// `spectrum` must come from [`hgw_spectrum_new`] and not be used afterwards.
void hgw_spectrum_free(struct HgwSpectrum *spectrum);

// Eigenvalues in ascending order; `buf` needs `N` slots.
//
// # Safety
// `spectrum` must be a live handle and `buf` valid for `len` doubles.
enum HgwStatus hgw_spectrum_eigenvalues(const struct HgwSpectrum *spectrum,
                                        double *buf,
                                        size_t len);

// Heat kernel `H_t`, row-major; `buf` needs `N·N` slots.
//
// # Safety
// `spectrum` must be a live handle and `buf` valid for `len` doubles.
enum HgwStatus hgw_heat_kernel(const struct HgwSpectrum *spectrum,
                               double t,
                               double *buf,
                               size_t len);

// Wavelet atom centred at vertex `x` at scale `s`; `buf` needs `N` slots.
//
// # Safety
// `spectrum` must be a live handle and `buf` valid for `len` doubles.
enum HgwStatus hgw_wavelet_atom(const struct HgwSpectrum *spectrum,
                                double s,
                                size_t x,
                                double *buf,
                                size_t len);

// Mean diffusion time of every vertex; `buf` needs `N` slots.
//
// # Safety
// `spectrum` must be a live handle and `buf` valid for `len` doubles.
enum HgwStatus hgw_mdt(const struct HgwSpectrum *spectrum, double *buf, size_t len);

// Information centrality of every vertex; `buf` needs `N` slots.
//
// # Safety
// `spectrum` must be a live handle and `buf` valid for `len` doubles.
enum HgwStatus hgw_information_centrality(const struct HgwSpectrum *spectrum,
                                          double *buf,
                                          size_t len);

// Index of the minimum-MDT vertex; ties go to the smallest label.
//
// # Safety
// `graph` must be a live handle and `out` a valid pointer.
enum HgwStatus hgw_select_leader(const struct HgwGraph *graph, size_t *out);

// Decay exponent for jump size `s`, time `t` and distance `r`.
//
// # Safety
// `out` must be a valid pointer.
enum HgwStatus hgw_zeta(double s, double t, double r, double *out);

// Heat-kernel decay bound `exp(-zeta)`.
//
// # Safety
// `out` must be a valid pointer.
enum HgwStatus hgw_heat_bound(double s, double t, double r, double *out);

// Wavelet decay bound at time `t`, distance `r`, jump size `s`, constant `c`.
//
// # Safety
// `out` must be a valid pointer.
enum HgwStatus hgw_derived_bound(double t, double r, double s, double c, double *out);

// Static description of a status code.
const char *hgw_status_str(enum HgwStatus status);

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *hgw_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HGW_H */
