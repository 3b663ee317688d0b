#ifndef GSNMF_H
#define GSNMF_H

/*
 * C interface to the deconvolution library. Every object is an opaque handle
 * released with its *_free function. Functions that can fail return a
 * gsnmf_status; the message of the most recent failure on the calling thread
 * is available from gsnmf_last_error().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GSNMF_API __declspec(dllexport)
#else
#define GSNMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gsnmf_status {
    GSNMF_OK = 0,
    GSNMF_ERR_PARAMETER = 1,
    GSNMF_ERR_DOMAIN = 2,
    GSNMF_ERR_PARSE = 3,
    GSNMF_ERR_NUMERIC = 4,
    GSNMF_ERR_CLUSTERING = 5,
    GSNMF_ERR_IO = 6,
    GSNMF_ERR_INTERNAL = 7
} gsnmf_status;

GSNMF_API const char* gsnmf_version(void);
GSNMF_API const char* gsnmf_status_name(gsnmf_status status);
/* Empty string when the last call on this thread succeeded. */
GSNMF_API const char* gsnmf_last_error(void);

/* 64-bit FNV-1a digest of a file as 16 hex digits, written to out[17]. */
GSNMF_API gsnmf_status gsnmf_file_digest(const char* path, char out[17]);

/* Creates the directory if needed and checks that it is writable. */
GSNMF_API gsnmf_status gsnmf_ensure_output_dir(const char* path);

/* ---- expression data ---- */

typedef struct gsnmf_dataset gsnmf_dataset;

/* allow_negative != 0 accepts negative entries (synthetic data with noise). */
GSNMF_API gsnmf_status gsnmf_dataset_load(const char* path, int allow_negative, gsnmf_dataset** out);
/* Row-major n_genes x n_samples values; ids default to gene_<i> and sample_<j>. */
GSNMF_API gsnmf_status gsnmf_dataset_from_values(const double* values, size_t n_genes, size_t n_samples,
                                                 int allow_negative, gsnmf_dataset** out);
GSNMF_API void gsnmf_dataset_free(gsnmf_dataset* dataset);
GSNMF_API size_t gsnmf_dataset_genes(const gsnmf_dataset* dataset);
GSNMF_API size_t gsnmf_dataset_samples(const gsnmf_dataset* dataset);
GSNMF_API gsnmf_status gsnmf_dataset_write(const gsnmf_dataset* dataset, const char* path);

typedef struct gsnmf_preprocess_options {
    double min_row_norm_quantile;
    double max_row_norm_quantile;
    int drop_zero_rows;
    size_t target_gene_count; /* 0: no cap */
} gsnmf_preprocess_options;

GSNMF_API void gsnmf_preprocess_options_init(gsnmf_preprocess_options* options);
GSNMF_API gsnmf_status gsnmf_dataset_preprocess(const gsnmf_dataset* dataset,
                                                const gsnmf_preprocess_options* options, gsnmf_dataset** out);

/* ---- deconvolution ---- */

typedef struct gsnmf_deconvolve_options {
    int k;
    double sigma;
    double lambda_tilde;
    double rho;
    double gamma;
    size_t markers_per_cluster; /* 0: automatic */
    double tol;
    int max_iter;
    uint64_t seed;
    const char* sparsify;        /* clustering graph: "dense", "knn:<m>", "threshold:<t>" */
    const char* penalty_graph;   /* graph used by the smoothness penalty */
    const char* marker_strategy; /* "medoid", "centroid", "max-mean-correlation" */
    int kmeans_restarts;
    int workers;
    int literal_dual_update;
} gsnmf_deconvolve_options;

typedef struct gsnmf_result gsnmf_result;

GSNMF_API void gsnmf_deconvolve_options_init(gsnmf_deconvolve_options* options);
GSNMF_API gsnmf_status gsnmf_deconvolve(const gsnmf_dataset* dataset, const gsnmf_deconvolve_options* options,
                                        gsnmf_result** out);
GSNMF_API void gsnmf_result_free(gsnmf_result* result);
GSNMF_API int gsnmf_result_converged(const gsnmf_result* result);
GSNMF_API int gsnmf_result_iterations(const gsnmf_result* result);
GSNMF_API double gsnmf_result_residue(const gsnmf_result* result);
GSNMF_API double gsnmf_result_silhouette(const gsnmf_result* result);
GSNMF_API int gsnmf_result_line_search_warnings(const gsnmf_result* result);
/* Row-major N x k signatures and k x n proportions; out must hold the full matrix. */
GSNMF_API gsnmf_status gsnmf_result_copy_c(const gsnmf_result* result, double* out);
GSNMF_API gsnmf_status gsnmf_result_copy_p(const gsnmf_result* result, double* out);
/* C.tsv, P.tsv, markers.tsv, embedding.tsv and diagnostics.jsonl inside dir. */
GSNMF_API gsnmf_status gsnmf_result_write(const gsnmf_result* result, const char* dir);

/* ---- clustering only ---- */

typedef struct gsnmf_cluster_options {
    int k;
    double sigma;
    uint64_t seed;
    const char* sparsify;
    int kmeans_restarts;
    int workers;
} gsnmf_cluster_options;

typedef struct gsnmf_clustering gsnmf_clustering;

GSNMF_API void gsnmf_cluster_options_init(gsnmf_cluster_options* options);
GSNMF_API gsnmf_status gsnmf_cluster(const gsnmf_dataset* dataset, const gsnmf_cluster_options* options,
                                     gsnmf_clustering** out);
GSNMF_API void gsnmf_clustering_free(gsnmf_clustering* clustering);
GSNMF_API double gsnmf_clustering_silhouette(const gsnmf_clustering* clustering);
/* Labels 1..k, one per gene. */
GSNMF_API gsnmf_status gsnmf_clustering_copy_labels(const gsnmf_clustering* clustering, int* out);
/* labels.tsv, embedding.tsv and eigenvalues.tsv inside dir. */
GSNMF_API gsnmf_status gsnmf_clustering_write(const gsnmf_clustering* clustering, const char* dir);

/* ---- synthetic data ---- */

typedef struct gsnmf_synth_options {
    size_t n_genes;
    size_t n_samples;
    int k;
    const size_t* split; /* k + 1 entries, or NULL for an equal split */
    size_t split_len;
    double ndr;
    double marker_tightness;
    uint64_t seed;
    int clip_negative;
} gsnmf_synth_options;

typedef struct gsnmf_truth gsnmf_truth;

GSNMF_API void gsnmf_synth_options_init(gsnmf_synth_options* options);
GSNMF_API gsnmf_status gsnmf_synth(const gsnmf_synth_options* options, gsnmf_truth** out);
GSNMF_API void gsnmf_truth_free(gsnmf_truth* truth);
GSNMF_API double gsnmf_truth_achieved_ndr(const gsnmf_truth* truth);
/* A copy of the generated expression matrix. */
GSNMF_API gsnmf_status gsnmf_truth_dataset(const gsnmf_truth* truth, gsnmf_dataset** out);
/* G.tsv, C_true.tsv, P_true.tsv and labels.tsv inside dir. */
GSNMF_API gsnmf_status gsnmf_truth_write(const gsnmf_truth* truth, const char* dir);

/* ---- benchmark ---- */

typedef struct gsnmf_bench_options {
    size_t n_genes;
    size_t n_samples;
    int k;
    const size_t* split;
    size_t split_len;
    const double* ndrs;
    size_t n_ndrs;
    const uint64_t* seeds;
    size_t n_seeds;
    double marker_tightness;
    double sigma;
    double lambda_tilde;
    double rho;
    double gamma;
    double tol;
    int max_iter;
    size_t markers_per_cluster;
    const char* sparsify;
    const char* penalty_graph;
    int kmeans_restarts;
    int workers;
    int write_runs; /* per-run factor, marker and diagnostics files */
} gsnmf_bench_options;

typedef struct gsnmf_bench_row {
    double ndr;
    uint64_t seed;
    double achieved_ndr;
    double err_c;
    double err_p;
    double residue;
    double raw_err_c;
    double raw_err_p;
    int iterations;
    int converged;
    double marker_precision;
} gsnmf_bench_row;

typedef struct gsnmf_bench_report gsnmf_bench_report;

GSNMF_API void gsnmf_bench_options_init(gsnmf_bench_options* options);
/* Writes runs.tsv, report.tsv (means per NDR) and, if requested, runs/<ndr>_<seed>/ into dir. */
GSNMF_API gsnmf_status gsnmf_bench(const gsnmf_bench_options* options, const char* dir, gsnmf_bench_report** out);
GSNMF_API void gsnmf_bench_report_free(gsnmf_bench_report* report);
GSNMF_API size_t gsnmf_bench_report_size(const gsnmf_bench_report* report);
GSNMF_API gsnmf_status gsnmf_bench_report_row(const gsnmf_bench_report* report, size_t index, gsnmf_bench_row* out);

#ifdef __cplusplus
}
#endif

#endif
