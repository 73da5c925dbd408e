/* affectfuse — multimodal emotion-expression recognition pipeline.
 *
 * C API over the C++ core. All pipeline stages operate file-to-file and take
 * a JSON options document (see README for per-stage schemas); numeric
 * kernels operate on caller buffers. Every call reports errors through the
 * context: on a non-AF_OK status, af_last_error() holds the message until
 * the next call on the same context. Contexts are not thread-safe; use one
 * per thread.
 */
#ifndef AFFECTFUSE_H
#define AFFECTFUSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AF_API __declspec(dllexport)
#else
#define AF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum af_status {
    AF_OK = 0,
    AF_ERR_VALIDATION = 1, /* bad input data or options */
    AF_ERR_RUNTIME = 2     /* processing failure */
} af_status;

typedef struct af_context af_context;

AF_API af_context* af_context_new(void);
AF_API void af_context_free(af_context* ctx);
AF_API const char* af_last_error(const af_context* ctx);
AF_API const char* af_version(void);

/* Pipeline stages. options_json is a JSON object; summary (when the pointer
 * is non-NULL) receives a malloc'd JSON summary string to release with
 * af_string_free. */
AF_API af_status af_synth(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_validate(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_goldstd(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_kappa(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_gazefeat(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_sync(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_train(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_eval(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_stats(af_context* ctx, const char* options_json, char** summary);
AF_API af_status af_report(af_context* ctx, const char* options_json, char** summary);

AF_API void af_string_free(char* s);

/* Numeric kernels. */

/* Cohen's kappa over two equal-length label sequences given as class ids. */
AF_API af_status af_cohen_kappa(af_context* ctx, const int32_t* a, const int32_t* b, size_t n,
                                double* kappa);

/* Centered median filter, truncated (symmetric) edge windows; width odd. */
AF_API af_status af_median_filter(af_context* ctx, const double* in, size_t n, int width,
                                  double* out);

/* min, max, mean, population SD, range, p25, p50, p75, IQR. */
AF_API af_status af_functionals(af_context* ctx, const double* series, size_t n, double out[9]);

/* Corrected repeated k-fold CV t-test on n paired differences. */
AF_API af_status af_corrected_ttest(af_context* ctx, const double* diffs, size_t n, double n_train,
                                    double n_test, double* t, double* p);

/* Two-stage adaptive FDR; reject[i] set to 1/0. */
AF_API af_status af_bky_fdr(af_context* ctx, const double* pvalues, size_t n, double q,
                            int32_t* reject);

/* Unweighted average recall of a row-major n_classes x n_classes confusion
 * matrix of counts. */
AF_API af_status af_uar(af_context* ctx, const double* confusion, size_t n_classes, double* out);

#ifdef __cplusplus
}
#endif

#endif /* AFFECTFUSE_H */
