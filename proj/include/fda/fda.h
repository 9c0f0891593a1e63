/*
 * libfda: Fourier domain adaptation for image datasets.
 *
 * Plain C interface over the C++ core. Every object is an opaque handle owned
 * by the caller and released with the matching *_destroy function. Every
 * fallible call returns fda_status; on failure fda_last_error() describes the
 * problem for the calling thread until its next failing call.
 *
 * Images hold intensities on the [0, 255] scale as doubles, row-major,
 * channel last. Prediction maps hold per-pixel class probabilities, row-major,
 * class fastest. Label maps hold int32 class indices with FDA_IGNORE_LABEL
 * for unlabeled pixels.
 */
#ifndef FDA_FDA_H
#define FDA_FDA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FDA_BUILDING_LIBRARY)
#define FDA_API __declspec(dllexport)
#else
#define FDA_API __declspec(dllimport)
#endif
#else
#define FDA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fda_status {
  FDA_OK = 0,
  FDA_ERR_INVALID_ARGUMENT = 1,
  FDA_ERR_DIMENSION_MISMATCH = 2,
  FDA_ERR_EMPTY_REDUCTION = 3,
  FDA_ERR_IO = 4,
  FDA_ERR_INTERNAL = 5
} fda_status;

#define FDA_IGNORE_LABEL 255

FDA_API const char* fda_version(void);
FDA_API const char* fda_last_error(void);
FDA_API const char* fda_status_name(fda_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
FDA_API void fda_string_free(char* s);

/* ---- images ------------------------------------------------------------ */

typedef struct fda_image fda_image;

FDA_API fda_status fda_image_create(size_t height, size_t width, size_t channels,
                                    const double* samples, fda_image** out);
FDA_API fda_status fda_image_load(const char* path, fda_image** out);
FDA_API fda_status fda_image_save_png(const fda_image* image, const char* path);
FDA_API void fda_image_destroy(fda_image* image);
FDA_API size_t fda_image_height(const fda_image* image);
FDA_API size_t fda_image_width(const fda_image* image);
FDA_API size_t fda_image_channels(const fda_image* image);
/* Borrowed; valid until the image is destroyed. */
FDA_API const double* fda_image_data(const fda_image* image);

/* ---- spectral transfer ------------------------------------------------- */

enum {
  /* beta == 0 leaves the source unchanged instead of swapping the DC bin. */
  FDA_TRANSFER_STRICT_ZERO = 1u << 0,
  /* Keep the raw reconstruction instead of clamping to [0, 255]. */
  FDA_TRANSFER_NO_CLAMP = 1u << 1
};

typedef struct fda_transfer_info {
  double beta;
  double max_imaginary_residual;
  size_t clamp_count;
} fda_transfer_info;

/* Low-frequency amplitude of target replaces that of source; source phase is
 * kept. Source and target must have identical dimensions. */
FDA_API fda_status fda_spectral_transfer(const fda_image* source, const fda_image* target,
                                         double beta, unsigned flags, fda_image** out,
                                         fda_transfer_info* info);

/* outs and infos (nullable) must have room for count entries. */
FDA_API fda_status fda_multi_beta_transfer(const fda_image* source, const fda_image* target,
                                           const double* betas, size_t count, unsigned flags,
                                           fda_image** outs, fda_transfer_info* infos);

/* Number of bins set in the low-frequency mask for an H x W spectrum. */
FDA_API fda_status fda_mask_popcount(size_t height, size_t width, double beta, size_t* out);

/* Sum over masked bins of (|F_target| - |F_source|)^2. */
FDA_API fda_status fda_swapped_energy(const fda_image* source, const fda_image* target,
                                      double beta, double* out);

/* ---- prediction and label maps ----------------------------------------- */

typedef struct fda_prediction fda_prediction;
typedef struct fda_labels fda_labels;

FDA_API fda_status fda_prediction_create(size_t height, size_t width, size_t classes,
                                         const double* probs, fda_prediction** out);
FDA_API fda_status fda_prediction_read(const char* path, fda_prediction** out);
FDA_API fda_status fda_prediction_write(const fda_prediction* pred, const char* path);
FDA_API void fda_prediction_destroy(fda_prediction* pred);
FDA_API size_t fda_prediction_height(const fda_prediction* pred);
FDA_API size_t fda_prediction_width(const fda_prediction* pred);
FDA_API size_t fda_prediction_classes(const fda_prediction* pred);
FDA_API const double* fda_prediction_data(const fda_prediction* pred);

FDA_API fda_status fda_labels_create(size_t height, size_t width, const int32_t* labels,
                                     fda_labels** out);
/* Reads a label tensor (.json/.bin) or an 8-bit gray PNG. */
FDA_API fda_status fda_labels_read(const char* path, fda_labels** out);
FDA_API fda_status fda_labels_write(const fda_labels* labels, const char* path);
FDA_API fda_status fda_labels_write_png(const fda_labels* labels, const char* path);
FDA_API void fda_labels_destroy(fda_labels* labels);
FDA_API size_t fda_labels_height(const fda_labels* labels);
FDA_API size_t fda_labels_width(const fda_labels* labels);
FDA_API const int32_t* fda_labels_data(const fda_labels* labels);

/* ---- losses ------------------------------------------------------------ */

typedef enum fda_reduction { FDA_REDUCTION_MEAN = 0, FDA_REDUCTION_SUM = 1 } fda_reduction;

typedef struct fda_loss_config {
  double eta;
  double lambda_ent;
  double epsilon;
  fda_reduction reduction;
} fda_loss_config;

/* eta 2.0, lambda_ent 0.005, epsilon 0.001, mean reduction. */
FDA_API fda_loss_config fda_loss_config_default(void);

/* Returns FDA_ERR_EMPTY_REDUCTION when every label is ignored. */
FDA_API fda_status fda_cross_entropy(const fda_prediction* pred, const fda_labels* labels,
                                     fda_reduction reduction, double* out);
/* out receives height*width per-pixel entropies. */
FDA_API fda_status fda_pixel_entropy(const fda_prediction* pred, double* out, size_t out_len);
FDA_API double fda_charbonnier(double x, double eta);
FDA_API fda_status fda_robust_entropy(const fda_prediction* pred, const fda_loss_config* cfg,
                                      double* out);
FDA_API fda_status fda_combined_loss(double source_ce, double target_entropy,
                                     const fda_loss_config* cfg, double* out);
FDA_API fda_status fda_sst_loss(double source_ce, double target_entropy, double pseudo_ce,
                                const fda_loss_config* cfg, double* out);

/* ---- ensembling and evaluation ----------------------------------------- */

typedef enum fda_threshold_scope {
  FDA_SCOPE_PER_CLASS_OVER_BATCH = 0,
  FDA_SCOPE_PER_IMAGE = 1
} fda_threshold_scope;

typedef struct fda_ensemble_config {
  double top_fraction;
  double confidence_floor;
  fda_threshold_scope scope;
} fda_ensemble_config;

/* top_fraction 0.66, confidence_floor 0.9, per class over the batch. */
FDA_API fda_ensemble_config fda_ensemble_config_default(void);

FDA_API fda_status fda_mean_prediction(const fda_prediction* const* preds, size_t count,
                                       fda_prediction** out);
FDA_API fda_status fda_argmax_labels(const fda_prediction* pred, fda_labels** out);

typedef struct fda_pseudo_result fda_pseudo_result;

FDA_API fda_status fda_pseudo_labels(const fda_prediction* const* mean_preds, size_t count,
                                     const fda_ensemble_config* cfg, fda_pseudo_result** out);
FDA_API void fda_pseudo_result_destroy(fda_pseudo_result* result);
FDA_API size_t fda_pseudo_result_count(const fda_pseudo_result* result);
FDA_API size_t fda_pseudo_result_classes(const fda_pseudo_result* result);
/* Borrowed; valid until the result is destroyed. */
FDA_API const fda_labels* fda_pseudo_result_labels(const fda_pseudo_result* result, size_t index);
FDA_API double fda_pseudo_result_kept_fraction(const fda_pseudo_result* result, size_t k);
FDA_API double fda_pseudo_result_mean_confidence(const fda_pseudo_result* result, size_t k);

typedef struct fda_miou_result fda_miou_result;

FDA_API fda_status fda_compute_miou(const fda_labels* const* preds, const fda_labels* const* gts,
                                    size_t count, size_t classes, fda_miou_result** out);
FDA_API void fda_miou_result_destroy(fda_miou_result* result);
FDA_API double fda_miou_result_mean(const fda_miou_result* result);
/* Returns 0 when class k is absent from both predictions and ground truth. */
FDA_API int fda_miou_result_iou(const fda_miou_result* result, size_t k, double* iou);

/* ---- datasets and jobs ------------------------------------------------- */

typedef struct fda_manifest fda_manifest;

FDA_API fda_status fda_manifest_build(const char* root, const char* pattern, fda_manifest** out);
FDA_API fda_status fda_manifest_load(const char* path, fda_manifest** out);
FDA_API fda_status fda_manifest_save(const fda_manifest* manifest, const char* path);
FDA_API void fda_manifest_destroy(fda_manifest* manifest);
FDA_API size_t fda_manifest_count(const fda_manifest* manifest);
/* Relative path of entry i; borrowed. */
FDA_API const char* fda_manifest_entry(const fda_manifest* manifest, size_t index);
FDA_API const char* fda_manifest_root(const fda_manifest* manifest);

typedef enum fda_pairing { FDA_PAIRING_RANDOM = 0, FDA_PAIRING_FIXED_CYCLE = 1 } fda_pairing;

/* Writes count target indices for sources 0..n_source-1 (repeat r occupies
 * entries [r*n_source, (r+1)*n_source)). */
FDA_API fda_status fda_pair_stream(fda_pairing mode, uint64_t seed, size_t n_source,
                                   size_t n_target, unsigned repeats, size_t* targets,
                                   size_t count);

typedef struct fda_job fda_job;

/* Parses a JSON job config; see README for the schema. */
FDA_API fda_status fda_job_from_json(const char* json, fda_job** out);
FDA_API fda_status fda_job_to_json(const fda_job* job, char** out);
FDA_API void fda_job_destroy(fda_job* job);
/* Runs the job; report_json (nullable) receives the report even when the job
 * fails because every item failed. */
FDA_API fda_status fda_job_run(const fda_job* job, char** report_json);

/* JSON: {"source": path, "target": path, "betas": [...], "output_dir": path,
 *        "strict_zero": bool} */
FDA_API fda_status fda_sweep_run(const char* json, char** report_json);

/* Checks a file against the invariants of its kind and stops at the first
 * violation. kind is one of "auto" (or NULL), "tensor", "prediction",
 * "labels", "manifest", "job", "report", "image". message (nullable) receives a
 * one-line summary on success or the violated invariant on failure. */
FDA_API fda_status fda_validate_file(const char* path, const char* kind, char** message);

#ifdef __cplusplus
}
#endif

#endif /* FDA_FDA_H */
