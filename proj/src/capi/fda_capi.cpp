#include "fda/fda.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <json.hpp>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ensemble.hpp"
#include "error.hpp"
#include "image_io.hpp"
#include "job.hpp"
#include "losses.hpp"
#include "manifest.hpp"
#include "tensor_io.hpp"
#include "transfer.hpp"
#include "validate.hpp"

struct fda_image {
  fda::RasterImage value;
};
struct fda_prediction {
  fda::PredictionMap value;
};
struct fda_labels {
  fda::LabelMap value;
};
struct fda_pseudo_result {
  fda::PseudoLabelResult value;
  std::vector<fda_labels> labels;
};
struct fda_miou_result {
  fda::MiouResult value;
};
struct fda_manifest {
  fda::DatasetManifest value;
  std::string root;
};
struct fda_job {
  fda::AdaptJob value;
};

namespace {

thread_local std::string last_error;

fda_status to_status(fda::ErrorCode code) {
  switch (code) {
    case fda::ErrorCode::kInvalidArgument:
      return FDA_ERR_INVALID_ARGUMENT;
    case fda::ErrorCode::kDimensionMismatch:
      return FDA_ERR_DIMENSION_MISMATCH;
    case fda::ErrorCode::kEmptyReduction:
      return FDA_ERR_EMPTY_REDUCTION;
    case fda::ErrorCode::kIo:
      return FDA_ERR_IO;
    case fda::ErrorCode::kInternal:
      return FDA_ERR_INTERNAL;
  }
  return FDA_ERR_INTERNAL;
}

fda_status fail(fda_status status, const char* what) {
  last_error = what;
  return status;
}

// Runs `body`, translating exceptions into status codes. Nothing escapes the
// C boundary.
template <typename F>
fda_status guarded(F&& body) {
  try {
    body();
    return FDA_OK;
  } catch (const fda::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(FDA_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FDA_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw fda::invalid_argument(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

char* dup_string_nothrow(const std::string& s) noexcept {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fda::TransferOptions options_from(unsigned flags) {
  return fda::TransferOptions{(flags & FDA_TRANSFER_STRICT_ZERO) != 0,
                              (flags & FDA_TRANSFER_NO_CLAMP) == 0};
}

fda::LossConfig loss_config_from(const fda_loss_config* cfg) {
  fda::LossConfig c;
  if (cfg != nullptr) {
    c.eta = cfg->eta;
    c.lambda_ent = cfg->lambda_ent;
    c.epsilon = cfg->epsilon;
    c.reduction = cfg->reduction == FDA_REDUCTION_SUM ? fda::Reduction::kSum : fda::Reduction::kMean;
  }
  return c;
}

fda::Reduction reduction_from(fda_reduction r) {
  return r == FDA_REDUCTION_SUM ? fda::Reduction::kSum : fda::Reduction::kMean;
}

void fill_info(fda_transfer_info* info, const fda::TransferResult& r) {
  if (info == nullptr) return;
  info->beta = r.beta;
  info->max_imaginary_residual = r.max_imaginary_residual;
  info->clamp_count = r.clamp_count;
}

std::vector<fda::PredictionMap> collect(const fda_prediction* const* preds, size_t count) {
  require(preds != nullptr || count == 0, "prediction list is null");
  std::vector<fda::PredictionMap> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    require(preds[i] != nullptr, "prediction list contains a null handle");
    out.push_back(preds[i]->value);
  }
  return out;
}

std::vector<fda::LabelMap> collect(const fda_labels* const* labels, size_t count) {
  require(labels != nullptr || count == 0, "label list is null");
  std::vector<fda::LabelMap> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    require(labels[i] != nullptr, "label list contains a null handle");
    out.push_back(labels[i]->value);
  }
  return out;
}

}  // namespace

extern "C" {

const char* fda_version(void) { return "1.0.0"; }

const char* fda_last_error(void) { return last_error.c_str(); }

const char* fda_status_name(fda_status status) {
  switch (status) {
    case FDA_OK:
      return "ok";
    case FDA_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case FDA_ERR_DIMENSION_MISMATCH:
      return "dimension mismatch";
    case FDA_ERR_EMPTY_REDUCTION:
      return "empty reduction";
    case FDA_ERR_IO:
      return "i/o error";
    case FDA_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void fda_string_free(char* s) { std::free(s); }

/* images */

fda_status fda_image_create(size_t height, size_t width, size_t channels, const double* samples,
                            fda_image** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    std::vector<double> values(height * width * channels, 0.0);
    if (samples != nullptr) values.assign(samples, samples + values.size());
    *out = new fda_image{fda::RasterImage(height, width, channels, std::move(values))};
  });
}

fda_status fda_image_load(const char* path, fda_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path or out is null");
    *out = new fda_image{fda::load_image(path)};
  });
}

fda_status fda_image_save_png(const fda_image* image, const char* path) {
  return guarded([&] {
    require(image != nullptr && path != nullptr, "image or path is null");
    fda::save_png(path, image->value);
  });
}

void fda_image_destroy(fda_image* image) { delete image; }
size_t fda_image_height(const fda_image* image) { return image ? image->value.height() : 0; }
size_t fda_image_width(const fda_image* image) { return image ? image->value.width() : 0; }
size_t fda_image_channels(const fda_image* image) { return image ? image->value.channels() : 0; }
const double* fda_image_data(const fda_image* image) {
  return image ? image->value.samples().data() : nullptr;
}

/* spectral transfer */

fda_status fda_spectral_transfer(const fda_image* source, const fda_image* target, double beta,
                                 unsigned flags, fda_image** out, fda_transfer_info* info) {
  return guarded([&] {
    require(source != nullptr && target != nullptr && out != nullptr, "null argument");
    fda::TransferResult r =
        fda::spectral_transfer(source->value, target->value, beta, options_from(flags));
    fill_info(info, r);
    *out = new fda_image{std::move(r.adapted)};
  });
}

fda_status fda_multi_beta_transfer(const fda_image* source, const fda_image* target,
                                   const double* betas, size_t count, unsigned flags,
                                   fda_image** outs, fda_transfer_info* infos) {
  return guarded([&] {
    require(source != nullptr && target != nullptr && betas != nullptr && outs != nullptr,
            "null argument");
    auto results = fda::multi_beta_transfer(source->value, target->value,
                                            std::span<const double>(betas, count),
                                            options_from(flags));
    std::vector<fda_image*> made;
    try {
      for (auto& r : results) made.push_back(new fda_image{std::move(r.adapted)});
    } catch (...) {
      for (auto* m : made) delete m;
      throw;
    }
    for (size_t i = 0; i < count; ++i) {
      outs[i] = made[i];
      if (infos != nullptr) fill_info(&infos[i], results[i]);
    }
  });
}

fda_status fda_mask_popcount(size_t height, size_t width, double beta, size_t* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = fda::build_mask(height, width, beta).popcount();
  });
}

fda_status fda_swapped_energy(const fda_image* source, const fda_image* target, double beta,
                              double* out) {
  return guarded([&] {
    require(source != nullptr && target != nullptr && out != nullptr, "null argument");
    const auto pair = fda::prepare_pair(source->value, target->value);
    *out = fda::swapped_energy(
        pair, fda::build_mask(source->value.height(), source->value.width(), beta));
  });
}

/* prediction and label maps */

fda_status fda_prediction_create(size_t height, size_t width, size_t classes, const double* probs,
                                 fda_prediction** out) {
  return guarded([&] {
    require(out != nullptr && probs != nullptr, "null argument");
    std::vector<double> values(probs, probs + height * width * classes);
    *out = new fda_prediction{fda::PredictionMap(height, width, classes, std::move(values))};
  });
}

fda_status fda_prediction_read(const char* path, fda_prediction** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new fda_prediction{fda::read_prediction(path)};
  });
}

fda_status fda_prediction_write(const fda_prediction* pred, const char* path) {
  return guarded([&] {
    require(pred != nullptr && path != nullptr, "null argument");
    fda::write_prediction(path, pred->value);
  });
}

void fda_prediction_destroy(fda_prediction* pred) { delete pred; }
size_t fda_prediction_height(const fda_prediction* p) { return p ? p->value.height() : 0; }
size_t fda_prediction_width(const fda_prediction* p) { return p ? p->value.width() : 0; }
size_t fda_prediction_classes(const fda_prediction* p) { return p ? p->value.classes() : 0; }
const double* fda_prediction_data(const fda_prediction* p) {
  return p ? p->value.probs().data() : nullptr;
}

fda_status fda_labels_create(size_t height, size_t width, const int32_t* labels, fda_labels** out) {
  return guarded([&] {
    require(out != nullptr && labels != nullptr, "null argument");
    std::vector<std::int32_t> values(labels, labels + height * width);
    *out = new fda_labels{fda::LabelMap(height, width, std::move(values))};
  });
}

fda_status fda_labels_read(const char* path, fda_labels** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new fda_labels{fda::read_labels(path)};
  });
}

fda_status fda_labels_write(const fda_labels* labels, const char* path) {
  return guarded([&] {
    require(labels != nullptr && path != nullptr, "null argument");
    fda::write_labels(path, labels->value);
  });
}

fda_status fda_labels_write_png(const fda_labels* labels, const char* path) {
  return guarded([&] {
    require(labels != nullptr && path != nullptr, "null argument");
    const auto& l = labels->value;
    std::vector<std::uint8_t> pixels(l.pixel_count());
    for (size_t i = 0; i < pixels.size(); ++i) {
      if (l[i] < 0 || l[i] > 255) throw fda::invalid_argument("label does not fit in 8 bits");
      pixels[i] = static_cast<std::uint8_t>(l[i]);
    }
    fda::save_png_u8(path, l.height(), l.width(), 1, pixels);
  });
}

void fda_labels_destroy(fda_labels* labels) { delete labels; }
size_t fda_labels_height(const fda_labels* l) { return l ? l->value.height() : 0; }
size_t fda_labels_width(const fda_labels* l) { return l ? l->value.width() : 0; }
const int32_t* fda_labels_data(const fda_labels* l) {
  return l ? l->value.labels().data() : nullptr;
}

/* losses */

fda_loss_config fda_loss_config_default(void) {
  const fda::LossConfig c;
  return fda_loss_config{c.eta, c.lambda_ent, c.epsilon, FDA_REDUCTION_MEAN};
}

fda_status fda_cross_entropy(const fda_prediction* pred, const fda_labels* labels,
                             fda_reduction reduction, double* out) {
  return guarded([&] {
    require(pred != nullptr && labels != nullptr && out != nullptr, "null argument");
    *out = fda::cross_entropy(pred->value, labels->value, reduction_from(reduction));
  });
}

fda_status fda_pixel_entropy(const fda_prediction* pred, double* out, size_t out_len) {
  return guarded([&] {
    require(pred != nullptr && out != nullptr, "null argument");
    require(out_len >= pred->value.pixel_count(), "output buffer too small");
    const auto h = fda::pixel_entropy(pred->value);
    std::memcpy(out, h.data(), h.size() * sizeof(double));
  });
}

double fda_charbonnier(double x, double eta) { return fda::charbonnier(x, eta); }

fda_status fda_robust_entropy(const fda_prediction* pred, const fda_loss_config* cfg,
                              double* out) {
  return guarded([&] {
    require(pred != nullptr && out != nullptr, "null argument");
    *out = fda::robust_entropy(pred->value, loss_config_from(cfg));
  });
}

fda_status fda_combined_loss(double source_ce, double target_entropy, const fda_loss_config* cfg,
                             double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = fda::combined_loss(source_ce, target_entropy, loss_config_from(cfg));
  });
}

fda_status fda_sst_loss(double source_ce, double target_entropy, double pseudo_ce,
                        const fda_loss_config* cfg, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = fda::sst_loss(source_ce, target_entropy, pseudo_ce, loss_config_from(cfg));
  });
}

/* ensembling and evaluation */

fda_ensemble_config fda_ensemble_config_default(void) {
  const fda::EnsembleConfig c;
  return fda_ensemble_config{c.top_fraction, c.confidence_floor, FDA_SCOPE_PER_CLASS_OVER_BATCH};
}

fda_status fda_mean_prediction(const fda_prediction* const* preds, size_t count,
                               fda_prediction** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    const auto maps = collect(preds, count);
    *out = new fda_prediction{fda::mean_prediction(maps)};
  });
}

fda_status fda_argmax_labels(const fda_prediction* pred, fda_labels** out) {
  return guarded([&] {
    require(pred != nullptr && out != nullptr, "null argument");
    *out = new fda_labels{fda::argmax_labels(pred->value)};
  });
}

fda_status fda_pseudo_labels(const fda_prediction* const* mean_preds, size_t count,
                             const fda_ensemble_config* cfg, fda_pseudo_result** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    fda::EnsembleConfig c;
    if (cfg != nullptr) {
      c.top_fraction = cfg->top_fraction;
      c.confidence_floor = cfg->confidence_floor;
      c.scope = cfg->scope == FDA_SCOPE_PER_IMAGE ? fda::ThresholdScope::kPerImage
                                                  : fda::ThresholdScope::kPerClassOverBatch;
    }
    const auto maps = collect(mean_preds, count);
    auto result = std::make_unique<fda_pseudo_result>();
    result->value = fda::pseudo_labels(maps, c);
    for (auto& l : result->value.labels) result->labels.push_back(fda_labels{l});
    *out = result.release();
  });
}

void fda_pseudo_result_destroy(fda_pseudo_result* result) { delete result; }
size_t fda_pseudo_result_count(const fda_pseudo_result* r) { return r ? r->labels.size() : 0; }
size_t fda_pseudo_result_classes(const fda_pseudo_result* r) {
  return r ? r->value.kept_fraction.size() : 0;
}
const fda_labels* fda_pseudo_result_labels(const fda_pseudo_result* r, size_t index) {
  return (r && index < r->labels.size()) ? &r->labels[index] : nullptr;
}
double fda_pseudo_result_kept_fraction(const fda_pseudo_result* r, size_t k) {
  return (r && k < r->value.kept_fraction.size()) ? r->value.kept_fraction[k] : 0.0;
}
double fda_pseudo_result_mean_confidence(const fda_pseudo_result* r, size_t k) {
  return (r && k < r->value.mean_confidence.size()) ? r->value.mean_confidence[k] : 0.0;
}

fda_status fda_compute_miou(const fda_labels* const* preds, const fda_labels* const* gts,
                            size_t count, size_t classes, fda_miou_result** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    const auto p = collect(preds, count);
    const auto g = collect(gts, count);
    *out = new fda_miou_result{fda::compute_miou(p, g, classes)};
  });
}

void fda_miou_result_destroy(fda_miou_result* result) { delete result; }
double fda_miou_result_mean(const fda_miou_result* r) { return r ? r->value.mean_iou : 0.0; }
int fda_miou_result_iou(const fda_miou_result* r, size_t k, double* iou) {
  if (r == nullptr || k >= r->value.iou.size() || !r->value.iou[k]) return 0;
  if (iou != nullptr) *iou = *r->value.iou[k];
  return 1;
}

/* datasets and jobs */

fda_status fda_manifest_build(const char* root, const char* pattern, fda_manifest** out) {
  return guarded([&] {
    require(root != nullptr && out != nullptr, "null argument");
    auto m = fda::build_manifest(root, pattern != nullptr ? pattern : "*");
    std::string r = m.root.generic_string();
    *out = new fda_manifest{std::move(m), std::move(r)};
  });
}

fda_status fda_manifest_load(const char* path, fda_manifest** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto m = fda::load_manifest(path);
    std::string r = m.root.generic_string();
    *out = new fda_manifest{std::move(m), std::move(r)};
  });
}

fda_status fda_manifest_save(const fda_manifest* manifest, const char* path) {
  return guarded([&] {
    require(manifest != nullptr && path != nullptr, "null argument");
    fda::save_manifest(path, manifest->value);
  });
}

void fda_manifest_destroy(fda_manifest* manifest) { delete manifest; }
size_t fda_manifest_count(const fda_manifest* m) { return m ? m->value.size() : 0; }
const char* fda_manifest_entry(const fda_manifest* m, size_t index) {
  return (m && index < m->value.size()) ? m->value.entries[index].path.c_str() : nullptr;
}
const char* fda_manifest_root(const fda_manifest* m) { return m ? m->root.c_str() : nullptr; }

fda_status fda_pair_stream(fda_pairing mode, uint64_t seed, size_t n_source, size_t n_target,
                           unsigned repeats, size_t* targets, size_t count) {
  return guarded([&] {
    require(targets != nullptr, "targets is null");
    require(count >= n_source * repeats, "targets buffer too small");
    const auto pairs = fda::pair_stream(
        mode == FDA_PAIRING_FIXED_CYCLE ? fda::PairingMode::kFixedCycle
                                        : fda::PairingMode::kRandom,
        seed, n_source, n_target, repeats);
    for (size_t i = 0; i < pairs.size(); ++i) targets[i] = pairs[i].target;
  });
}

fda_status fda_job_from_json(const char* json, fda_job** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    fda::AdaptJob job = fda::job_from_json(json);
    job.validate();
    *out = new fda_job{std::move(job)};
  });
}

fda_status fda_job_to_json(const fda_job* job, char** out) {
  return guarded([&] {
    require(job != nullptr && out != nullptr, "null argument");
    *out = dup_string(fda::job_to_json(job->value));
  });
}

void fda_job_destroy(fda_job* job) { delete job; }

fda_status fda_job_run(const fda_job* job, char** report_json) {
  if (report_json != nullptr) *report_json = nullptr;
  fda::JobReport report;
  const fda_status status = guarded([&] {
    require(job != nullptr, "job is null");
    report = fda::execute_adapt_job(job->value);
    if (report_json != nullptr) *report_json = dup_string(report.to_json());
  });
  if (status != FDA_OK) return status;
  if (report.outputs == 0) {
    const std::string first = report.items.empty() ? "no items" : report.items.front().error;
    last_error = "every item failed; first error: " + first;
    return FDA_ERR_IO;
  }
  return FDA_OK;
}

fda_status fda_sweep_run(const char* json, char** report_json) {
  if (report_json != nullptr) *report_json = nullptr;
  return guarded([&] {
    require(json != nullptr, "json is null");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw fda::invalid_argument(std::string("sweep config is not valid JSON: ") + e.what());
    }
    fda::SweepJob sweep;
    try {
      sweep.source = j.at("source").get<std::string>();
      sweep.target = j.at("target").get<std::string>();
      sweep.betas = j.at("betas").get<std::vector<double>>();
      sweep.output_dir = j.at("output_dir").get<std::string>();
      sweep.strict_zero = j.value("strict_zero", false);
    } catch (const nlohmann::json::exception& e) {
      throw fda::invalid_argument(std::string("sweep config: ") + e.what());
    }
    const fda::SweepReport report = fda::run_sweep(sweep);
    if (report_json != nullptr) *report_json = dup_string(report.to_json());
  });
}

fda_status fda_validate_file(const char* path, const char* kind, char** message) {
  if (message != nullptr) *message = nullptr;
  std::string summary;
  const fda_status status = guarded([&] {
    require(path != nullptr, "path is null");
    summary = fda::validate_file(path, kind != nullptr ? kind : "auto");
  });
  if (message != nullptr) *message = dup_string_nothrow(status == FDA_OK ? summary : last_error);
  return status;
}

}  // extern "C"
