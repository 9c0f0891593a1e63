#include "ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "error.hpp"

namespace fda {

void EnsembleConfig::validate() const {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw invalid_argument("top_fraction must lie in (0, 1]");
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0))
    throw invalid_argument("confidence_floor must lie in [0, 1]");
}

PredictionMap mean_prediction(std::span<const PredictionMap> preds) {
  if (preds.empty()) throw invalid_argument("mean_prediction needs at least one map");
  const PredictionMap& first = preds.front();
  for (const auto& p : preds) {
    if (!p.same_shape(first))
      throw dimension_mismatch("mean_prediction: maps differ in height, width, or class count");
    p.validate();
  }
  PredictionMap out(first.height(), first.width(), first.classes());
  auto acc = out.probs();
  for (const auto& p : preds) {
    const auto src = p.probs();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
  }
  const double m = static_cast<double>(preds.size());
  for (double& v : acc) v /= m;
  return out;
}

namespace {

struct Candidate {
  std::int32_t label;
  double confidence;
};

Candidate best_class(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return {static_cast<std::int32_t>(best), scores[best]};
}

void check_scores(const PredictionMap& pred) {
  if (pred.classes() > static_cast<std::size_t>(kIgnoreLabel))
    throw invalid_argument("class count must be at most 255");
  for (double v : pred.probs())
    if (!std::isfinite(v) || v < 0.0)
      throw invalid_argument("scores must be finite and non-negative");
}

}  // namespace

LabelMap argmax_labels(const PredictionMap& pred) {
  check_scores(pred);
  LabelMap out(pred.height(), pred.width());
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) out[p] = best_class(pred.pixel(p)).label;
  return out;
}

ConfidencePool::ConfidencePool(std::size_t classes) : per_class_(classes) {
  if (classes == 0 || classes > static_cast<std::size_t>(kIgnoreLabel))
    throw invalid_argument("class count must be in [1, 255]");
}

void ConfidencePool::add(const PredictionMap& pred) {
  if (pred.classes() != classes())
    throw dimension_mismatch("prediction class count differs from the pool");
  check_scores(pred);
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    const Candidate c = best_class(pred.pixel(p));
    per_class_[static_cast<std::size_t>(c.label)].push_back(c.confidence);
  }
}

void ConfidencePool::merge(const ConfidencePool& other) {
  if (other.classes() != classes()) throw dimension_mismatch("pools differ in class count");
  for (std::size_t k = 0; k < classes(); ++k)
    per_class_[k].insert(per_class_[k].end(), other.per_class_[k].begin(),
                         other.per_class_[k].end());
}

std::optional<double> ConfidencePool::rank_threshold(std::size_t k, double top_fraction) const {
  const auto& values = per_class_.at(k);
  if (values.empty()) return std::nullopt;
  const std::size_t n = values.size();
  // Snap products like 0.66 * 100 = 66.000000000000014 back onto the integer.
  const double want = top_fraction * static_cast<double>(n) - 1e-9;
  std::size_t keep = static_cast<std::size_t>(std::max(1.0, std::ceil(want)));
  keep = std::min(keep, n);
  std::vector<double> sorted = values;
  auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(keep - 1);
  std::nth_element(sorted.begin(), nth, sorted.end(), std::greater<>());
  return *nth;
}

PseudoLabelResult pseudo_labels(std::span<const PredictionMap> mean_preds,
                                const EnsembleConfig& cfg) {
  cfg.validate();
  if (mean_preds.empty()) throw invalid_argument("pseudo_labels needs at least one map");
  const std::size_t K = mean_preds.front().classes();
  for (const auto& p : mean_preds) {
    if (p.classes() != K) throw dimension_mismatch("maps in a batch differ in class count");
    p.validate();
  }

  PseudoLabelResult result;
  result.kept_fraction.assign(K, 0.0);
  result.mean_confidence.assign(K, 0.0);
  result.candidate_count.assign(K, 0);
  result.kept_count.assign(K, 0);
  std::vector<double> confidence_sum(K, 0.0);

  auto thresholds_for = [&](const ConfidencePool& pool) {
    std::vector<std::optional<double>> t(K);
    for (std::size_t k = 0; k < K; ++k) t[k] = pool.rank_threshold(k, cfg.top_fraction);
    return t;
  };

  std::vector<std::optional<double>> batch_thresholds;
  if (cfg.scope == ThresholdScope::kPerClassOverBatch) {
    ConfidencePool pool(K);
    for (const auto& p : mean_preds) pool.add(p);
    batch_thresholds = thresholds_for(pool);
  }

  result.labels.reserve(mean_preds.size());
  for (const auto& pred : mean_preds) {
    std::vector<std::optional<double>> local;
    if (cfg.scope == ThresholdScope::kPerImage) {
      ConfidencePool pool(K);
      pool.add(pred);
      local = thresholds_for(pool);
    }
    const auto& thresholds = cfg.scope == ThresholdScope::kPerImage ? local : batch_thresholds;

    LabelMap labels(pred.height(), pred.width());
    for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
      const Candidate c = best_class(pred.pixel(p));
      const auto k = static_cast<std::size_t>(c.label);
      ++result.candidate_count[k];
      const bool keep = c.confidence >= cfg.confidence_floor ||
                        (thresholds[k].has_value() && c.confidence >= *thresholds[k]);
      if (keep) {
        labels[p] = c.label;
        ++result.kept_count[k];
        confidence_sum[k] += c.confidence;
      }
    }
    result.labels.push_back(std::move(labels));
  }

  for (std::size_t k = 0; k < K; ++k) {
    if (result.candidate_count[k] > 0)
      result.kept_fraction[k] = static_cast<double>(result.kept_count[k]) /
                                static_cast<double>(result.candidate_count[k]);
    if (result.kept_count[k] > 0)
      result.mean_confidence[k] = confidence_sum[k] / static_cast<double>(result.kept_count[k]);
  }
  return result;
}

MiouResult compute_miou(std::span<const LabelMap> preds, std::span<const LabelMap> gts,
                        std::size_t classes) {
  if (classes == 0) throw invalid_argument("class count must be at least 1");
  if (preds.size() != gts.size())
    throw dimension_mismatch("prediction and ground-truth lists differ in length");
  MiouResult r;
  r.classes = classes;
  r.confusion.assign(classes * classes, 0);
  r.unpredicted.assign(classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const LabelMap& pred = preds[i];
    const LabelMap& gt = gts[i];
    if (!pred.same_dims(gt.height(), gt.width()))
      throw dimension_mismatch("prediction " + std::to_string(i) +
                               " differs in size from its ground truth");
    pred.validate(classes);
    gt.validate(classes);
    for (std::size_t p = 0; p < gt.pixel_count(); ++p) {
      const std::int32_t y = gt[p];
      if (y == kIgnoreLabel) continue;
      ++r.valid_pixels;
      const std::int32_t yhat = pred[p];
      if (yhat == kIgnoreLabel)
        ++r.unpredicted[static_cast<std::size_t>(y)];
      else
        ++r.confusion[static_cast<std::size_t>(y) * classes + static_cast<std::size_t>(yhat)];
    }
  }
  if (r.valid_pixels == 0) throw invalid_argument("compute_miou: no valid ground-truth pixels");

  r.iou.assign(classes, std::nullopt);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    const std::uint64_t tp = r.confusion[k * classes + k];
    std::uint64_t row = r.unpredicted[k];
    std::uint64_t col = 0;
    for (std::size_t j = 0; j < classes; ++j) {
      row += r.confusion[k * classes + j];
      col += r.confusion[j * classes + k];
    }
    const std::uint64_t uni = row + col - tp;  // TP + FN + FP
    if (uni == 0) continue;
    r.iou[k] = static_cast<double>(tp) / static_cast<double>(uni);
    sum += *r.iou[k];
    ++counted;
  }
  r.mean_iou = sum / static_cast<double>(counted);
  return r;
}

}  // namespace fda
