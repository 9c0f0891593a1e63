#include "losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace fda {

namespace {

// Neumaier-compensated sum accumulated in a fixed order, so repeated runs
// agree bit-for-bit.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double reduce(const CompensatedSum& sum, std::size_t count, Reduction reduction) {
  return reduction == Reduction::kMean ? sum.value() / static_cast<double>(count) : sum.value();
}

double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(std::max(v, kProbabilityFloor));
  return h;
}

}  // namespace

void LossConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw invalid_argument("eta must be positive");
  if (!(lambda_ent >= 0.0) || !std::isfinite(lambda_ent))
    throw invalid_argument("lambda_ent must be non-negative");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw invalid_argument("epsilon must be non-negative");
}

double cross_entropy(const PredictionMap& pred, const LabelMap& labels, Reduction reduction) {
  if (!labels.same_dims(pred.height(), pred.width()))
    throw dimension_mismatch("prediction and label maps differ in size");
  pred.validate();
  labels.validate(pred.classes());
  CompensatedSum sum;
  std::size_t valid = 0;
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    const std::int32_t y = labels[p];
    if (y == kIgnoreLabel) continue;
    sum.add(-std::log(std::max(pred.at(p, static_cast<std::size_t>(y)), kProbabilityFloor)));
    ++valid;
  }
  if (valid == 0)
    throw Error(ErrorCode::kEmptyReduction, "cross_entropy: every pixel is ignored");
  return reduce(sum, valid, reduction);
}

std::vector<double> pixel_entropy(const PredictionMap& pred) {
  pred.validate();
  std::vector<double> out(pred.pixel_count());
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) out[p] = entropy_of(pred.pixel(p));
  return out;
}

double charbonnier(double x, double eta, double epsilon) {
  return std::pow(x * x + epsilon * epsilon, eta);
}

double charbonnier_derivative(double x, double eta, double epsilon) {
  return eta * std::pow(x * x + epsilon * epsilon, eta - 1.0) * 2.0 * x;
}

double robust_entropy(const PredictionMap& pred, const LossConfig& cfg) {
  pred.validate();
  return robust_entropy_raw(pred.probs(), pred.classes(), cfg);
}

double robust_entropy_raw(std::span<const double> probs, std::size_t classes,
                          const LossConfig& cfg) {
  cfg.validate();
  if (classes == 0 || probs.empty() || probs.size() % classes != 0)
    throw invalid_argument("robust_entropy: probability count is not a multiple of the classes");
  for (double v : probs)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw invalid_argument("robust_entropy: probabilities must be finite and non-negative");
  const std::size_t pixels = probs.size() / classes;
  CompensatedSum sum;
  for (std::size_t p = 0; p < pixels; ++p)
    sum.add(charbonnier(entropy_of(probs.subspan(p * classes, classes)), cfg.eta, cfg.epsilon));
  return reduce(sum, pixels, cfg.reduction);
}

std::vector<double> robust_entropy_gradient(const PredictionMap& pred, const LossConfig& cfg) {
  cfg.validate();
  const std::size_t K = pred.classes();
  std::vector<double> grad(pred.probs().size(), 0.0);
  const double norm =
      cfg.reduction == Reduction::kMean ? 1.0 / static_cast<double>(pred.pixel_count()) : 1.0;
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    const auto probs = pred.pixel(p);
    const double outer = norm * charbonnier_derivative(entropy_of(probs), cfg.eta, cfg.epsilon);
    for (std::size_t k = 0; k < K; ++k) {
      const double v = probs[k];
      // d(-v log v)/dv; below the floor the log term is a constant.
      const double dh = v > kProbabilityFloor ? -(std::log(v) + 1.0)
                                              : (v > 0.0 ? -std::log(kProbabilityFloor) : 0.0);
      grad[p * K + k] = outer * dh;
    }
  }
  return grad;
}

double combined_loss(double source_ce, double target_entropy, const LossConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(source_ce) || !std::isfinite(target_entropy))
    throw invalid_argument("combined_loss: non-finite input");
  return source_ce + cfg.lambda_ent * target_entropy;
}

double sst_loss(double source_ce, double target_entropy, double pseudo_ce, const LossConfig& cfg) {
  if (!std::isfinite(pseudo_ce)) throw invalid_argument("sst_loss: non-finite input");
  return combined_loss(source_ce, target_entropy, cfg) + pseudo_ce;
}

}  // namespace fda
