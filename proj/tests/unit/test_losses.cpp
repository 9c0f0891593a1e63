#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "losses.hpp"
#include "oracles/oracles.hpp"
#include "support/support.hpp"

using namespace fda;

namespace {

PredictionMap uniform_map(std::size_t H, std::size_t W, std::size_t K) {
  return PredictionMap(H, W, K, std::vector<double>(H * W * K, 1.0 / static_cast<double>(K)));
}

PredictionMap one_hot(std::size_t H, std::size_t W, std::size_t K) {
  std::vector<double> v(H * W * K, 0.0);
  for (std::size_t p = 0; p < H * W; ++p) v[p * K + p % K] = 1.0;
  return PredictionMap(H, W, K, std::move(v));
}

}  // namespace

TEST_CASE("cross entropy") {
  SUBCASE("uniform prediction over 19 classes") {
    const auto pred = uniform_map(4, 5, 19);
    LabelMap labels(4, 5, 3);
    CHECK(std::abs(cross_entropy(pred, labels) - 2.9444389791664403) <= 1e-12);
  }
  SUBCASE("perfect prediction") {
    const auto pred = one_hot(3, 3, 4);
    LabelMap labels(3, 3);
    for (std::size_t p = 0; p < 9; ++p) labels[p] = static_cast<std::int32_t>(p % 4);
    CHECK(cross_entropy(pred, labels) == 0.0);
  }
  SUBCASE("zero probability is floored") {
    const auto pred = one_hot(1, 1, 2);
    LabelMap labels(1, 1, 1);
    CHECK(cross_entropy(pred, labels) == doctest::Approx(-std::log(1e-12)));
  }
  SUBCASE("ignored pixels drop out of the mean and the sum") {
    std::mt19937_64 rng(21);
    const PredictionMap pred(6, 7, 5, testing_support::random_probs(rng, 42, 5));
    LabelMap labels(6, 7);
    std::vector<int> ref(42);
    for (std::size_t p = 0; p < 42; ++p)
      ref[p] = labels[p] = (p % 3 == 0) ? kIgnoreLabel : static_cast<std::int32_t>(rng() % 5);
    const std::vector<double> probs(pred.probs().begin(), pred.probs().end());
    const double want = oracle::cross_entropy(probs, ref, 5);
    CHECK(cross_entropy(pred, labels) == doctest::Approx(want).epsilon(1e-12));
    CHECK(cross_entropy(pred, labels, Reduction::kSum) == doctest::Approx(want * 28).epsilon(1e-12));
  }
  SUBCASE("all ignored is an empty reduction") {
    const auto pred = uniform_map(2, 2, 3);
    const LabelMap labels(2, 2);
    try {
      cross_entropy(pred, labels);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEmptyReduction);
    }
  }
  SUBCASE("label out of range and size mismatch") {
    const auto pred = uniform_map(2, 2, 3);
    CHECK_THROWS_AS(cross_entropy(pred, LabelMap(2, 2, 3)), Error);
    CHECK_THROWS_AS(cross_entropy(pred, LabelMap(2, 3, 0)), Error);
  }
}

TEST_CASE("pixel entropy") {
  const auto e = pixel_entropy(PredictionMap(1, 2, 2, {0.9, 0.1, 0.5, 0.5}));
  CHECK(e[0] == doctest::Approx(0.3250829733914482).epsilon(1e-14));
  CHECK(e[1] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  for (double v : pixel_entropy(one_hot(3, 3, 5))) CHECK(v == 0.0);
}

TEST_CASE("Charbonnier penalty") {
  CHECK(charbonnier(0.0, 2.0) == 1e-12);
  CHECK(charbonnier(std::log(2.0), 2.0) == doctest::Approx(0.23083605949011124).epsilon(1e-14));
  CHECK(charbonnier(3.0, 0.5) == doctest::Approx(std::sqrt(9.000001)).epsilon(1e-14));
  // Larger eta weighs high-entropy pixels more heavily relative to low ones.
  const double ratio_low = charbonnier(1.0, 0.5) / charbonnier(0.1, 0.5);
  const double ratio_high = charbonnier(1.0, 2.0) / charbonnier(0.1, 2.0);
  CHECK(ratio_high > ratio_low);
  const double h = 1e-6;
  for (double x : {0.0, 0.3, 1.7})
    CHECK(charbonnier_derivative(x, 2.0) ==
          doctest::Approx((charbonnier(x + h, 2.0) - charbonnier(x - h, 2.0)) / (2 * h))
              .epsilon(1e-6));
}

TEST_CASE("robust entropy") {
  SUBCASE("one-hot map gives the floor exactly") {
    CHECK(robust_entropy(one_hot(5, 5, 19)) == 1e-12);
  }
  SUBCASE("matches the double-loop oracle") {
    std::mt19937_64 rng(22);
    for (double eta : {0.5, 1.0, 2.0, 3.0}) {
      const PredictionMap pred(9, 11, 7, testing_support::random_probs(rng, 99, 7, 2.0));
      const std::vector<double> probs(pred.probs().begin(), pred.probs().end());
      LossConfig cfg;
      cfg.eta = eta;
      CHECK(robust_entropy(pred, cfg) ==
            doctest::Approx(oracle::robust_entropy(probs, 7, eta)).epsilon(1e-13));
    }
  }
  SUBCASE("sum reduction scales by the pixel count") {
    const auto pred = uniform_map(3, 4, 6);
    LossConfig sum_cfg;
    sum_cfg.reduction = Reduction::kSum;
    CHECK(robust_entropy(pred, sum_cfg) ==
          doctest::Approx(12.0 * robust_entropy(pred)).epsilon(1e-14));
  }
  SUBCASE("rejects an unnormalized map and bad config") {
    const PredictionMap bad(1, 1, 2, {0.7, 0.7});
    CHECK_THROWS_AS(robust_entropy(bad), Error);
    LossConfig cfg;
    cfg.eta = 0.0;
    CHECK_THROWS_AS(robust_entropy(uniform_map(1, 1, 2), cfg), Error);
  }
}

TEST_CASE("robust entropy gradient matches finite differences") {
  std::mt19937_64 rng(23);
  const PredictionMap pred(3, 4, 5, testing_support::random_probs(rng, 12, 5));
  const auto grad = robust_entropy_gradient(pred);
  std::vector<double> probs(pred.probs().begin(), pred.probs().end());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double h = 1e-6 * std::max(probs[i], 1e-3);
    const double saved = probs[i];
    probs[i] = saved + h;
    const double up = robust_entropy_raw(probs, 5);
    probs[i] = saved - h;
    const double down = robust_entropy_raw(probs, 5);
    probs[i] = saved;
    const double fd = (up - down) / (2 * h);
    CHECK(std::abs(fd - grad[i]) <= 1e-3 * std::max(std::abs(fd), 1e-8));
  }
}

TEST_CASE("combined and self-training objectives") {
  CHECK(combined_loss(2.0, 10.0) == doctest::Approx(2.05));
  LossConfig cfg;
  cfg.lambda_ent = 0.0;
  CHECK(combined_loss(2.0, 10.0, cfg) == 2.0);
  CHECK(sst_loss(2.0, 10.0, 1.5) == doctest::Approx(3.55));
  CHECK_THROWS_AS(combined_loss(std::nan(""), 1.0), Error);
  cfg.lambda_ent = -1.0;
  CHECK_THROWS_AS(combined_loss(1.0, 1.0, cfg), Error);
}
