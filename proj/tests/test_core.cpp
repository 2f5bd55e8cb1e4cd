#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lwa/core.hpp"

using namespace lwa;

namespace {

LwaModel lwa_model(std::vector<double> w, double b, std::vector<double> u, double b_prime) {
  LwaModel m;
  m.w = std::move(w);
  m.b = b;
  m.u = std::move(u);
  m.b_prime = b_prime;
  return m;
}

}  // namespace

TEST_CASE("score_h is the affine discriminant") {
  const std::vector<double> x{3.0, -4.0};
  CHECK(score_h(lwa_model({0, 0}, 0, {0, 0}, 0), x) == 0.0);
  CHECK(score_h(lwa_model({1, 2}, 0.5, {0, 0}, 0), std::vector<double>{1, 1}) == 3.5);
  CHECK(score_h(lwa_model({1, 0}, 0, {0, 0}, 0), x) == 3.0);

  SvmModel svm;
  svm.w = {1, 2};
  svm.b = 0.5;
  CHECK(score_h(svm, std::vector<double>{1, 1}) == 3.5);
}

TEST_CASE("score_r is the affine rejection function") {
  CHECK(score_r(lwa_model({0, 0}, 0, {0, 0}, 0), std::vector<double>{7, 8}) == 0.0);
  CHECK(score_r(lwa_model({0, 0}, 0, {-1, 0}, 1), std::vector<double>{2, 5}) == -1.0);
  for (double v : {-10.0, 0.0, 123.0}) {
    CHECK(score_r(lwa_model({0, 0}, 0, {0, 0}, -0.3), std::vector<double>{v, -v}) == -0.3);
  }
}

TEST_CASE("scores reject a dimension mismatch") {
  const LwaModel m = lwa_model({1, 2}, 0, {1, 2}, 0);
  CHECK_THROWS_AS(score_h(m, std::vector<double>{1}), InvalidInput);
  CHECK_THROWS_AS(score_r(m, std::vector<double>{1, 2, 3}), InvalidInput);
  CHECK_THROWS_AS(predict(m, std::vector<double>{}), InvalidInput);
}

TEST_CASE("predict applies the rejection and tie rules") {
  // Scores are set through the biases with zero weights.
  const std::vector<double> x{1.0};
  SUBCASE("confident positive is accepted") {
    const auto o = predict(lwa_model({0}, 2.0, {0}, 0.5), x);
    REQUIRE(o.accepted());
    CHECK(*o.label == Label::Abnormal);
    CHECK(o.h_score == 2.0);
    CHECK(*o.r_score == 0.5);
  }
  SUBCASE("negative r rejects") {
    const auto o = predict(lwa_model({0}, 2.0, {0}, -0.1), x);
    CHECK(o.rejected());
    CHECK(o.h_score == 2.0);
    CHECK(*o.r_score == -0.1);
  }
  SUBCASE("r exactly zero is accepted") {
    const auto o = predict(lwa_model({0}, -0.7, {0}, 0.0), x);
    REQUIRE(o.accepted());
    CHECK(*o.label == Label::Normal);
  }
  SUBCASE("h exactly zero predicts abnormal") {
    const auto o = predict(lwa_model({0}, 0.0, {0}, 1.0), x);
    REQUIRE(o.accepted());
    CHECK(*o.label == Label::Abnormal);
  }
  SUBCASE("svm never rejects") {
    SvmModel svm;
    svm.w = {-1.0};
    const auto o = predict(svm, x);
    REQUIRE(o.accepted());
    CHECK(*o.label == Label::Normal);
    CHECK_FALSE(o.r_score.has_value());
  }
}

TEST_CASE("property: predict never accepts when r < 0") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const LwaModel m = lwa_model({coef(gen), coef(gen), coef(gen)}, coef(gen), {coef(gen), coef(gen), coef(gen)},
                                 coef(gen));
    const std::vector<double> x{coef(gen), coef(gen), coef(gen)};
    const auto o = predict(m, x);
    CHECK(o.rejected() == (score_r(m, x) < 0.0));
  }
}

TEST_CASE("property: scores are linear without bias") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 1 + trial % 7;
    LwaModel m;
    m.w.resize(d);
    m.u.resize(d);
    std::vector<double> x1(d), x2(d), mix(d);
    for (std::size_t k = 0; k < d; ++k) {
      m.w[k] = coef(gen);
      m.u[k] = coef(gen);
      x1[k] = coef(gen);
      x2[k] = coef(gen);
    }
    const double a = unit(gen);
    for (std::size_t k = 0; k < d; ++k) mix[k] = a * x1[k] + (1 - a) * x2[k];
    const double h_expected = a * score_h(m, x1) + (1 - a) * score_h(m, x2);
    const double r_expected = a * score_r(m, x1) + (1 - a) * score_r(m, x2);
    // Relative to the magnitude of the terms being combined, so cancellation near zero is not penalized.
    const double scale_h = std::max({1.0, a * std::abs(score_h(m, x1)) + (1 - a) * std::abs(score_h(m, x2))});
    const double scale_r = std::max({1.0, a * std::abs(score_r(m, x1)) + (1 - a) * std::abs(score_r(m, x2))});
    CHECK(std::abs(score_h(m, mix) - h_expected) <= 1e-12 * scale_h);
    CHECK(std::abs(score_r(m, mix) - r_expected) <= 1e-12 * scale_r);
  }
}

TEST_CASE("labels and hyperparameters validate their domains") {
  CHECK(label_from_int(-1) == Label::Normal);
  CHECK(label_from_int(1) == Label::Abnormal);
  CHECK_THROWS_AS(label_from_int(0), InvalidInput);

  Hyperparameters hp;
  CHECK_NOTHROW(hp.validate());
  CHECK(Hyperparameters{1, 1, 0.25, 1, 0}.beta() == 2.0);
  for (double c : {0.0, 0.5, -0.1, 0.6, std::numeric_limits<double>::quiet_NaN()}) {
    hp.c = c;
    CHECK_THROWS_AS(hp.validate(), InvalidInput);
  }
  hp = {};
  hp.lambda_w = 0.0;
  CHECK_THROWS_AS(hp.validate(), InvalidInput);
  hp = {};
  hp.lambda_u = -1.0;
  CHECK_THROWS_AS(hp.validate(), InvalidInput);
  hp = {};
  hp.iterations = 0;
  CHECK_THROWS_AS(hp.validate(), InvalidInput);
}

TEST_CASE("dataset enforces one dimension and finite values") {
  const Dataset d({{{0.0, 1.0}, Label::Normal}, {{2.0, 3.0}, Label::Abnormal}, {{4.0, 5.0}, Label::Normal}});
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.count(Label::Normal) == 2);
  CHECK(d.has_both_labels());
  CHECK(d.without(1).count(Label::Abnormal) == 0);
  const std::vector<std::size_t> idx{2, 0};
  CHECK(d.subset(idx)[0].x[0] == 4.0);

  CHECK_THROWS_AS(Dataset({{{0.0, 1.0}, Label::Normal}, {{2.0}, Label::Abnormal}}), InvalidInput);
  CHECK_THROWS_AS(Dataset({{{std::nan("")}, Label::Normal}}), InvalidInput);
  CHECK_THROWS_AS(Dataset({{{INFINITY}, Label::Normal}}), InvalidInput);
  CHECK_THROWS_AS(Dataset(std::vector<LabeledExample>{}), InvalidInput);
  CHECK(Dataset({}, 3).empty());
}
