#include "lwa/core.hpp"

#include <cmath>
#include <string>

namespace lwa {

Label label_from_int(int value) {
  if (value == -1) return Label::Normal;
  if (value == 1) return Label::Abnormal;
  throw InvalidInput("label must be -1 or +1, got " + std::to_string(value));
}

namespace {

std::size_t checked_dim(const std::vector<LabeledExample>& examples) {
  if (examples.empty()) throw InvalidInput("cannot infer dimension of an empty dataset");
  return examples.front().x.size();
}

}  // namespace

Dataset::Dataset(std::vector<LabeledExample> examples)
    : Dataset(std::move(examples), 0) {}

Dataset::Dataset(std::vector<LabeledExample> examples, std::size_t dim)
    : examples_(std::move(examples)), dim_(dim) {
  if (dim_ == 0) dim_ = checked_dim(examples_);
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& x = examples_[i].x;
    if (x.size() != dim_) {
      throw InvalidInput("example " + std::to_string(i) + " has " + std::to_string(x.size()) +
                         " features, expected " + std::to_string(dim_));
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw InvalidInput("example " + std::to_string(i) + " has a non-finite feature");
    }
    label_from_int(static_cast<int>(examples_[i].y));
  }
}

std::size_t Dataset::count(Label y) const noexcept {
  std::size_t n = 0;
  for (const auto& e : examples_) n += (e.y == y);
  return n;
}

Dataset Dataset::without(std::size_t i) const {
  if (i >= examples_.size()) throw InvalidInput("index out of range");
  std::vector<LabeledExample> rest;
  rest.reserve(examples_.size() - 1);
  for (std::size_t j = 0; j < examples_.size(); ++j) {
    if (j != i) rest.push_back(examples_[j]);
  }
  return Dataset(std::move(rest), dim_);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<LabeledExample> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= examples_.size()) throw InvalidInput("index out of range");
    picked.push_back(examples_[i]);
  }
  return Dataset(std::move(picked), dim_);
}

void check_abstention_cost(double c) {
  if (!(c > 0.0 && c < 0.5)) {
    throw InvalidInput("abstention cost c must lie in the open interval (0, 0.5), got " + std::to_string(c));
  }
}

void Hyperparameters::validate() const {
  check_abstention_cost(c);
  if (!(lambda_w > 0.0) || !std::isfinite(lambda_w)) throw InvalidInput("lambda must be > 0");
  if (!(lambda_u > 0.0) || !std::isfinite(lambda_u)) throw InvalidInput("lambda' must be > 0");
  if (iterations < 1) throw InvalidInput("iterations must be >= 1");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

void check_dim(std::size_t model_dim, std::size_t x_dim) {
  if (model_dim != x_dim) {
    throw InvalidInput("dimension mismatch: model has " + std::to_string(model_dim) + ", input has " +
                       std::to_string(x_dim));
  }
}

}  // namespace

double score_h(const LwaModel& model, std::span<const double> x) {
  check_dim(model.w.size(), x.size());
  return dot(model.w, x) + model.b;
}

double score_h(const SvmModel& model, std::span<const double> x) {
  check_dim(model.w.size(), x.size());
  return dot(model.w, x) + model.b;
}

double score_r(const LwaModel& model, std::span<const double> x) {
  check_dim(model.u.size(), x.size());
  return dot(model.u, x) + model.b_prime;
}

PredictionOutcome predict(const LwaModel& model, std::span<const double> x) {
  const double h = score_h(model, x);
  const double r = score_r(model, x);
  if (r < 0.0) return PredictionOutcome::reject(h, r);
  return PredictionOutcome::accept(label_for_score(h), h, r);
}

PredictionOutcome predict(const SvmModel& model, std::span<const double> x) {
  const double h = score_h(model, x);
  return PredictionOutcome::accept(label_for_score(h), h);
}

}  // namespace lwa
