#ifndef LWA_CORE_HPP
#define LWA_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lwa/error.hpp"

namespace lwa {

/// Feature representation of one example. The feature map is the identity.
using FeatureVector = std::vector<double>;

/// Binary diagnosis label.
enum class Label : int { Normal = -1, Abnormal = +1 };

/// The label as +1.0 / -1.0 for use in margins.
constexpr double sign(Label y) noexcept { return static_cast<double>(static_cast<int>(y)); }

/// Throws InvalidInput unless value is -1 or +1.
Label label_from_int(int value);

struct LabeledExample {
  FeatureVector x;
  Label y;
};

/**
 * Ordered collection of labeled examples sharing one feature dimension.
 *
 * Construction checks that every row has length dim() and that all feature
 * values are finite. A dataset may be empty (dim is then given explicitly);
 * training entry points check for class coverage themselves.
 */
class Dataset {
public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledExample> examples);
  Dataset(std::vector<LabeledExample> examples, std::size_t dim);

  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<LabeledExample>& examples() const noexcept { return examples_; }
  auto begin() const noexcept { return examples_.begin(); }
  auto end() const noexcept { return examples_.end(); }

  std::size_t count(Label y) const noexcept;
  bool has_both_labels() const noexcept { return count(Label::Normal) > 0 && count(Label::Abnormal) > 0; }

  /// Copy of the dataset with example i removed.
  Dataset without(std::size_t i) const;
  /// Copy restricted to the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

private:
  std::vector<LabeledExample> examples_;
  std::size_t dim_ = 0;
};

/// Training settings of the abstaining classifier. beta() is derived from c.
struct Hyperparameters {
  double lambda_w = 1e-3;
  double lambda_u = 1e-3;
  double c = 0.45;
  std::uint64_t iterations = 100000;
  std::uint64_t seed = 0;

  /// Throws InvalidInput when any field is outside its domain.
  void validate() const;
  double beta() const noexcept { return 1.0 / (1.0 - 2.0 * c); }
};

/// Throws InvalidInput unless 0 < c < 0.5.
void check_abstention_cost(double c);

/// Discriminant h(x) = w.x + b and rejection function r(x) = u.x + b'.
struct LwaModel {
  std::vector<double> w;
  std::vector<double> u;
  double b = 0.0;
  double b_prime = 0.0;
  Hyperparameters hyper;

  std::size_t dim() const noexcept { return w.size(); }
};

struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  double lambda_w = 1e-3;
  std::uint64_t iterations = 100000;
  std::uint64_t seed = 0;

  std::size_t dim() const noexcept { return w.size(); }
};

/**
 * Result of classifying one example.
 *
 * An empty label means the example was rejected. r_score is absent for
 * classifiers without a rejection function (SVM, nearest neighbor); such
 * outcomes are always accepted.
 */
struct PredictionOutcome {
  std::optional<Label> label;
  double h_score = 0.0;
  std::optional<double> r_score;

  bool rejected() const noexcept { return !label.has_value(); }
  bool accepted() const noexcept { return label.has_value(); }

  static PredictionOutcome accept(Label y, double h, std::optional<double> r = std::nullopt) {
    return {y, h, r};
  }
  static PredictionOutcome reject(double h, double r) { return {std::nullopt, h, r}; }
};

struct ExampleRecord {
  Label truth;
  PredictionOutcome outcome;
};

/// Leave-one-out (or any held-out) evaluation summary.
struct EvalReport {
  std::vector<ExampleRecord> per_example;
  /// Correct / accepted; empty when nothing was accepted.
  std::optional<double> accuracy_on_accepted;
  /// Correct / total, rejections counted as errors.
  double overall_accuracy_counting_rejects_as_errors = 0.0;
  /// Over accepted examples using h scores; empty when undefined.
  std::optional<double> auc_roc;
  std::size_t n_misclassified = 0;
  std::size_t n_abstained = 0;
  double abstention_fraction = 0.0;

  std::size_t n_accepted() const noexcept { return per_example.size() - n_abstained; }
};

double dot(std::span<const double> a, std::span<const double> b);

/// h(x) = w.x + b. Throws InvalidInput on dimension mismatch.
double score_h(const LwaModel& model, std::span<const double> x);
double score_h(const SvmModel& model, std::span<const double> x);

/// r(x) = u.x + b'. Throws InvalidInput on dimension mismatch.
double score_r(const LwaModel& model, std::span<const double> x);

/// Label for an accepted score: +1 when h >= 0.
constexpr Label label_for_score(double h) noexcept { return h >= 0.0 ? Label::Abnormal : Label::Normal; }

/// Rejects iff r(x) < 0; r(x) == 0 is accepted.
PredictionOutcome predict(const LwaModel& model, std::span<const double> x);
PredictionOutcome predict(const SvmModel& model, std::span<const double> x);

}  // namespace lwa

#endif  // LWA_CORE_HPP
