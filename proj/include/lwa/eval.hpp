#ifndef LWA_EVAL_HPP
#define LWA_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "lwa/core.hpp"

namespace lwa {

/// Search grids for inner cross-validated hyperparameter selection.
struct SelectionGrids {
  std::vector<double> lambda_w;
  std::vector<double> lambda_u;
  std::vector<double> c;
  /// Largest admissible abstention fraction.
  double abstention_cap = 0.25;
  std::size_t folds = 5;
};

struct LwaTrainer {
  Hyperparameters hyper;
  /// When set, every LOOCV fold reselects hyperparameters on its training part.
  std::optional<SelectionGrids> nested;
};

struct SvmTrainer {
  double lambda_w = 1e-3;
  std::uint64_t iterations = 100000;
  std::uint64_t seed = 0;
};

struct NnTrainer {};

using Trainer = std::variant<LwaTrainer, SvmTrainer, NnTrainer>;

struct LoocvOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  std::size_t jobs = 1;
  /// Fit min-max normalization on each fold's training part and apply it to the held-out example.
  bool normalize = false;
};

/**
 * Leave-one-out cross-validation. Fold i trains on every example but i with
 * seed = base seed + i and predicts example i. Results do not depend on the
 * number of jobs.
 *
 * Throws InvalidInput when the dataset has fewer than 2 examples or lacks a label.
 */
EvalReport loocv(const Dataset& data, const Trainer& trainer, LoocvOptions options = {});

/// Aggregates per-example outcomes. Throws InvalidInput on empty input.
EvalReport report_metrics(std::vector<ExampleRecord> records);

/// (true label, score) pair for ROC analysis.
struct ScoredLabel {
  Label truth;
  double score;
};

/**
 * Rank-based (Mann-Whitney) area under the ROC curve with average ranks for
 * ties. Returns nullopt when either label is missing.
 */
std::optional<double> auc_roc(std::span<const ScoredLabel> scores);

struct SweepPoint {
  double c = 0.0;
  std::optional<double> auc_roc;
  double abstention_fraction = 0.0;
  std::optional<double> accuracy_on_accepted;
  std::size_t n_misclassified = 0;
  std::size_t n_abstained = 0;
};

/// LOOCV of the abstaining classifier at each c in grid order, other settings fixed.
std::vector<SweepPoint> sweep_c(const Dataset& data, const Hyperparameters& hyper_base,
                                std::span<const double> c_grid, LoocvOptions options = {});

struct SelectionResult {
  Hyperparameters hyper;
  /// Pooled over all out-of-fold predictions of the chosen combination.
  double accuracy_on_accepted = 0.0;
  double abstention_fraction = 0.0;
  /// False when no combination met the abstention cap; the least-abstaining one is returned.
  bool cap_satisfied = true;
};

/**
 * Stratified k-fold selection over lambda x lambda' x c. Picks the highest
 * out-of-fold accuracy on accepted examples among combinations whose
 * out-of-fold abstention fraction is within the cap; ties prefer larger c. Iterations and seed come
 * from `base`.
 */
SelectionResult select_hyperparameters(const Dataset& data, const Hyperparameters& base, const SelectionGrids& grids);

/// Assigns each example to one of k folds, round-robin within each label.
std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Rethrows the first exception.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace lwa

#endif  // LWA_EVAL_HPP
