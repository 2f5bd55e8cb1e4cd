#ifndef LWA_SOLVERS_HPP
#define LWA_SOLVERS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "lwa/core.hpp"

namespace lwa {

struct ObjectiveSample {
  std::uint64_t iteration;
  double objective;
};

/// Objective values recorded during training, iterations strictly increasing.
struct TrainingTrace {
  std::vector<ObjectiveSample> objective_samples;
};

struct TraceOptions {
  /// Record the objective after every `stride` iterations; 0 disables tracing.
  std::uint64_t stride = 0;
};

struct LwaTrainResult {
  LwaModel model;
  TrainingTrace trace;
};

struct SvmTrainResult {
  SvmModel model;
  TrainingTrace trace;
};

/**
 * Stochastic sub-gradient training of the abstaining classifier.
 *
 * Starts from w = u = 0, b = b' = 0 and runs hyper.iterations single-example
 * steps with step sizes 1/(lambda t) for (w, b) and 1/(lambda' t) for (u, b').
 * Biases shrink with their weight vectors.
 * Examples are drawn uniformly with replacement from an Rng seeded with
 * hyper.seed. The final iterate is returned; there is no averaging.
 *
 * Each step follows the expected gradient of
 *   (lambda/2)(|w|^2 + b^2) + (lambda'/2)(|u|^2 + b'^2) + (1/N) sum_i surrogate_i,
 * i.e. objective_value() with both lambdas scaled by N.
 *
 * Throws InvalidInput for invalid hyperparameters or a single-class dataset.
 */
LwaTrainResult train_lwa(const Dataset& data, const Hyperparameters& hyper, TraceOptions trace = {});

/// Pegasos hinge-loss SVM; the bias shrinks with w. Same sampling and step schedule as train_lwa.
SvmTrainResult train_svm(const Dataset& data, double lambda_w, std::uint64_t iterations, std::uint64_t seed,
                         TraceOptions trace = {});

/// 1-nearest-neighbor classifier; keeps the training set verbatim.
struct NnModel {
  Dataset data;
};

NnModel train_nn(const Dataset& data);

/// Label of the closest stored example (Euclidean); ties go to the lowest index.
Label predict_nn(const NnModel& model, std::span<const double> x);

/**
 * Full outcome for the nearest-neighbor classifier. h_score is
 * (distance to nearest -1) - (distance to nearest +1), which ranks examples
 * for ROC analysis; the label always comes from predict_nn.
 */
PredictionOutcome predict(const NnModel& model, std::span<const double> x);

struct OracleGrid {
  double lower = -3.0;
  double upper = 3.0;
  double step = 0.25;
  /// Second pass over +/- one coarse step around the coarse argmin at step/10.
  bool refine = true;
};

/**
 * Exhaustive grid minimization of objective_value over (w, u, b, b') for
 * datasets with dim <= 2. Test oracle only; throws Unsupported above 2 dims.
 */
LwaModel oracle_minimize_lwa(const Dataset& data, const Hyperparameters& hyper, OracleGrid grid = {});

}  // namespace lwa

#endif  // LWA_SOLVERS_HPP
