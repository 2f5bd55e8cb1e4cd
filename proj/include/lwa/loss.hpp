#ifndef LWA_LOSS_HPP
#define LWA_LOSS_HPP

#include <vector>

#include "lwa/core.hpp"

namespace lwa {

/// Which piece of the max-of-three surrogate is active at a point.
enum class Branch { MarginViolation, RejectionActive, Neither };

/// Sub-gradient of the single-example objective with respect to (w, u, b, b').
struct SubgradientPair {
  std::vector<double> grad_w;
  std::vector<double> grad_u;
  double grad_b = 0.0;
  double grad_b_prime = 0.0;
  Branch branch = Branch::Neither;
};

/// Abstention loss: 1 for an accepted misclassification, c for a rejection, 0 otherwise.
/// Rejection here means r <= 0.
double true_abstention_loss(Label y, double h_score, double r_score, double c);

/// max(0, 1 + (r - y h)/2, c (1 - beta r)) with beta = 1 / (1 - 2c).
double surrogate_loss(Label y, double h_score, double r_score, double c);

/// max(0, 1 - y h).
double hinge_loss(Label y, double h_score) noexcept;

/**
 * Selects the active surrogate piece. Strict comparisons: a point where two
 * pieces tie falls in Neither, which is still a valid sub-gradient.
 * c is not validated here; callers on the hot path validate once.
 */
Branch classify_branch(Label y, double h_score, double r_score, double c) noexcept;

/**
 * Sub-gradient of the single-example objective
 *   (lambda/2)(|w|^2 + b^2) + (lambda'/2)(|u|^2 + b'^2) + surrogate.
 * Each bias is handled as one more weight on a constant 1 feature, including
 * its share of the regularizer.
 */
SubgradientPair lwa_subgradient(const LabeledExample& example, const LwaModel& model);

/// (lambda/2)(|w|^2 + b^2) + (lambda'/2)(|u|^2 + b'^2) + sum of surrogate losses over the data.
double objective_value(const Dataset& data, const LwaModel& model);

/// (lambda/2)(|w|^2 + b^2) + sum of hinge losses over the data.
double svm_objective_value(const Dataset& data, const SvmModel& model);

}  // namespace lwa

#endif  // LWA_LOSS_HPP
