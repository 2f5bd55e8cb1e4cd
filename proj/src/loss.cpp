#include "lwa/loss.hpp"

#include <algorithm>

namespace lwa {

namespace {

struct Pieces {
  double margin;     // 1 + (r - y h) / 2
  double rejection;  // c (1 - beta r)
};

Pieces surrogate_pieces(Label y, double h, double r, double c) noexcept {
  const double beta = 1.0 / (1.0 - 2.0 * c);
  return {1.0 + 0.5 * (r - sign(y) * h), c * (1.0 - beta * r)};
}

}  // namespace

double true_abstention_loss(Label y, double h_score, double r_score, double c) {
  check_abstention_cost(c);
  if (r_score <= 0.0) return c;
  return sign(y) * h_score <= 0.0 ? 1.0 : 0.0;
}

double surrogate_loss(Label y, double h_score, double r_score, double c) {
  check_abstention_cost(c);
  const Pieces p = surrogate_pieces(y, h_score, r_score, c);
  return std::max({0.0, p.margin, p.rejection});
}

double hinge_loss(Label y, double h_score) noexcept {
  return std::max(0.0, 1.0 - sign(y) * h_score);
}

Branch classify_branch(Label y, double h_score, double r_score, double c) noexcept {
  const Pieces p = surrogate_pieces(y, h_score, r_score, c);
  if (p.margin > std::max(0.0, p.rejection)) return Branch::MarginViolation;
  if (p.rejection > std::max(0.0, p.margin)) return Branch::RejectionActive;
  return Branch::Neither;
}

SubgradientPair lwa_subgradient(const LabeledExample& example, const LwaModel& model) {
  const auto& hp = model.hyper;
  check_abstention_cost(hp.c);
  const double h = score_h(model, example.x);
  const double r = score_r(model, example.x);
  const std::size_t d = model.dim();
  const double y = sign(example.y);

  SubgradientPair g;
  g.branch = classify_branch(example.y, h, r, hp.c);
  g.grad_w.resize(d);
  g.grad_u.resize(d);
  g.grad_b = hp.lambda_w * model.b;
  g.grad_b_prime = hp.lambda_u * model.b_prime;
  for (std::size_t k = 0; k < d; ++k) {
    g.grad_w[k] = hp.lambda_w * model.w[k];
    g.grad_u[k] = hp.lambda_u * model.u[k];
  }

  switch (g.branch) {
    case Branch::MarginViolation:
      for (std::size_t k = 0; k < d; ++k) {
        g.grad_w[k] -= 0.5 * y * example.x[k];
        g.grad_u[k] += 0.5 * example.x[k];
      }
      g.grad_b -= 0.5 * y;
      g.grad_b_prime += 0.5;
      break;
    case Branch::RejectionActive: {
      const double c_beta = hp.c * hp.beta();
      for (std::size_t k = 0; k < d; ++k) g.grad_u[k] -= c_beta * example.x[k];
      g.grad_b_prime -= c_beta;
      break;
    }
    case Branch::Neither:
      break;
  }
  return g;
}

double objective_value(const Dataset& data, const LwaModel& model) {
  if (data.empty()) throw InvalidInput("objective of an empty dataset");
  const auto& hp = model.hyper;
  double total = 0.5 * hp.lambda_w * (dot(model.w, model.w) + model.b * model.b) +
                 0.5 * hp.lambda_u * (dot(model.u, model.u) + model.b_prime * model.b_prime);
  for (const auto& e : data) {
    total += surrogate_loss(e.y, score_h(model, e.x), score_r(model, e.x), hp.c);
  }
  return total;
}

double svm_objective_value(const Dataset& data, const SvmModel& model) {
  if (data.empty()) throw InvalidInput("objective of an empty dataset");
  double total = 0.5 * model.lambda_w * (dot(model.w, model.w) + model.b * model.b);
  for (const auto& e : data) total += hinge_loss(e.y, score_h(model, e.x));
  return total;
}

}  // namespace lwa
