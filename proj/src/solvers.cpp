#include "lwa/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lwa/loss.hpp"
#include "lwa/rng.hpp"

namespace lwa {

namespace {

void check_trainable(const Dataset& data) {
  if (data.empty()) throw InvalidInput("training set is empty");
  if (!data.has_both_labels()) throw InvalidInput("training set must contain both labels");
}

bool should_sample(const TraceOptions& trace, std::uint64_t t, std::uint64_t total) {
  return trace.stride > 0 && (t % trace.stride == 0 || t == total);
}

}  // namespace

LwaTrainResult train_lwa(const Dataset& data, const Hyperparameters& hyper, TraceOptions trace) {
  hyper.validate();
  check_trainable(data);

  const std::size_t d = data.dim();
  const double c = hyper.c;
  const double c_beta = c * hyper.beta();

  LwaTrainResult result;
  LwaModel& m = result.model;
  m.hyper = hyper;
  m.w.assign(d, 0.0);
  m.u.assign(d, 0.0);

  Rng rng(hyper.seed);
  for (std::uint64_t t = 1; t <= hyper.iterations; ++t) {
    const LabeledExample& ex = data[rng.index(data.size())];
    const double* x = ex.x.data();
    const double y = sign(ex.y);

    double h = m.b;
    double r = m.b_prime;
    for (std::size_t k = 0; k < d; ++k) {
      h += m.w[k] * x[k];
      r += m.u[k] * x[k];
    }

    const double td = static_cast<double>(t);
    const double shrink = 1.0 - 1.0 / td;
    const double eta_w = 1.0 / (hyper.lambda_w * td);
    const double eta_u = 1.0 / (hyper.lambda_u * td);

    switch (classify_branch(ex.y, h, r, c)) {
      case Branch::MarginViolation: {
        const double step_w = 0.5 * eta_w * y;
        const double step_u = -0.5 * eta_u;
        for (std::size_t k = 0; k < d; ++k) {
          m.w[k] = shrink * m.w[k] + step_w * x[k];
          m.u[k] = shrink * m.u[k] + step_u * x[k];
        }
        m.b = shrink * m.b + step_w;
        m.b_prime = shrink * m.b_prime + step_u;
        break;
      }
      case Branch::RejectionActive: {
        const double step_u = c_beta * eta_u;
        for (std::size_t k = 0; k < d; ++k) {
          m.w[k] *= shrink;
          m.u[k] = shrink * m.u[k] + step_u * x[k];
        }
        m.b *= shrink;
        m.b_prime = shrink * m.b_prime + step_u;
        break;
      }
      case Branch::Neither:
        for (std::size_t k = 0; k < d; ++k) {
          m.w[k] *= shrink;
          m.u[k] *= shrink;
        }
        m.b *= shrink;
        m.b_prime *= shrink;
        break;
    }

    if (should_sample(trace, t, hyper.iterations)) {
      result.trace.objective_samples.push_back({t, objective_value(data, m)});
    }
  }
  return result;
}

SvmTrainResult train_svm(const Dataset& data, double lambda_w, std::uint64_t iterations, std::uint64_t seed,
                         TraceOptions trace) {
  if (!(lambda_w > 0.0) || !std::isfinite(lambda_w)) throw InvalidInput("lambda must be > 0");
  if (iterations < 1) throw InvalidInput("iterations must be >= 1");
  check_trainable(data);

  const std::size_t d = data.dim();
  SvmTrainResult result;
  SvmModel& m = result.model;
  m.lambda_w = lambda_w;
  m.iterations = iterations;
  m.seed = seed;
  m.w.assign(d, 0.0);

  Rng rng(seed);
  for (std::uint64_t t = 1; t <= iterations; ++t) {
    const LabeledExample& ex = data[rng.index(data.size())];
    const double* x = ex.x.data();
    const double y = sign(ex.y);

    double h = m.b;
    for (std::size_t k = 0; k < d; ++k) h += m.w[k] * x[k];

    const double td = static_cast<double>(t);
    const double shrink = 1.0 - 1.0 / td;
    if (y * h < 1.0) {
      const double step = y / (lambda_w * td);
      for (std::size_t k = 0; k < d; ++k) m.w[k] = shrink * m.w[k] + step * x[k];
      m.b = shrink * m.b + step;
    } else {
      for (std::size_t k = 0; k < d; ++k) m.w[k] *= shrink;
      m.b *= shrink;
    }

    if (should_sample(trace, t, iterations)) {
      result.trace.objective_samples.push_back({t, svm_objective_value(data, m)});
    }
  }
  return result;
}

NnModel train_nn(const Dataset& data) {
  if (data.empty()) throw InvalidInput("training set is empty");
  return NnModel{data};
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

void check_nn_dim(const NnModel& model, std::span<const double> x) {
  if (model.data.empty()) throw InvalidInput("nearest-neighbor model is empty");
  if (x.size() != model.data.dim()) {
    throw InvalidInput("dimension mismatch: model has " + std::to_string(model.data.dim()) + ", input has " +
                       std::to_string(x.size()));
  }
}

}  // namespace

Label predict_nn(const NnModel& model, std::span<const double> x) {
  check_nn_dim(model, x);
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.data.size(); ++i) {
    const double dist = squared_distance(model.data[i].x, x);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return model.data[best].y;
}

PredictionOutcome predict(const NnModel& model, std::span<const double> x) {
  const Label label = predict_nn(model, x);
  double nearest_neg = std::numeric_limits<double>::infinity();
  double nearest_pos = std::numeric_limits<double>::infinity();
  for (const auto& e : model.data) {
    double& slot = e.y == Label::Normal ? nearest_neg : nearest_pos;
    slot = std::min(slot, squared_distance(e.x, x));
  }
  double h;
  if (std::isinf(nearest_neg) || std::isinf(nearest_pos)) {
    // Single-class memory: rank by closeness to the class that is present.
    const double near = std::sqrt(std::min(nearest_neg, nearest_pos));
    h = sign(label) / (1.0 + near);
  } else {
    h = std::sqrt(nearest_neg) - std::sqrt(nearest_pos);
  }
  return PredictionOutcome::accept(label, h);
}

namespace {

// One affine half of the model: weights followed by the bias.
struct HalfGrid {
  std::vector<std::vector<double>> params;
};

HalfGrid enumerate(const std::vector<std::vector<double>>& axes) {
  HalfGrid out;
  std::vector<std::size_t> pos(axes.size(), 0);
  for (;;) {
    std::vector<double> p(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) p[k] = axes[k][pos[k]];
    out.params.push_back(std::move(p));
    std::size_t k = 0;
    while (k < axes.size() && ++pos[k] == axes[k].size()) pos[k++] = 0;
    if (k == axes.size()) break;
  }
  return out;
}

std::vector<double> axis(double lower, double upper, double step) {
  const auto n = static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = lower + static_cast<double>(i) * step;
  return values;
}

struct GridArgmin {
  std::vector<double> wb;
  std::vector<double> ub;
  double objective = std::numeric_limits<double>::infinity();
};

// Scores for every half-parameter vector, laid out [param][example].
std::vector<double> half_scores(const HalfGrid& grid, const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  std::vector<double> scores(grid.params.size() * n);
  for (std::size_t p = 0; p < grid.params.size(); ++p) {
    const auto& v = grid.params[p];
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[d];
      for (std::size_t k = 0; k < d; ++k) s += v[k] * data[i].x[k];
      scores[p * n + i] = s;
    }
  }
  return scores;
}

double half_reg(const std::vector<double>& v, double lambda) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return 0.5 * lambda * s;
}

GridArgmin search(const Dataset& data, const Hyperparameters& hp, const std::vector<std::vector<double>>& w_axes,
                  const std::vector<std::vector<double>>& u_axes) {
  const HalfGrid wg = enumerate(w_axes);
  const HalfGrid ug = enumerate(u_axes);
  const std::size_t n = data.size();
  const double c = hp.c;
  const double c_beta = c * hp.beta();

  // surrogate = max(0, a_i + p_i, q_i) with a_i = 1 - y h / 2, p_i = r / 2, q_i = c - c beta r.
  std::vector<double> a = half_scores(wg, data);
  for (std::size_t p = 0; p < wg.params.size(); ++p) {
    for (std::size_t i = 0; i < n; ++i) a[p * n + i] = 1.0 - 0.5 * sign(data[i].y) * a[p * n + i];
  }
  const std::vector<double> r = half_scores(ug, data);
  std::vector<double> half_r(r.size()), rej(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    half_r[j] = 0.5 * r[j];
    rej[j] = c - c_beta * r[j];
  }
  std::vector<double> reg_u(ug.params.size());
  for (std::size_t q = 0; q < ug.params.size(); ++q) reg_u[q] = half_reg(ug.params[q], hp.lambda_u);

  GridArgmin best;
  std::size_t best_w = 0, best_u = 0;
  for (std::size_t p = 0; p < wg.params.size(); ++p) {
    const double reg_w = half_reg(wg.params[p], hp.lambda_w);
    const double* ap = &a[p * n];
    for (std::size_t q = 0; q < ug.params.size(); ++q) {
      const double* hr = &half_r[q * n];
      const double* rq = &rej[q * n];
      double total = reg_w + reg_u[q];
      for (std::size_t i = 0; i < n; ++i) total += std::max(std::max(0.0, ap[i] + hr[i]), rq[i]);
      if (total < best.objective) {
        best.objective = total;
        best_w = p;
        best_u = q;
      }
    }
  }
  best.wb = wg.params[best_w];
  best.ub = ug.params[best_u];
  return best;
}

}  // namespace

LwaModel oracle_minimize_lwa(const Dataset& data, const Hyperparameters& hyper, OracleGrid grid) {
  hyper.validate();
  if (data.empty()) throw InvalidInput("oracle needs a non-empty dataset");
  if (data.dim() > 2) throw Unsupported("grid oracle supports at most 2 features");
  if (!(grid.step > 0.0) || !(grid.upper >= grid.lower)) throw InvalidInput("invalid oracle grid");

  const std::size_t d = data.dim();
  const std::vector<double> coarse = axis(grid.lower, grid.upper, grid.step);
  std::vector<std::vector<double>> axes(d + 1, coarse);
  GridArgmin best = search(data, hyper, axes, axes);

  if (grid.refine) {
    const double fine = grid.step / 10.0;
    std::vector<std::vector<double>> w_axes, u_axes;
    for (std::size_t k = 0; k <= d; ++k) {
      w_axes.push_back(axis(best.wb[k] - grid.step, best.wb[k] + grid.step, fine));
      u_axes.push_back(axis(best.ub[k] - grid.step, best.ub[k] + grid.step, fine));
    }
    GridArgmin refined = search(data, hyper, w_axes, u_axes);
    if (refined.objective < best.objective) best = std::move(refined);
  }

  LwaModel m;
  m.hyper = hyper;
  m.w.assign(best.wb.begin(), best.wb.begin() + static_cast<std::ptrdiff_t>(d));
  m.u.assign(best.ub.begin(), best.ub.begin() + static_cast<std::ptrdiff_t>(d));
  m.b = best.wb[d];
  m.b_prime = best.ub[d];
  return m;
}

}  // namespace lwa
