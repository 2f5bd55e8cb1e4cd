#include "lwa/eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "lwa/data.hpp"
#include "lwa/solvers.hpp"

namespace lwa {

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(jobs);
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::optional<double> auc_roc(std::span<const ScoredLabel> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a].score < scores[b].score; });

  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]].score == scores[order[i]].score) ++j;
    // Ranks i+1 .. j share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (scores[order[k]].truth == Label::Abnormal) {
        positive_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

EvalReport report_metrics(std::vector<ExampleRecord> records) {
  if (records.empty()) throw InvalidInput("no records to summarize");
  EvalReport report;
  report.per_example = std::move(records);

  std::size_t correct = 0;
  std::vector<ScoredLabel> accepted_scores;
  for (const auto& rec : report.per_example) {
    if (rec.outcome.rejected()) {
      ++report.n_abstained;
      continue;
    }
    if (*rec.outcome.label == rec.truth) {
      ++correct;
    } else {
      ++report.n_misclassified;
    }
    accepted_scores.push_back({rec.truth, rec.outcome.h_score});
  }

  const auto total = static_cast<double>(report.per_example.size());
  const std::size_t accepted = report.per_example.size() - report.n_abstained;
  if (accepted > 0) report.accuracy_on_accepted = static_cast<double>(correct) / static_cast<double>(accepted);
  report.overall_accuracy_counting_rejects_as_errors = static_cast<double>(correct) / total;
  report.abstention_fraction = static_cast<double>(report.n_abstained) / total;
  report.auc_roc = auc_roc(accepted_scores);
  return report;
}

namespace {

LwaTrainer with_seed(const LwaTrainer& t, std::uint64_t seed) {
  LwaTrainer out = t;
  out.hyper.seed = seed;
  return out;
}

// Trains on `train` and predicts `x`. `fold` offsets the trainer's base seed.
PredictionOutcome fit_and_predict(const Trainer& trainer, const Dataset& train, std::span<const double> x,
                                  std::uint64_t fold) {
  return std::visit(
      [&](const auto& t) -> PredictionOutcome {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, LwaTrainer>) {
          const LwaTrainer fold_trainer = with_seed(t, t.hyper.seed + fold);
          Hyperparameters hp = fold_trainer.hyper;
          if (fold_trainer.nested) hp = select_hyperparameters(train, hp, *fold_trainer.nested).hyper;
          return predict(train_lwa(train, hp).model, x);
        } else if constexpr (std::is_same_v<T, SvmTrainer>) {
          return predict(train_svm(train, t.lambda_w, t.iterations, t.seed + fold).model, x);
        } else {
          return predict(train_nn(train), x);
        }
      },
      trainer);
}

}  // namespace

EvalReport loocv(const Dataset& data, const Trainer& trainer, LoocvOptions options) {
  if (data.size() < 2) throw InvalidInput("leave-one-out needs at least 2 examples");
  if (!data.has_both_labels()) throw InvalidInput("leave-one-out needs both labels present");
  if (const auto* lwa = std::get_if<LwaTrainer>(&trainer)) lwa->hyper.validate();

  std::vector<ExampleRecord> records(data.size(), ExampleRecord{Label::Normal, {}});
  parallel_for(data.size(), options.jobs, [&](std::size_t i) {
    Dataset train = data.without(i);
    FeatureVector x = data[i].x;
    if (options.normalize) {
      const NormalizationParams params = fit_normalizer(train);
      train = apply_normalizer(params, train);
      x = apply_normalizer(params, x);
    }
    records[i] = {data[i].y, fit_and_predict(trainer, train, x, i)};
  });
  return report_metrics(std::move(records));
}

std::vector<SweepPoint> sweep_c(const Dataset& data, const Hyperparameters& hyper_base, std::span<const double> c_grid,
                                LoocvOptions options) {
  if (c_grid.empty()) throw InvalidInput("c grid is empty");
  for (double c : c_grid) check_abstention_cost(c);

  std::vector<SweepPoint> points;
  points.reserve(c_grid.size());
  for (double c : c_grid) {
    Hyperparameters hp = hyper_base;
    hp.c = c;
    const EvalReport rep = loocv(data, LwaTrainer{hp, std::nullopt}, options);
    points.push_back({c, rep.auc_roc, rep.abstention_fraction, rep.accuracy_on_accepted, rep.n_misclassified,
                      rep.n_abstained});
  }
  return points;
}

std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k) {
  if (k == 0) throw InvalidInput("fold count must be positive");
  std::vector<std::size_t> fold(data.size());
  std::size_t next_neg = 0, next_pos = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t& next = data[i].y == Label::Normal ? next_neg : next_pos;
    fold[i] = next++ % k;
  }
  return fold;
}

namespace {

struct Candidate {
  Hyperparameters hyper;
  double accuracy;
  double abstention;
};

Candidate score_candidate(const Dataset& data, const Hyperparameters& hp, std::span<const std::size_t> fold,
                          std::size_t k) {
  std::vector<ExampleRecord> records;
  records.reserve(data.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test_idx : train_idx).push_back(i);
    if (test_idx.empty()) continue;
    const Dataset train = data.subset(train_idx);
    Hyperparameters fold_hp = hp;
    fold_hp.seed = hp.seed + f;
    const LwaModel model = train_lwa(train, fold_hp).model;
    for (std::size_t i : test_idx) records.push_back({data[i].y, predict(model, data[i].x)});
  }
  const EvalReport rep = report_metrics(std::move(records));
  return {hp, rep.accuracy_on_accepted.value_or(0.0), rep.abstention_fraction};
}

}  // namespace

SelectionResult select_hyperparameters(const Dataset& data, const Hyperparameters& base, const SelectionGrids& grids) {
  if (grids.lambda_w.empty() || grids.lambda_u.empty() || grids.c.empty()) {
    throw InvalidInput("hyperparameter grids must be non-empty");
  }
  std::vector<Hyperparameters> combos;
  for (double lw : grids.lambda_w) {
    for (double lu : grids.lambda_u) {
      for (double c : grids.c) {
        Hyperparameters hp = base;
        hp.lambda_w = lw;
        hp.lambda_u = lu;
        hp.c = c;
        hp.validate();
        combos.push_back(hp);
      }
    }
  }
  if (combos.size() == 1) return {combos.front(), 0.0, 0.0, true};

  if (grids.folds < 2) throw InvalidInput("selection needs at least 2 folds");
  if (!data.has_both_labels()) throw InvalidInput("selection needs both labels present");
  // Every inner training split must keep both labels.
  const std::size_t k = std::min({grids.folds, data.count(Label::Normal), data.count(Label::Abnormal)});
  if (k < 2) throw InvalidInput("each label needs at least 2 examples for selection");
  const std::vector<std::size_t> fold = stratified_folds(data, k);

  std::vector<Candidate> scored;
  scored.reserve(combos.size());
  for (const auto& hp : combos) scored.push_back(score_candidate(data, hp, fold, k));

  const Candidate* best = nullptr;
  for (const auto& cand : scored) {
    if (cand.abstention > grids.abstention_cap) continue;
    if (!best || cand.accuracy > best->accuracy ||
        (cand.accuracy == best->accuracy && cand.hyper.c > best->hyper.c)) {
      best = &cand;
    }
  }
  if (best) return {best->hyper, best->accuracy, best->abstention, true};

  for (const auto& cand : scored) {
    if (!best || cand.abstention < best->abstention ||
        (cand.abstention == best->abstention && cand.hyper.c > best->hyper.c)) {
      best = &cand;
    }
  }
  return {best->hyper, best->accuracy, best->abstention, false};
}

}  // namespace lwa
