#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lwa/data.hpp"
#include "lwa/eval.hpp"
#include "lwa/loss.hpp"
#include "lwa/solvers.hpp"

namespace lwa::cli {

namespace {

/// Flag validation failure; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

constexpr double kDefaultLambda = 1e-3;
constexpr double kDefaultC = 0.45;
constexpr std::uint64_t kDefaultIters = 100000;

struct HyperFlags {
  double c = kDefaultC;
  double lambda_w = kDefaultLambda;
  double lambda_u = kDefaultLambda;
  std::uint64_t iters = kDefaultIters;
  std::uint64_t seed = 0;
  CLI::Option* c_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* lambda_prime_opt = nullptr;
  CLI::Option* iters_opt = nullptr;

  void add_to(CLI::App& app, bool with_c) {
    if (with_c) c_opt = app.add_option("--c", c, "Abstention cost, 0 < c < 0.5")->capture_default_str();
    lambda_opt = app.add_option("--lambda", lambda_w, "Regularization of the discriminant")->capture_default_str();
    lambda_prime_opt =
        app.add_option("--lambda-prime", lambda_u, "Regularization of the rejection function")->capture_default_str();
    iters_opt = app.add_option("--iters", iters, "Stochastic sub-gradient iterations")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  Hyperparameters hyper() const { return {lambda_w, lambda_u, c, iters, seed}; }

  void validate(bool check_c) const {
    if (check_c && !(c > 0.0 && c < 0.5)) {
      throw UsageError("--c must lie in the open interval (0, 0.5), got " + format_double(c));
    }
    if (!(lambda_w > 0.0) || !std::isfinite(lambda_w)) throw UsageError("--lambda must be > 0");
    if (!(lambda_u > 0.0) || !std::isfinite(lambda_u)) throw UsageError("--lambda-prime must be > 0");
    if (iters < 1) throw UsageError("--iters must be >= 1");
  }
};

void reject_if_given(const CLI::Option* opt, const std::string& algo) {
  if (opt && opt->count() > 0) throw UsageError(opt->get_name() + " is not applicable to --algo " + algo);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string outcome_text(const PredictionOutcome& o) {
  if (o.rejected()) return "REJECT";
  return *o.label == Label::Abnormal ? "+1" : "-1";
}

std::string percent_or_na(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * *v;
  return s.str();
}

// ---------------------------------------------------------------------------

struct TrainCmd {
  std::string algo;
  std::string input;
  std::string model;
  bool normalize = false;
  HyperFlags hp;

  void setup(CLI::App& app) {
    app.add_option("--algo", algo, "Classifier")->required()->check(CLI::IsMember({"lwa", "svm"}));
    app.add_option("--input", input, "Training CSV (label,f1,f2,...)")->required();
    app.add_option("--model", model, "Output model file")->required();
    app.add_flag("--normalize", normalize, "Min-max scale features (stored in the model)");
    hp.add_to(app, true);
  }

  int run(std::ostream& out) const {
    if (algo == "svm") {
      reject_if_given(hp.c_opt, algo);
      reject_if_given(hp.lambda_prime_opt, algo);
    }
    hp.validate(algo == "lwa");

    Dataset data = load_csv(input);
    ModelFile file;
    if (normalize) {
      file.normalization = fit_normalizer(data);
      data = apply_normalizer(*file.normalization, data);
    }
    const auto start = std::chrono::steady_clock::now();
    double objective = 0.0;
    if (algo == "lwa") {
      LwaModel m = train_lwa(data, hp.hyper()).model;
      objective = objective_value(data, m);
      file.model = std::move(m);
    } else {
      SvmModel m = train_svm(data, hp.lambda_w, hp.iters, hp.seed).model;
      objective = svm_objective_value(data, m);
      file.model = std::move(m);
    }
    const double elapsed = seconds_since(start);
    save_model(file, model);
    out << "trained " << algo << " on " << data.size() << " examples (dim " << data.dim()
        << "): final objective " << format_double(objective) << ", wall time " << std::fixed << std::setprecision(3)
        << elapsed << " s\n";
    return kExitOk;
  }
};

struct PredictCmd {
  std::string model;
  std::string input;
  std::string output;
  bool no_labels = false;

  void setup(CLI::App& app) {
    app.add_option("--model", model, "Model file from `train`")->required();
    app.add_option("--input", input, "CSV of examples")->required();
    app.add_option("--output", output, "Output CSV (h_score,r_score,outcome)")->required();
    app.add_flag("--no-labels", no_labels, "Input rows carry features only");
  }

  int run(std::ostream& out) const {
    const ModelFile file = load_model(model);
    std::vector<FeatureVector> rows;
    if (no_labels) {
      rows = load_features_csv(input);
    } else {
      for (const auto& e : load_csv(input)) rows.push_back(e.x);
    }

    const std::size_t model_dim = std::visit([](const auto& m) { return m.dim(); }, file.model);
    if (rows.front().size() != model_dim) {
      throw InvalidInput("dimension mismatch: model has " + std::to_string(model_dim) + " features, input has " +
                         std::to_string(rows.front().size()));
    }

    std::string text = "h_score,r_score,outcome\n";
    std::size_t rejected = 0;
    for (const auto& raw : rows) {
      const FeatureVector x = file.normalization ? apply_normalizer(*file.normalization, raw) : raw;
      const PredictionOutcome o = std::visit([&](const auto& m) { return predict(m, x); }, file.model);
      rejected += o.rejected();
      text += format_double(o.h_score) + ',' + (o.r_score ? format_double(*o.r_score) : std::string()) + ',' +
              outcome_text(o) + '\n';
    }
    write_file(output, text);
    out << "predicted " << rows.size() << " examples, " << rejected << " rejected\n";
    return kExitOk;
  }
};

struct SelectionFlags {
  std::vector<double> c;
  std::vector<double> lambda_w;
  std::vector<double> lambda_u;
  double cap = 0.25;

  void add_to(CLI::App& app) {
    app.add_option("--select-c", c, "Nested selection: c values (comma separated)")->delimiter(',');
    app.add_option("--select-lambda", lambda_w, "Nested selection: lambda values")->delimiter(',');
    app.add_option("--select-lambda-prime", lambda_u, "Nested selection: lambda' values")->delimiter(',');
    app.add_option("--abstention-cap", cap, "Nested selection: largest admissible abstention fraction")
        ->capture_default_str();
  }

  bool enabled() const { return !c.empty() || !lambda_w.empty() || !lambda_u.empty(); }

  SelectionGrids grids(const Hyperparameters& base) const {
    SelectionGrids g;
    g.c = c.empty() ? std::vector<double>{base.c} : c;
    g.lambda_w = lambda_w.empty() ? std::vector<double>{base.lambda_w} : lambda_w;
    g.lambda_u = lambda_u.empty() ? std::vector<double>{base.lambda_u} : lambda_u;
    for (double v : g.c) {
      if (!(v > 0.0 && v < 0.5)) throw UsageError("--select-c values must lie in (0, 0.5)");
    }
    for (double v : g.lambda_w) {
      if (!(v > 0.0)) throw UsageError("--select-lambda values must be > 0");
    }
    for (double v : g.lambda_u) {
      if (!(v > 0.0)) throw UsageError("--select-lambda-prime values must be > 0");
    }
    if (!(cap >= 0.0 && cap <= 1.0)) throw UsageError("--abstention-cap must lie in [0, 1]");
    g.abstention_cap = cap;
    return g;
  }
};

void print_table(std::ostream& out, const std::string& algo, const EvalReport& r) {
  auto row = [&](const std::string& name, const std::string& value) {
    out << std::left << std::setw(34) << name << value << '\n';
  };
  out << "leave-one-out evaluation, algo " << algo << ", " << r.per_example.size() << " examples\n";
  row("# Misclassifications", std::to_string(r.n_misclassified));
  row("# Abstentions", algo == "lwa" ? std::to_string(r.n_abstained) : "N/A");
  row("AUC ROC (%)", percent_or_na(r.auc_roc));
  row("Accuracy (%)", percent_or_na(r.accuracy_on_accepted));
  row("Accuracy, rejects as errors (%)", percent_or_na(r.overall_accuracy_counting_rejects_as_errors));
  row("Abstention fraction (%)", percent_or_na(r.abstention_fraction));
}

struct EvaluateCmd {
  std::string algo;
  std::string input;
  std::string report;
  bool normalize = false;
  std::size_t jobs = 0;
  HyperFlags hp;
  SelectionFlags select;

  void setup(CLI::App& app) {
    app.add_option("--algo", algo, "Classifier")->required()->check(CLI::IsMember({"lwa", "svm", "nn"}));
    app.add_option("--input", input, "Dataset CSV")->required();
    app.add_option("--report", report, "Output report (JSON)")->required();
    app.add_flag("--normalize", normalize, "Min-max scale features, refit on each fold's training part");
    app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
    hp.add_to(app, true);
    select.add_to(app);
  }

  int run(std::ostream& out) const {
    Trainer trainer;
    if (algo == "nn") {
      for (const CLI::Option* o : {hp.c_opt, hp.lambda_opt, hp.lambda_prime_opt, hp.iters_opt}) reject_if_given(o, algo);
      if (select.enabled()) throw UsageError("nested selection applies to --algo lwa only");
      trainer = NnTrainer{};
    } else if (algo == "svm") {
      reject_if_given(hp.c_opt, algo);
      reject_if_given(hp.lambda_prime_opt, algo);
      if (select.enabled()) throw UsageError("nested selection applies to --algo lwa only");
      hp.validate(false);
      trainer = SvmTrainer{hp.lambda_w, hp.iters, hp.seed};
    } else {
      hp.validate(true);
      LwaTrainer t{hp.hyper(), std::nullopt};
      if (select.enabled()) t.nested = select.grids(t.hyper);
      trainer = t;
    }

    const Dataset data = load_csv(input);
    const EvalReport rep = loocv(data, trainer, {jobs, normalize});
    write_file(report, serialize_report(rep));
    print_table(out, algo, rep);
    return kExitOk;
  }
};

struct SweepCmd {
  std::string input;
  std::string grid;
  std::string output;
  bool normalize = false;
  std::size_t jobs = 0;
  HyperFlags hp;

  void setup(CLI::App& app) {
    app.add_option("--input", input, "Dataset CSV")->required();
    app.add_option("--c-grid", grid, "Abstention costs as start:stop:step")->required();
    app.add_option("--output", output, "Output table (CSV)")->required();
    app.add_flag("--normalize", normalize, "Min-max scale features, refit on each fold's training part");
    app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
    hp.add_to(app, false);
  }

  int run(std::ostream& out) const {
    std::vector<double> cs;
    try {
      cs = expand_grid(grid);
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
    for (double c : cs) {
      if (!(c > 0.0 && c < 0.5)) throw UsageError("--c-grid values must lie in the open interval (0, 0.5), got " + format_double(c));
    }
    hp.validate(false);

    const Dataset data = load_csv(input);
    Hyperparameters base = hp.hyper();
    base.c = cs.front();
    const std::vector<SweepPoint> points = sweep_c(data, base, cs, {jobs, normalize});
    write_file(output, format_sweep_csv(points));
    for (const auto& p : points) {
      out << "c " << format_double(p.c) << ": abstention " << percent_or_na(p.abstention_fraction)
          << "%, accuracy on accepted " << percent_or_na(p.accuracy_on_accepted) << "%, AUC "
          << percent_or_na(p.auc_roc) << "%\n";
    }
    return kExitOk;
  }
};

struct SynthCmd {
  std::string kind;
  std::size_t n = 0;
  std::size_t dim = 0;
  double separation = -1.0;
  std::uint64_t seed = 0;
  std::string output;
  CLI::Option* dim_opt = nullptr;
  CLI::Option* sep_opt = nullptr;

  void setup(CLI::App& app) {
    app.add_option("--kind", kind, "Generator")
        ->required()
        ->check(CLI::IsMember({"two-blobs", "overlap-blobs", "patch-texture"}));
    app.add_option("--n", n, "Examples per class")->required();
    dim_opt = app.add_option("--dim", dim, "Feature dimension (default 2; 4096 for patch-texture)");
    sep_opt = app.add_option("--separation", separation,
                             "Class-mean distance in standard deviations (default 4 two-blobs, 1 otherwise)");
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--output", output, "Output CSV")->required();
  }

  int run(std::ostream& out) const {
    SynthSpec spec;
    spec.kind = parse_synth_kind(kind);
    spec.n_per_class = n;
    spec.dim = dim_opt->count() ? dim : (spec.kind == SynthKind::PatchTexture ? 4096 : 2);
    spec.separation = sep_opt->count() ? separation : (spec.kind == SynthKind::TwoBlobs ? 4.0 : 1.0);
    spec.seed = seed;
    if (spec.n_per_class < 1) throw UsageError("--n must be >= 1");
    if (spec.dim < 1) throw UsageError("--dim must be >= 1");
    if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) throw UsageError("--separation must be >= 0");

    Dataset data;
    try {
      data = generate_synthetic(spec);
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
    write_csv(data, output);
    out << "wrote " << data.size() << " examples (dim " << data.dim() << ") to " << output << '\n';
    return kExitOk;
  }
};

}  // namespace

std::vector<double> expand_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("grid '" + spec + "' must be start:stop:step");
    }
  }
  if (parts.size() != 3) throw InvalidInput("grid '" + spec + "' must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start) throw InvalidInput("grid '" + spec + "' needs step > 0 and stop >= start");

  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Snap to 12 decimals so 0.1 + 2 * 0.05 prints as 0.2.
    const double v = start + static_cast<double>(k) * step;
    values.push_back(std::round(v * 1e12) / 1e12);
  }
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective classification with a learned reject option"};
  app.name("lwa");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  TrainCmd train;
  PredictCmd predict_cmd;
  EvaluateCmd evaluate;
  SweepCmd sweep;
  SynthCmd synth;
  train.setup(*app.add_subcommand("train", "Train an abstaining (lwa) or plain (svm) linear classifier"));
  predict_cmd.setup(*app.add_subcommand("predict", "Score examples with a saved model"));
  evaluate.setup(*app.add_subcommand("evaluate", "Leave-one-out evaluation"));
  sweep.setup(*app.add_subcommand("sweep", "Leave-one-out evaluation across abstention costs"));
  synth.setup(*app.add_subcommand("synth", "Generate a synthetic dataset"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("train")) return train.run(out);
    if (app.got_subcommand("predict")) return predict_cmd.run(out);
    if (app.got_subcommand("evaluate")) return evaluate.run(out);
    if (app.got_subcommand("sweep")) return sweep.run(out);
    return synth.run(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace lwa::cli
