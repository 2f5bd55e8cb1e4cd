#include "lwa/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lwa/rng.hpp"

namespace lwa {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

struct CsvRow {
  std::size_t line_no;
  std::vector<std::string_view> cells;
};

// Non-blank rows with the header (if any) removed.
std::vector<CsvRow> csv_rows(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    rows.push_back({line_no, split_cells(line)});
  }
  if (!rows.empty() && !parse_number(rows.front().cells.front())) rows.erase(rows.begin());
  if (rows.empty()) throw ParseError("no data rows");
  return rows;
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

FeatureVector parse_features(const CsvRow& row, std::size_t first_col) {
  FeatureVector x;
  x.reserve(row.cells.size() - first_col);
  for (std::size_t c = first_col; c < row.cells.size(); ++c) {
    const auto v = parse_number(row.cells[c]);
    if (!v || !std::isfinite(*v)) {
      throw ParseError("non-numeric cell '" + std::string(trim(row.cells[c])) + "' at " + location(row.line_no, c + 1),
                       row.line_no, c + 1);
    }
    x.push_back(*v);
  }
  return x;
}

void check_width(const CsvRow& row, std::size_t expected) {
  if (row.cells.size() != expected) {
    throw ParseError("row " + std::to_string(row.line_no) + " has " + std::to_string(row.cells.size()) +
                         " columns, expected " + std::to_string(expected),
                     row.line_no);
  }
}

}  // namespace

Dataset parse_csv(std::string_view text) {
  const std::vector<CsvRow> rows = csv_rows(text);
  const std::size_t width = rows.front().cells.size();
  if (width < 2) throw ParseError("rows need a label and at least one feature", rows.front().line_no);

  std::vector<LabeledExample> examples;
  examples.reserve(rows.size());
  for (const auto& row : rows) {
    check_width(row, width);
    const auto label = parse_number(row.cells[0]);
    if (!label || (*label != -1.0 && *label != 1.0)) {
      throw ParseError("invalid label '" + std::string(trim(row.cells[0])) + "' at row " +
                           std::to_string(row.line_no) + " (expected -1 or +1)",
                       row.line_no, 1);
    }
    examples.push_back({parse_features(row, 1), *label > 0 ? Label::Abnormal : Label::Normal});
  }
  return Dataset(std::move(examples), width - 1);
}

Dataset load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::vector<FeatureVector> parse_features_csv(std::string_view text) {
  const std::vector<CsvRow> rows = csv_rows(text);
  const std::size_t width = rows.front().cells.size();
  std::vector<FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    check_width(row, width);
    out.push_back(parse_features(row, 0));
  }
  return out;
}

std::vector<FeatureVector> load_features_csv(const std::filesystem::path& path) {
  return parse_features_csv(read_file(path));
}

std::string format_csv(const Dataset& data) {
  std::string out;
  for (const auto& e : data) {
    out += e.y == Label::Abnormal ? "+1" : "-1";
    for (double v : e.x) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) { write_file(path, format_csv(data)); }

NormalizationParams fit_normalizer(const Dataset& data) {
  if (data.empty()) throw InvalidInput("cannot fit normalization on an empty dataset");
  NormalizationParams p{data[0].x, data[0].x};
  for (const auto& e : data) {
    for (std::size_t k = 0; k < data.dim(); ++k) {
      p.min[k] = std::min(p.min[k], e.x[k]);
      p.max[k] = std::max(p.max[k], e.x[k]);
    }
  }
  return p;
}

FeatureVector apply_normalizer(const NormalizationParams& params, std::span<const double> x) {
  if (x.size() != params.min.size() || params.max.size() != params.min.size()) {
    throw InvalidInput("dimension mismatch: normalization has " + std::to_string(params.min.size()) +
                       " features, input has " + std::to_string(x.size()));
  }
  FeatureVector out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double range = params.max[k] - params.min[k];
    out[k] = range > 0.0 ? (x[k] - params.min[k]) / range : 0.0;
  }
  return out;
}

Dataset apply_normalizer(const NormalizationParams& params, const Dataset& data) {
  if (data.dim() != params.min.size()) {
    throw InvalidInput("dimension mismatch: normalization has " + std::to_string(params.min.size()) +
                       " features, dataset has " + std::to_string(data.dim()));
  }
  std::vector<LabeledExample> out;
  out.reserve(data.size());
  for (const auto& e : data) out.push_back({apply_normalizer(params, e.x), e.y});
  return Dataset(std::move(out), data.dim());
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "two-blobs") return SynthKind::TwoBlobs;
  if (name == "overlap-blobs") return SynthKind::OverlapBlobs;
  if (name == "patch-texture") return SynthKind::PatchTexture;
  throw InvalidInput("unknown synthetic kind '" + std::string(name) + "'");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::TwoBlobs: return "two-blobs";
    case SynthKind::OverlapBlobs: return "overlap-blobs";
    case SynthKind::PatchTexture: return "patch-texture";
  }
  return "unknown";
}

namespace {

std::vector<LabeledExample> gaussian_blobs(const SynthSpec& spec, Rng& rng) {
  std::vector<LabeledExample> out;
  out.reserve(2 * spec.n_per_class);
  for (Label y : {Label::Normal, Label::Abnormal}) {
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      FeatureVector x(spec.dim);
      for (double& v : x) v = rng.normal();
      x[0] += 0.5 * spec.separation * sign(y);
      out.push_back({std::move(x), y});
    }
  }
  return out;
}

// Separable box blur with clamped borders.
std::vector<double> box_blur(const std::vector<double>& img, std::size_t side, int radius) {
  auto pass = [&](const std::vector<double>& src, bool horizontal) {
    std::vector<double> dst(src.size());
    const auto n = static_cast<long>(side);
    for (long row = 0; row < n; ++row) {
      for (long col = 0; col < n; ++col) {
        double s = 0.0;
        for (long o = -radius; o <= radius; ++o) {
          const long rr = horizontal ? row : std::clamp(row + o, 0L, n - 1);
          const long cc = horizontal ? std::clamp(col + o, 0L, n - 1) : col;
          s += src[static_cast<std::size_t>(rr * n + cc)];
        }
        dst[static_cast<std::size_t>(row * n + col)] = s / static_cast<double>(2 * radius + 1);
      }
    }
    return dst;
  };
  return pass(pass(img, true), false);
}

std::vector<LabeledExample> patch_texture(const SynthSpec& spec, Rng& rng) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(spec.dim))));
  if (side * side != spec.dim) throw InvalidInput("patch-texture dim must be a perfect square (e.g. 4096)");
  constexpr int kRadius = 2;
  // Interior std of a (2r+1)^2 box average of unit white noise.
  constexpr double kBlurStd = 1.0 / (2 * kRadius + 1);

  std::vector<LabeledExample> out;
  out.reserve(2 * spec.n_per_class);
  for (Label y : {Label::Normal, Label::Abnormal}) {
    const bool abnormal = y == Label::Abnormal;
    const double brightness = abnormal ? 0.25 * spec.separation : 0.0;
    const double amplitude = abnormal ? 1.0 + 0.5 * spec.separation : 1.0;
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      std::vector<double> noise(spec.dim);
      for (double& v : noise) v = rng.normal();
      FeatureVector x = box_blur(noise, side, kRadius);
      for (double& v : x) v = brightness + amplitude * v / kBlurStd;
      out.push_back({std::move(x), y});
    }
  }

  double lo = out.front().x.front(), hi = lo;
  for (const auto& e : out) {
    const auto [mn, mx] = std::minmax_element(e.x.begin(), e.x.end());
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
  }
  const double range = hi > lo ? hi - lo : 1.0;
  for (auto& e : out) {
    for (double& v : e.x) v = (v - lo) / range;
  }
  return out;
}

}  // namespace

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.n_per_class < 1) throw InvalidInput("n_per_class must be >= 1");
  if (spec.dim < 1) throw InvalidInput("dim must be >= 1");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) throw InvalidInput("separation must be >= 0");

  Rng rng(spec.seed);
  std::vector<LabeledExample> examples =
      spec.kind == SynthKind::PatchTexture ? patch_texture(spec, rng) : gaussian_blobs(spec, rng);
  return Dataset(std::move(examples), spec.dim);
}

// ---------------------------------------------------------------------------
// Model files

namespace {

const json& require(const json& obj, const char* field) {
  if (!obj.is_object() || !obj.contains(field)) {
    throw ParseError(std::string("missing field '") + field + "'", 0, 0, field);
  }
  return obj.at(field);
}

double require_number(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_number()) throw ParseError(std::string("field '") + field + "' must be a number", 0, 0, field);
  return v.get<double>();
}

std::uint64_t require_count(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_number_unsigned()) {
    throw ParseError(std::string("field '") + field + "' must be a non-negative integer", 0, 0, field);
  }
  return v.get<std::uint64_t>();
}

std::vector<double> require_array(const json& obj, const char* field, std::size_t dim) {
  const json& v = require(obj, field);
  if (!v.is_array() || v.size() != dim) {
    throw ParseError(std::string("field '") + field + "' must be an array of " + std::to_string(dim) + " numbers", 0,
                     0, field);
  }
  std::vector<double> out;
  out.reserve(dim);
  for (const auto& e : v) {
    if (!e.is_number()) throw ParseError(std::string("field '") + field + "' holds a non-number", 0, 0, field);
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
  json j;
  j["format_version"] = kModelFormatVersion;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        j["dim"] = m.dim();
        j["w"] = m.w;
        j["b"] = m.b;
        if constexpr (std::is_same_v<T, LwaModel>) {
          j["kind"] = "lwa";
          j["hyperparameters"] = {{"lambda_w", m.hyper.lambda_w},
                                  {"lambda_u", m.hyper.lambda_u},
                                  {"c", m.hyper.c},
                                  {"iterations", m.hyper.iterations},
                                  {"seed", m.hyper.seed}};
          j["u"] = m.u;
          j["b_prime"] = m.b_prime;
        } else {
          j["kind"] = "svm";
          j["hyperparameters"] = {{"lambda_w", m.lambda_w}, {"iterations", m.iterations}, {"seed", m.seed}};
        }
      },
      file.model);
  if (file.normalization) j["normalization"] = {{"min", file.normalization->min}, {"max", file.normalization->max}};
  return j.dump(2) + "\n";
}

ModelFile deserialize_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  const json& version = require(j, "format_version");
  if (!version.is_number_integer()) throw ParseError("field 'format_version' must be an integer", 0, 0, "format_version");
  if (version.get<long long>() != kModelFormatVersion) {
    throw UnsupportedVersion("unsupported model format_version " + version.dump() + " (supported: " +
                             std::to_string(kModelFormatVersion) + ")");
  }

  const json& kind = require(j, "kind");
  const auto dim = static_cast<std::size_t>(require_count(j, "dim"));
  if (dim == 0) throw ParseError("field 'dim' must be positive", 0, 0, "dim");
  const json& hp = require(j, "hyperparameters");

  ModelFile file;
  if (kind == "lwa") {
    LwaModel m;
    m.hyper.lambda_w = require_number(hp, "lambda_w");
    m.hyper.lambda_u = require_number(hp, "lambda_u");
    m.hyper.c = require_number(hp, "c");
    m.hyper.iterations = require_count(hp, "iterations");
    m.hyper.seed = require_count(hp, "seed");
    m.w = require_array(j, "w", dim);
    m.u = require_array(j, "u", dim);
    m.b = require_number(j, "b");
    m.b_prime = require_number(j, "b_prime");
    file.model = std::move(m);
  } else if (kind == "svm") {
    SvmModel m;
    m.lambda_w = require_number(hp, "lambda_w");
    m.iterations = require_count(hp, "iterations");
    m.seed = require_count(hp, "seed");
    m.w = require_array(j, "w", dim);
    m.b = require_number(j, "b");
    file.model = std::move(m);
  } else {
    throw ParseError("field 'kind' must be \"lwa\" or \"svm\"", 0, 0, "kind");
  }

  if (j.contains("normalization")) {
    const json& n = j.at("normalization");
    file.normalization = NormalizationParams{require_array(n, "min", dim), require_array(n, "max", dim)};
  }
  return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) { write_file(path, serialize_model(file)); }

void save_model(const AnyModel& model, const std::filesystem::path& path) { save_model(ModelFile{model, {}}, path); }

ModelFile load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

// ---------------------------------------------------------------------------
// Reports

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string outcome_text(const PredictionOutcome& o) {
  if (o.rejected()) return "REJECT";
  return *o.label == Label::Abnormal ? "+1" : "-1";
}

}  // namespace

std::string serialize_report(const EvalReport& report) {
  json records = json::array();
  for (std::size_t i = 0; i < report.per_example.size(); ++i) {
    const auto& rec = report.per_example[i];
    records.push_back({{"index", i},
                       {"true_label", static_cast<int>(rec.truth)},
                       {"outcome", outcome_text(rec.outcome)},
                       {"h_score", rec.outcome.h_score},
                       {"r_score", optional_number(rec.outcome.r_score)}});
  }
  json j;
  j["n_examples"] = report.per_example.size();
  j["n_misclassified"] = report.n_misclassified;
  j["n_abstained"] = report.n_abstained;
  j["abstention_fraction"] = report.abstention_fraction;
  j["accuracy_on_accepted"] = optional_number(report.accuracy_on_accepted);
  j["overall_accuracy_counting_rejects_as_errors"] = report.overall_accuracy_counting_rejects_as_errors;
  j["auc_roc"] = optional_number(report.auc_roc);
  j["per_example"] = std::move(records);
  return j.dump(2) + "\n";
}

namespace {

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : "nan"; }

std::optional<double> optional_from(std::string_view cell, std::size_t row, std::size_t col) {
  const auto v = parse_number(cell);
  if (!v) throw ParseError("non-numeric cell at " + location(row, col), row, col);
  if (std::isnan(*v)) return std::nullopt;
  return v;
}

}  // namespace

std::string format_sweep_csv(std::span<const SweepPoint> points) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& p : points) {
    out += format_double(p.c) + ',' + optional_text(p.auc_roc) + ',' + format_double(p.abstention_fraction) + ',' +
           optional_text(p.accuracy_on_accepted) + ',' + std::to_string(p.n_misclassified) + ',' +
           std::to_string(p.n_abstained) + '\n';
  }
  return out;
}

std::vector<SweepPoint> parse_sweep_csv(std::string_view text) {
  const std::size_t first_newline = text.find('\n');
  if (trim(text.substr(0, first_newline)) != kSweepHeader) throw ParseError("sweep table header mismatch", 1);
  std::vector<SweepPoint> points;
  std::size_t row_no = 1;
  for (const auto& row : csv_rows(text)) {
    row_no = row.line_no;
    check_width(row, 6);
    SweepPoint p;
    p.c = optional_from(row.cells[0], row_no, 1).value_or(0.0);
    p.auc_roc = optional_from(row.cells[1], row_no, 2);
    p.abstention_fraction = optional_from(row.cells[2], row_no, 3).value_or(0.0);
    p.accuracy_on_accepted = optional_from(row.cells[3], row_no, 4);
    p.n_misclassified = static_cast<std::size_t>(optional_from(row.cells[4], row_no, 5).value_or(0.0));
    p.n_abstained = static_cast<std::size_t>(optional_from(row.cells[5], row_no, 6).value_or(0.0));
    points.push_back(p);
  }
  return points;
}

}  // namespace lwa
