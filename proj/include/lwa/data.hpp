#ifndef LWA_DATA_HPP
#define LWA_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lwa/core.hpp"
#include "lwa/eval.hpp"

namespace lwa {

// ---------------------------------------------------------------------------
// CSV datasets
// ---------------------------------------------------------------------------

/**
 * Reads `label,f1,f2,...` rows. Comma separator, '.' decimal point, LF or
 * CRLF line endings, optional header row (detected by a non-numeric first
 * cell). Blank lines are skipped.
 *
 * Throws IoError when the file cannot be read and ParseError (with 1-based
 * row/column) for an empty file, a label outside {-1, +1}, ragged rows or a
 * non-numeric cell.
 */
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text);

/// Feature-only rows (no label column), same dialect as load_csv.
std::vector<FeatureVector> load_features_csv(const std::filesystem::path& path);
std::vector<FeatureVector> parse_features_csv(std::string_view text);

/// Writes the dataset without a header, numbers in shortest round-trip form.
void write_csv(const Dataset& data, const std::filesystem::path& path);
std::string format_csv(const Dataset& data);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Per-feature range observed on training data.
struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;
};

NormalizationParams fit_normalizer(const Dataset& data);

/// (v - min) / (max - min) per feature; constant features map to 0. No clipping.
Dataset apply_normalizer(const NormalizationParams& params, const Dataset& data);
FeatureVector apply_normalizer(const NormalizationParams& params, std::span<const double> x);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

enum class SynthKind { TwoBlobs, OverlapBlobs, PatchTexture };

struct SynthSpec {
  SynthKind kind = SynthKind::TwoBlobs;
  std::size_t n_per_class = 50;
  std::size_t dim = 2;
  /// Distance between class means in units of the within-class standard deviation.
  double separation = 4.0;
  std::uint64_t seed = 0;
};

/**
 * TwoBlobs / OverlapBlobs: isotropic unit-variance Gaussians centered at
 * -(separation/2) e1 (label -1) and +(separation/2) e1 (label +1). The two
 * kinds share the generator; OverlapBlobs names the small-separation regime.
 *
 * PatchTexture: dim must be a perfect square (64 x 64 = 4096 by default).
 * Each example is a box-smoothed Gaussian noise field; abnormal patches are
 * brighter and have higher variance, both scaled by `separation`. The whole
 * dataset is then min-max scaled to [0, 1]. A qualitative stand-in for
 * grayscale image regions of interest, nothing more.
 *
 * Examples are ordered all -1 first, then all +1. Deterministic per seed.
 */
Dataset generate_synthetic(const SynthSpec& spec);

SynthKind parse_synth_kind(std::string_view name);
std::string_view to_string(SynthKind kind);

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<LwaModel, SvmModel>;

/// Model plus the feature normalization it was trained under, if any.
struct ModelFile {
  AnyModel model;
  std::optional<NormalizationParams> normalization;
};

/**
 * JSON text with format_version, kind ("lwa" | "svm"), dim, hyperparameters,
 * weights, biases and an optional normalization block. Doubles are written in
 * shortest round-trip form so a reload reproduces scores bit for bit.
 */
std::string serialize_model(const ModelFile& file);
ModelFile deserialize_model(std::string_view text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
void save_model(const AnyModel& model, const std::filesystem::path& path);
/// Throws UnsupportedVersion for an unknown format_version and ParseError naming a bad field.
ModelFile load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// JSON mirror of EvalReport: summary metrics plus one record per example.
std::string serialize_report(const EvalReport& report);

inline constexpr std::string_view kSweepHeader =
    "c,auc_roc,abstention_fraction,accuracy_on_accepted,n_misclassified,n_abstained";

/// Plot-ready sweep table; undefined metrics are written as "nan".
std::string format_sweep_csv(std::span<const SweepPoint> points);
std::vector<SweepPoint> parse_sweep_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lwa

#endif  // LWA_DATA_HPP
