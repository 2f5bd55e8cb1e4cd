#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include <json.hpp>

#include "lwa/data.hpp"
#include "lwa/eval.hpp"
#include "lwa/solvers.hpp"

using namespace lwa;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lwa_test_data_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse_csv reads labels and features") {
  const Dataset d = parse_csv("-1,0.0,0.5\n+1,1.0,0.25\n");
  REQUIRE(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d[0].y == Label::Normal);
  CHECK(d[1].y == Label::Abnormal);
  CHECK(d[1].x[1] == 0.25);

  const Dataset with_header = parse_csv("label,a,b\r\n1,2,3\r\n\r\n-1,4,5\r\n");
  CHECK(with_header.size() == 2);
  CHECK(with_header[1].x[0] == 4.0);
}

TEST_CASE("parse_csv errors carry their location") {
  CHECK_THROWS_AS(parse_csv(""), ParseError);
  CHECK_THROWS_AS(parse_csv("label,a\n"), ParseError);
  try {
    parse_csv("1,2\n0,1.0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'0'") != std::string::npos);
    CHECK(e.row() == 2);
  }
  try {
    parse_csv("1,2,3\n-1,4\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
  }
  try {
    parse_csv("1,2,3\n-1,4,abc\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(load_csv("/nonexistent/lwa/input.csv"), IoError);
}

TEST_CASE("property: csv round trip is exact") {
  const Dataset d = generate_synthetic({SynthKind::OverlapBlobs, 25, 4, 1.3, 12});
  const Dataset back = parse_csv(format_csv(d));
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back[i].y == d[i].y);
    CHECK(back[i].x == d[i].x);
  }

  const fs::path dir = scratch_dir("csv");
  write_csv(d, dir / "d.csv");
  CHECK(format_csv(load_csv(dir / "d.csv")) == format_csv(d));
}

TEST_CASE("features-only csv") {
  const auto rows = parse_features_csv("0.5,1\n2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == FeatureVector{2.0, 3.0});
}

TEST_CASE("min-max normalization") {
  const Dataset d({{{0.0, 7.0}, Label::Normal}, {{128.0, 7.0}, Label::Abnormal}, {{255.0, 7.0}, Label::Normal}});
  const NormalizationParams p = fit_normalizer(d);
  const Dataset n = apply_normalizer(p, d);
  CHECK(n[0].x[0] == 0.0);
  CHECK(n[1].x[0] == doctest::Approx(128.0 / 255.0));
  CHECK(n[2].x[0] == 1.0);
  for (const auto& e : n) CHECK(e.x[1] == 0.0);

  const FeatureVector outside = apply_normalizer(p, std::vector<double>{510.0, 7.0});
  CHECK(outside[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS(apply_normalizer(p, std::vector<double>{1.0}), InvalidInput);
  CHECK_THROWS_AS(fit_normalizer(Dataset({}, 2)), InvalidInput);
}

TEST_CASE("property: normalization lands in the unit box and is idempotent there") {
  const Dataset d = generate_synthetic({SynthKind::TwoBlobs, 30, 5, 3.0, 3});
  const Dataset n = apply_normalizer(fit_normalizer(d), d);
  for (const auto& e : n) {
    for (double v : e.x) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  const NormalizationParams again = fit_normalizer(n);
  for (std::size_t k = 0; k < n.dim(); ++k) {
    REQUIRE(again.min[k] == 0.0);
    REQUIRE(again.max[k] == 1.0);
  }
  const Dataset twice = apply_normalizer(again, n);
  for (std::size_t i = 0; i < n.size(); ++i) CHECK(twice[i].x == n[i].x);
}

TEST_CASE("synthetic data") {
  const SynthSpec spec{SynthKind::TwoBlobs, 50, 2, 8.0, 7};
  const Dataset a = generate_synthetic(spec), b = generate_synthetic(spec);
  CHECK(format_csv(a) == format_csv(b));
  CHECK(a.count(Label::Normal) == 50);
  CHECK(a.count(Label::Abnormal) == 50);
  CHECK(*loocv(a, NnTrainer{}).accuracy_on_accepted >= 0.99);

  const Dataset patches = generate_synthetic({SynthKind::PatchTexture, 3, 64, 1.0, 1});
  CHECK(patches.dim() == 64);
  CHECK(patches.count(Label::Abnormal) == 3);

  CHECK_THROWS_AS(generate_synthetic({SynthKind::PatchTexture, 3, 60, 1.0, 1}), InvalidInput);
  CHECK_THROWS_AS(generate_synthetic({SynthKind::TwoBlobs, 0, 2, 1.0, 1}), InvalidInput);
  CHECK_THROWS_AS(generate_synthetic({SynthKind::TwoBlobs, 5, 0, 1.0, 1}), InvalidInput);
  CHECK_THROWS_AS(generate_synthetic({SynthKind::TwoBlobs, 5, 2, -1.0, 1}), InvalidInput);

  CHECK(parse_synth_kind("overlap-blobs") == SynthKind::OverlapBlobs);
  CHECK(to_string(SynthKind::PatchTexture) == "patch-texture");
  CHECK_THROWS_AS(parse_synth_kind("spirals"), InvalidInput);
}

TEST_CASE("overlapping blobs are hard for a linear classifier") {
  const Dataset d = generate_synthetic({SynthKind::OverlapBlobs, 100, 2, 1.0, 0});
  const double acc = *loocv(d, SvmTrainer{1e-3, 20000, 0}).accuracy_on_accepted;
  CHECK(acc > 0.5);
  CHECK(acc < 0.95);
}

TEST_CASE("model files round trip bit for bit") {
  const Dataset d = generate_synthetic({SynthKind::OverlapBlobs, 30, 3, 1.0, 5});
  const LwaModel lwa_model = train_lwa(d, {1e-3, 2e-3, 0.37, 3000, 9}).model;
  const SvmModel svm_model = train_svm(d, 1e-2, 3000, 9).model;
  const fs::path dir = scratch_dir("model");

  const NormalizationParams norm = fit_normalizer(d);
  save_model(ModelFile{lwa_model, norm}, dir / "lwa.json");
  save_model(svm_model, dir / "svm.json");
  const ModelFile lwa_back = load_model(dir / "lwa.json");
  const ModelFile svm_back = load_model(dir / "svm.json");
  const auto& l = std::get<LwaModel>(lwa_back.model);
  const auto& s = std::get<SvmModel>(svm_back.model);
  REQUIRE(lwa_back.normalization.has_value());
  CHECK(lwa_back.normalization->max == norm.max);
  CHECK_FALSE(svm_back.normalization.has_value());
  CHECK(l.hyper.c == 0.37);
  CHECK(l.hyper.seed == 9);

  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x{normal(gen), normal(gen), normal(gen)};
    CHECK(score_h(l, x) == score_h(lwa_model, x));
    CHECK(score_r(l, x) == score_r(lwa_model, x));
    CHECK(score_h(s, x) == score_h(svm_model, x));
  }
  CHECK(serialize_model(lwa_back) == read_file(dir / "lwa.json"));
}

TEST_CASE("model file errors") {
  LwaModel m;
  m.w = {1.0, 2.0};
  m.u = {3.0, 4.0};
  const std::string text = serialize_model({m, std::nullopt});
  auto json = nlohmann::json::parse(text);

  auto missing_u = json;
  missing_u.erase("u");
  try {
    deserialize_model(missing_u.dump());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "u");
    CHECK(std::string(e.what()).find("'u'") != std::string::npos);
  }

  auto future = json;
  future["format_version"] = 999;
  CHECK_THROWS_AS(deserialize_model(future.dump()), UnsupportedVersion);

  auto short_w = json;
  short_w["w"] = {1.0};
  CHECK_THROWS_AS(deserialize_model(short_w.dump()), ParseError);
  CHECK_THROWS_AS(deserialize_model("{not json"), ParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/lwa/model.json"), IoError);
}

TEST_CASE("sweep table round trip") {
  std::vector<SweepPoint> points{{0.1, std::nullopt, 1.0, std::nullopt, 0, 10},
                                 {0.45, 0.8125, 0.1, 0.7777777777777778, 2, 1}};
  const std::string text = format_sweep_csv(points);
  CHECK(text.substr(0, text.find('\n')) == kSweepHeader);
  const auto back = parse_sweep_csv(text);
  REQUIRE(back.size() == 2);
  CHECK_FALSE(back[0].auc_roc.has_value());
  CHECK_FALSE(back[0].accuracy_on_accepted.has_value());
  CHECK(back[0].n_abstained == 10);
  CHECK(*back[1].auc_roc == 0.8125);
  CHECK(*back[1].accuracy_on_accepted == 0.7777777777777778);
  CHECK(back[1].c == 0.45);
  CHECK(format_sweep_csv(back) == text);
  CHECK_THROWS_AS(parse_sweep_csv("c,auc\n0.1,0.5\n"), ParseError);
}

TEST_CASE("report serialization lists every example") {
  const Dataset d({{{0.0}, Label::Normal}, {{0.1}, Label::Normal}, {{10.0}, Label::Abnormal}, {{10.1}, Label::Abnormal}});
  const auto json = nlohmann::json::parse(serialize_report(loocv(d, NnTrainer{})));
  CHECK(json["per_example"].size() == 4);
  CHECK(json["accuracy_on_accepted"] == 1.0);
  CHECK(json["per_example"][0]["r_score"].is_null());
}
