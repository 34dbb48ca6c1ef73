#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mcroi/error.hpp"
#include "mcroi/filters.hpp"
#include "mcroi/rng.hpp"
#include "mcroi/sim.hpp"
#include "support/fixtures.hpp"

using namespace mcroi;

namespace {

// pairs following an exact affine bbox map
std::vector<std::pair<BBox, BBox>> affine_pairs(Rng& rng, int n) {
  std::vector<std::pair<BBox, BBox>> pairs;
  for (int i = 0; i < n; ++i) {
    BBox src{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 600.0), rng.uniform(20.0, 200.0),
             rng.uniform(20.0, 150.0)};
    BBox dst{0.8 * src.left + 0.1 * src.top + 40.0, 1.1 * src.top - 0.05 * src.left + 7.0,
             0.9 * src.width + 3.0, 1.05 * src.height - 1.0};
    pairs.emplace_back(src, dst);
  }
  return pairs;
}

int count_outliers(const RegressionModel& model) {
  int out = 0;
  for (uint8_t f : model.inlier_flags) out += f ? 0 : 1;
  return out;
}

}  // namespace

TEST_CASE("polynomial feature counts") {
  CHECK(polynomial_feature_count(1) == 5);   // intercept + 4 linear terms
  CHECK(polynomial_feature_count(2) == 15);  // + 10 quadratic terms
}

TEST_CASE("ransac on a noiseless affine map keeps every sample") {
  Rng rng(101);
  auto pairs = affine_pairs(rng, 40);
  FilterConfig config;
  config.seed = 5;
  RegressionModel model = fit_ransac(pairs, config, 1, 2);

  CHECK(count_outliers(model) == 0);
  for (const auto& [src, dst] : pairs) {
    auto pred = model.predict(src);
    CHECK(pred[0] == doctest::Approx(dst.left).epsilon(1e-6));
    CHECK(pred[1] == doctest::Approx(dst.top).epsilon(1e-6));
    CHECK(pred[2] == doctest::Approx(dst.width).epsilon(1e-6));
    CHECK(pred[3] == doctest::Approx(dst.height).epsilon(1e-6));
  }
  CHECK(model.inlier_ratio() == doctest::Approx(1.0));
}

TEST_CASE("planted far boxes are flagged outliers") {
  Rng rng(33);
  auto pairs = affine_pairs(rng, 50);
  // replace dest boxes of the last 5 with far random boxes
  for (int i = 45; i < 50; ++i) {
    pairs[i].second = BBox{rng.uniform(4000.0, 9000.0), rng.uniform(4000.0, 9000.0),
                           rng.uniform(10.0, 50.0), rng.uniform(10.0, 50.0)};
  }
  FilterConfig config;
  config.seed = 5;
  RegressionModel model = fit_ransac(pairs, config, 1, 2);

  for (int i = 0; i < 45; ++i) CHECK(model.inlier_flags[i]);
  for (int i = 45; i < 50; ++i) CHECK(!model.inlier_flags[i]);
}

TEST_CASE("raising theta weakly decreases the outlier count") {
  Rng rng(7);
  auto pairs = affine_pairs(rng, 60);
  // mild noise plus a few gross errors
  for (auto& [src, dst] : pairs) {
    (void)src;
    dst.left += rng.normal() * 1.5;
    dst.top += rng.normal() * 1.5;
  }
  for (int i = 0; i < 6; ++i) {
    pairs[i].second.left += 500.0 + 100.0 * i;
  }
  FilterConfig low;
  low.seed = 9;
  low.theta = 0.05;
  FilterConfig high = low;
  high.theta = 5.0;  // 100x
  int outliers_low = count_outliers(fit_ransac(pairs, low, 1, 2));
  int outliers_high = count_outliers(fit_ransac(pairs, high, 1, 2));
  CHECK(outliers_high <= outliers_low);
  CHECK(outliers_low >= 6);  // the gross errors never fit
}

TEST_CASE("ransac input validation") {
  Rng rng(1);
  FilterConfig config;
  auto few = affine_pairs(rng, 10);  // degree-2 needs 15
  CHECK_THROWS_AS(fit_ransac(few, config, 1, 2), Error);

  // identical source boxes: every minimal sample is rank deficient
  std::vector<std::pair<BBox, BBox>> degenerate;
  for (int i = 0; i < 20; ++i) {
    degenerate.emplace_back(BBox{10, 10, 50, 50}, BBox{20, 20, 50, 50});
  }
  CHECK_THROWS_AS(fit_ransac(degenerate, config, 1, 2), Error);
}

TEST_CASE("near-exact threshold excludes even moderate deviations") {
  Rng rng(12);
  auto pairs = affine_pairs(rng, 20);
  pairs.push_back({BBox{100, 100, 50, 50},
                   BBox{0.8 * 100 + 0.1 * 100 + 40 + 100.0,  // 100 px off
                        1.1 * 100 - 0.05 * 100 + 7, 0.9 * 50 + 3, 1.05 * 50 - 1}});
  FilterConfig config;
  RegressionModel model = fit_ransac(pairs, config, 1, 2);
  // exact-fit samples stay, the 100 px deviation cannot (MAD is ~0)
  CHECK(count_outliers(model) == 1);
  CHECK(!model.inlier_flags.back());
}

TEST_CASE("svm separates well-separated clusters") {
  std::vector<SvmSample> samples;
  Rng rng(2025);
  for (int i = 0; i < 60; ++i) {
    double t = rng.uniform();
    samples.push_back({{0.2 + 0.05 * t, 0.2, 0.05, 0.05}, 1});
    samples.push_back({{0.8 - 0.05 * t, 0.8, 0.05, 0.05}, 0});
  }
  FilterConfig config;
  config.gamma = 50.0;
  SvmModel model = train_svm(samples, config);

  for (const auto& s : samples) {
    double v = model.decision_value(s.features);
    CHECK((s.label == 1 ? v > 0 : v < 0));
  }
  // dual box constraint
  for (double a : model.dual_coefficients) {
    CHECK(std::abs(a) <= config.svm_cost + 1e-9);
  }
  // KKT: free support vectors sit on their margin within tolerance
  for (size_t i = 0; i < model.support_vectors.size(); ++i) {
    if (std::abs(model.dual_coefficients[i]) < config.svm_cost - 1e-6) {
      double y = model.dual_coefficients[i] > 0 ? 1.0 : -1.0;
      double margin = y * model.decision_value(model.support_vectors[i]);
      CHECK(margin == doctest::Approx(1.0).epsilon(5e-3));
    }
  }
}

TEST_CASE("rbf svm fits a ring-vs-blob split only with enough non-linearity") {
  std::vector<SvmSample> samples;
  Rng rng(404);
  for (int i = 0; i < 80; ++i) {
    double angle = rng.uniform(0.0, 6.28318);
    double r = 0.35 + rng.uniform(0.0, 0.05);
    samples.push_back(
        {{0.5 + r * std::cos(angle), 0.5 + r * std::sin(angle), 0.1, 0.1}, 0});
    double br = rng.uniform(0.0, 0.08);
    samples.push_back(
        {{0.5 + br * std::cos(angle), 0.5 + br * std::sin(angle), 0.1, 0.1}, 1});
  }

  FilterConfig sharp;
  sharp.gamma = 200.0;
  SvmModel model = train_svm(samples, sharp);
  int correct = 0;
  for (const auto& s : samples) {
    double v = model.decision_value(s.features);
    if ((v > 0) == (s.label == 1)) correct++;
  }
  CHECK(correct == static_cast<int>(samples.size()));

  FilterConfig flat;
  flat.gamma = 1e-9;  // kernel is numerically constant: underfit
  SvmModel weak = train_svm(samples, flat);
  int weak_correct = 0;
  for (const auto& s : samples) {
    double v = weak.decision_value(s.features);
    if ((v > 0) == (s.label == 1)) weak_correct++;
  }
  CHECK(weak_correct < static_cast<int>(samples.size()));
}

TEST_CASE("svm requires both classes") {
  std::vector<SvmSample> one_class;
  for (int i = 0; i < 10; ++i) one_class.push_back({{0.1, 0.1, 0.1, 0.1}, 1});
  FilterConfig config;
  CHECK_THROWS_AS(train_svm(one_class, config), Error);
}

TEST_CASE("regression filter leaves traces without positive pairs alone") {
  Trace trace = fixtures::two_camera_frame();
  // break the single cross-camera association
  for (auto& rec : trace.records) {
    if (rec.camera_id == 2 && rec.reid_id == 1) rec.reid_id = 50;
  }
  std::map<PairKey, RegressionModel> models;  // none fitted
  Trace out = apply_regression_filter(trace, models);
  CHECK(out.records == trace.records);
}

TEST_CASE("planted false association is rectified with a fresh id") {
  SceneConfig scene = fixtures::two_camera_scene(/*seed=*/11, /*objects=*/16,
                                                 /*frames=*/80);
  scene.error_rates = {{1, 2, 0.10, 0.0}};  // only FP plants
  auto [trace, log] = generate_scene(scene);

  int64_t planted = 0;
  for (const auto& e : log) {
    if (e.kind == "fp") planted++;
  }
  REQUIRE(planted >= 3);

  FilterConfig config;
  config.seed = 3;
  config.gamma = 200.0;
  config.svm_cost = 10.0;
  auto [filtered, report] = run_filter_pipeline(trace, config);

  CHECK(filtered.records.size() <= trace.records.size());
  CHECK(report.records_rectified > 0);

  // every planted record should have lost its borrowed id
  int64_t still_borrowed = 0;
  std::set<std::tuple<int, int, int64_t>> planted_keys;
  for (const auto& e : log) {
    if (e.kind == "fp") planted_keys.insert({e.frame, e.camera, e.object});
  }
  for (const auto& rec : filtered.records) {
    auto key = std::make_tuple(rec.frame_index, rec.camera_id, *rec.gt_id);
    if (planted_keys.count(key) && rec.reid_id != *rec.gt_id &&
        rec.reid_id <= scene.object_count) {
      still_borrowed++;  // still pointing at some other real object
    }
  }
  CHECK(still_borrowed == 0);
}

TEST_CASE("regression filter application is idempotent") {
  SceneConfig scene = fixtures::two_camera_scene(/*seed=*/21, 16, 80);
  scene.error_rates = {{1, 2, 0.08, 0.0}};
  auto [trace, log] = generate_scene(scene);
  (void)log;

  // fit models the way the pipeline does, on the raw trace
  FilterConfig config;
  config.seed = 17;
  std::map<PairKey, RegressionModel> models;
  for (int s : {1, 2}) {
    for (int d : {1, 2}) {
      if (s == d) continue;
      std::vector<std::pair<BBox, BBox>> pairs;
      std::map<int, std::map<int64_t, BBox>> dest;
      for (const auto& rec : trace.records) {
        if (rec.camera_id == d) dest[rec.frame_index].try_emplace(rec.reid_id, rec.box);
      }
      for (const auto& rec : trace.records) {
        if (rec.camera_id != s) continue;
        auto it = dest.find(rec.frame_index);
        if (it == dest.end()) continue;
        auto match = it->second.find(rec.reid_id);
        if (match != it->second.end()) pairs.emplace_back(rec.box, match->second);
      }
      if (pairs.size() >= 15) {
        FilterConfig c = config;
        c.seed = Rng::mix(config.seed, s, d);
        models.emplace(PairKey{s, d}, fit_ransac(pairs, c, s, d));
      }
    }
  }
  REQUIRE(!models.empty());

  Trace once = apply_regression_filter(trace, models);
  Trace twice = apply_regression_filter(once, models);
  CHECK(once.records == twice.records);
  CHECK(once.records.size() == trace.records.size());
}

TEST_CASE("svm filter removes planted id-splits inside the overlap") {
  SceneConfig scene = fixtures::two_camera_scene(/*seed=*/31, 18, 80);
  scene.error_rates = {{1, 2, 0.0, 0.20}};
  auto [trace, log] = generate_scene(scene);

  std::set<std::tuple<int, int, int64_t>> planted;
  for (const auto& e : log) {
    if (e.kind == "fn") planted.insert({e.frame, e.camera, e.object});
  }
  REQUIRE(planted.size() >= 10);

  FilterConfig config;
  config.seed = 3;
  config.gamma = 50.0;  // wide enough that isolated planted negatives cannot be carved out
  auto [filtered, report] = run_filter_pipeline(trace, config);
  CHECK(report.records_removed > 0);

  int64_t surviving = 0;
  for (const auto& rec : filtered.records) {
    if (planted.count({rec.frame_index, rec.camera_id, *rec.gt_id})) surviving++;
  }
  double removed_frac =
      1.0 - static_cast<double>(surviving) / static_cast<double>(planted.size());
  CHECK(removed_frac >= 0.9);
}

TEST_CASE("filter pipeline leaves a perfect trace intact") {
  SceneConfig scene = fixtures::two_camera_scene(/*seed=*/47, 14, 70);
  auto [trace, log] = generate_scene(scene);
  CHECK(log.empty());

  FilterConfig config;
  config.seed = 3;
  config.gamma = 200.0;
  config.svm_cost = 10.0;
  auto [filtered, report] = run_filter_pipeline(trace, config);
  CHECK(report.records_rectified == 0);
  CHECK(report.records_removed == 0);
  CHECK(filtered.records == trace.records);
}

TEST_CASE("filter pipeline reduces pairwise label errors") {
  SceneConfig scene = fixtures::two_camera_scene(/*seed=*/61, 18, 80);
  scene.error_rates = {{1, 2, 0.10, 0.20}, {2, 1, 0.10, 0.20}};
  auto [trace, log] = generate_scene(scene);
  REQUIRE(!log.empty());

  FilterConfig config;
  config.seed = 3;
  config.gamma = 200.0;
  config.svm_cost = 10.0;
  auto [filtered, report] = run_filter_pipeline(trace, config);
  (void)report;

  PairLabelCounts before = label_pairwise(trace, 1, 2);
  PairLabelCounts after = label_pairwise(filtered, 1, 2);
  CHECK(after.fp + after.fn < before.fp + before.fn);
}

TEST_CASE("filter pipeline is deterministic") {
  SceneConfig scene = fixtures::two_camera_scene(/*seed=*/71, 14, 60);
  scene.error_rates = {{1, 2, 0.05, 0.15}};
  auto [trace, log] = generate_scene(scene);
  (void)log;

  FilterConfig config;
  config.seed = 99;
  config.gamma = 200.0;
  auto [out1, rep1] = run_filter_pipeline(trace, config);
  auto [out2, rep2] = run_filter_pipeline(trace, config);
  CHECK(out1.records == out2.records);
  CHECK(rep1.records_rectified == rep2.records_rectified);
  CHECK(rep1.records_removed == rep2.records_removed);
}

TEST_CASE("empty trace passes through the pipeline") {
  Trace trace;
  trace.frame_rate_hz = 10.0;
  trace.cameras = {FrameSpec{1, 640, 384, 64}};
  FilterConfig config;
  auto [out, report] = run_filter_pipeline(trace, config);
  CHECK(out.records.empty());
  CHECK(report.records_rectified == 0);
  CHECK(report.records_removed == 0);
}
